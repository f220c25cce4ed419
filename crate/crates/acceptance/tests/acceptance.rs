//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use lis_assign::assign::{brute_force_lbap, brute_force_lsap, kuhn_munkres, threshold_algorithm, CostMatrix};
use lis_assign::experiments::{
    run_rate_sweep, run_sir_study, sir_csv, sweep_csv, Method, RssMode, SweepConfig, SweepResult, SweepVariable,
    DEFAULT_POWER_GRID_DB,
};
use lis_assign::field::{coupling, eta_metric, rss_center_estimate, unit_block, Channel, QuadratureSpec};
use lis_assign::scenario::{seeded_rng, LisUnit, Point3, SamplingConfig, User, UserBox};
use lis_assign_acceptance::{argmax, tol, within, Verdict};
use rand::Rng;

const LAMBDA: f64 = 0.125;

type Check = (bool, String);

fn timed(id: u32, title: &'static str, f: impl FnOnce() -> Check) -> Verdict {
    let start = Instant::now();
    let (pass, detail) = f();
    let v = Verdict {
        id,
        title,
        pass,
        detail,
        elapsed: start.elapsed(),
    };
    println!("{v}");
    v
}

fn sir_fraction(side: f64) -> (f64, Vec<u8>) {
    let study = run_sir_study(side, LAMBDA, tol::SIR_TRIALS, tol::SEED, &QuadratureSpec::default()).expect("sir study");
    (study.cdf(tol::SIR_THRESHOLD_DB), sir_csv(&study).expect("csv"))
}

fn sir_check(side: f64, frac: f64, target: (f64, f64), on_time: bool) -> Check {
    (
        within(frac, target) && on_time,
        format!(
            "L={side}: fraction at or below -20 dB = {frac} over {} trials (target {} ± {})",
            tol::SIR_TRIALS,
            target.0,
            target.1
        ),
    )
}

fn random_matrix(rng: &mut impl Rng, k: usize, m: usize, quantized: bool) -> CostMatrix {
    let entries = (0..k * m)
        .map(|_| {
            if quantized {
                -(rng.gen_range(1..=8) as f64) / 8.0
            } else {
                -rng.gen::<f64>()
            }
        })
        .collect();
    CostMatrix::new(k, m, entries).expect("valid matrix")
}

/// Criteria 3 and 4 share the instances.
fn solver_checks() -> (Check, Check) {
    let start = Instant::now();
    let mut rng = seeded_rng(tol::SEED, 3);
    let (mut cases, mut sum_bad, mut bot_bad) = (0usize, 0usize, 0usize);
    let mut worst_cert: f64 = 0.0;
    for m in 1..=tol::SOLVER_MAX_UNITS {
        for k in 1..=m {
            for i in 0..tol::SOLVER_CASES_PER_SHAPE {
                let cost = random_matrix(&mut rng, k, m, i % 4 == 3);
                let lsap = kuhn_munkres(&cost).expect("lsap");
                let lbap = threshold_algorithm(&cost).expect("lbap");
                let bs = brute_force_lsap(&cost).expect("oracle");
                let bb = brute_force_lbap(&cost).expect("oracle");
                let a = &lsap.assignment;
                let sum_ok = a.validate(m).is_ok()
                    && a.value.to_bits() == bs.value.to_bits()
                    && cost.sum_cost(&a.mapping).to_bits() == bs.value.to_bits();
                let b = &lbap.assignment;
                let bot_ok = b.validate(m).is_ok()
                    && b.value.to_bits() == bb.value.to_bits()
                    && cost.bottleneck_cost(&b.mapping).to_bits() == bb.value.to_bits();
                sum_bad += usize::from(!sum_ok);
                bot_bad += usize::from(!bot_ok);
                worst_cert = worst_cert.max(lsap.certificate_violation(&cost));
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let exact = (
        sum_bad == 0 && bot_bad == 0 && elapsed <= Duration::from_secs(60),
        format!(
            "{cases} matrices over all K <= M <= {}: {sum_bad} LSAP and {bot_bad} LBAP mismatches vs enumeration in {:.1}s",
            tol::SOLVER_MAX_UNITS,
            elapsed.as_secs_f64()
        ),
    );
    let cert = (
        worst_cert <= tol::CERTIFICATE,
        format!("largest labeling violation {worst_cert:e} (limit {:e})", tol::CERTIFICATE),
    );
    (exact, cert)
}

fn infinite_plane() -> Check {
    let solid = |side: f64| {
        let a = side / 2.0;
        (a * a / (2.0 * a * a + 1.0).sqrt()).atan() / std::f64::consts::PI
    };
    let user = Channel::los(Point3::new(0.0, 0.0, 1.0));
    let vals: Vec<f64> = tol::PLANE_SIDES
        .iter()
        .map(|&s| {
            let u = LisUnit::new(0.0, 0.0, s).unwrap();
            coupling(&u, &user, &user, LAMBDA, &QuadratureSpec::default()).unwrap().value.re
        })
        .collect();
    let monotone = vals.windows(2).all(|w| w[0] < w[1]);
    let (lo, hi) = tol::PLANE_WINDOW;
    let inside = vals.iter().all(|&v| lo < v && v < hi);
    let parts: Vec<String> = tol::PLANE_SIDES
        .iter()
        .zip(&vals)
        .map(|(s, v)| format!("L={s}: {v:.6} (closed form {:.6})", solid(*s)))
        .collect();
    (
        monotone && inside,
        format!("{}; monotone={monotone}, all in ({lo}, {hi})={inside}", parts.join(", ")),
    )
}

fn convergence() -> Check {
    let mut rng = seeded_rng(tol::SEED, 6);
    let quad = QuadratureSpec::default();
    let (mut worst_diag, mut worst_off): (f64, f64) = (0.0, 0.0);
    for _ in 0..tol::CONVERGENCE_CASES {
        let side = rng.gen_range(0.1..1.0);
        let unit = LisUnit::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), side).unwrap();
        let region = UserBox::symmetric(2.0, 4.0);
        let chans = [Channel::los(region.sample(&mut rng)), Channel::los(region.sample(&mut rng))];
        let coarse = unit_block(&unit, &chans, LAMBDA, &quad).unwrap();
        let fine = unit_block(&unit, &chans, LAMBDA, &quad.halved()).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                let (a, b) = (coarse.get(k, l), fine.get(k, l));
                let rel = (a - b).norm() / b.norm();
                if k == l {
                    worst_diag = worst_diag.max(rel);
                } else {
                    worst_off = worst_off.max(rel);
                }
            }
        }
    }
    let worst = worst_diag.max(worst_off);
    (
        worst < tol::CONVERGENCE_REL,
        format!(
            "{} configurations, largest relative change under panel halving: self {worst_diag:e}, cross {worst_off:e} (limit {:e})",
            tol::CONVERGENCE_CASES,
            tol::CONVERGENCE_REL
        ),
    )
}

fn los_sweep() -> SweepResult {
    let cfg = SweepConfig {
        trials: tol::SWEEP_TRIALS,
        seed: tol::SEED,
        ..Default::default()
    };
    run_rate_sweep(&cfg).expect("LoS sweep")
}

fn means(res: &SweepResult, m: Method) -> Vec<f64> {
    res.points.iter().map(|p| p.mean(m).expect("method present")).collect()
}

fn failed_note(res: &SweepResult) -> String {
    format!("{} failed trials", res.failed_count())
}

fn sum_rate_gap(res: &SweepResult, budget: Option<(Duration, Duration)>) -> Check {
    let (lsap, brute, random) = (means(res, Method::Lsap), means(res, Method::BruteSum), means(res, Method::RandomSum));
    let mut ok = budget.is_none_or(|(took, limit)| took <= limit);
    let mut parts = Vec::new();
    for (i, p) in res.points.iter().enumerate() {
        let ratio = lsap[i] / brute[i];
        ok &= ratio >= tol::SUM_RATE_RATIO && lsap[i] > random[i];
        parts.push(format!("L={}: {:.4} (random {:.4})", p.value, ratio, random[i] / brute[i]));
    }
    (
        ok,
        format!("LSAP/brute mean sum-rate {}; {}", parts.join(", "), failed_note(res)),
    )
}

fn min_rate_gap(res: &SweepResult) -> Check {
    let (lbap, brute, random) = (means(res, Method::Lbap), means(res, Method::BruteMin), means(res, Method::RandomMin));
    let (lo, hi) = tol::MIN_RATE_RATIO;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, p) in res.points.iter().enumerate() {
        let ratio = lbap[i] / brute[i];
        ok &= lo <= ratio && ratio <= hi && lbap[i] > random[i];
        parts.push(format!("L={}: {:.4} (random {:.4})", p.value, ratio, random[i] / brute[i]));
    }
    (ok, format!("LBAP/brute mean min-rate {}", parts.join(", ")))
}

fn unimodal(res: &SweepResult) -> Check {
    let grid: Vec<f64> = res.points.iter().map(|p| p.value).collect();
    let last = grid.len() - 1;
    let lsap = means(res, Method::Lsap);
    let brute = means(res, Method::BruteSum);
    let (a, b) = (argmax(&lsap), argmax(&brute));
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
    (
        a != 0 && a != last && b != 0 && b != last,
        format!(
            "normalized sum-rate over L={grid:?}: lsap [{}] peaks at L={}, brute [{}] peaks at L={}",
            fmt(&lsap),
            grid[a],
            fmt(&brute),
            grid[b]
        ),
    )
}

fn hall_study() -> Check {
    let user_box = UserBox::default();
    let cfg = SweepConfig {
        base: SamplingConfig {
            num_units: 5,
            hall: Some(user_box.as_hall(tol::HALL_ATTENUATION_DB)),
            user_box,
            ..Default::default()
        },
        trials: tol::SWEEP_TRIALS,
        seed: tol::SEED,
        ..Default::default()
    };
    let res = run_rate_sweep(&cfg).expect("hall sweep");
    let (lsap, brute, random) = (means(&res, Method::Lsap), means(&res, Method::BruteSum), means(&res, Method::RandomSum));
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, p) in res.points.iter().enumerate() {
        let ratio = lsap[i] / brute[i];
        if p.value >= tol::HALL_SIDE_FLOOR {
            ok &= ratio >= tol::SUM_RATE_RATIO && lsap[i] > random[i];
        }
        parts.push(format!("L={}: {ratio:.4}", p.value));
    }
    (
        ok,
        format!(
            "LSAP/brute mean sum-rate with -3 dB walls {} (gated for L >= {}); {}",
            parts.join(", "),
            tol::HALL_SIDE_FLOOR,
            failed_note(&res)
        ),
    )
}

fn center_sweep() -> SweepResult {
    let cfg = SweepConfig {
        base: SamplingConfig {
            num_units: 5,
            side: tol::CENTER_SIDE,
            ..Default::default()
        },
        variable: SweepVariable::PowerDb,
        grid: DEFAULT_POWER_GRID_DB.to_vec(),
        rss_mode: RssMode::Center,
        trials: tol::SWEEP_TRIALS,
        seed: tol::SEED,
        ..Default::default()
    };
    run_rate_sweep(&cfg).expect("center sweep")
}

fn center_variant(res: &SweepResult) -> Check {
    let (full_min, center_min) = (means(res, Method::Lbap), means(res, Method::CenterLbap));
    let (full_sum, center_sum) = (means(res, Method::Lsap), means(res, Method::CenterLsap));
    let mut ok = true;
    let (mut worst_short, mut worst_sum): (f64, f64) = (0.0, 0.0);
    for i in 0..res.points.len() {
        let short = 1.0 - center_min[i] / full_min[i];
        let sum_dev = (center_sum[i] / full_sum[i] - 1.0).abs();
        ok &= center_min[i] <= full_min[i] && short <= tol::CENTER_MIN_SHORTFALL && sum_dev <= tol::CENTER_SUM_AGREEMENT;
        worst_short = worst_short.max(short);
        worst_sum = worst_sum.max(sum_dev);
    }
    let same = res
        .points
        .iter()
        .flat_map(|p| &p.reports)
        .filter(|r| {
            let map = |m| r.outcomes.iter().find(|o| o.method == m).map(|o| o.mapping.clone());
            map(Method::Lsap) == map(Method::CenterLsap)
        })
        .count();
    let total: usize = res.points.iter().map(|p| p.reports.len()).sum();
    (
        ok,
        format!(
            "P grid {:?} dB: largest min-rate shortfall {worst_short:.3e}, largest sum-rate deviation {worst_sum:.3e}; \
             center LSAP mapping equals full LSAP in {same}/{total} trials",
            DEFAULT_POWER_GRID_DB
        ),
    )
}

fn far_field() -> Check {
    let side = tol::CENTER_SIDE;
    let unit = LisUnit::new(0.0, 0.0, side).unwrap();
    let region = UserBox::symmetric(4.0, 8.0);
    let mut rng = seeded_rng(tol::SEED, 12);
    let quad = QuadratureSpec::default();
    let (mut n, mut worst, mut drawn): (usize, f64, usize) = (0, 0.0, 0);
    while n < tol::FAR_FIELD_USERS {
        let p = region.sample(&mut rng);
        drawn += 1;
        if eta_metric(p, 0.0, 0.0) < tol::FAR_FIELD_ETA_OVER_AREA * side * side {
            continue;
        }
        let ch = Channel::los(p);
        let full = coupling(&unit, &ch, &ch, LAMBDA, &quad).unwrap().value.re;
        let est = rss_center_estimate(&unit, &User::new(p, 1.0).unwrap());
        worst = worst.max((est / full - 1.0).abs());
        n += 1;
    }
    (
        worst <= tol::FAR_FIELD_REL,
        format!("L={side}, {n} users ({drawn} drawn): largest relative error {worst:.3e} (limit {})", tol::FAR_FIELD_REL),
    )
}

fn determinism(sir_bytes: &[u8], center_bytes: &[u8]) -> Check {
    let (_, again) = sir_fraction(0.5);
    let center_again = sweep_csv(&center_sweep()).expect("csv");
    let sir_same = again == sir_bytes;
    let center_same = center_again == center_bytes;
    (
        sir_same && center_same,
        format!(
            "re-run with seed {}: SIR CSV identical={sir_same} ({} bytes), center sweep CSV identical={center_same} ({} bytes)",
            tol::SEED,
            sir_bytes.len(),
            center_bytes.len()
        ),
    )
}

fn main() {
    let mut verdicts = Vec::new();

    let mut sir_bytes = Vec::new();
    verdicts.push(timed(1, "interference CDF, L=0.5", || {
        let start = Instant::now();
        let (frac, bytes) = sir_fraction(0.5);
        sir_bytes = bytes;
        sir_check(0.5, frac, tol::SIR_HALF_METER, start.elapsed() <= Duration::from_secs(300))
    }));
    verdicts.push(timed(2, "interference CDF, L=1", || {
        sir_check(1.0, sir_fraction(1.0).0, tol::SIR_ONE_METER, true)
    }));

    let mut cert = None;
    verdicts.push(timed(3, "solver exactness vs enumeration", || {
        let (exact, c) = solver_checks();
        cert = Some(c);
        exact
    }));
    verdicts.push(timed(4, "Kuhn-Munkres labeling certificate (same instances)", || cert.expect("computed with criterion 3")));
    verdicts.push(timed(5, "infinite-plane bound", infinite_plane));
    verdicts.push(timed(6, "quadrature convergence", convergence));

    let start = Instant::now();
    let los = los_sweep();
    let took = start.elapsed();
    println!("(LoS sweep, M=7 K=2, {} trials per point: {:.1}s)", tol::SWEEP_TRIALS, took.as_secs_f64());
    verdicts.push(timed(7, "LoS sum-rate gap", || sum_rate_gap(&los, Some((took, Duration::from_secs(1800))))));
    verdicts.push(timed(8, "LoS min-rate gap", || min_rate_gap(&los)));
    verdicts.push(timed(9, "sum-rate peaks inside the side grid", || unimodal(&los)));
    verdicts.push(timed(10, "reflection study", hall_study));

    let mut center_bytes = Vec::new();
    verdicts.push(timed(11, "center-point RSS variant", || {
        let res = center_sweep();
        center_bytes = sweep_csv(&res).expect("csv");
        center_variant(&res)
    }));
    verdicts.push(timed(12, "far-field center estimate", far_field));
    verdicts.push(timed(13, "determinism", || determinism(&sir_bytes, &center_bytes)));

    let passed = verdicts.iter().filter(|v| v.pass).count();
    println!("acceptance: {passed}/{} criteria passed", verdicts.len());
    for v in verdicts.iter().filter(|v| !v.pass) {
        println!("  failed: criterion {} ({})", v.id, v.title);
    }
    if passed != verdicts.len() {
        std::process::exit(1);
    }
}
