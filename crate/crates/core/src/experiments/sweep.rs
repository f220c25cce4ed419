use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assign::{
    brute_force_assign, build_cost_matrix, build_cost_matrix_center, random_baseline, solve_lbap, solve_lsap, Objective,
    RateTable, DEFAULT_ENUMERATION_CAP,
};
use crate::error::{Error, Result};
use crate::field::{coupling_tensor, CouplingTensor, QuadratureSpec};
use crate::scenario::{db_to_linear, sample_scenario_with, seeded_rng, SamplingConfig, Scenario};

/// Quantity varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Unit side length, meters.
    Side,
    /// Transmit power of every user, dB.
    PowerDb,
}

impl SweepVariable {
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::Side => "side_m",
            SweepVariable::PowerDb => "power_db",
        }
    }
}

/// Which RSS values the solvers see.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RssMode {
    /// Quadrature self-couplings only.
    Full,
    /// Quadrature plus the center-point estimate variants.
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lsap,
    Lbap,
    BruteSum,
    BruteMin,
    RandomSum,
    RandomMin,
    CenterLsap,
    CenterLbap,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Lsap,
        Method::Lbap,
        Method::BruteSum,
        Method::BruteMin,
        Method::RandomSum,
        Method::RandomMin,
        Method::CenterLsap,
        Method::CenterLbap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lsap => "lsap",
            Method::Lbap => "lbap",
            Method::BruteSum => "brute_sum",
            Method::BruteMin => "brute_min",
            Method::RandomSum => "random_sum",
            Method::RandomMin => "random_min",
            Method::CenterLsap => "center_lsap",
            Method::CenterLbap => "center_lbap",
        }
    }

    /// The true-rate objective this method's value is measured in.
    pub fn objective(self) -> Objective {
        match self {
            Method::Lsap | Method::BruteSum | Method::RandomSum | Method::CenterLsap => Objective::SumRate,
            Method::Lbap | Method::BruteMin | Method::RandomMin | Method::CenterLbap => Objective::MinRate,
        }
    }

    fn needs_center(self) -> bool {
        matches!(self, Method::CenterLsap | Method::CenterLbap)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Everything but the swept quantity is taken from here.
    pub base: SamplingConfig,
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub rss_mode: RssMode,
    pub trials: usize,
    pub seed: u64,
    pub quad: QuadratureSpec,
    pub enumeration_cap: u128,
}

pub const DEFAULT_SIDE_GRID: [f64; 6] = [0.1, 0.2, 0.3, 0.5, 0.75, 1.0];
pub const DEFAULT_POWER_GRID_DB: [f64; 7] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
pub const DEFAULT_TRIALS: usize = 2000;

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            base: SamplingConfig::default(),
            variable: SweepVariable::Side,
            grid: DEFAULT_SIDE_GRID.to_vec(),
            rss_mode: RssMode::Full,
            trials: DEFAULT_TRIALS,
            seed: 1,
            quad: QuadratureSpec::default(),
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("sweep needs at least one trial".into()));
        }
        if let Some(v) = self.grid.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("grid value {v} is not finite")));
        }
        if self.variable == SweepVariable::Side && self.grid.iter().any(|&v| v <= 0.0) {
            return Err(Error::Config("side lengths must be positive".into()));
        }
        self.quad.validate()?;
        self.base.user_box.validate()?;
        if self.base.num_users > self.base.num_units {
            return Err(Error::domain(format!(
                "K = {} users exceeds M = {} units",
                self.base.num_users, self.base.num_units
            )));
        }
        let count = crate::assign::injection_count(self.base.num_users, self.base.num_units);
        if count > self.enumeration_cap {
            return Err(Error::EnumerationCap {
                cardinality: count,
                cap: self.enumeration_cap,
            });
        }
        Ok(())
    }

    pub fn methods(&self) -> Vec<Method> {
        Method::ALL
            .into_iter()
            .filter(|m| self.rss_mode == RssMode::Center || !m.needs_center())
            .collect()
    }

    /// Sampling config at one grid point.
    pub fn at(&self, value: f64) -> SamplingConfig {
        let mut cfg = self.base.clone();
        match self.variable {
            SweepVariable::Side => cfg.side = value,
            SweepVariable::PowerDb => cfg.power = db_to_linear(value),
        }
        cfg
    }
}

/// One method's outcome on one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    /// Unit per user; empty for the random baselines.
    pub mapping: Vec<usize>,
    /// True rate of each user under `mapping`; empty for the random baselines.
    pub user_rates: Vec<f64>,
    /// Sum or min rate (per `method.objective()`), bits/s/Hz, unnormalized.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    /// Hex digest of the sampled geometry and powers.
    pub digest: String,
    /// Quadrature blocks that hit the depth limit.
    pub accuracy_warnings: usize,
    pub outcomes: Vec<MethodOutcome>,
}

impl TrialReport {
    pub fn value(&self, method: Method) -> Option<f64> {
        self.outcomes.iter().find(|o| o.method == method).map(|o| o.value)
    }
}

/// SHA-256 over the bit patterns of every scenario number, hex encoded.
pub fn scenario_digest(scenario: &Scenario) -> String {
    let mut h = Sha256::new();
    let mut eat = |vals: &[f64]| vals.iter().for_each(|v| h.update(v.to_bits().to_le_bytes()));
    eat(&[scenario.wavelength, scenario.noise_density]);
    for u in &scenario.units {
        eat(&[u.center.x, u.center.y, u.center.z, u.side]);
    }
    for u in &scenario.users {
        eat(&[u.position.x, u.position.y, u.position.z, u.power]);
    }
    if let Some(hall) = &scenario.hall {
        eat(&[hall.x_min, hall.x_max, hall.y_min, hall.y_max, hall.z_back, hall.attenuation_db]);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn solved(method: Method, mapping: Vec<usize>, rates: &RateTable) -> MethodOutcome {
    let user_rates = rates.rates_for(&mapping);
    let value = match method.objective() {
        Objective::MinRate => user_rates.iter().copied().fold(f64::INFINITY, f64::min),
        _ => user_rates.iter().sum(),
    };
    MethodOutcome {
        method,
        mapping,
        user_rates,
        value,
    }
}

/// Run every method on one scenario whose tensor is already known.
pub fn evaluate_trial(
    scenario: &Scenario,
    tensor: &CouplingTensor,
    methods: &[Method],
    cap: u128,
) -> Result<Vec<MethodOutcome>> {
    let powers = scenario.powers();
    let n0 = scenario.noise_density;
    let rates = RateTable::new(tensor, n0, &powers)?;
    let cost = build_cost_matrix(tensor)?;
    let center = if methods.iter().any(|m| m.needs_center()) {
        Some(build_cost_matrix_center(scenario)?)
    } else {
        None
    };
    methods
        .iter()
        .map(|&method| {
            Ok(match method {
                Method::Lsap => solved(method, solve_lsap(&cost)?.mapping, &rates),
                Method::Lbap => solved(method, solve_lbap(&cost)?.mapping, &rates),
                Method::CenterLsap => solved(method, solve_lsap(center.as_ref().expect("built"))?.mapping, &rates),
                Method::CenterLbap => solved(method, solve_lbap(center.as_ref().expect("built"))?.mapping, &rates),
                Method::BruteSum | Method::BruteMin => {
                    let best = brute_force_assign(tensor, method.objective(), n0, &powers, cap)?;
                    solved(method, best.assignment.mapping, &rates)
                }
                Method::RandomSum | Method::RandomMin => MethodOutcome {
                    method,
                    mapping: Vec::new(),
                    user_rates: Vec::new(),
                    value: random_baseline(tensor, method.objective(), n0, &powers, cap)?,
                },
            })
        })
        .collect()
}

/// Mean and 95% normal-approximation half-width of one method at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodStats {
    pub method: Method,
    pub mean_rate_norm: f64,
    pub ci_half_width: f64,
    pub n_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedTrial {
    pub trial: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    /// `K * L^2` at this point.
    pub normalization: f64,
    pub stats: Vec<MethodStats>,
    pub reports: Vec<TrialReport>,
    pub failed: Vec<FailedTrial>,
}

impl SweepPoint {
    pub fn stats_for(&self, method: Method) -> Option<&MethodStats> {
        self.stats.iter().find(|s| s.method == method)
    }

    pub fn mean(&self, method: Method) -> Option<f64> {
        self.stats_for(method).map(|s| s.mean_rate_norm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub trials: usize,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn failed_count(&self) -> usize {
        self.points.iter().map(|p| p.failed.len()).sum()
    }
}

const Z_95: f64 = 1.959_963_984_540_054;

fn mean_and_half_width(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Z_95 * (var / n).sqrt())
}

fn aggregate(value: f64, normalization: f64, methods: &[Method], outcomes: Vec<(usize, Result<TrialReport>)>) -> SweepPoint {
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for (trial, outcome) in outcomes {
        match outcome {
            Ok(r) => reports.push(r),
            Err(e) => failed.push(FailedTrial {
                trial,
                error: e.to_string(),
            }),
        }
    }
    let stats = methods
        .iter()
        .map(|&method| {
            let values: Vec<f64> = reports
                .iter()
                .filter_map(|r| r.value(method))
                .map(|v| v / normalization)
                .collect();
            let (mean, half) = if values.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                mean_and_half_width(&values)
            };
            MethodStats {
                method,
                mean_rate_norm: mean,
                ci_half_width: half,
                n_trials: values.len(),
            }
        })
        .collect();
    SweepPoint {
        value,
        normalization,
        stats,
        reports,
        failed,
    }
}

/// Monte Carlo rate sweep. Trial `t` draws its users from stream `t` of the
/// seed, so every grid point sees the same user positions. Power sweeps reuse
/// each trial's tensor across the grid since the geometry does not change.
pub fn run_rate_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let methods = config.methods();
    let n_points = config.grid.len();
    let per_trial: Vec<Vec<Result<TrialReport>>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, &methods, trial))
        .collect();
    let mut by_point: Vec<Vec<(usize, Result<TrialReport>)>> = (0..n_points).map(|_| Vec::new()).collect();
    for (trial, results) in per_trial.into_iter().enumerate() {
        for (i, r) in results.into_iter().enumerate() {
            by_point[i].push((trial, r));
        }
    }
    let points = config
        .grid
        .iter()
        .zip(by_point)
        .map(|(&value, outcomes)| {
            let side = config.at(value).side;
            let norm = config.base.num_users as f64 * side * side;
            aggregate(value, norm, &methods, outcomes)
        })
        .collect();
    Ok(SweepResult {
        variable: config.variable,
        trials: config.trials,
        points,
    })
}

fn run_trial(config: &SweepConfig, methods: &[Method], trial: usize) -> Vec<Result<TrialReport>> {
    let reuse = config.variable == SweepVariable::PowerDb;
    let mut cached: Option<CouplingTensor> = None;
    config
        .grid
        .iter()
        .map(|&value| {
            let cfg = config.at(value);
            let scenario = sample_scenario_with(&mut seeded_rng(config.seed, trial as u64), &cfg)?;
            let tensor = match &cached {
                Some(t) => t.clone(),
                None => coupling_tensor(&scenario, &config.quad)?,
            };
            let outcomes = evaluate_trial(&scenario, &tensor, methods, config.enumeration_cap)?;
            let report = TrialReport {
                trial,
                seed: config.seed,
                digest: scenario_digest(&scenario),
                accuracy_warnings: tensor.warnings.len(),
                outcomes,
            };
            if reuse {
                cached = Some(tensor);
            }
            Ok(report)
        })
        .collect()
}
