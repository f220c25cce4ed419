//! Pinned thresholds and reporting for the acceptance run.
//!
//! Each criterion produces one [`Verdict`]; the runner prints one line per
//! verdict and fails if any criterion fails.

use std::fmt;
use std::time::Duration;

pub mod tol {
    /// Two-user interference study, unit side 0.5: fraction of 1/SIR
    /// samples at or below -20 dB.
    pub const SIR_HALF_METER: (f64, f64) = (0.90, 0.04);
    /// Same with unit side 1.
    pub const SIR_ONE_METER: (f64, f64) = (0.97, 0.02);
    pub const SIR_THRESHOLD_DB: f64 = -20.0;
    pub const SIR_TRIALS: usize = 1000;

    /// Matrices per `(K, M)` shape in the solver-exactness check.
    pub const SOLVER_CASES_PER_SHAPE: usize = 100;
    pub const SOLVER_MAX_UNITS: usize = 6;
    /// Largest tolerated labeling-certificate violation.
    pub const CERTIFICATE: f64 = 1e-9;

    /// On-axis self-coupling window at height 1 for the large-unit sides.
    pub const PLANE_SIDES: [f64; 3] = [2.0, 8.0, 32.0];
    pub const PLANE_WINDOW: (f64, f64) = (0.40, 0.50);

    pub const CONVERGENCE_CASES: usize = 20;
    pub const CONVERGENCE_REL: f64 = 1e-6;

    pub const SWEEP_TRIALS: usize = 200;
    /// Mean LSAP sum-rate over mean brute-force sum-rate.
    pub const SUM_RATE_RATIO: f64 = 0.97;
    /// Window for mean LBAP min-rate over mean brute-force min-rate.
    pub const MIN_RATE_RATIO: (f64, f64) = (0.80, 1.00);
    /// Reflection study: sides at or above this must meet the sum-rate ratio.
    pub const HALL_SIDE_FLOOR: f64 = 0.5;
    pub const HALL_ATTENUATION_DB: f64 = -3.0;

    /// Center-point RSS variant.
    pub const CENTER_SIDE: f64 = 0.2;
    pub const CENTER_MIN_SHORTFALL: f64 = 0.10;
    pub const CENTER_SUM_AGREEMENT: f64 = 0.02;

    /// Far-field center estimate.
    pub const FAR_FIELD_USERS: usize = 50;
    /// Minimum `eta / L^2`.
    pub const FAR_FIELD_ETA_OVER_AREA: f64 = 25.0;
    pub const FAR_FIELD_REL: f64 = 0.01;

    pub const SEED: u64 = 1;
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {} ({:.1}s): {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// `center ± half` as a closed interval check.
pub fn within(value: f64, (center, half): (f64, f64)) -> bool {
    (value - center).abs() <= half + 1e-12
}

/// Index of the largest value; ties go to the first.
pub fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_edges_count() {
        assert!(within(0.95, tol::SIR_ONE_METER));
        assert!(within(0.99, tol::SIR_ONE_METER));
        assert!(!within(0.949, tol::SIR_ONE_METER));
    }

    #[test]
    fn argmax_prefers_first() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), 1);
        assert_eq!(argmax(&[5.0]), 0);
    }
}
