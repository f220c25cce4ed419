use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{sir_samples, QuadratureSpec, SirConfig};

/// Empirical distribution of 1/SIR samples (dB).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SirStudy {
    pub side: f64,
    pub wavelength: f64,
    pub seed: u64,
    /// Ascending.
    pub samples: Vec<f64>,
}

impl SirStudy {
    /// Fraction of samples at or below `db`.
    pub fn cdf(&self, db: f64) -> f64 {
        let below = self.samples.partition_point(|&s| s <= db);
        below as f64 / self.samples.len() as f64
    }

    /// Smallest sample with at least a fraction `p` of samples at or below it.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.samples.len();
        let idx = ((p.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.samples[idx]
    }

    /// `(sample, cdf)` pairs, one per sample.
    pub fn curve(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.samples.len() as f64;
        self.samples.iter().enumerate().map(move |(i, &s)| (s, (i + 1) as f64 / n))
    }
}

/// Two users uniform over `[-4, 4]^2 x (0, 8]` in front of one unit of side
/// `side` at the origin.
pub fn run_sir_study(side: f64, wavelength: f64, n_trials: usize, seed: u64, quad: &QuadratureSpec) -> Result<SirStudy> {
    if n_trials == 0 {
        return Err(Error::domain("SIR study needs at least one trial"));
    }
    let config = SirConfig {
        side,
        wavelength,
        quad: *quad,
        ..SirConfig::default()
    };
    let mut samples = sir_samples(&config, n_trials, seed)?;
    samples.sort_by(f64::total_cmp);
    Ok(SirStudy {
        side,
        wavelength,
        seed,
        samples,
    })
}
