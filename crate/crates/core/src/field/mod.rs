//! Wave-channel model on the surface and the matched-filter coupling
//! coefficients built from it.
//!
//! The channel from a user at `(x_k, y_k, z_k)` to surface point `(x, y, 0)` is
//!
//! ```text
//! s(x, y) = sqrt(z_k) / (2 sqrt(pi) eta^(3/4)) * exp(-2 pi j sqrt(eta) / lambda)
//! eta     = (x_k - x)^2 + (y_k - y)^2 + z_k^2
//! ```
//!
//! and the coupling of users `k` and `l` on unit `m` is the integral of
//! `s_l * conj(s_k)` over the unit. The diagonal is the received signal
//! strength (RSS) of user `k`; off-diagonal entries are inter-user
//! interference.

mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{image_sources, ImageSource, LisUnit, Point3, Scenario, User};

pub use quadrature::{gauss_legendre, integrate_block, BlockIntegral, QuadratureSpec};

/// Users closer than this to the `z = 0` plane are rejected; the channel
/// diverges as `eta -> 0`.
pub const MIN_HEIGHT: f64 = 1e-9;

/// Squared distance from `user` to the surface point `(x, y, 0)`.
pub fn eta_metric(user: Point3, x: f64, y: f64) -> f64 {
    let (dx, dy) = (user.x - x, user.y - y);
    dx * dx + dy * dy + user.z * user.z
}

/// Line-of-sight channel from `user` to surface point `(x, y, 0)`.
pub fn los_channel(user: Point3, x: f64, y: f64, wavelength: f64) -> Complex64 {
    los_from_offset(user.x - x, user.y - y, user.z, wavelength)
}

#[inline]
fn los_from_offset(dx: f64, dy: f64, z: f64, wavelength: f64) -> Complex64 {
    let eta = dx * dx + dy * dy + z * z;
    let r = eta.sqrt();
    // eta^(3/4) = r^(3/2)
    let amp = z.sqrt() / (2.0 * PI.sqrt() * r * r.sqrt());
    Complex64::from_polar(amp, -2.0 * PI * r / wavelength)
}

/// A user's channel including single-bounce images, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub source: Point3,
    pub images: Vec<ImageSource>,
}

impl Channel {
    pub fn los(source: Point3) -> Self {
        Self {
            source,
            images: Vec::new(),
        }
    }

    /// Channel of `user` in `scenario`, with hall images when the scenario
    /// has a hall.
    pub fn for_user(user: &User, scenario: &Scenario) -> Result<Self> {
        let images = match &scenario.hall {
            Some(hall) => image_sources(user, hall)?,
            None => Vec::new(),
        };
        Ok(Self {
            source: user.position,
            images,
        })
    }

    fn check(&self) -> Result<()> {
        let low = std::iter::once(&self.source)
            .chain(self.images.iter().map(|i| &i.position))
            .find(|p| !p.is_finite() || p.z <= MIN_HEIGHT);
        match low {
            Some(p) => Err(Error::domain(format!("source at {p:?} lies on or behind the surface plane"))),
            None => Ok(()),
        }
    }

    /// Channel at the surface point `unit_center + (x, y)`.
    #[inline]
    fn eval_local(&self, center: Point3, x: f64, y: f64, wavelength: f64) -> Complex64 {
        let mut s = los_from_offset((self.source.x - center.x) - x, (self.source.y - center.y) - y, self.source.z, wavelength);
        for im in &self.images {
            let p = im.position;
            s += los_from_offset((p.x - center.x) - x, (p.y - center.y) - y, p.z, wavelength) * im.amplitude_gain;
        }
        s
    }

    pub fn eval(&self, x: f64, y: f64, wavelength: f64) -> Complex64 {
        self.eval_local(Point3::new(0.0, 0.0, 0.0), x, y, wavelength)
    }
}

/// LoS channel of `user` plus the gain-weighted LoS channels of its images.
pub fn composite_channel(user: Point3, images: &[ImageSource], x: f64, y: f64, wavelength: f64) -> Complex64 {
    images
        .iter()
        .fold(los_channel(user, x, y, wavelength), |acc, im| {
            acc + los_channel(im.position, x, y, wavelength) * im.amplitude_gain
        })
}

/// Integrate all pairwise couplings of `channels` over one unit.
pub fn unit_block(unit: &LisUnit, channels: &[Channel], wavelength: f64, quad: &QuadratureSpec) -> Result<BlockIntegral> {
    unit.validate()?;
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength must be positive"));
    }
    for ch in channels {
        ch.check()?;
    }
    let center = unit.center;
    integrate_block(unit.side, wavelength, channels.len(), quad, |x, y, out| {
        for (o, ch) in out.iter_mut().zip(channels) {
            *o = ch.eval_local(center, x, y, wavelength);
        }
        Ok(())
    })
}

/// A single coupling value with its accuracy diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub value: Complex64,
    pub rel_change: f64,
    /// Set when the refinement check did not meet `rel_tol`.
    pub accuracy_warning: bool,
}

/// Coupling of user `l` into user `k`'s matched filter on `unit`:
/// the integral of `s_l * conj(s_k)`.
pub fn coupling(unit: &LisUnit, channel_k: &Channel, channel_l: &Channel, wavelength: f64, quad: &QuadratureSpec) -> Result<Coupling> {
    let block = unit_block(unit, &[channel_k.clone(), channel_l.clone()], wavelength, quad)?;
    Ok(Coupling {
        value: block.get(0, 1),
        rel_change: block.rel_change,
        accuracy_warning: !block.converged,
    })
}

/// Couplings for every unit and user pair, indexed `(m, k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTensor {
    num_units: usize,
    num_users: usize,
    values: Vec<Complex64>,
    /// Per-unit refinement estimate.
    pub rel_change: Vec<f64>,
    /// Units whose integrals did not meet the tolerance.
    pub warnings: Vec<usize>,
}

impl CouplingTensor {
    pub fn from_blocks(num_users: usize, blocks: &[BlockIntegral]) -> Result<Self> {
        if blocks.iter().any(|b| b.size != num_users) {
            return Err(Error::Contract("block size does not match the user count".into()));
        }
        Ok(Self {
            num_units: blocks.len(),
            num_users,
            values: blocks.iter().flat_map(|b| b.values.iter().copied()).collect(),
            rel_change: blocks.iter().map(|b| b.rel_change).collect(),
            warnings: blocks.iter().enumerate().filter(|(_, b)| !b.converged).map(|(m, _)| m).collect(),
        })
    }

    pub fn num_units(&self) -> usize {
        self.num_units
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn get(&self, m: usize, k: usize, l: usize) -> Complex64 {
        self.values[(m * self.num_users + k) * self.num_users + l]
    }

    /// RSS of user `k` on unit `m`.
    pub fn rss(&self, m: usize, k: usize) -> f64 {
        self.get(m, k, k).re
    }

    /// Row of user `k` on unit `m`: couplings with every user.
    pub fn row(&self, m: usize, k: usize) -> &[Complex64] {
        let start = (m * self.num_users + k) * self.num_users;
        &self.values[start..start + self.num_users]
    }
}

/// Evaluate the coupling tensor of a scenario. Units are integrated in
/// parallel; the result does not depend on scheduling.
pub fn coupling_tensor(scenario: &Scenario, quad: &QuadratureSpec) -> Result<CouplingTensor> {
    scenario.validate()?;
    let channels = scenario
        .users
        .iter()
        .map(|u| Channel::for_user(u, scenario))
        .collect::<Result<Vec<_>>>()?;
    let blocks = scenario
        .units
        .par_iter()
        .map(|unit| unit_block(unit, &channels, scenario.wavelength, quad))
        .collect::<Result<Vec<_>>>()?;
    CouplingTensor::from_blocks(scenario.num_users(), &blocks)
}

/// RSS estimate from the channel power at the unit center, scaled by the
/// unit area: `L^2 z / (4 pi eta^(3/2))`.
pub fn rss_center_estimate(unit: &LisUnit, user: &User) -> f64 {
    let p = user.position;
    let eta = eta_metric(p, unit.center.x, unit.center.y);
    unit.area() * p.z / (4.0 * PI * eta * eta.sqrt())
}

/// Geometry of the two-user interference study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirConfig {
    pub side: f64,
    pub wavelength: f64,
    /// Users are drawn from `[-half_width, half_width]^2 x (0, depth]`.
    pub half_width: f64,
    pub depth: f64,
    pub quad: QuadratureSpec,
}

impl Default for SirConfig {
    fn default() -> Self {
        Self {
            side: 0.5,
            wavelength: 0.125,
            half_width: 4.0,
            depth: 8.0,
            quad: QuadratureSpec::default(),
        }
    }
}

/// Interference-to-signal ratio `|phi_01|^2 / phi_00^2` of user 0, in dB.
pub fn inverse_sir_db(unit: &LisUnit, a: Point3, b: Point3, wavelength: f64, quad: &QuadratureSpec) -> Result<f64> {
    let block = unit_block(unit, &[Channel::los(a), Channel::los(b)], wavelength, quad)?;
    let signal = block.get(0, 0).re;
    Ok(10.0 * (block.get(0, 1).norm_sqr() / (signal * signal)).log10())
}

/// 1/SIR samples (dB) for `n_trials` random two-user placements in front of
/// a single unit centered at the origin. Trial `t` draws from RNG stream `t`.
pub fn sir_samples(config: &SirConfig, n_trials: usize, seed: u64) -> Result<Vec<f64>> {
    use crate::scenario::{seeded_rng, UserBox};
    let unit = LisUnit::new(0.0, 0.0, config.side)?;
    let region = UserBox::symmetric(config.half_width, config.depth);
    region.validate()?;
    (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded_rng(seed, t as u64);
            let a = region.sample(&mut rng);
            let b = region.sample(&mut rng);
            inverse_sir_db(&unit, a, b, config.wavelength, &config.quad)
        })
        .collect()
}
