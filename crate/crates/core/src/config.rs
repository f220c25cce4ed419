//! Flat key/value configuration files (TOML).
//!
//! ```toml
//! M = 7                 # units
//! K = 2                 # users
//! L = 0.5               # unit side, m
//! lambda = 0.125        # wavelength, m
//! n0 = 1.0              # noise density, linear
//! power_db = 20.0       # transmit power of every user, dB
//! user_box = [-2.0, 2.0, -2.0, 2.0, 4.0]   # x_min, x_max, y_min, y_max, z_max
//! seed = 1
//!
//! # optional
//! users = [[0.0, 0.0, 1.0], [0.4, -0.3, 2.5]]  # fixed positions instead of sampling
//! hall_attenuation_db = -3.0                   # enables the reflecting hall
//! hall_box = [-2.0, 2.0, -2.0, 2.0, 4.0]       # defaults to user_box
//!
//! # sweeps only
//! trials = 2000
//! sweep = "L"           # or "power_db"
//! grid = [0.1, 0.2, 0.3, 0.5, 0.75, 1.0]
//! rss_mode = "full"     # or "center"
//! enumeration_cap = 10000000
//!
//! # quadrature overrides
//! quad_panel_fraction = 0.5
//! quad_nodes = 4
//! quad_rel_tol = 1e-8
//! quad_max_depth = 12
//! ```
//!
//! Every key is optional; missing keys take the defaults shown. Decibel
//! values are converted to linear scale here and nowhere else.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{RssMode, SweepConfig, SweepVariable, DEFAULT_POWER_GRID_DB, DEFAULT_SIDE_GRID};
use crate::field::QuadratureSpec;
use crate::scenario::{db_to_linear, sample_scenario, unit_row, Hall, Point3, SamplingConfig, Scenario, User, UserBox};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "M")]
    pub num_units: Option<usize>,
    #[serde(rename = "K")]
    pub num_users: Option<usize>,
    #[serde(rename = "L")]
    pub side: Option<f64>,
    pub lambda: Option<f64>,
    pub n0: Option<f64>,
    pub power_db: Option<f64>,
    pub user_box: Option<[f64; 5]>,
    pub seed: Option<u64>,
    pub users: Option<Vec<[f64; 3]>>,
    pub hall_attenuation_db: Option<f64>,
    pub hall_box: Option<[f64; 5]>,
    pub trials: Option<usize>,
    pub sweep: Option<String>,
    pub grid: Option<Vec<f64>>,
    pub rss_mode: Option<String>,
    pub enumeration_cap: Option<u64>,
    pub quad_panel_fraction: Option<f64>,
    pub quad_nodes: Option<usize>,
    pub quad_rel_tol: Option<f64>,
    pub quad_max_depth: Option<u32>,
}

pub const DEFAULT_POWER_DB: f64 = 20.0;
pub const DEFAULT_SEED: u64 = 1;

fn box_from(v: [f64; 5]) -> UserBox {
    UserBox {
        x_min: v[0],
        x_max: v[1],
        y_min: v[2],
        y_max: v[3],
        z_max: v[4],
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        let d = QuadratureSpec::default();
        let q = QuadratureSpec {
            panel_fraction: self.quad_panel_fraction.unwrap_or(d.panel_fraction),
            nodes_per_panel: self.quad_nodes.unwrap_or(d.nodes_per_panel),
            rel_tol: self.quad_rel_tol.unwrap_or(d.rel_tol),
            max_depth: self.quad_max_depth.unwrap_or(d.max_depth),
        };
        q.validate()?;
        Ok(q)
    }

    fn hall(&self, user_box: &UserBox) -> Option<Hall> {
        self.hall_attenuation_db.map(|att| match self.hall_box {
            Some(b) => box_from(b).as_hall(att),
            None => user_box.as_hall(att),
        })
    }

    /// Sampling parameters with defaults filled in.
    pub fn sampling(&self) -> SamplingConfig {
        let d = SamplingConfig::default();
        let user_box = self.user_box.map(box_from).unwrap_or(d.user_box);
        SamplingConfig {
            num_units: self.num_units.unwrap_or(d.num_units),
            num_users: self.num_users.unwrap_or(d.num_users),
            side: self.side.unwrap_or(d.side),
            wavelength: self.lambda.unwrap_or(d.wavelength),
            noise_density: self.n0.unwrap_or(d.noise_density),
            power: db_to_linear(self.power_db.unwrap_or(DEFAULT_POWER_DB)),
            hall: self.hall(&user_box),
            user_box,
        }
    }

    /// The scenario described by the file: fixed users if listed, otherwise
    /// users drawn with the configured seed.
    pub fn scenario(&self) -> Result<Scenario> {
        let cfg = self.sampling();
        let Some(positions) = &self.users else {
            return sample_scenario(self.seed(), &cfg);
        };
        if let Some(k) = self.num_users {
            if k != positions.len() {
                return Err(Error::Config(format!("K = {k} but {} users are listed", positions.len())));
            }
        }
        let users = positions
            .iter()
            .map(|&[x, y, z]| User::new(Point3::new(x, y, z), cfg.power))
            .collect::<Result<Vec<_>>>()?;
        let scenario = Scenario {
            wavelength: cfg.wavelength,
            noise_density: cfg.noise_density,
            units: unit_row(cfg.num_units, cfg.side)?,
            users,
            hall: cfg.hall,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        if self.users.is_some() {
            return Err(Error::Config("sweeps sample users; remove the `users` key".into()));
        }
        let variable = match self.sweep.as_deref().unwrap_or("L") {
            "L" => SweepVariable::Side,
            "power_db" => SweepVariable::PowerDb,
            other => return Err(Error::Config(format!("sweep must be \"L\" or \"power_db\", got {other:?}"))),
        };
        let rss_mode = match self.rss_mode.as_deref().unwrap_or("full") {
            "full" => RssMode::Full,
            "center" => RssMode::Center,
            other => return Err(Error::Config(format!("rss_mode must be \"full\" or \"center\", got {other:?}"))),
        };
        let grid = self.grid.clone().unwrap_or_else(|| match variable {
            SweepVariable::Side => DEFAULT_SIDE_GRID.to_vec(),
            SweepVariable::PowerDb => DEFAULT_POWER_GRID_DB.to_vec(),
        });
        let d = SweepConfig::default();
        let cfg = SweepConfig {
            base: self.sampling(),
            variable,
            grid,
            rss_mode,
            trials: self.trials.unwrap_or(d.trials),
            seed: self.seed(),
            quad: self.quadrature()?,
            enumeration_cap: self.enumeration_cap.map_or(d.enumeration_cap, u128::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
