//! User rates, RSS cost matrices, and exact assignment solvers.
//!
//! Sum-rate assignment is reduced to a linear sum assignment problem (LSAP)
//! and min-rate assignment to a linear bottleneck assignment problem (LBAP),
//! both over the cost matrix `cost(k, m) = -rss(k, m)`. [`lsap`] solves the
//! first with the Kuhn-Munkres labeling algorithm, [`lbap`] the second with
//! the threshold algorithm, and [`brute`] enumerates every injective
//! assignment as the reference for both.

pub mod brute;
pub mod lbap;
pub mod lsap;
pub mod matching;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{rss_center_estimate, CouplingTensor};
use crate::scenario::Scenario;

pub use brute::{
    brute_force_assign, brute_force_lbap, brute_force_lsap, for_each_injection, injection_count, objective_value, random_baseline,
    BruteForce, DEFAULT_ENUMERATION_CAP,
};
pub use lbap::{solve_lbap, threshold_algorithm, LbapSolution};
pub use lsap::{kuhn_munkres, solve_lsap, LsapSolution};
pub use matching::{max_matching, min_vertex_cover, BipartiteGraph, Matching, VertexCover};

/// Achievable rate (bits per channel use) of user `k` served by a unit whose
/// couplings with user `k` are `phi_row` (`phi_row[l]` couples user `l` into
/// `k`'s matched filter):
///
/// `log2(1 + P_k phi_kk^2 / (N_0 phi_kk + sum_{l != k} P_l |phi_kl|^2))`
pub fn user_rate(phi_row: &[Complex64], k: usize, noise_density: f64, powers: &[f64]) -> Result<f64> {
    if phi_row.len() != powers.len() || k >= phi_row.len() {
        return Err(Error::Contract(format!(
            "row of {} couplings for {} powers, user {k}",
            phi_row.len(),
            powers.len()
        )));
    }
    let signal = phi_row[k].re;
    if !(signal > 0.0) {
        return Err(Error::domain(format!("self-coupling must be positive, got {signal}")));
    }
    if !(noise_density > 0.0) {
        return Err(Error::domain("noise density must be positive"));
    }
    let interference: f64 = phi_row
        .iter()
        .zip(powers)
        .enumerate()
        .filter(|(l, _)| *l != k)
        .map(|(_, (phi, p))| p * phi.norm_sqr())
        .sum();
    let sinr = powers[k] * signal * signal / (noise_density * signal + interference);
    Ok((1.0 + sinr).log2())
}

/// `rate[k][m]`: rate of user `k` if served by unit `m`, with every other
/// user interfering on that unit.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    num_users: usize,
    num_units: usize,
    rates: Vec<f64>,
}

impl RateTable {
    pub fn new(tensor: &CouplingTensor, noise_density: f64, powers: &[f64]) -> Result<Self> {
        let (k_n, m_n) = (tensor.num_users(), tensor.num_units());
        let mut rates = Vec::with_capacity(k_n * m_n);
        for k in 0..k_n {
            for m in 0..m_n {
                rates.push(user_rate(tensor.row(m, k), k, noise_density, powers)?);
            }
        }
        Ok(Self {
            num_users: k_n,
            num_units: m_n,
            rates,
        })
    }

    pub fn get(&self, k: usize, m: usize) -> f64 {
        self.rates[k * self.num_units + m]
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn num_units(&self) -> usize {
        self.num_units
    }

    /// Per-user rates under `mapping`.
    pub fn rates_for(&self, mapping: &[usize]) -> Vec<f64> {
        mapping.iter().enumerate().map(|(k, &m)| self.get(k, m)).collect()
    }
}

/// Dense `K x M` cost matrix, `K <= M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::domain("cost matrix is empty"));
        }
        if rows > cols {
            return Err(Error::domain(format!("{rows} users cannot be assigned to {cols} units")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Contract(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain("cost matrix has non-finite entries"));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Contract("ragged cost matrix".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, k: usize, m: usize) -> f64 {
        self.entries[k * self.cols + m]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.entries[k * self.cols..(k + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.entries.iter().map(|&c| f(c)).collect())
    }

    /// `sum_k cost(k, mapping[k])`, accumulated in user order.
    pub fn sum_cost(&self, mapping: &[usize]) -> f64 {
        mapping.iter().enumerate().map(|(k, &m)| self.get(k, m)).sum()
    }

    /// `max_k cost(k, mapping[k])`.
    pub fn bottleneck_cost(&self, mapping: &[usize]) -> f64 {
        mapping
            .iter()
            .enumerate()
            .map(|(k, &m)| self.get(k, m))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Cost matrix from the quadrature RSS: `cost(k, m) = -phi_kk^m`.
pub fn build_cost_matrix(tensor: &CouplingTensor) -> Result<CostMatrix> {
    let (k_n, m_n) = (tensor.num_users(), tensor.num_units());
    let entries = (0..k_n)
        .flat_map(|k| (0..m_n).map(move |m| -tensor.rss(m, k)))
        .collect();
    CostMatrix::new(k_n, m_n, entries)
}

/// Cost matrix from the center-point RSS estimate.
pub fn build_cost_matrix_center(scenario: &Scenario) -> Result<CostMatrix> {
    scenario.validate()?;
    let entries = scenario
        .users
        .iter()
        .flat_map(|user| scenario.units.iter().map(move |unit| -rss_center_estimate(unit, user)))
        .collect();
    CostMatrix::new(scenario.num_users(), scenario.num_units(), entries)
}

/// What an [`Assignment`]'s value measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Sum of costs (minimized).
    SumCost,
    /// Largest cost (minimized).
    BottleneckCost,
    /// Sum of user rates (maximized).
    SumRate,
    /// Smallest user rate (maximized).
    MinRate,
    /// Sum of RSS (maximized).
    SumRss,
    /// Smallest RSS (maximized).
    MinRss,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::SumCost => "sum_cost",
            Objective::BottleneckCost => "bottleneck_cost",
            Objective::SumRate => "sum_rate",
            Objective::MinRate => "min_rate",
            Objective::SumRss => "sum_rss",
            Objective::MinRss => "min_rss",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum_cost" => Ok(Objective::SumCost),
            "bottleneck_cost" => Ok(Objective::BottleneckCost),
            "sum_rate" => Ok(Objective::SumRate),
            "min_rate" => Ok(Objective::MinRate),
            "sum_rss" => Ok(Objective::SumRss),
            "min_rss" => Ok(Objective::MinRss),
            other => Err(Error::Config(format!("unknown objective `{other}`"))),
        }
    }
}

/// Injective map from users to units, `mapping[k]` serving user `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub mapping: Vec<usize>,
    pub objective: Objective,
    pub value: f64,
}

impl Assignment {
    /// Check totality, injectivity, and range against `num_units`.
    pub fn validate(&self, num_units: usize) -> Result<()> {
        let mut used = vec![false; num_units];
        for (k, &m) in self.mapping.iter().enumerate() {
            if m >= num_units {
                return Err(Error::Contract(format!("user {k} mapped to missing unit {m}")));
            }
            if std::mem::replace(&mut used[m], true) {
                return Err(Error::Contract(format!("unit {m} serves two users")));
            }
        }
        Ok(())
    }

    /// 0/1 indicator matrix `w[k][m]`.
    pub fn indicator(&self, num_units: usize) -> Vec<Vec<u8>> {
        self.mapping
            .iter()
            .map(|&m| (0..num_units).map(|j| u8::from(j == m)).collect())
            .collect()
    }
}
