//! Kuhn-Munkres (Hungarian) labeling algorithm for the rectangular linear sum
//! assignment problem.
//!
//! The algorithm runs in maximization form on weights `w = -cost`: user
//! labels start at their row maximum, unit labels at zero, and the equality
//! subgraph `l(x) + l(y) = w(x, y)` is grown by alternating trees until every
//! user is matched. Unit labels only ever increase from zero and unmatched
//! units keep label zero, so the final labels certify optimality for
//! `K < M` without padding the matrix.

use super::{Assignment, CostMatrix, Objective};
use crate::error::Result;

/// Optimal assignment together with the dual labels that certify it.
#[derive(Debug, Clone, PartialEq)]
pub struct LsapSolution {
    pub assignment: Assignment,
    pub user_labels: Vec<f64>,
    pub unit_labels: Vec<f64>,
}

impl LsapSolution {
    /// Largest violation of dual feasibility or complementary slackness,
    /// measured on weights `-cost`. Zero up to rounding for a correct run.
    pub fn certificate_violation(&self, cost: &CostMatrix) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..cost.rows() {
            for m in 0..cost.cols() {
                let reduced = self.user_labels[k] + self.unit_labels[m] + cost.get(k, m);
                worst = worst.max(-reduced);
            }
            let m = self.assignment.mapping[k];
            let reduced = self.user_labels[k] + self.unit_labels[m] + cost.get(k, m);
            worst = worst.max(reduced.abs());
        }
        let mut matched = vec![false; cost.cols()];
        for &m in &self.assignment.mapping {
            matched[m] = true;
        }
        for (m, &used) in matched.iter().enumerate() {
            if !used {
                worst = worst.max(self.unit_labels[m].abs());
            }
        }
        worst
    }
}

pub fn solve_lsap(cost: &CostMatrix) -> Result<Assignment> {
    kuhn_munkres(cost).map(|s| s.assignment)
}

/// Minimize `sum_k cost(k, p(k))` over injective `p`. Among tight edges the
/// lowest unit index is explored first.
pub fn kuhn_munkres(cost: &CostMatrix) -> Result<LsapSolution> {
    let (n_users, n_units) = (cost.rows(), cost.cols());
    let weight = |k: usize, m: usize| -cost.get(k, m);

    let mut lx: Vec<f64> = (0..n_users)
        .map(|k| (0..n_units).map(|m| weight(k, m)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let mut ly = vec![0.0; n_units];
    let mut mate_x: Vec<Option<usize>> = vec![None; n_users];
    let mut mate_y: Vec<Option<usize>> = vec![None; n_units];

    let mut in_s = vec![false; n_users];
    let mut in_t = vec![false; n_units];
    let mut slack = vec![0.0; n_units];
    let mut slack_from = vec![0usize; n_units];

    for root in 0..n_users {
        in_s.iter_mut().for_each(|v| *v = false);
        in_t.iter_mut().for_each(|v| *v = false);
        in_s[root] = true;
        for m in 0..n_units {
            slack[m] = (lx[root] + ly[m] - weight(root, m)).max(0.0);
            slack_from[m] = root;
        }

        let free_y = loop {
            let tight = (0..n_units).find(|&m| !in_t[m] && slack[m] <= 0.0);
            let y = match tight {
                Some(y) => y,
                None => {
                    // N(S) = T: shift labels by the smallest slack
                    let delta = (0..n_units)
                        .filter(|&m| !in_t[m])
                        .map(|m| slack[m])
                        .fold(f64::INFINITY, f64::min);
                    for k in 0..n_users {
                        if in_s[k] {
                            lx[k] -= delta;
                        }
                    }
                    for m in 0..n_units {
                        if in_t[m] {
                            ly[m] += delta;
                        } else {
                            slack[m] -= delta;
                        }
                    }
                    continue;
                }
            };
            in_t[y] = true;
            match mate_y[y] {
                None => break y,
                Some(x) => {
                    in_s[x] = true;
                    for m in 0..n_units {
                        if !in_t[m] {
                            let s = (lx[x] + ly[m] - weight(x, m)).max(0.0);
                            if s < slack[m] {
                                slack[m] = s;
                                slack_from[m] = x;
                            }
                        }
                    }
                }
            }
        };

        // flip the alternating path ending at free_y
        let mut y = free_y;
        loop {
            let x = slack_from[y];
            let next = mate_x[x];
            mate_x[x] = Some(y);
            mate_y[y] = Some(x);
            match next {
                Some(prev_y) if x != root => y = prev_y,
                _ => break,
            }
        }
    }

    let mapping: Vec<usize> = mate_x
        .into_iter()
        .map(|m| m.expect("every user is matched after its phase"))
        .collect();
    let value = cost.sum_cost(&mapping);
    Ok(LsapSolution {
        assignment: Assignment {
            mapping,
            objective: Objective::SumCost,
            value,
        },
        user_labels: lx,
        unit_labels: ly,
    })
}
