//! Threshold algorithm for the linear bottleneck assignment problem.
//!
//! Starting from a lower bound on the bottleneck, build the threshold graph
//! of entries `<= t`, find a maximum matching, and stop once it saturates
//! every user. Otherwise a König cover of the threshold graph has fewer than
//! `K` vertices, so every full assignment uses some uncovered entry and the
//! smallest uncovered entry is the next threshold.

use super::matching::{extend_matching, min_vertex_cover, BipartiteGraph, Matching};
use super::{Assignment, CostMatrix, Objective};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LbapSolution {
    pub assignment: Assignment,
    /// Thresholds tried, in order. The last one is the bottleneck value.
    pub thresholds: Vec<f64>,
}

pub fn solve_lbap(cost: &CostMatrix) -> Result<Assignment> {
    threshold_algorithm(cost).map(|s| s.assignment)
}

/// Lower bound to start from. Every user needs some unit, so the bottleneck
/// is at least the largest row minimum. Column minima only bound it when
/// every unit must be used (`K = M`).
fn initial_threshold(cost: &CostMatrix) -> f64 {
    let row_min = |k: usize| cost.row(k).iter().copied().fold(f64::INFINITY, f64::min);
    let mut t = (0..cost.rows()).map(row_min).fold(f64::NEG_INFINITY, f64::max);
    if cost.rows() == cost.cols() {
        let col_min = |m: usize| (0..cost.rows()).map(|k| cost.get(k, m)).fold(f64::INFINITY, f64::min);
        t = (0..cost.cols()).map(col_min).fold(t, f64::max);
    }
    t
}

fn threshold_graph(cost: &CostMatrix, t: f64) -> Result<BipartiteGraph> {
    let mut g = BipartiteGraph::new(cost.rows(), cost.cols());
    for k in 0..cost.rows() {
        for m in 0..cost.cols() {
            if cost.get(k, m) <= t {
                g.add_edge(k, m)?;
            }
        }
    }
    Ok(g)
}

/// Minimize `max_k cost(k, p(k))` over injective `p`.
pub fn threshold_algorithm(cost: &CostMatrix) -> Result<LbapSolution> {
    let (n_users, n_units) = (cost.rows(), cost.cols());
    let mut t = initial_threshold(cost);
    let mut thresholds = vec![t];
    // edges only get added as t grows, so the previous matching stays valid
    let mut matching = Matching::empty(n_users, n_units);
    loop {
        let graph = threshold_graph(cost, t)?;
        extend_matching(&graph, &mut matching);
        if matching.size() == n_users {
            break;
        }
        let cover = min_vertex_cover(&graph, &matching)?;
        let mut row_covered = vec![false; n_users];
        let mut col_covered = vec![false; n_units];
        cover.rows.iter().for_each(|&k| row_covered[k] = true);
        cover.cols.iter().for_each(|&m| col_covered[m] = true);
        let next = (0..n_users)
            .filter(|&k| !row_covered[k])
            .flat_map(|k| (0..n_units).filter(|&m| !col_covered[m]).map(move |m| (k, m)))
            .map(|(k, m)| cost.get(k, m))
            .fold(f64::INFINITY, f64::min);
        if !(next > t) {
            return Err(Error::Contract(format!("threshold did not increase from {t} (next {next})")));
        }
        t = next;
        thresholds.push(t);
    }
    let mapping: Vec<usize> = matching.left.iter().map(|m| m.expect("perfect on users")).collect();
    let value = cost.bottleneck_cost(&mapping);
    Ok(LbapSolution {
        assignment: Assignment {
            mapping,
            objective: Objective::BottleneckCost,
            value,
        },
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assign::{brute_force_lbap, solve_lsap};
    use proptest::prelude::*;

    #[test]
    fn two_by_two_example() {
        let cost = CostMatrix::from_rows(&[vec![-0.5, -0.1], vec![-0.2, -0.4]]).unwrap();
        let a = solve_lbap(&cost).unwrap();
        assert_eq!(a.mapping, vec![0, 1]);
        assert_eq!(a.value, -0.4);
    }

    #[test]
    fn single_user_is_row_minimum() {
        let cost = CostMatrix::from_rows(&[vec![-0.2, -0.7, -0.3]]).unwrap();
        let a = solve_lbap(&cost).unwrap();
        assert_eq!(a.mapping, vec![1]);
        assert_eq!(a.value, -0.7);
    }

    #[test]
    fn rectangular_start_ignores_column_minima() {
        // unit 2 is useless; its column minimum would overshoot the optimum
        let cost = CostMatrix::from_rows(&[vec![-0.9, -0.1, 0.0], vec![-0.1, -0.9, 0.0]]).unwrap();
        let sol = threshold_algorithm(&cost).unwrap();
        assert_eq!(sol.assignment.value, -0.9);
        assert_eq!(sol.thresholds, vec![-0.9]);
    }

    #[test]
    fn needs_several_thresholds() {
        let cost = CostMatrix::from_rows(&[
            vec![-0.9, -0.1, -0.1, -0.1],
            vec![-0.8, -0.1, -0.1, -0.1],
            vec![-0.7, -0.6, -0.1, -0.1],
        ])
        .unwrap();
        let sol = threshold_algorithm(&cost).unwrap();
        assert_eq!(sol.assignment.value, brute_force_lbap(&cost).unwrap().value);
        assert!(sol.thresholds.len() > 1);
    }

    fn matrix() -> impl Strategy<Value = CostMatrix> {
        (1usize..=5)
            .prop_flat_map(|k| (Just(k), k..=6))
            .prop_flat_map(|(k, m)| (Just(k), Just(m), proptest::collection::vec(-1.0f64..0.0, k * m)))
            .prop_map(|(k, m, e)| CostMatrix::new(k, m, e).unwrap())
    }

    proptest! {
        #[test]
        fn matches_enumeration(cost in matrix()) {
            let sol = threshold_algorithm(&cost).unwrap();
            sol.assignment.validate(cost.cols()).unwrap();
            prop_assert_eq!(sol.assignment.value, brute_force_lbap(&cost).unwrap().value);
            prop_assert!(cost.entries().contains(&sol.assignment.value));
            prop_assert!(sol.thresholds.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(*sol.thresholds.last().unwrap(), sol.assignment.value);
        }

        #[test]
        fn never_worse_than_lsap_bottleneck(cost in matrix()) {
            let lbap = solve_lbap(&cost).unwrap();
            let lsap = solve_lsap(&cost).unwrap();
            prop_assert!(lbap.value <= cost.bottleneck_cost(&lsap.mapping));
        }

        #[test]
        fn handles_ties(raw in proptest::collection::vec(0u8..3, 12)) {
            let cost = CostMatrix::new(3, 4, raw.iter().map(|&v| -(v as f64)).collect()).unwrap();
            prop_assert_eq!(solve_lbap(&cost).unwrap().value, brute_force_lbap(&cost).unwrap().value);
        }
    }
}
