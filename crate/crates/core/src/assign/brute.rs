//! Exhaustive enumeration of injective user-to-unit assignments.
//!
//! There are `M! / (M - K)!` of them; enumeration refuses to start above a
//! cap. Assignments are visited in lexicographic order and only a strictly
//! better value replaces the incumbent, so ties resolve to the
//! lexicographically smallest mapping.

use super::{Assignment, CostMatrix, Objective, RateTable};
use crate::error::{Error, Result};
use crate::field::CouplingTensor;

pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// `M! / (M - K)!`, saturating at `u128::MAX`; zero when `K > M`.
pub fn injection_count(num_users: usize, num_units: usize) -> u128 {
    if num_users > num_units {
        return 0;
    }
    (0..num_users).fold(1u128, |acc, i| acc.saturating_mul((num_units - i) as u128))
}

/// Call `visit` on every injective mapping in lexicographic order and
/// return how many there were.
pub fn for_each_injection(num_users: usize, num_units: usize, cap: u128, mut visit: impl FnMut(&[usize])) -> Result<u128> {
    if num_users == 0 || num_users > num_units {
        return Err(Error::domain(format!("cannot assign {num_users} users to {num_units} units")));
    }
    let cardinality = injection_count(num_users, num_units);
    if cardinality > cap {
        return Err(Error::EnumerationCap { cardinality, cap });
    }
    fn rec(k: usize, mapping: &mut Vec<usize>, used: &mut [bool], visit: &mut dyn FnMut(&[usize]), count: &mut u128) {
        if k == mapping.capacity() {
            visit(mapping);
            *count += 1;
            return;
        }
        for m in 0..used.len() {
            if !used[m] {
                used[m] = true;
                mapping.push(m);
                rec(k + 1, mapping, used, visit, count);
                mapping.pop();
                used[m] = false;
            }
        }
    }
    let mut mapping = Vec::with_capacity(num_users);
    let mut used = vec![false; num_units];
    let mut count = 0u128;
    rec(0, &mut mapping, &mut used, &mut visit, &mut count);
    debug_assert_eq!(count, cardinality);
    Ok(count)
}

fn best_by(
    num_users: usize,
    num_units: usize,
    cap: u128,
    objective: Objective,
    value_of: impl Fn(&[usize]) -> f64,
    better: impl Fn(f64, f64) -> bool,
) -> Result<BruteForce> {
    let mut best: Option<(Vec<usize>, f64)> = None;
    let evaluated = for_each_injection(num_users, num_units, cap, |mapping| {
        let v = value_of(mapping);
        if best.as_ref().is_none_or(|(_, b)| better(v, *b)) {
            best = Some((mapping.to_vec(), v));
        }
    })?;
    let (mapping, value) = best.expect("at least one injection");
    Ok(BruteForce {
        assignment: Assignment { mapping, objective, value },
        evaluated,
    })
}

/// Exhaustive optimum and the number of assignments examined.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub assignment: Assignment,
    pub evaluated: u128,
}

pub fn brute_force_lsap(cost: &CostMatrix) -> Result<Assignment> {
    best_by(cost.rows(), cost.cols(), DEFAULT_ENUMERATION_CAP, Objective::SumCost, |p| cost.sum_cost(p), |a, b| a < b)
        .map(|b| b.assignment)
}

pub fn brute_force_lbap(cost: &CostMatrix) -> Result<Assignment> {
    best_by(
        cost.rows(),
        cost.cols(),
        DEFAULT_ENUMERATION_CAP,
        Objective::BottleneckCost,
        |p| cost.bottleneck_cost(p),
        |a, b| a < b,
    )
    .map(|b| b.assignment)
}

fn check_maximized(objective: Objective) -> Result<()> {
    match objective {
        Objective::SumRate | Objective::MinRate | Objective::SumRss | Objective::MinRss => Ok(()),
        other => Err(Error::Contract(format!(
            "{} is a cost objective; use the cost-matrix oracles",
            other.name()
        ))),
    }
}

/// Value of `mapping` under one of the maximized objectives.
pub fn objective_value(objective: Objective, mapping: &[usize], rates: &RateTable, tensor: &CouplingTensor) -> Result<f64> {
    check_maximized(objective)?;
    Ok(maximized_value(objective, mapping, rates, tensor))
}

fn maximized_value(objective: Objective, mapping: &[usize], rates: &RateTable, tensor: &CouplingTensor) -> f64 {
    let it = mapping.iter().enumerate();
    match objective {
        Objective::SumRate => it.map(|(k, &m)| rates.get(k, m)).sum(),
        Objective::MinRate => it.map(|(k, &m)| rates.get(k, m)).fold(f64::INFINITY, f64::min),
        Objective::SumRss => it.map(|(k, &m)| tensor.rss(m, k)).sum(),
        Objective::MinRss => it.map(|(k, &m)| tensor.rss(m, k)).fold(f64::INFINITY, f64::min),
        Objective::SumCost | Objective::BottleneckCost => unreachable!("checked by check_maximized"),
    }
}

/// Maximize a rate or RSS objective over every assignment. Rates include
/// the full inter-user interference on each unit.
pub fn brute_force_assign(
    tensor: &CouplingTensor,
    objective: Objective,
    noise_density: f64,
    powers: &[f64],
    cap: u128,
) -> Result<BruteForce> {
    check_maximized(objective)?;
    let rates = RateTable::new(tensor, noise_density, powers)?;
    best_by(
        tensor.num_users(),
        tensor.num_units(),
        cap,
        objective,
        |p| maximized_value(objective, p, &rates, tensor),
        |a, b| a > b,
    )
}

/// Mean objective over all assignments, i.e. the expected value of a
/// uniformly random assignment.
pub fn random_baseline(tensor: &CouplingTensor, objective: Objective, noise_density: f64, powers: &[f64], cap: u128) -> Result<f64> {
    check_maximized(objective)?;
    let rates = RateTable::new(tensor, noise_density, powers)?;
    let mut total = 0.0;
    let count = for_each_injection(tensor.num_users(), tensor.num_units(), cap, |p| {
        total += maximized_value(objective, p, &rates, tensor);
    })?;
    Ok(total / count as f64)
}
