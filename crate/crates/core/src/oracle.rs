//! Exhaustive ground truth for small instances.
//!
//! Enumerates every tier assignment the scheme allows, gives each the exact
//! square-root allocation and keeps the lowest total delay. Decisions are
//! visited in lexicographic order (task 0 most significant, L before H
//! before C); on equal cost the first visited wins.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::latency::{total_delay, Allocation, Decision};
use crate::scenario::{Scheme, TaskSet, Topology};
use crate::solver::allocate_given_decision;

/// Default enumeration cap: 3⁶ decision vectors.
pub const DEFAULT_ENUMERATION_CAP: u128 = 729;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub decision: Decision,
    pub allocation: Allocation,
    pub total_delay_s: f64,
}

/// Minimal total delay achievable under a fixed decision, seconds.
pub fn objective_of(decision: &Decision, topology: &Topology, tasks: &TaskSet, rates: &[f64]) -> Result<f64> {
    let allocation = allocate_given_decision(decision, tasks, topology);
    total_delay(topology, tasks, decision, &allocation, rates)
}

/// The `index`-th decision in lexicographic order over the scheme's tiers.
fn nth_decision(scheme: Scheme, num_tasks: usize, mut index: u128) -> Decision {
    let allowed = scheme.allowed();
    let base = allowed.len() as u128;
    let mut tiers = vec![allowed[0]; num_tasks];
    for slot in tiers.iter_mut().rev() {
        *slot = allowed[(index % base) as usize];
        index /= base;
    }
    Decision(tiers)
}

/// Globally optimal plan for the scheme, by enumeration.
pub fn enumerate_optimal(
    topology: &Topology,
    tasks: &TaskSet,
    rates: &[f64],
    scheme: Scheme,
    cap: u128,
) -> Result<OracleSolution> {
    let base = scheme.allowed().len() as u128;
    let count = u32::try_from(tasks.len()).ok().and_then(|n| base.checked_pow(n)).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    let best = (0..count)
        .into_par_iter()
        .map(|index| {
            let decision = nth_decision(scheme, tasks.len(), index);
            objective_of(&decision, topology, tasks, rates).map(|value| (value, index))
        })
        .try_reduce(
            || (f64::INFINITY, u128::MAX),
            |a, b| Ok(if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;
    let decision = nth_decision(scheme, tasks.len(), best.1.min(count.saturating_sub(1)));
    let allocation = allocate_given_decision(&decision, tasks, topology);
    let total_delay_s = total_delay(topology, tasks, &decision, &allocation, rates)?;
    Ok(OracleSolution { decision, allocation, total_delay_s })
}
