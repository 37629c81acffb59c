//! Dual-decomposition planner for tier decisions and resource splits.
//!
//! Each iteration prices every capacity constraint, lets every task pick its
//! cheapest tier under those prices, recovers the closed-form resource
//! shares, and moves the prices along the constraint violation. The relaxed
//! optimum mixes tiers, so the violation is measured on a running average of
//! the picked vertices ([`PrimalAverage`]); the prices are re-cleared against
//! that average every iteration.
//!
//! The integer decision of every iterate is scored exactly. The best of
//! them and the rounded average are refined by single and pairwise tier
//! moves, and the winner gets the exact square-root allocation.

mod allocate;
mod average;
mod dual;

pub use allocate::{allocate_given_decision, decision_cost, task_pools, Pool, PoolSums};
pub use average::PrimalAverage;
pub use dual::{
    capacities, constraint_usage, dual_update, dual_value, extract_decision, indicators, lagrangian, marginal_costs,
    max_relative_violation, pooled_objective, primal_bandwidth_from_duals, primal_speeds_from_duals, recover_primal,
    relaxed_objective, sqrt_loads, DualState, RelaxedPoint, TieBreak,
};

use crate::error::Result;
use crate::latency::{total_delay, Allocation, Decision, Tier};
use crate::scenario::{Scheme, TaskSet, Topology};

/// Multipliers never drop below this fraction of their initial value.
pub const DUAL_FLOOR_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Maximum relative constraint violation, and relative duality gap,
    /// accepted at convergence.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Iterations the decision must stay unchanged before convergence is declared.
    pub stable_window: usize,
    pub tie_break: TieBreak,
    /// Refine the best iterate with single and pairwise tier moves.
    pub local_search: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { epsilon: 1e-4, max_iters: 1000, stable_window: 20, tie_break: TieBreak::TierOrder, local_search: true }
    }
}

/// Per-iteration log of the dual loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Dual function value at the iteration's prices (a lower bound).
    pub dual_value: f64,
    /// Relaxed objective of the averaged primal after this iteration's step.
    pub relaxed_objective: f64,
    /// Exact cost of the iteration's integer decision (access excluded).
    pub decision_cost: f64,
    /// Lowest decision cost seen so far.
    pub best_cost: f64,
    /// Largest relative capacity excess of the averaged primal's shares
    /// recovered at this iteration's prices.
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub decision: Decision,
    pub allocation: Allocation,
    pub duals: DualState,
    /// Final averaged relaxed assignment.
    pub relaxed_x: Vec<[f64; 3]>,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
    /// Total delay including access, seconds.
    pub total_delay_s: f64,
}

impl SolveOutcome {
    /// Highest dual value reached; a lower bound on the relaxed optimum.
    pub fn best_dual(&self) -> f64 {
        self.trace.iter().map(|r| r.dual_value).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lowest relaxed objective reached; an upper bound on the relaxed optimum.
    pub fn best_relaxed(&self) -> f64 {
        self.trace.iter().map(|r| r.relaxed_objective).fold(f64::INFINITY, f64::min)
    }
}

/// Initial prices: pool-tight for the tiers the scheme allows, the floor otherwise.
fn initial_duals(tasks: &TaskSet, topology: &Topology, scheme: Scheme) -> (DualState, DualState) {
    let mut init = DualState::pool_tight(tasks, topology);
    let mut floor = init.clone();
    for v in floor.mu.iter_mut().chain(&mut floor.lambda).chain(&mut floor.nu).chain(&mut floor.xi) {
        *v *= DUAL_FLOOR_FRACTION;
    }
    floor.rho *= DUAL_FLOOR_FRACTION;
    if !scheme.allows(Tier::Local) {
        init.mu.clone_from(&floor.mu);
    }
    if !scheme.allows(Tier::High) {
        init.lambda.clone_from(&floor.lambda);
    }
    (init, floor)
}

/// Relative improvement a move must achieve to be accepted.
const MOVE_THRESHOLD: f64 = 1e-12;

/// Best single-task move, applied if it lowers the cost.
fn improve_single(
    decision: &mut Decision,
    sums: &mut PoolSums,
    tasks: &TaskSet,
    topology: &Topology,
    scheme: Scheme,
) -> bool {
    let cost = sums.cost();
    let mut best: Option<(f64, usize, Tier)> = None;
    for k in 0..decision.len() {
        let from = decision.0[k];
        for &to in scheme.allowed().iter().filter(|&&t| t != from) {
            sums.move_task(topology, tasks, k, from, to);
            let candidate = sums.cost();
            sums.move_task(topology, tasks, k, to, from);
            if candidate < best.map_or(cost * (1.0 - MOVE_THRESHOLD), |b| b.0) {
                best = Some((candidate, k, to));
            }
        }
    }
    let Some((_, k, to)) = best else { return false };
    sums.move_task(topology, tasks, k, decision.0[k], to);
    decision.0[k] = to;
    sums.resync(topology);
    true
}

/// First improving simultaneous move of two tasks, applied.
fn improve_pair(
    decision: &mut Decision,
    sums: &mut PoolSums,
    tasks: &TaskSet,
    topology: &Topology,
    scheme: Scheme,
) -> bool {
    let threshold = sums.cost() * (1.0 - MOVE_THRESHOLD);
    let allowed = scheme.allowed();
    for i in 0..decision.len() {
        let from_i = decision.0[i];
        for &to_i in allowed.iter().filter(|&&t| t != from_i) {
            sums.move_task(topology, tasks, i, from_i, to_i);
            for j in i + 1..decision.len() {
                let from_j = decision.0[j];
                for &to_j in allowed.iter().filter(|&&t| t != from_j) {
                    sums.move_task(topology, tasks, j, from_j, to_j);
                    let candidate = sums.cost();
                    sums.move_task(topology, tasks, j, to_j, from_j);
                    if candidate < threshold {
                        sums.move_task(topology, tasks, j, from_j, to_j);
                        decision.0[i] = to_i;
                        decision.0[j] = to_j;
                        sums.resync(topology);
                        return true;
                    }
                }
            }
            sums.move_task(topology, tasks, i, to_i, from_i);
        }
    }
    false
}

/// Descent over single and pairwise tier moves until neither helps.
fn local_search(decision: &mut Decision, tasks: &TaskSet, topology: &Topology, scheme: Scheme) -> f64 {
    let mut sums = PoolSums::new(topology, tasks, decision);
    loop {
        while improve_single(decision, &mut sums, tasks, topology, scheme) {}
        if !improve_pair(decision, &mut sums, tasks, topology, scheme) {
            return sums.fresh_cost(topology);
        }
    }
}

/// Plans tier decisions and resource shares for all tasks.
///
/// `rates` are the uplink rates (bits/s) from the physical layer; they only
/// enter the reported total delay. The returned plan always satisfies every
/// capacity constraint.
///
/// The loop stops once the decision has been stable for
/// `config.stable_window` iterations with the averaged primal within
/// `epsilon` of feasibility, or once the relaxed duality gap falls below
/// `epsilon`.
pub fn solve(
    topology: &Topology,
    tasks: &TaskSet,
    rates: &[f64],
    scheme: Scheme,
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    let (mut duals, floor) = initial_duals(tasks, topology, scheme);

    let mut trace: Vec<IterationRecord> = Vec::with_capacity(config.max_iters.min(4096));
    let mut best: Option<(f64, Decision)> = None;
    let mut average: Option<PrimalAverage> = None;
    let mut previous: Option<Decision> = None;
    let mut best_dual = f64::NEG_INFINITY;
    let mut stable = 0;
    let mut converged = tasks.is_empty();
    let mut iterations = 0;

    while !converged && iterations < config.max_iters {
        iterations += 1;
        let marginals = marginal_costs(&duals, tasks, topology);
        let decision = extract_decision(&marginals, scheme, config.tie_break);

        let cost = decision_cost(&decision, tasks, topology);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, decision.clone()));
        }
        let dual = dual_value(&duals, tasks, topology, scheme);
        best_dual = best_dual.max(dual);

        let average = match &mut average {
            Some(avg) => {
                avg.step(&marginals, &decision, tasks, topology);
                avg
            }
            None => average.insert(PrimalAverage::new(&decision)),
        };
        let primal = recover_primal(&duals, average.x().to_vec(), tasks, topology)?;
        let max_violation = max_relative_violation(&primal, topology);
        let relaxed = average.objective(tasks, topology);
        trace.push(IterationRecord {
            dual_value: dual,
            relaxed_objective: relaxed,
            decision_cost: cost,
            best_cost: best.as_ref().map_or(cost, |b| b.0),
            max_violation,
        });

        stable = if previous.as_ref() == Some(&decision) { stable + 1 } else { 0 };
        previous = Some(decision);
        let settled = stable >= config.stable_window && max_violation < config.epsilon;
        let certified = relaxed - best_dual <= config.epsilon * relaxed;
        duals = dual_update(&duals, &primal, topology, &floor);
        converged = settled || certified;
    }

    let mut starts: Vec<Decision> = best.into_iter().map(|(_, d)| d).collect();
    if let Some(avg) = &average {
        starts.push(avg.rounded(scheme));
    }
    if starts.is_empty() {
        starts.push(Decision::uniform(Tier::Cloud, tasks.len()));
    }
    let mut decision = starts[0].clone();
    let mut cost = decision_cost(&decision, tasks, topology);
    for mut start in starts {
        let start_cost = if config.local_search {
            local_search(&mut start, tasks, topology, scheme)
        } else {
            decision_cost(&start, tasks, topology)
        };
        if start_cost < cost {
            (decision, cost) = (start, start_cost);
        }
    }
    let allocation = allocate_given_decision(&decision, tasks, topology);
    let total_delay_s = total_delay(topology, tasks, &decision, &allocation, rates)?;
    let relaxed_x = average.map(|a| a.x().to_vec()).unwrap_or_default();
    Ok(SolveOutcome { decision, allocation, duals, relaxed_x, iterations, converged, trace, total_delay_s })
}
