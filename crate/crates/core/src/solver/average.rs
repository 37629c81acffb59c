//! Ergodic primal of the dual loop.
//!
//! The Lagrangian is linear in `x` once the resource shares are minimized
//! out, so each iterate's minimizer is a vertex and the relaxed optimum is
//! generally a mix of vertices. The average is moved toward each new vertex
//! pairwise: every task shifts weight from its costliest active tier to the
//! tier it just picked, by the step that minimizes the pooled objective
//! along that direction.

use crate::latency::{Decision, Tier};
use crate::scenario::{Scheme, TaskSet, Topology};

use super::dual::{capacities, indicators, pooled_objective, sqrt_loads, DualState};

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalAverage {
    x: Vec<[f64; 3]>,
}

fn dot_over_capacity(p: &DualState, q: &DualState, caps: &DualState) -> f64 {
    let pairs = |a: &[f64], b: &[f64], c: &[f64]| -> f64 { a.iter().zip(b).zip(c).map(|((a, b), c)| a * b / c).sum() };
    pairs(&p.mu, &q.mu, &caps.mu)
        + pairs(&p.lambda, &q.lambda, &caps.lambda)
        + p.rho * q.rho / caps.rho
        + pairs(&p.nu, &q.nu, &caps.nu)
        + pairs(&p.xi, &q.xi, &caps.xi)
}

impl PrimalAverage {
    /// Starts at the vertex of `decision`.
    pub fn new(decision: &Decision) -> Self {
        Self { x: indicators(decision) }
    }

    pub fn x(&self) -> &[[f64; 3]] {
        &self.x
    }

    pub fn objective(&self, tasks: &TaskSet, topology: &Topology) -> f64 {
        pooled_objective(&self.x, tasks, topology)
    }

    /// One pairwise step toward `decision`, whose tiers minimize
    /// `marginals` (the objective's gradient at the current average).
    /// Returns the step length taken.
    pub fn step(&mut self, marginals: &[[f64; 3]], decision: &Decision, tasks: &TaskSet, topology: &Topology) -> f64 {
        let mut direction = vec![[0.0; 3]; self.x.len()];
        let mut max_step: f64 = 1.0;
        for (k, (xk, mk)) in self.x.iter().zip(marginals).enumerate() {
            let toward = decision.0[k].index();
            let away = (0..3)
                .filter(|&t| xk[t] > 0.0)
                .max_by(|&a, &b| mk[a].total_cmp(&mk[b]).then(a.cmp(&b)))
                .expect("each row of the average sums to one");
            if toward != away && mk[toward] < mk[away] {
                direction[k][toward] = 1.0;
                direction[k][away] = -1.0;
                max_step = max_step.min(xk[away]);
            }
        }
        // the objective is quadratic along the direction: a γ² + b γ + const
        let caps = capacities(topology);
        let here = sqrt_loads(&self.x, tasks, topology);
        let along = sqrt_loads(&direction, tasks, topology);
        let a = dot_over_capacity(&along, &along, &caps);
        let b = 2.0 * dot_over_capacity(&here, &along, &caps);
        if !(a > 0.0) || b >= 0.0 {
            return 0.0;
        }
        let step = (-b / (2.0 * a)).min(max_step);
        for (xk, dk) in self.x.iter_mut().zip(&direction) {
            for t in 0..3 {
                if dk[t] != 0.0 {
                    xk[t] = (xk[t] + step * dk[t]).clamp(0.0, 1.0);
                }
            }
            if step == max_step {
                // drop steps empty a tier exactly
                for v in xk.iter_mut() {
                    if *v < 1e-15 {
                        *v = 0.0;
                    }
                }
            }
        }
        step
    }

    /// Per task the allowed tier of largest weight; ties follow the
    /// scheme's tier order.
    pub fn rounded(&self, scheme: Scheme) -> Decision {
        let allowed = scheme.allowed();
        Decision(
            self.x
                .iter()
                .map(|xk| {
                    allowed
                        .iter()
                        .copied()
                        .reduce(|best, t: Tier| if xk[t.index()] > xk[best.index()] { t } else { best })
                        .expect("every scheme allows at least one tier")
                })
                .collect(),
        )
    }
}
