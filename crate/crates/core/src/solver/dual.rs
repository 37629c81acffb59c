//! Lagrangian machinery of the relaxed problem.
//!
//! After relaxing the tier indicators to `x ∈ [0,1]³` and substituting
//! `a = x^L f^L`, `b = x^H f^H`, `c = x^C f^C`, `α = x^H B^L`, `β = x^C B^H`,
//! `γ = x^C B^L`, each delay term `x · d / r` becomes the perspective
//! `x² d / s`, which is jointly convex in `(x, s)`. Dualizing the five
//! capacity constraints with multipliers `(μ_i, λ_j, ρ, ν_i, ξ_j)` makes the
//! Lagrangian separable per task:
//!
//! ```text
//! s* = x √(d / price)               (stationarity in each substituted variable)
//! x² d / s* + price · s* = 2 x √(d · price)
//! ```
//!
//! so the Lagrangian is linear in `x` with per-tier slopes `L_k`, `H_k`,
//! `C_k` (the marginal costs), and the minimizing `x` is the vertex of the
//! cheapest allowed tier.

use crate::error::{Error, Result};
use crate::latency::{Decision, Tier};
use crate::scenario::{Scheme, TaskSet, Topology};

/// Lagrange multipliers of the five capacity constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    /// MEC-L compute price per RU.
    pub mu: Vec<f64>,
    /// MEC-H compute price per DU.
    pub lambda: Vec<f64>,
    /// Cloud compute price.
    pub rho: f64,
    /// Fronthaul bandwidth price per RU.
    pub nu: Vec<f64>,
    /// Midhaul bandwidth price per DU.
    pub xi: Vec<f64>,
}

impl DualState {
    pub fn is_valid(&self) -> bool {
        self.mu
            .iter()
            .chain(&self.lambda)
            .chain(&self.nu)
            .chain(&self.xi)
            .chain(std::iter::once(&self.rho))
            .all(|v| v.is_finite() && *v >= 0.0)
    }

    /// Prices that would make every constraint tight if each task sat on
    /// that constraint's tier: `(Σ √demand / capacity)²` per pool.
    pub fn pool_tight(tasks: &TaskSet, topology: &Topology) -> Self {
        let mut mu = vec![0.0; topology.num_rus];
        let mut nu = vec![0.0; topology.num_rus];
        let mut lambda = vec![0.0; topology.num_dus];
        let mut xi = vec![0.0; topology.num_dus];
        let mut rho = 0.0;
        for k in 0..tasks.len() {
            let (ru, du) = (topology.user_to_ru[k], topology.du_of_user(k));
            let sc = tasks.cycles(k).sqrt();
            mu[ru] += sc;
            lambda[du] += sc;
            rho += sc;
            nu[ru] += (tasks.data_bits[k] / topology.fronthaul_se[ru]).sqrt();
            xi[du] += (tasks.data_bits[k] / topology.midhaul_se[du]).sqrt();
        }
        let tighten = |sums: Vec<f64>, caps: &[f64]| -> Vec<f64> {
            sums.iter().zip(caps).map(|(s, c)| (s / c).powi(2)).collect()
        };
        Self {
            mu: tighten(mu, &topology.mecl_capacity_hz),
            lambda: tighten(lambda, &topology.mech_capacity_hz),
            rho: (rho / topology.cloud_capacity_hz).powi(2),
            nu: tighten(nu, &topology.fronthaul_capacity_hz),
            xi: tighten(xi, &topology.midhaul_capacity_hz),
        }
    }

    fn zip_mut(&mut self, other: &DualState, mut f: impl FnMut(&mut f64, f64)) {
        for (a, b) in self.mu.iter_mut().zip(&other.mu) {
            f(a, *b);
        }
        for (a, b) in self.lambda.iter_mut().zip(&other.lambda) {
            f(a, *b);
        }
        f(&mut self.rho, other.rho);
        for (a, b) in self.nu.iter_mut().zip(&other.nu) {
            f(a, *b);
        }
        for (a, b) in self.xi.iter_mut().zip(&other.xi) {
            f(a, *b);
        }
    }

    fn sum(&self) -> f64 {
        self.mu.iter().chain(&self.lambda).chain(&self.nu).chain(&self.xi).sum::<f64>() + self.rho
    }

    /// Element-wise `max(self, floor)`.
    pub fn floored(mut self, floor: &DualState) -> Self {
        self.zip_mut(floor, |a, b| *a = a.max(b));
        self
    }
}

/// A point of the relaxed problem in substituted variables, one entry per task.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedPoint {
    /// `(x^L, x^H, x^C)` per task, on the unit simplex.
    pub x: Vec<[f64; 3]>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl RelaxedPoint {
    /// Convex combination `t · self + (1 - t) · other`.
    pub fn lerp(&self, other: &RelaxedPoint, t: f64) -> RelaxedPoint {
        let mix = |p: &[f64], q: &[f64]| -> Vec<f64> { p.iter().zip(q).map(|(a, b)| t * a + (1.0 - t) * b).collect() };
        RelaxedPoint {
            x: self.x.iter().zip(&other.x).map(|(p, q)| [0, 1, 2].map(|i| t * p[i] + (1.0 - t) * q[i])).collect(),
            a: mix(&self.a, &other.a),
            b: mix(&self.b, &other.b),
            c: mix(&self.c, &other.c),
            alpha: mix(&self.alpha, &other.alpha),
            beta: mix(&self.beta, &other.beta),
            gamma: mix(&self.gamma, &other.gamma),
        }
    }
}

/// Indicator vectors of an integer decision.
pub fn indicators(decision: &Decision) -> Vec<[f64; 3]> {
    decision
        .tiers()
        .iter()
        .map(|t| {
            let mut x = [0.0; 3];
            x[t.index()] = 1.0;
            x
        })
        .collect()
}

/// `x √(demand / price)`, and zero wherever `x` is zero.
fn closed_form(x: f64, demand: f64, price: f64, dual: &'static str, tier: Tier) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    if !(price > 0.0) {
        return Err(Error::NonPositiveDual { dual, tier });
    }
    Ok(x * (demand / price).sqrt())
}

/// Compute speeds `(a, b, c)` minimizing the Lagrangian for fixed `x`.
pub fn primal_speeds_from_duals(
    duals: &DualState,
    x: &[[f64; 3]],
    tasks: &TaskSet,
    topology: &Topology,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (mut a, mut b, mut c) = (Vec::with_capacity(x.len()), Vec::with_capacity(x.len()), Vec::with_capacity(x.len()));
    for (k, xk) in x.iter().enumerate() {
        let (ru, du) = (topology.user_to_ru[k], topology.du_of_user(k));
        let demand = tasks.cycles(k);
        a.push(closed_form(xk[0], demand, duals.mu[ru], "mu", Tier::Local)?);
        b.push(closed_form(xk[1], demand, duals.lambda[du], "lambda", Tier::High)?);
        c.push(closed_form(xk[2], demand, duals.rho, "rho", Tier::Cloud)?);
    }
    Ok((a, b, c))
}

/// Bandwidth shares `(α, β, γ)` minimizing the Lagrangian for fixed `x`.
pub fn primal_bandwidth_from_duals(
    duals: &DualState,
    x: &[[f64; 3]],
    tasks: &TaskSet,
    topology: &Topology,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = x.len();
    let (mut alpha, mut beta, mut gamma) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for (k, xk) in x.iter().enumerate() {
        let (ru, du) = (topology.user_to_ru[k], topology.du_of_user(k));
        let fronthaul_demand = tasks.data_bits[k] / topology.fronthaul_se[ru];
        let midhaul_demand = tasks.data_bits[k] / topology.midhaul_se[du];
        alpha.push(closed_form(xk[1], fronthaul_demand, duals.nu[ru], "nu", Tier::High)?);
        beta.push(closed_form(xk[2], midhaul_demand, duals.xi[du], "xi", Tier::Cloud)?);
        gamma.push(closed_form(xk[2], fronthaul_demand, duals.nu[ru], "nu", Tier::Cloud)?);
    }
    Ok((alpha, beta, gamma))
}

/// Lagrangian minimizer over the substituted variables for fixed `x`.
pub fn recover_primal(
    duals: &DualState,
    x: Vec<[f64; 3]>,
    tasks: &TaskSet,
    topology: &Topology,
) -> Result<RelaxedPoint> {
    let (a, b, c) = primal_speeds_from_duals(duals, &x, tasks, topology)?;
    let (alpha, beta, gamma) = primal_bandwidth_from_duals(duals, &x, tasks, topology)?;
    Ok(RelaxedPoint { x, a, b, c, alpha, beta, gamma })
}

/// Per-task slopes `[L_k, H_k, C_k]` of the Lagrangian in `x` after the
/// substituted variables are minimized out.
pub fn marginal_costs(duals: &DualState, tasks: &TaskSet, topology: &Topology) -> Vec<[f64; 3]> {
    (0..tasks.len())
        .map(|k| {
            let (ru, du) = (topology.user_to_ru[k], topology.du_of_user(k));
            let (cycles, data) = (tasks.cycles(k), tasks.data_bits[k]);
            let fronthaul = 2.0 * (data * duals.nu[ru] / topology.fronthaul_se[ru]).sqrt();
            let midhaul = 2.0 * (data * duals.xi[du] / topology.midhaul_se[du]).sqrt();
            [
                2.0 * (cycles * duals.mu[ru]).sqrt(),
                2.0 * (cycles * duals.lambda[du]).sqrt() + fronthaul,
                2.0 * (cycles * duals.rho).sqrt() + fronthaul + midhaul,
            ]
        })
        .collect()
}

/// How equal marginal costs are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Prefer L, then H, then C.
    #[default]
    TierOrder,
    /// Prefer C, then H, then L.
    ReverseTierOrder,
}

/// Winner-take-all tier choice among the scheme's allowed tiers.
pub fn extract_decision(marginals: &[[f64; 3]], scheme: Scheme, tie_break: TieBreak) -> Decision {
    let allowed = scheme.allowed();
    let pick = |m: &[f64; 3]| -> Tier {
        let candidates = allowed.iter().copied();
        let better = |best: Tier, t: Tier| m[t.index()] < m[best.index()];
        match tie_break {
            TieBreak::TierOrder => candidates.reduce(|best, t| if better(best, t) { t } else { best }),
            TieBreak::ReverseTierOrder => candidates.rev().reduce(|best, t| if better(best, t) { t } else { best }),
        }
        .expect("every scheme allows at least one tier")
    };
    Decision(marginals.iter().map(pick).collect())
}

/// Constraint left-hand sides of a relaxed point, grouped like [`DualState`].
pub fn constraint_usage(point: &RelaxedPoint, topology: &Topology) -> DualState {
    let mut used = DualState {
        mu: vec![0.0; topology.num_rus],
        lambda: vec![0.0; topology.num_dus],
        rho: 0.0,
        nu: vec![0.0; topology.num_rus],
        xi: vec![0.0; topology.num_dus],
    };
    for k in 0..point.x.len() {
        let (ru, du) = (topology.user_to_ru[k], topology.du_of_user(k));
        used.mu[ru] += point.a[k];
        used.lambda[du] += point.b[k];
        used.rho += point.c[k];
        used.nu[ru] += point.alpha[k] + point.gamma[k];
        used.xi[du] += point.beta[k];
    }
    used
}

/// Capacities grouped like [`DualState`].
pub fn capacities(topology: &Topology) -> DualState {
    DualState {
        mu: topology.mecl_capacity_hz.clone(),
        lambda: topology.mech_capacity_hz.clone(),
        rho: topology.cloud_capacity_hz,
        nu: topology.fronthaul_capacity_hz.clone(),
        xi: topology.midhaul_capacity_hz.clone(),
    }
}

/// Largest relative excess `(used - capacity) / capacity` over all
/// constraints, or zero when all hold.
pub fn max_relative_violation(point: &RelaxedPoint, topology: &Topology) -> f64 {
    let mut used = constraint_usage(point, topology);
    let caps = capacities(topology);
    let mut worst: f64 = 0.0;
    used.zip_mut(&caps, |u, c| worst = worst.max((*u - c) / c));
    worst
}

/// One multiplicative step along the dual subgradient.
///
/// The subgradient of the dual function at `duals` is `used - capacity`
/// evaluated at the Lagrangian minimizer `primal`. Each multiplier moves as
///
/// ```text
/// p ← max(floor, p · (1 + (used - cap) / cap)²) = max(floor, p · (used / cap)²)
/// ```
///
/// Because recovered shares scale as `p^(-1/2)`, the new price is exactly
/// the one at which `primal`'s relaxed assignment fills the pool. A zero
/// subgradient leaves `p` unchanged (up to the floor); a positive one
/// raises it.
pub fn dual_update(duals: &DualState, primal: &RelaxedPoint, topology: &Topology, floor: &DualState) -> DualState {
    let mut ratio = constraint_usage(primal, topology);
    ratio.zip_mut(&capacities(topology), |u, c| *u /= c);
    let mut next = duals.clone();
    next.zip_mut(&ratio, |p, r| *p *= r * r);
    next.floored(floor)
}

/// `Σ x · √demand` per pool for a (possibly fractional) assignment, grouped
/// like [`DualState`]. Entries of `x` may be negative, which makes this
/// usable for directions as well as points.
pub fn sqrt_loads(x: &[[f64; 3]], tasks: &TaskSet, topology: &Topology) -> DualState {
    let mut loads = DualState {
        mu: vec![0.0; topology.num_rus],
        lambda: vec![0.0; topology.num_dus],
        rho: 0.0,
        nu: vec![0.0; topology.num_rus],
        xi: vec![0.0; topology.num_dus],
    };
    for (k, xk) in x.iter().enumerate() {
        let (ru, du) = (topology.user_to_ru[k], topology.du_of_user(k));
        let sc = tasks.cycles(k).sqrt();
        let sf = (tasks.data_bits[k] / topology.fronthaul_se[ru]).sqrt();
        let sm = (tasks.data_bits[k] / topology.midhaul_se[du]).sqrt();
        let [xl, xh, xc] = *xk;
        loads.mu[ru] += xl * sc;
        loads.lambda[du] += xh * sc;
        loads.rho += xc * sc;
        loads.nu[ru] += (xh + xc) * sf;
        loads.xi[du] += xc * sm;
    }
    loads
}

/// Relaxed objective of `x` with every pool split optimally:
/// `Σ_pools (Σ x · √demand)² / capacity`.
pub fn pooled_objective(x: &[[f64; 3]], tasks: &TaskSet, topology: &Topology) -> f64 {
    let mut loads = sqrt_loads(x, tasks, topology);
    loads.zip_mut(&capacities(topology), |s, c| *s = *s * *s / c);
    loads.sum()
}

/// Relaxed objective: Σ over tasks of the perspective delay terms.
/// A term with `x = 0` contributes zero; `x > 0` with a zero share is infinite.
pub fn relaxed_objective(point: &RelaxedPoint, tasks: &TaskSet, topology: &Topology) -> f64 {
    let term = |x: f64, demand: f64, share: f64| if x == 0.0 { 0.0 } else { x * x * demand / share };
    (0..point.x.len())
        .map(|k| {
            let (ru, du) = (topology.user_to_ru[k], topology.du_of_user(k));
            let (cycles, data) = (tasks.cycles(k), tasks.data_bits[k]);
            let [xl, xh, xc] = point.x[k];
            let fronthaul_demand = data / topology.fronthaul_se[ru];
            term(xl, cycles, point.a[k])
                + term(xh, cycles, point.b[k])
                + term(xc, cycles, point.c[k])
                + term(xh, fronthaul_demand, point.alpha[k])
                + term(xc, fronthaul_demand, point.gamma[k])
                + term(xc, data / topology.midhaul_se[du], point.beta[k])
        })
        .sum()
}

/// Lagrangian of the relaxed problem at `(point, duals)`.
pub fn lagrangian(duals: &DualState, point: &RelaxedPoint, tasks: &TaskSet, topology: &Topology) -> f64 {
    let mut used = constraint_usage(point, topology);
    let caps = capacities(topology);
    used.zip_mut(&caps, |u, c| *u -= c);
    let penalty = |p: &[f64], g: &[f64]| -> f64 { p.iter().zip(g).map(|(a, b)| a * b).sum() };
    relaxed_objective(point, tasks, topology)
        + penalty(&duals.mu, &used.mu)
        + penalty(&duals.lambda, &used.lambda)
        + duals.rho * used.rho
        + penalty(&duals.nu, &used.nu)
        + penalty(&duals.xi, &used.xi)
}

/// Dual function: the Lagrangian minimized over the relaxed feasible set
/// with `x` restricted to the scheme's tiers.
pub fn dual_value(duals: &DualState, tasks: &TaskSet, topology: &Topology, scheme: Scheme) -> f64 {
    let marginals = marginal_costs(duals, tasks, topology);
    let per_task: f64 =
        marginals.iter().map(|m| scheme.allowed().iter().map(|t| m[t.index()]).fold(f64::INFINITY, f64::min)).sum();
    let caps = capacities(topology);
    let dot = |p: &[f64], c: &[f64]| -> f64 { p.iter().zip(c).map(|(a, b)| a * b).sum() };
    per_task
        - dot(&duals.mu, &caps.mu)
        - dot(&duals.lambda, &caps.lambda)
        - duals.rho * caps.rho
        - dot(&duals.nu, &caps.nu)
        - dot(&duals.xi, &caps.xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_task_topology() -> Topology {
        Topology {
            num_dus: 1,
            num_rus: 1,
            num_users: 1,
            ru_to_du: vec![0],
            user_to_ru: vec![0],
            uplink_bandwidth_hz: vec![1.0],
            fronthaul_capacity_hz: vec![10.0],
            midhaul_capacity_hz: vec![10.0],
            fronthaul_se: vec![1.0],
            midhaul_se: vec![1.0],
            mecl_capacity_hz: vec![10.0],
            mech_capacity_hz: vec![10.0],
            cloud_capacity_hz: 10.0,
        }
    }

    fn unit_duals() -> DualState {
        DualState { mu: vec![1.0], lambda: vec![1.0], rho: 1.0, nu: vec![1.0], xi: vec![1.0] }
    }

    #[test]
    fn speed_closed_form() {
        let tasks = TaskSet { data_bits: vec![4.0], cycles_per_bit: vec![1.0] };
        let (a, b, c) =
            primal_speeds_from_duals(&unit_duals(), &[[1.0, 0.0, 0.0]], &tasks, &one_task_topology()).unwrap();
        assert_eq!((a[0], b[0], c[0]), (2.0, 0.0, 0.0));
    }

    #[test]
    fn bandwidth_closed_form() {
        let tasks = TaskSet { data_bits: vec![9.0], cycles_per_bit: vec![1.0] };
        let topo = one_task_topology();
        let (alpha, beta, gamma) =
            primal_bandwidth_from_duals(&unit_duals(), &[[0.0, 1.0, 0.0]], &tasks, &topo).unwrap();
        assert_eq!((alpha[0], beta[0], gamma[0]), (3.0, 0.0, 0.0));
    }

    #[test]
    fn zero_indicator_ignores_zero_dual() {
        let tasks = TaskSet { data_bits: vec![9.0], cycles_per_bit: vec![1.0] };
        let duals = DualState { mu: vec![0.0], ..unit_duals() };
        let (a, ..) = primal_speeds_from_duals(&duals, &[[0.0, 1.0, 0.0]], &tasks, &one_task_topology()).unwrap();
        assert_eq!(a[0], 0.0);
        let err = primal_speeds_from_duals(&duals, &[[1.0, 0.0, 0.0]], &tasks, &one_task_topology()).unwrap_err();
        assert!(matches!(err, Error::NonPositiveDual { dual: "mu", .. }));
    }

    #[test]
    fn local_marginal_is_four() {
        let tasks = TaskSet { data_bits: vec![4.0], cycles_per_bit: vec![1.0] };
        let m = marginal_costs(&unit_duals(), &tasks, &one_task_topology());
        assert_eq!(m[0][0], 4.0);
    }

    #[test]
    fn marginal_term_count_orders_tiers() {
        let tasks = TaskSet { data_bits: vec![7.0], cycles_per_bit: vec![0.3] };
        let m = marginal_costs(&unit_duals(), &tasks, &one_task_topology())[0];
        assert!(m[2] > m[1] && m[1] > m[0]);
    }

    #[test]
    fn cloud_marginal_limit_small_rho() {
        let tasks = TaskSet { data_bits: vec![5.0], cycles_per_bit: vec![2.0] };
        let duals = DualState { rho: 1e-30, nu: vec![2.0], xi: vec![3.0], ..unit_duals() };
        let m = marginal_costs(&duals, &tasks, &one_task_topology())[0];
        let limit = 2.0 * (5.0f64 * 2.0).sqrt() + 2.0 * (5.0f64 * 3.0).sqrt();
        assert!((m[2] - limit).abs() < 1e-12);
    }

    #[test]
    fn decision_extraction() {
        let m = [[4.0, 5.0, 6.0]];
        assert_eq!(extract_decision(&m, Scheme::Fog, TieBreak::TierOrder).0, vec![Tier::Local]);
        assert_eq!(extract_decision(&m, Scheme::CloudDu, TieBreak::TierOrder).0, vec![Tier::High]);
        assert_eq!(extract_decision(&m, Scheme::Cloud, TieBreak::TierOrder).0, vec![Tier::Cloud]);
        let tied = [[4.0, 4.0, 6.0]];
        assert_eq!(extract_decision(&tied, Scheme::Fog, TieBreak::TierOrder).0, vec![Tier::Local]);
        assert_eq!(extract_decision(&tied, Scheme::Fog, TieBreak::ReverseTierOrder).0, vec![Tier::High]);
    }

    fn floor() -> DualState {
        DualState { mu: vec![1e-12], lambda: vec![1e-12], rho: 1e-12, nu: vec![1e-12], xi: vec![1e-12] }
    }

    fn point_with(a: f64) -> RelaxedPoint {
        RelaxedPoint {
            x: vec![[1.0, 0.0, 0.0]],
            a: vec![a],
            b: vec![0.0],
            c: vec![0.0],
            alpha: vec![0.0],
            beta: vec![0.0],
            gamma: vec![0.0],
        }
    }

    #[test]
    fn zero_subgradient_keeps_duals() {
        let mut topo = one_task_topology();
        // MEC-L exactly full
        topo.mecl_capacity_hz = vec![3.0];
        let next = dual_update(&unit_duals(), &point_with(3.0), &topo, &floor());
        assert_eq!(next.mu, vec![1.0]);
    }

    #[test]
    fn overuse_raises_price() {
        let topo = one_task_topology();
        let next = dual_update(&unit_duals(), &point_with(25.0), &topo, &floor());
        assert!(next.mu[0] > 1.0);
        // unused constraints fall to the floor
        assert_eq!(next.rho, 1e-12);
    }

    #[test]
    fn update_clears_the_pool() {
        let topo = one_task_topology();
        let tasks = TaskSet { data_bits: vec![4.0], cycles_per_bit: vec![1.0] };
        let x = vec![[0.5, 0.0, 0.5]];
        let point = recover_primal(&unit_duals(), x.clone(), &tasks, &topo).unwrap();
        let next = dual_update(&unit_duals(), &point, &topo, &floor());
        let cleared = recover_primal(&next, x, &tasks, &topo).unwrap();
        assert!(max_relative_violation(&cleared, &topo).abs() < 1e-15);
        assert!((cleared.a[0] - 10.0).abs() < 1e-12 && (cleared.c[0] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn pooled_objective_matches_optimal_split() {
        let topo = one_task_topology();
        let tasks = TaskSet { data_bits: vec![4.0], cycles_per_bit: vec![1.0] };
        let x = vec![[0.25, 0.25, 0.5]];
        let duals = DualState::pool_tight(&tasks, &topo);
        let tight = recover_primal(&duals, x.clone(), &tasks, &topo).unwrap();
        let cleared = recover_primal(&dual_update(&duals, &tight, &topo, &floor()), x.clone(), &tasks, &topo).unwrap();
        let direct = relaxed_objective(&cleared, &tasks, &topo);
        assert!((pooled_objective(&x, &tasks, &topo) / direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lagrangian_at_recovered_point_equals_dual_value() {
        let tasks = TaskSet { data_bits: vec![3.0], cycles_per_bit: vec![2.0] };
        let topo = one_task_topology();
        let duals = DualState { mu: vec![0.7], lambda: vec![0.2], rho: 0.1, nu: vec![0.4], xi: vec![0.3] };
        let decision = extract_decision(&marginal_costs(&duals, &tasks, &topo), Scheme::Fog, TieBreak::TierOrder);
        let point = recover_primal(&duals, indicators(&decision), &tasks, &topo).unwrap();
        let l = lagrangian(&duals, &point, &tasks, &topo);
        let d = dual_value(&duals, &tasks, &topo, Scheme::Fog);
        assert!((l - d).abs() < 1e-12, "{l} vs {d}");
    }
}
