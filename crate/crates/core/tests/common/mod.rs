//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the library's allocation or pricing code; pools,
//! splits and gradients are rebuilt from the model definitions.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fogran::latency::Tier;
use fogran::phy::scenario_rates;
use fogran::scenario::generate_scenario;
use fogran::{Decision, Scenario, ScenarioSpec, Scheme, TaskSet, Topology};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Small instances: K = 1..5 users, 2 RUs, 1 or 2 DUs.
pub fn small_instance(seed: u64) -> (Scenario, Vec<f64>) {
    let spec = ScenarioSpec {
        num_users: 1 + (seed % 5) as usize,
        num_dus: 1 + ((seed / 5) % 2) as usize,
        num_rus: 2,
        seed,
        ..Default::default()
    };
    let scenario = generate_scenario(&spec).expect("valid spec");
    let rates = scenario_rates(&scenario).expect("rates");
    (scenario, rates)
}

/// Minimizer of a unimodal function on `[lo, hi]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// `min Σ d_k / s_k  s.t.  Σ s_k = cap` by cyclic pairwise golden-section
/// exchanges, starting from an equal split.
pub fn numeric_pool_min(demands: &[f64], cap: f64) -> f64 {
    let n = demands.len();
    let mut s = vec![cap / n as f64; n];
    let value = |s: &[f64]| -> f64 { demands.iter().zip(s).map(|(d, x)| d / x).sum() };
    let mut current = value(&s);
    for _ in 0..500 {
        for i in 0..n {
            for j in i + 1..n {
                let total = s[i] + s[j];
                let pair = |t: f64| demands[i] / t + demands[j] / (total - t);
                let t = golden_section(pair, total * 1e-9, total * (1.0 - 1e-9), 200);
                s[i] = t;
                s[j] = total - t;
            }
        }
        let next = value(&s);
        if current - next <= 1e-15 * current {
            return next;
        }
        current = next;
    }
    current
}

/// Pool identifier: (kind, node index).
pub type PoolKey = (u8, usize);

/// Resource pools each task draws from under `decision`, with demands
/// (cycles, or bits over spectrum efficiency), written from the delay model.
pub fn pools_of(decision: &Decision, tasks: &TaskSet, topology: &Topology) -> BTreeMap<PoolKey, (f64, Vec<f64>)> {
    let mut pools: BTreeMap<PoolKey, (f64, Vec<f64>)> = BTreeMap::new();
    let mut push = |key: PoolKey, cap: f64, demand: f64| pools.entry(key).or_insert((cap, Vec::new())).1.push(demand);
    for (k, tier) in decision.tiers().iter().enumerate() {
        let ru = topology.user_to_ru[k];
        let du = topology.ru_to_du[ru];
        let cycles = tasks.data_bits[k] * tasks.cycles_per_bit[k];
        let fronthaul = tasks.data_bits[k] / topology.fronthaul_se[ru];
        let midhaul = tasks.data_bits[k] / topology.midhaul_se[du];
        match tier {
            Tier::Local => push((0, ru), topology.mecl_capacity_hz[ru], cycles),
            Tier::High => {
                push((1, du), topology.mech_capacity_hz[du], cycles);
                push((3, ru), topology.fronthaul_capacity_hz[ru], fronthaul);
            }
            Tier::Cloud => {
                push((2, 0), topology.cloud_capacity_hz, cycles);
                push((3, ru), topology.fronthaul_capacity_hz[ru], fronthaul);
                push((4, du), topology.midhaul_capacity_hz[du], midhaul);
            }
        }
    }
    pools
}

/// Transfer-plus-compute delay of a decision with every pool split by
/// numeric search.
pub fn numeric_decision_cost(decision: &Decision, tasks: &TaskSet, topology: &Topology) -> f64 {
    pools_of(decision, tasks, topology).values().map(|(cap, demands)| numeric_pool_min(demands, *cap)).sum()
}

/// Access delay of every task at the given rates.
pub fn access_total(tasks: &TaskSet, rates: &[f64]) -> f64 {
    tasks.data_bits.iter().zip(rates).map(|(d, r)| d / r).sum()
}

/// Every decision the scheme allows, in no particular order.
pub fn all_decisions(scheme: Scheme, n: usize) -> Vec<Decision> {
    let allowed = scheme.allowed();
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Tier>| {
                allowed.iter().map(move |&t| {
                    let mut v = prefix.clone();
                    v.push(t);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(Decision).collect()
}

/// Whether an integer decision is optimal for the relaxed problem
/// `min_x Σ_pools (Σ x √demand)² / cap` over the scheme's simplices.
/// The objective is convex, so this holds iff no task has an allowed tier
/// with a smaller partial derivative than its own.
pub fn relaxed_optimal(decision: &Decision, tasks: &TaskSet, topology: &Topology, scheme: Scheme) -> bool {
    let pools = pools_of(decision, tasks, topology);
    let load = |key: PoolKey| pools.get(&key).map_or(0.0, |(cap, d)| d.iter().map(|x| x.sqrt()).sum::<f64>() / cap);
    (0..decision.len()).all(|k| {
        let ru = topology.user_to_ru[k];
        let du = topology.ru_to_du[ru];
        let sc = (tasks.data_bits[k] * tasks.cycles_per_bit[k]).sqrt();
        let sf = (tasks.data_bits[k] / topology.fronthaul_se[ru]).sqrt();
        let sm = (tasks.data_bits[k] / topology.midhaul_se[du]).sqrt();
        let grad = |t: Tier| -> f64 {
            2.0 * match t {
                Tier::Local => load((0, ru)) * sc,
                Tier::High => load((1, du)) * sc + load((3, ru)) * sf,
                Tier::Cloud => load((2, 0)) * sc + load((3, ru)) * sf + load((4, du)) * sm,
            }
        };
        let own = grad(decision.0[k]);
        scheme.allowed().iter().all(|&t| grad(t) >= own * (1.0 - 1e-12))
    })
}

/// Largest eigenpair of a Hermitian matrix.
pub fn top_eigen(m: &DMatrix<Complex64>) -> (f64, nalgebra::DVector<Complex64>) {
    let eig = m.clone().symmetric_eigen();
    let (idx, &val) = eig.eigenvalues.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty matrix");
    (val, eig.eigenvectors.column(idx).into_owned())
}
