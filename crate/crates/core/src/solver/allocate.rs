//! Exact continuous allocation for a fixed integer decision.
//!
//! Once tiers are fixed, the problem separates into independent resource
//! pools. Each pool minimizes `Σ d_k / s_k` subject to `Σ s_k ≤ cap`, whose
//! minimizer is `s_k = cap · √d_k / Σ_l √d_l` with value `(Σ √d_k)² / cap`.

use crate::latency::{Allocation, Decision, TaskAllocation, Tier};
use crate::scenario::{TaskSet, Topology};

/// A capacity-limited resource shared by the tasks that route through it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pool {
    Mecl(usize),
    Mech(usize),
    Cloud,
    Fronthaul(usize),
    Midhaul(usize),
}

impl Pool {
    pub fn capacity(self, topology: &Topology) -> f64 {
        match self {
            Pool::Mecl(ru) => topology.mecl_capacity_hz[ru],
            Pool::Mech(du) => topology.mech_capacity_hz[du],
            Pool::Cloud => topology.cloud_capacity_hz,
            Pool::Fronthaul(ru) => topology.fronthaul_capacity_hz[ru],
            Pool::Midhaul(du) => topology.midhaul_capacity_hz[du],
        }
    }
}

/// The pools task `k` draws from on `tier`, each with the task's demand in
/// that pool (cycles, or bits divided by spectrum efficiency).
pub fn task_pools(topology: &Topology, tasks: &TaskSet, k: usize, tier: Tier) -> impl Iterator<Item = (Pool, f64)> {
    let ru = topology.user_to_ru[k];
    let du = topology.ru_to_du[ru];
    let cycles = tasks.cycles(k);
    let data = tasks.data_bits[k];
    let compute = match tier {
        Tier::Local => Pool::Mecl(ru),
        Tier::High => Pool::Mech(du),
        Tier::Cloud => Pool::Cloud,
    };
    let fronthaul = tier.uses_fronthaul().then(|| (Pool::Fronthaul(ru), data / topology.fronthaul_se[ru]));
    let midhaul = tier.uses_midhaul().then(|| (Pool::Midhaul(du), data / topology.midhaul_se[du]));
    std::iter::once((compute, cycles)).chain(fronthaul).chain(midhaul)
}

/// Running `Σ √demand` per pool for a decision. Supports moving one task
/// between tiers, which is what local search needs.
#[derive(Debug, Clone)]
pub struct PoolSums {
    mecl: Vec<f64>,
    mech: Vec<f64>,
    cloud: f64,
    fronthaul: Vec<f64>,
    midhaul: Vec<f64>,
    /// Running Σ (sum² / capacity), updated per touched pool.
    cost: f64,
}

fn pool_cost(sum: f64, capacity: f64) -> f64 {
    if sum > 0.0 {
        sum * sum / capacity
    } else {
        0.0
    }
}

impl PoolSums {
    pub fn new(topology: &Topology, tasks: &TaskSet, decision: &Decision) -> Self {
        let mut sums = Self {
            mecl: vec![0.0; topology.num_rus],
            mech: vec![0.0; topology.num_dus],
            cloud: 0.0,
            fronthaul: vec![0.0; topology.num_rus],
            midhaul: vec![0.0; topology.num_dus],
            cost: 0.0,
        };
        for (k, &tier) in decision.tiers().iter().enumerate() {
            sums.add(topology, tasks, k, tier, 1.0);
        }
        sums.cost = sums.fresh_cost(topology);
        sums
    }

    fn slot(&mut self, pool: Pool) -> &mut f64 {
        match pool {
            Pool::Mecl(ru) => &mut self.mecl[ru],
            Pool::Mech(du) => &mut self.mech[du],
            Pool::Cloud => &mut self.cloud,
            Pool::Fronthaul(ru) => &mut self.fronthaul[ru],
            Pool::Midhaul(du) => &mut self.midhaul[du],
        }
    }

    pub fn sum(&self, pool: Pool) -> f64 {
        match pool {
            Pool::Mecl(ru) => self.mecl[ru],
            Pool::Mech(du) => self.mech[du],
            Pool::Cloud => self.cloud,
            Pool::Fronthaul(ru) => self.fronthaul[ru],
            Pool::Midhaul(du) => self.midhaul[du],
        }
    }

    fn add(&mut self, topology: &Topology, tasks: &TaskSet, k: usize, tier: Tier, sign: f64) {
        for (pool, demand) in task_pools(topology, tasks, k, tier) {
            let capacity = pool.capacity(topology);
            let slot = self.slot(pool);
            let before = pool_cost(*slot, capacity);
            *slot += sign * demand.sqrt();
            if *slot < 1e-9 * demand.sqrt() {
                // emptied pool; drop rounding residue
                *slot = 0.0;
            }
            let after = pool_cost(*slot, capacity);
            self.cost += after - before;
        }
    }

    /// Moves task `k` from tier `from` to tier `to`.
    pub fn move_task(&mut self, topology: &Topology, tasks: &TaskSet, k: usize, from: Tier, to: Tier) {
        self.add(topology, tasks, k, from, -1.0);
        self.add(topology, tasks, k, to, 1.0);
    }

    /// Minimal Σ over tasks of transfer and compute delay (access excluded).
    /// Maintained incrementally; see [`PoolSums::fresh_cost`].
    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// The same quantity recomputed from the pool sums.
    pub fn fresh_cost(&self, topology: &Topology) -> f64 {
        let per_node =
            |sums: &[f64], caps: &[f64]| -> f64 { sums.iter().zip(caps).map(|(&s, &c)| pool_cost(s, c)).sum() };
        per_node(&self.mecl, &topology.mecl_capacity_hz)
            + per_node(&self.mech, &topology.mech_capacity_hz)
            + pool_cost(self.cloud, topology.cloud_capacity_hz)
            + per_node(&self.fronthaul, &topology.fronthaul_capacity_hz)
            + per_node(&self.midhaul, &topology.midhaul_capacity_hz)
    }

    /// Resets the running cost to [`PoolSums::fresh_cost`].
    pub fn resync(&mut self, topology: &Topology) {
        self.cost = self.fresh_cost(topology);
    }
}

/// Square-root-proportional shares filling each pool's capacity.
pub fn allocate_given_decision(decision: &Decision, tasks: &TaskSet, topology: &Topology) -> Allocation {
    let sums = PoolSums::new(topology, tasks, decision);
    let share = |pool: Pool, demand: f64| pool.capacity(topology) * demand.sqrt() / sums.sum(pool);
    Allocation(
        decision
            .tiers()
            .iter()
            .enumerate()
            .map(|(k, &tier)| {
                let mut alloc = TaskAllocation::default();
                for (pool, demand) in task_pools(topology, tasks, k, tier) {
                    let value = Some(share(pool, demand));
                    match pool {
                        Pool::Mecl(_) => alloc.mecl_speed = value,
                        Pool::Mech(_) => alloc.mech_speed = value,
                        Pool::Cloud => alloc.cloud_speed = value,
                        Pool::Fronthaul(_) => alloc.fronthaul_bw = value,
                        Pool::Midhaul(_) => alloc.midhaul_bw = value,
                    }
                }
                alloc
            })
            .collect(),
    )
}

/// Minimal transfer-plus-compute delay of a decision (access excluded).
pub fn decision_cost(decision: &Decision, tasks: &TaskSet, topology: &Topology) -> f64 {
    PoolSums::new(topology, tasks, decision).cost()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latency::{check_feasibility, total_delay};

    fn single_pool(n: usize, mecl_capacity: f64) -> Topology {
        Topology {
            num_dus: 1,
            num_rus: 1,
            num_users: n,
            ru_to_du: vec![0],
            user_to_ru: vec![0; n],
            uplink_bandwidth_hz: vec![1.0],
            fronthaul_capacity_hz: vec![1.0],
            midhaul_capacity_hz: vec![1.0],
            fronthaul_se: vec![1.0],
            midhaul_se: vec![1.0],
            mecl_capacity_hz: vec![mecl_capacity],
            mech_capacity_hz: vec![1.0],
            cloud_capacity_hz: 1.0,
        }
    }

    /// Grid search over the split of a two-task pool.
    fn grid_two(d1: f64, d2: f64, cap: f64) -> f64 {
        (1..100_000)
            .map(|i| {
                let s1 = cap * i as f64 / 100_000.0;
                d1 / s1 + d2 / (cap - s1)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn two_task_pool() {
        let topo = single_pool(2, 5e9);
        let tasks = TaskSet { data_bits: vec![4e9, 9e9], cycles_per_bit: vec![1.0, 1.0] };
        let decision = Decision::uniform(Tier::Local, 2);
        let alloc = allocate_given_decision(&decision, &tasks, &topo);
        assert!((alloc.0[0].mecl_speed.unwrap() - 2e9).abs() < 1e-3);
        assert!((alloc.0[1].mecl_speed.unwrap() - 3e9).abs() < 1e-3);
        let cost = decision_cost(&decision, &tasks, &topo);
        assert!((cost - 5.0).abs() < 1e-12);
        let grid = grid_two(4e9, 9e9, 5e9);
        assert!(cost <= grid && grid - cost < 1e-6, "{cost} vs {grid}");
    }

    #[test]
    fn single_task_gets_everything() {
        let topo = single_pool(1, 3e9);
        let tasks = TaskSet { data_bits: vec![1e6], cycles_per_bit: vec![7.0] };
        let alloc = allocate_given_decision(&Decision::uniform(Tier::Local, 1), &tasks, &topo);
        assert_eq!(alloc.0[0].mecl_speed, Some(3e9));
    }

    #[test]
    fn equal_demands_equal_shares() {
        let topo = single_pool(4, 8e9);
        let tasks = TaskSet { data_bits: vec![2e6; 4], cycles_per_bit: vec![3.0; 4] };
        let alloc = allocate_given_decision(&Decision::uniform(Tier::Local, 4), &tasks, &topo);
        for a in alloc.tasks() {
            assert!((a.mecl_speed.unwrap() - 2e9).abs() < 1e-3);
        }
    }

    #[test]
    fn only_path_components_set_and_feasible() {
        let topo = single_pool(3, 2e9);
        let tasks = TaskSet { data_bits: vec![1e6, 2e6, 3e6], cycles_per_bit: vec![1.0, 2.0, 3.0] };
        let decision = Decision(vec![Tier::Local, Tier::High, Tier::Cloud]);
        let alloc = allocate_given_decision(&decision, &tasks, &topo);
        assert!(alloc.0[0].fronthaul_bw.is_none() && alloc.0[0].mech_speed.is_none());
        assert!(alloc.0[1].fronthaul_bw.is_some() && alloc.0[1].midhaul_bw.is_none());
        assert!(alloc.0[2].midhaul_bw.is_some() && alloc.0[2].cloud_speed.is_some());
        assert!(check_feasibility(&topo, &tasks, &decision, &alloc).is_empty());
        let rates = [1e300; 3];
        let total = total_delay(&topo, &tasks, &decision, &alloc, &rates).unwrap();
        assert!((total / decision_cost(&decision, &tasks, &topo) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn move_task_matches_rebuild() {
        let topo = single_pool(3, 2e9);
        let tasks = TaskSet { data_bits: vec![1e6, 2e6, 3e6], cycles_per_bit: vec![1.0, 2.0, 3.0] };
        let mut decision = Decision(vec![Tier::Local, Tier::High, Tier::Cloud]);
        let mut sums = PoolSums::new(&topo, &tasks, &decision);
        sums.move_task(&topo, &tasks, 1, Tier::High, Tier::Cloud);
        decision.0[1] = Tier::Cloud;
        let rebuilt = decision_cost(&decision, &tasks, &topo);
        assert!((sums.cost() / rebuilt - 1.0).abs() < 1e-12);
        assert!((sums.fresh_cost(&topo) / rebuilt - 1.0).abs() < 1e-12);
    }
}
