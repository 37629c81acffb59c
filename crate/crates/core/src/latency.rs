//! Per-task delay model and constraint checking.
//!
//! A task travels one of three paths:
//!
//! ```text
//! L: access -> MEC-L compute
//! H: access -> fronthaul -> MEC-H compute
//! C: access -> fronthaul -> midhaul -> cloud compute
//! ```
//!
//! Reported delays always include the wireless access term, even though the
//! optimizer drops it (it does not depend on the decision).

use std::fmt;

use crate::error::{Error, Result};
use crate::phy::access_delay;
use crate::scenario::{TaskSet, Topology};

/// Relative slack admitted when checking `used <= capacity`.
pub const CAPACITY_TOLERANCE: f64 = 1e-9;

/// Where a task is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tier {
    /// MEC-L server co-located with the serving RU.
    Local,
    /// MEC-H server at the DU.
    High,
    /// Cloud at the CU.
    Cloud,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Local, Tier::High, Tier::Cloud];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn uses_fronthaul(self) -> bool {
        self != Tier::Local
    }

    pub fn uses_midhaul(self) -> bool {
        self == Tier::Cloud
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Local => "L",
            Tier::High => "H",
            Tier::Cloud => "C",
        })
    }
}

/// One tier per task. Holding exactly one value per task is what makes the
/// indicator variables sum to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Decision(pub Vec<Tier>);

impl Decision {
    pub fn uniform(tier: Tier, num_tasks: usize) -> Self {
        Self(vec![tier; num_tasks])
    }

    pub fn tiers(&self) -> &[Tier] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Resources granted to a single task. Only the components on the task's
/// path are `Some`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TaskAllocation {
    pub mecl_speed: Option<f64>,
    pub mech_speed: Option<f64>,
    pub cloud_speed: Option<f64>,
    pub fronthaul_bw: Option<f64>,
    pub midhaul_bw: Option<f64>,
}

impl TaskAllocation {
    /// Compute speed on the given tier.
    pub fn speed(&self, tier: Tier) -> Option<f64> {
        match tier {
            Tier::Local => self.mecl_speed,
            Tier::High => self.mech_speed,
            Tier::Cloud => self.cloud_speed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Allocation(pub Vec<TaskAllocation>);

impl Allocation {
    pub fn tasks(&self) -> &[TaskAllocation] {
        &self.0
    }
}

/// Delay components of one task, seconds. Components off the task's path are zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DelayBreakdown {
    pub access_s: f64,
    pub fronthaul_s: f64,
    pub midhaul_s: f64,
    pub compute_s: f64,
    pub total_s: f64,
}

fn required(value: Option<f64>, task: usize, tier: Tier, component: &'static str) -> Result<f64> {
    value.ok_or(Error::MissingAllocation { task, tier, component })
}

/// Delay of task `k` on `tier` with resources `alloc` and uplink rate `access_rate` (bits/s).
pub fn task_delay(
    topology: &Topology,
    tasks: &TaskSet,
    k: usize,
    tier: Tier,
    alloc: &TaskAllocation,
    access_rate: f64,
) -> Result<DelayBreakdown> {
    let data = tasks.data_bits[k];
    let cycles = tasks.cycles(k);
    let ru = topology.user_to_ru[k];
    let du = topology.ru_to_du[ru];

    let mut out = DelayBreakdown { access_s: access_delay(data, access_rate), ..Default::default() };
    let speed_name = match tier {
        Tier::Local => "mecl_speed",
        Tier::High => "mech_speed",
        Tier::Cloud => "cloud_speed",
    };
    out.compute_s = cycles / required(alloc.speed(tier), k, tier, speed_name)?;
    if tier.uses_fronthaul() {
        let bw = required(alloc.fronthaul_bw, k, tier, "fronthaul_bw")?;
        out.fronthaul_s = data / (bw * topology.fronthaul_se[ru]);
    }
    if tier.uses_midhaul() {
        let bw = required(alloc.midhaul_bw, k, tier, "midhaul_bw")?;
        out.midhaul_s = data / (bw * topology.midhaul_se[du]);
    }
    out.total_s = out.access_s + out.fronthaul_s + out.midhaul_s + out.compute_s;
    Ok(out)
}

/// Per-task breakdowns for a full plan.
pub fn delay_breakdowns(
    topology: &Topology,
    tasks: &TaskSet,
    decision: &Decision,
    allocation: &Allocation,
    rates: &[f64],
) -> Result<Vec<DelayBreakdown>> {
    decision
        .tiers()
        .iter()
        .zip(allocation.tasks())
        .enumerate()
        .map(|(k, (&tier, alloc))| task_delay(topology, tasks, k, tier, alloc, rates[k]))
        .collect()
}

/// Sum of all task delays, seconds.
pub fn total_delay(
    topology: &Topology,
    tasks: &TaskSet,
    decision: &Decision,
    allocation: &Allocation,
    rates: &[f64],
) -> Result<f64> {
    Ok(delay_breakdowns(topology, tasks, decision, allocation, rates)?
        .iter()
        .map(|b| b.total_s)
        .fold(0.0, |acc, d| acc + d))
}

/// Capacity constraints of the planning problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// MEC-L compute per RU.
    C3,
    /// MEC-H compute per DU.
    C4,
    /// Cloud compute.
    C5,
    /// Fronthaul bandwidth per RU.
    C6,
    /// Midhaul bandwidth per DU.
    C7,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::C3 => "C3 (MEC-L compute)",
            Constraint::C4 => "C4 (MEC-H compute)",
            Constraint::C5 => "C5 (cloud compute)",
            Constraint::C6 => "C6 (fronthaul bandwidth)",
            Constraint::C7 => "C7 (midhaul bandwidth)",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Σ allocated exceeds capacity at `node` (RU, DU, or 0 for the cloud).
    Capacity { constraint: Constraint, node: usize, used: f64, capacity: f64 },
    /// A resource on the task's path is missing or not strictly positive.
    Resource { task: usize, component: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Capacity { constraint, node, used, capacity } => {
                write!(f, "{constraint} violated at node {node}: {used} > {capacity}")
            }
            Violation::Resource { task, component } => {
                write!(f, "task {task}: `{component}` missing or non-positive")
            }
        }
    }
}

/// Lists every violated constraint. An empty list means the plan is feasible.
pub fn check_feasibility(
    topology: &Topology,
    tasks: &TaskSet,
    decision: &Decision,
    allocation: &Allocation,
) -> Vec<Violation> {
    let mut mecl = vec![0.0; topology.num_rus];
    let mut fronthaul = vec![0.0; topology.num_rus];
    let mut mech = vec![0.0; topology.num_dus];
    let mut midhaul = vec![0.0; topology.num_dus];
    let mut cloud = 0.0;
    let mut violations = Vec::new();

    let mut take = |value: Option<f64>, task: usize, component: &'static str| match value {
        Some(v) if v > 0.0 && v.is_finite() => v,
        _ => {
            violations.push(Violation::Resource { task, component });
            0.0
        }
    };
    for (k, (&tier, alloc)) in decision.tiers().iter().zip(allocation.tasks()).enumerate().take(tasks.len()) {
        let ru = topology.user_to_ru[k];
        let du = topology.ru_to_du[ru];
        match tier {
            Tier::Local => mecl[ru] += take(alloc.mecl_speed, k, "mecl_speed"),
            Tier::High => mech[du] += take(alloc.mech_speed, k, "mech_speed"),
            Tier::Cloud => cloud += take(alloc.cloud_speed, k, "cloud_speed"),
        }
        if tier.uses_fronthaul() {
            fronthaul[ru] += take(alloc.fronthaul_bw, k, "fronthaul_bw");
        }
        if tier.uses_midhaul() {
            midhaul[du] += take(alloc.midhaul_bw, k, "midhaul_bw");
        }
    }
    for k in decision.len().min(allocation.tasks().len())..tasks.len() {
        violations.push(Violation::Resource { task: k, component: "decision/allocation entry" });
    }

    let mut check = |constraint, used: &[f64], capacity: &[f64]| {
        for (node, (&u, &c)) in used.iter().zip(capacity).enumerate() {
            if u > c * (1.0 + CAPACITY_TOLERANCE) {
                violations.push(Violation::Capacity { constraint, node, used: u, capacity: c });
            }
        }
    };
    check(Constraint::C3, &mecl, &topology.mecl_capacity_hz);
    check(Constraint::C4, &mech, &topology.mech_capacity_hz);
    check(Constraint::C5, &[cloud], &[topology.cloud_capacity_hz]);
    check(Constraint::C6, &fronthaul, &topology.fronthaul_capacity_hz);
    check(Constraint::C7, &midhaul, &topology.midhaul_capacity_hz);
    violations
}
