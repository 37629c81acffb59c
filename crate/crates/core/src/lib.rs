//! Latency-minimizing task offloading for three-tier fog-computing C-RAN networks.
//!
//! Tasks of mobile users can be computed at an MEC server in their radio
//! unit (tier L), at an MEC server in the distributed unit (tier H), or in
//! the cloud behind the central unit (tier C). The planner jointly picks
//! receive beamformers, the tier of every task, per-task compute speeds and
//! the fronthaul/midhaul bandwidth split so that the summed task delay is
//! minimal.
//!
//! - [`scenario`]: topology, tasks, generation and scenario files
//! - [`phy`]: channels, MMSE beamforming, SINR and uplink rates
//! - [`latency`]: delay model and feasibility checks
//! - [`solver`]: relaxed dual decomposition and exact re-allocation
//! - [`oracle`]: exhaustive optimum for small instances
//! - [`experiment`]: sweeps, reports and oracle gap statistics

pub mod error;
pub mod experiment;
pub mod latency;
pub mod oracle;
pub mod phy;
pub mod scenario;
pub mod solver;

pub use error::{Error, Result};
pub use latency::{Allocation, Decision, DelayBreakdown, TaskAllocation, Tier};
pub use scenario::{Scenario, ScenarioSpec, Scheme, TaskSet, Topology};
pub use solver::{solve, SolveOutcome, SolverConfig};
