//! Fixtures shared by the criterion benches.

use fogran::phy::scenario_rates;
use fogran::{Scenario, ScenarioSpec};

/// A generated scenario together with its MMSE uplink rates.
pub fn fixture(num_dus: usize, num_rus: usize, num_users: usize, seed: u64) -> (Scenario, Vec<f64>) {
    let scenario =
        fogran::scenario::generate_scenario(&ScenarioSpec { num_dus, num_rus, num_users, seed, ..Default::default() })
            .expect("valid bench spec");
    let rates = scenario_rates(&scenario).expect("rates");
    (scenario, rates)
}
