//! Flat TOML scenario files.
//!
//! Every key carries its unit in the name. Maps are index arrays
//! (`ru_to_du[i]` is the DU of RU `i`). Floats are written in shortest
//! round-trip form, so `load(save(x)) == x` holds bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Geometry, RadioParams, Scenario, TaskSet, Topology};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    num_dus: usize,
    num_rus: usize,
    num_users: usize,
    num_antennas: usize,
    ru_to_du: Vec<usize>,
    user_to_ru: Vec<usize>,
    uplink_bandwidth_hz: Vec<f64>,
    fronthaul_capacity_hz: Vec<f64>,
    midhaul_capacity_hz: Vec<f64>,
    fronthaul_se_bps_per_hz: Vec<f64>,
    midhaul_se_bps_per_hz: Vec<f64>,
    mecl_capacity_hz: Vec<f64>,
    mech_capacity_hz: Vec<f64>,
    cloud_capacity_hz: f64,
    data_bits: Vec<f64>,
    cycles_per_bit: Vec<f64>,
    tx_power_w: f64,
    noise_density_w_per_hz: f64,
    path_loss_exponent: f64,
    reference_loss_db: f64,
    ru_x_m: Vec<f64>,
    ru_y_m: Vec<f64>,
    user_x_m: Vec<f64>,
    user_y_m: Vec<f64>,
    /// Hex string: TOML integers are signed 64-bit.
    channel_seed: String,
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        let t = &s.topology;
        Self {
            num_dus: t.num_dus,
            num_rus: t.num_rus,
            num_users: t.num_users,
            num_antennas: s.radio.num_antennas,
            ru_to_du: t.ru_to_du.clone(),
            user_to_ru: t.user_to_ru.clone(),
            uplink_bandwidth_hz: t.uplink_bandwidth_hz.clone(),
            fronthaul_capacity_hz: t.fronthaul_capacity_hz.clone(),
            midhaul_capacity_hz: t.midhaul_capacity_hz.clone(),
            fronthaul_se_bps_per_hz: t.fronthaul_se.clone(),
            midhaul_se_bps_per_hz: t.midhaul_se.clone(),
            mecl_capacity_hz: t.mecl_capacity_hz.clone(),
            mech_capacity_hz: t.mech_capacity_hz.clone(),
            cloud_capacity_hz: t.cloud_capacity_hz,
            data_bits: s.tasks.data_bits.clone(),
            cycles_per_bit: s.tasks.cycles_per_bit.clone(),
            tx_power_w: s.radio.tx_power_w,
            noise_density_w_per_hz: s.radio.noise_density_w_per_hz,
            path_loss_exponent: s.radio.path_loss_exponent,
            reference_loss_db: s.radio.reference_loss_db,
            ru_x_m: s.geometry.ru_x_m.clone(),
            ru_y_m: s.geometry.ru_y_m.clone(),
            user_x_m: s.geometry.user_x_m.clone(),
            user_y_m: s.geometry.user_y_m.clone(),
            channel_seed: format!("{:#018x}", s.channel_seed),
        }
    }
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = Error;

    fn try_from(f: ScenarioFile) -> Result<Self> {
        let hex = f.channel_seed.trim_start_matches("0x");
        let channel_seed = u64::from_str_radix(hex, 16).map_err(|e| Error::InvalidField {
            field: "channel_seed",
            reason: format!("`{}` is not a hex u64: {e}", f.channel_seed),
        })?;
        let scenario = Scenario {
            topology: Topology {
                num_dus: f.num_dus,
                num_rus: f.num_rus,
                num_users: f.num_users,
                ru_to_du: f.ru_to_du,
                user_to_ru: f.user_to_ru,
                uplink_bandwidth_hz: f.uplink_bandwidth_hz,
                fronthaul_capacity_hz: f.fronthaul_capacity_hz,
                midhaul_capacity_hz: f.midhaul_capacity_hz,
                fronthaul_se: f.fronthaul_se_bps_per_hz,
                midhaul_se: f.midhaul_se_bps_per_hz,
                mecl_capacity_hz: f.mecl_capacity_hz,
                mech_capacity_hz: f.mech_capacity_hz,
                cloud_capacity_hz: f.cloud_capacity_hz,
            },
            tasks: TaskSet { data_bits: f.data_bits, cycles_per_bit: f.cycles_per_bit },
            radio: RadioParams {
                num_antennas: f.num_antennas,
                tx_power_w: f.tx_power_w,
                noise_density_w_per_hz: f.noise_density_w_per_hz,
                path_loss_exponent: f.path_loss_exponent,
                reference_loss_db: f.reference_loss_db,
            },
            geometry: Geometry { ru_x_m: f.ru_x_m, ru_y_m: f.ru_y_m, user_x_m: f.user_x_m, user_y_m: f.user_y_m },
            channel_seed,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

pub fn scenario_to_string(scenario: &Scenario) -> String {
    toml::to_string(&ScenarioFile::from(scenario)).expect("scenario fields are all TOML-representable")
}

/// Parses and validates a scenario. `origin` only labels diagnostics.
pub fn scenario_from_str(text: &str, origin: &Path) -> Result<Scenario> {
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| Error::Parse { path: origin.to_path_buf(), message: e.to_string() })?;
    Scenario::try_from(file)
}

pub fn save_scenario(path: impl AsRef<Path>, scenario: &Scenario) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, scenario_to_string(scenario)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    scenario_from_str(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenario, ScenarioSpec};

    #[test]
    fn save_then_load_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.toml");
        let s = generate_scenario(&ScenarioSpec { seed: 99, ..Default::default() }).unwrap();
        save_scenario(&path, &s).unwrap();
        assert_eq!(load_scenario(&path).unwrap(), s);
    }

    #[test]
    fn missing_key_is_named() {
        let s = generate_scenario(&ScenarioSpec::default()).unwrap();
        let text: String = scenario_to_string(&s)
            .lines()
            .filter(|l| !l.starts_with("cloud_capacity_hz"))
            .map(|l| format!("{l}\n"))
            .collect();
        let err = scenario_from_str(&text, Path::new("x.toml")).unwrap_err();
        assert!(err.to_string().contains("cloud_capacity_hz"), "{err}");
    }

    #[test]
    fn out_of_range_du_is_an_invariant_error() {
        let s = generate_scenario(&ScenarioSpec::default()).unwrap();
        let text = scenario_to_string(&s).replacen("ru_to_du = [0,", "ru_to_du = [4,", 1);
        assert!(text.contains("ru_to_du = [4,"), "fixture edit failed:\n{text}");
        let err = scenario_from_str(&text, Path::new("x.toml")).unwrap_err();
        assert!(matches!(err, Error::InvalidField { field: "ru_to_du", .. }), "{err}");
    }

    #[test]
    fn malformed_value_names_field() {
        let s = generate_scenario(&ScenarioSpec::default()).unwrap();
        let text = scenario_to_string(&s).replace("tx_power_w = ", "tx_power_w = \"loud\" #");
        let err = scenario_from_str(&text, Path::new("x.toml")).unwrap_err();
        assert!(err.to_string().contains("tx_power_w"), "{err}");
    }
}
