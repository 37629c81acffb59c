//! Network topology, task sets and scenario generation.
//!
//! A [`Scenario`] bundles everything needed to plan one realization: the
//! CU/DU/RU tree with its capacities, the per-user tasks, the radio
//! parameters and the node positions from which channels are drawn.
//! Scenarios are immutable once built and validate their invariants on
//! construction and on load.

mod file;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::latency::Tier;

pub use file::{load_scenario, save_scenario, scenario_from_str, scenario_to_string};

/// The CU/DU/RU tree and its resource capacities.
///
/// Per-RU vectors have length `num_rus`, per-DU vectors `num_dus`.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub num_dus: usize,
    pub num_rus: usize,
    pub num_users: usize,
    pub ru_to_du: Vec<usize>,
    pub user_to_ru: Vec<usize>,
    pub uplink_bandwidth_hz: Vec<f64>,
    pub fronthaul_capacity_hz: Vec<f64>,
    pub midhaul_capacity_hz: Vec<f64>,
    /// Fronthaul spectrum efficiency per RU, bits/s/Hz.
    pub fronthaul_se: Vec<f64>,
    /// Midhaul spectrum efficiency per DU, bits/s/Hz.
    pub midhaul_se: Vec<f64>,
    /// MEC-L compute capacity per RU, cycles/s.
    pub mecl_capacity_hz: Vec<f64>,
    /// MEC-H compute capacity per DU, cycles/s.
    pub mech_capacity_hz: Vec<f64>,
    pub cloud_capacity_hz: f64,
}

impl Topology {
    pub fn du_of_user(&self, user: usize) -> usize {
        self.ru_to_du[self.user_to_ru[user]]
    }

    pub fn users_of_ru(&self, ru: usize) -> impl Iterator<Item = usize> + '_ {
        self.user_to_ru.iter().enumerate().filter(move |&(_, &r)| r == ru).map(|(k, _)| k)
    }

    pub fn users_of_du(&self, du: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_users).filter(move |&k| self.du_of_user(k) == du)
    }

    pub fn validate(&self) -> Result<()> {
        check_len("ru_to_du", self.ru_to_du.len(), self.num_rus)?;
        check_len("user_to_ru", self.user_to_ru.len(), self.num_users)?;
        if self.num_dus == 0 {
            return Err(invalid("num_dus", "must be at least 1"));
        }
        if self.num_rus == 0 {
            return Err(invalid("num_rus", "must be at least 1"));
        }
        if let Some((i, &j)) = self.ru_to_du.iter().enumerate().find(|(_, &j)| j >= self.num_dus) {
            return Err(invalid("ru_to_du", format!("RU {i} maps to DU {j}, but only {} DUs exist", self.num_dus)));
        }
        if let Some((k, &i)) = self.user_to_ru.iter().enumerate().find(|(_, &i)| i >= self.num_rus) {
            return Err(invalid("user_to_ru", format!("user {k} maps to RU {i}, but only {} RUs exist", self.num_rus)));
        }
        let per_ru = [
            ("uplink_bandwidth_hz", &self.uplink_bandwidth_hz),
            ("fronthaul_capacity_hz", &self.fronthaul_capacity_hz),
            ("fronthaul_se_bps_per_hz", &self.fronthaul_se),
            ("mecl_capacity_hz", &self.mecl_capacity_hz),
        ];
        for (name, values) in per_ru {
            check_len(name, values.len(), self.num_rus)?;
            check_positive(name, values)?;
        }
        let per_du = [
            ("midhaul_capacity_hz", &self.midhaul_capacity_hz),
            ("midhaul_se_bps_per_hz", &self.midhaul_se),
            ("mech_capacity_hz", &self.mech_capacity_hz),
        ];
        for (name, values) in per_du {
            check_len(name, values.len(), self.num_dus)?;
            check_positive(name, values)?;
        }
        check_positive("cloud_capacity_hz", &[self.cloud_capacity_hz])
    }
}

/// One computation task per user.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaskSet {
    pub data_bits: Vec<f64>,
    pub cycles_per_bit: Vec<f64>,
}

impl TaskSet {
    pub fn len(&self) -> usize {
        self.data_bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data_bits.is_empty()
    }

    /// Required CPU cycles of task `k`.
    pub fn cycles(&self, k: usize) -> f64 {
        self.cycles_per_bit[k] * self.data_bits[k]
    }

    pub fn validate(&self) -> Result<()> {
        check_len("cycles_per_bit", self.cycles_per_bit.len(), self.data_bits.len())?;
        check_positive("data_bits", &self.data_bits)?;
        check_positive("cycles_per_bit", &self.cycles_per_bit)
    }
}

/// Which offloading tiers a planning run may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Fog,
    Cloud,
    CloudDu,
    CloudRu,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Fog, Scheme::Cloud, Scheme::CloudDu, Scheme::CloudRu];

    /// Allowed tiers in tie-break order. Always non-empty and always contains the cloud.
    pub fn allowed(self) -> &'static [Tier] {
        match self {
            Scheme::Fog => &[Tier::Local, Tier::High, Tier::Cloud],
            Scheme::Cloud => &[Tier::Cloud],
            Scheme::CloudDu => &[Tier::High, Tier::Cloud],
            Scheme::CloudRu => &[Tier::Local, Tier::Cloud],
        }
    }

    pub fn allows(self, tier: Tier) -> bool {
        self.allowed().contains(&tier)
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Fog => "fog",
            Scheme::Cloud => "cloud",
            Scheme::CloudDu => "cloud-du",
            Scheme::CloudRu => "cloud-ru",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fog" => Ok(Scheme::Fog),
            "cloud" => Ok(Scheme::Cloud),
            "cloud-du" | "cloud+du" | "clouddu" => Ok(Scheme::CloudDu),
            "cloud-ru" | "cloud+ru" | "cloudru" => Ok(Scheme::CloudRu),
            other => {
                Err(invalid("scheme", format!("unknown scheme `{other}` (expected fog, cloud, cloud-du or cloud-ru)")))
            }
        }
    }
}

/// Uplink radio parameters shared by all RUs.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioParams {
    pub num_antennas: usize,
    pub tx_power_w: f64,
    pub noise_density_w_per_hz: f64,
    pub path_loss_exponent: f64,
    /// Path loss at the 1 m reference distance, dB.
    pub reference_loss_db: f64,
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_antennas == 0 {
            return Err(invalid("num_antennas", "must be at least 1"));
        }
        check_positive("tx_power_w", &[self.tx_power_w])?;
        check_positive("noise_density_w_per_hz", &[self.noise_density_w_per_hz])?;
        check_positive("path_loss_exponent", &[self.path_loss_exponent])?;
        if !self.reference_loss_db.is_finite() {
            return Err(invalid("reference_loss_db", "must be finite"));
        }
        Ok(())
    }
}

/// Planar node positions in metres.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Geometry {
    pub ru_x_m: Vec<f64>,
    pub ru_y_m: Vec<f64>,
    pub user_x_m: Vec<f64>,
    pub user_y_m: Vec<f64>,
}

impl Geometry {
    pub fn distance_m(&self, user: usize, ru: usize) -> f64 {
        (self.user_x_m[user] - self.ru_x_m[ru]).hypot(self.user_y_m[user] - self.ru_y_m[ru])
    }
}

/// A complete planning instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub topology: Topology,
    pub tasks: TaskSet,
    pub radio: RadioParams,
    pub geometry: Geometry,
    /// Seed for the small-scale fading draw.
    pub channel_seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        self.tasks.validate()?;
        check_len("data_bits", self.tasks.len(), self.topology.num_users)?;
        self.radio.validate()?;
        check_len("ru_x_m", self.geometry.ru_x_m.len(), self.topology.num_rus)?;
        check_len("ru_y_m", self.geometry.ru_y_m.len(), self.topology.num_rus)?;
        check_len("user_x_m", self.geometry.user_x_m.len(), self.topology.num_users)?;
        check_len("user_y_m", self.geometry.user_y_m.len(), self.topology.num_users)?;
        for (name, values) in [
            ("ru_x_m", &self.geometry.ru_x_m),
            ("ru_y_m", &self.geometry.ru_y_m),
            ("user_x_m", &self.geometry.user_x_m),
            ("user_y_m", &self.geometry.user_y_m),
        ] {
            if values.iter().any(|v| !v.is_finite()) {
                return Err(invalid(name, "all coordinates must be finite"));
            }
        }
        Ok(())
    }
}

/// Closed interval for uniform draws. `lo == hi` pins the value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformRange {
    pub lo: f64,
    pub hi: f64,
}

impl UniformRange {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn fixed(value: f64) -> Self {
        Self { lo: value, hi: value }
    }

    /// Always consumes exactly one draw, so pinned and ranged parameters
    /// leave the rest of the random stream aligned.
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        self.lo + u * (self.hi - self.lo)
    }

    fn check(&self, field: &'static str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo <= 0.0 {
            return Err(Error::InvalidSpec {
                field,
                reason: format!("range [{}, {}] must be finite and positive", self.lo, self.hi),
            });
        }
        if self.lo > self.hi {
            return Err(Error::InvalidSpec { field, reason: format!("inverted range [{}, {}]", self.lo, self.hi) });
        }
        Ok(())
    }
}

/// Distribution parameters for [`generate_scenario`].
///
/// Defaults reproduce the reference simulation setup: 4 DUs, 10 RUs,
/// 10 receive antennas, 10 MHz uplinks, 3 bits/s/Hz fronthaul and midhaul,
/// 35 dBm transmit power, -174 dBm/Hz noise, a 5000 GHz cloud, tasks of
/// 5-30 Mbit needing 0.1-10 cycles/bit.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub num_dus: usize,
    pub num_rus: usize,
    pub num_users: usize,
    pub num_antennas: usize,
    pub uplink_bandwidth_hz: f64,
    pub data_bits: UniformRange,
    pub cycles_per_bit: UniformRange,
    pub mecl_capacity_hz: UniformRange,
    pub mech_capacity_hz: UniformRange,
    pub cloud_capacity_hz: f64,
    pub fronthaul_capacity_hz: UniformRange,
    pub midhaul_capacity_hz: UniformRange,
    pub fronthaul_se: f64,
    pub midhaul_se: f64,
    pub tx_power_dbm: f64,
    pub noise_density_dbm_per_hz: f64,
    pub path_loss_exponent: f64,
    pub reference_loss_db: f64,
    pub inter_ru_distance_m: f64,
    pub cell_radius_m: f64,
    pub min_distance_m: f64,
    pub seed: u64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            num_dus: 4,
            num_rus: 10,
            num_users: 20,
            num_antennas: 10,
            uplink_bandwidth_hz: 10e6,
            data_bits: UniformRange::new(5e6, 30e6),
            cycles_per_bit: UniformRange::new(0.1, 10.0),
            mecl_capacity_hz: UniformRange::fixed(2e9),
            mech_capacity_hz: UniformRange::fixed(25e9),
            cloud_capacity_hz: 5e12,
            fronthaul_capacity_hz: UniformRange::fixed(300e6),
            midhaul_capacity_hz: UniformRange::fixed(500e6),
            fronthaul_se: 3.0,
            midhaul_se: 3.0,
            tx_power_dbm: 35.0,
            noise_density_dbm_per_hz: -174.0,
            path_loss_exponent: 4.0,
            reference_loss_db: 38.0,
            inter_ru_distance_m: 500.0,
            cell_radius_m: 250.0,
            min_distance_m: 10.0,
            seed: 0,
        }
    }
}

impl ScenarioSpec {
    fn check(&self) -> Result<()> {
        let count = |field: &'static str, v: usize| {
            if v == 0 {
                Err(Error::InvalidSpec { field, reason: "must be positive".into() })
            } else {
                Ok(())
            }
        };
        count("num_dus", self.num_dus)?;
        count("num_rus", self.num_rus)?;
        count("num_users", self.num_users)?;
        count("num_antennas", self.num_antennas)?;
        self.data_bits.check("data_bits")?;
        self.cycles_per_bit.check("cycles_per_bit")?;
        self.mecl_capacity_hz.check("mecl_capacity_hz")?;
        self.mech_capacity_hz.check("mech_capacity_hz")?;
        self.fronthaul_capacity_hz.check("fronthaul_capacity_hz")?;
        self.midhaul_capacity_hz.check("midhaul_capacity_hz")?;
        for (field, v) in [
            ("uplink_bandwidth_hz", self.uplink_bandwidth_hz),
            ("cloud_capacity_hz", self.cloud_capacity_hz),
            ("fronthaul_se", self.fronthaul_se),
            ("midhaul_se", self.midhaul_se),
            ("path_loss_exponent", self.path_loss_exponent),
            ("inter_ru_distance_m", self.inter_ru_distance_m),
            ("cell_radius_m", self.cell_radius_m),
            ("min_distance_m", self.min_distance_m),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSpec { field, reason: format!("{v} must be finite and positive") });
            }
        }
        if self.min_distance_m >= self.cell_radius_m {
            return Err(Error::InvalidSpec { field: "min_distance_m", reason: "must be below cell_radius_m".into() });
        }
        Ok(())
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Draws a scenario from `spec`. The same spec (including seed) always
/// yields the same scenario.
///
/// RUs sit on a square grid; every user is dropped uniformly in the disc of
/// a randomly picked RU cell and then served by its nearest RU. RUs are
/// split across DUs in contiguous blocks.
pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (num_dus, num_rus, num_users) = (spec.num_dus, spec.num_rus, spec.num_users);

    let cols = (num_rus as f64).sqrt().ceil() as usize;
    let ru_x_m: Vec<f64> = (0..num_rus).map(|i| (i % cols) as f64 * spec.inter_ru_distance_m).collect();
    let ru_y_m: Vec<f64> = (0..num_rus).map(|i| (i / cols) as f64 * spec.inter_ru_distance_m).collect();
    let ru_to_du: Vec<usize> = (0..num_rus).map(|i| i * num_dus / num_rus).collect();

    let mecl_capacity_hz = (0..num_rus).map(|_| spec.mecl_capacity_hz.sample(&mut rng)).collect();
    let fronthaul_capacity_hz = (0..num_rus).map(|_| spec.fronthaul_capacity_hz.sample(&mut rng)).collect();
    let mech_capacity_hz = (0..num_dus).map(|_| spec.mech_capacity_hz.sample(&mut rng)).collect();
    let midhaul_capacity_hz = (0..num_dus).map(|_| spec.midhaul_capacity_hz.sample(&mut rng)).collect();

    let mut geometry = Geometry { ru_x_m, ru_y_m, user_x_m: Vec::new(), user_y_m: Vec::new() };
    let mut tasks = TaskSet::default();
    let r2 = (spec.min_distance_m.powi(2), spec.cell_radius_m.powi(2));
    for _ in 0..num_users {
        let cell = rng.random_range(0..num_rus);
        let radius = (r2.0 + rng.random::<f64>() * (r2.1 - r2.0)).sqrt();
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        geometry.user_x_m.push(geometry.ru_x_m[cell] + radius * angle.cos());
        geometry.user_y_m.push(geometry.ru_y_m[cell] + radius * angle.sin());
        tasks.data_bits.push(spec.data_bits.sample(&mut rng));
        tasks.cycles_per_bit.push(spec.cycles_per_bit.sample(&mut rng));
    }
    let user_to_ru = (0..num_users)
        .map(|k| {
            (0..num_rus)
                .min_by(|&a, &b| geometry.distance_m(k, a).total_cmp(&geometry.distance_m(k, b)))
                .expect("num_rus > 0")
        })
        .collect();

    let topology = Topology {
        num_dus,
        num_rus,
        num_users,
        ru_to_du,
        user_to_ru,
        uplink_bandwidth_hz: vec![spec.uplink_bandwidth_hz; num_rus],
        fronthaul_capacity_hz,
        midhaul_capacity_hz,
        fronthaul_se: vec![spec.fronthaul_se; num_rus],
        midhaul_se: vec![spec.midhaul_se; num_dus],
        mecl_capacity_hz,
        mech_capacity_hz,
        cloud_capacity_hz: spec.cloud_capacity_hz,
    };
    let radio = RadioParams {
        num_antennas: spec.num_antennas,
        tx_power_w: dbm_to_watts(spec.tx_power_dbm),
        noise_density_w_per_hz: dbm_to_watts(spec.noise_density_dbm_per_hz),
        path_loss_exponent: spec.path_loss_exponent,
        reference_loss_db: spec.reference_loss_db,
    };
    let scenario = Scenario { topology, tasks, radio, geometry, channel_seed: rng.next_u64() };
    scenario.validate()?;
    Ok(scenario)
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidField { field, reason: reason.into() }
}

fn check_len(field: &'static str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(invalid(field, format!("expected {want} entries, found {got}")));
    }
    Ok(())
}

fn check_positive(field: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        Some(idx) => Err(invalid(field, format!("entry {idx} = {} must be finite and strictly positive", values[idx]))),
        None => Ok(()),
    }
}
