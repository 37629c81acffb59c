//! Uplink physical layer: channels, linear MMSE receive beamforming, SINR and rate.
//!
//! Adjacent RUs use orthogonal bands, so a user only sees interference from
//! the other users of its own RU.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scenario::{Geometry, RadioParams, Scenario, Topology};

pub type CVector = DVector<Complex64>;

/// Uplink channels from every user to its serving RU.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// `h[k]` is the M-antenna channel from user `k` to `serving_ru[k]`.
    pub h: Vec<CVector>,
    pub serving_ru: Vec<usize>,
    /// Noise power per RU, watts (density times the RU's uplink bandwidth).
    pub noise_power_w: Vec<f64>,
    pub tx_power_w: f64,
    pub num_antennas: usize,
}

impl ChannelSet {
    pub fn users_of_ru(&self, ru: usize) -> impl Iterator<Item = usize> + '_ {
        self.serving_ru.iter().enumerate().filter(move |&(_, &r)| r == ru).map(|(k, _)| k)
    }

    pub fn num_rus(&self) -> usize {
        self.noise_power_w.len()
    }
}

/// Source of small- and large-scale fading.
pub trait ChannelModel {
    fn draw(&self, topology: &Topology, geometry: &Geometry, radio: &RadioParams, seed: u64) -> ChannelSet;
}

/// Independent Rayleigh fading on each antenna with log-distance path loss
/// `PL(d) = PL(1 m) * d^-exponent`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RayleighPathLoss;

impl RayleighPathLoss {
    pub fn path_gain(radio: &RadioParams, distance_m: f64) -> f64 {
        10f64.powf(-radio.reference_loss_db / 10.0) * distance_m.max(1.0).powf(-radio.path_loss_exponent)
    }
}

impl ChannelModel for RayleighPathLoss {
    fn draw(&self, topology: &Topology, geometry: &Geometry, radio: &RadioParams, seed: u64) -> ChannelSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = radio.num_antennas;
        let h = (0..topology.num_users)
            .map(|k| {
                let ru = topology.user_to_ru[k];
                let amp = (Self::path_gain(radio, geometry.distance_m(k, ru)) / 2.0).sqrt();
                CVector::from_fn(m, |_, _| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(amp * re, amp * im)
                })
            })
            .collect();
        ChannelSet {
            h,
            serving_ru: topology.user_to_ru.clone(),
            noise_power_w: topology.uplink_bandwidth_hz.iter().map(|b| radio.noise_density_w_per_hz * b).collect(),
            tx_power_w: radio.tx_power_w,
            num_antennas: m,
        }
    }
}

/// Channels for a scenario under the default Rayleigh/path-loss model.
pub fn generate_channels(scenario: &Scenario) -> ChannelSet {
    RayleighPathLoss.draw(&scenario.topology, &scenario.geometry, &scenario.radio, scenario.channel_seed)
}

/// Receive beamformers, one per user.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub u: Vec<CVector>,
}

/// MMSE beamformers for the users of one RU:
/// `u_k = (σ² I + p_t Σ_l h_l h_lᴴ)⁻¹ h_k`.
///
/// The covariance is Hermitian positive definite for σ² > 0, so the
/// Cholesky solve cannot fail.
pub fn mmse_beamformer(channels: &ChannelSet, ru: usize) -> Vec<(usize, CVector)> {
    let users: Vec<usize> = channels.users_of_ru(ru).collect();
    if users.is_empty() {
        return Vec::new();
    }
    let m = channels.num_antennas;
    let mut cov = DMatrix::<Complex64>::identity(m, m) * Complex64::from(channels.noise_power_w[ru]);
    for &l in &users {
        let h = &channels.h[l];
        cov += h * h.adjoint() * Complex64::from(channels.tx_power_w);
    }
    let chol = cov.cholesky().expect("noise-loaded covariance is positive definite");
    users.into_iter().map(|k| (k, chol.solve(&channels.h[k]))).collect()
}

/// MMSE beamformers for every user of every RU.
pub fn mmse_beamformers(channels: &ChannelSet) -> Beamformer {
    let mut u = vec![CVector::zeros(channels.num_antennas); channels.h.len()];
    for ru in 0..channels.num_rus() {
        for (k, uk) in mmse_beamformer(channels, ru) {
            u[k] = uk;
        }
    }
    Beamformer { u }
}

/// SINR of user `k` when received with beamformer `u`.
pub fn sinr(channels: &ChannelSet, u: &CVector, k: usize) -> Result<f64> {
    let norm_sqr = u.norm_squared();
    if norm_sqr == 0.0 {
        return Err(Error::ZeroBeamformer { user: k });
    }
    let ru = channels.serving_ru[k];
    let gain = |l: usize| channels.tx_power_w * u.dotc(&channels.h[l]).norm_sqr();
    let interference: f64 = channels.users_of_ru(ru).filter(|&l| l != k).map(gain).sum();
    Ok(gain(k) / (interference + norm_sqr * channels.noise_power_w[ru]))
}

/// Achievable rate in bits/s for bandwidth `bandwidth_hz`.
pub fn uplink_rate(bandwidth_hz: f64, sinr: f64) -> f64 {
    bandwidth_hz * (1.0 + sinr).log2()
}

/// Wireless access delay in seconds; infinite when the rate is zero.
pub fn access_delay(data_bits: f64, rate: f64) -> f64 {
    if data_bits == 0.0 {
        0.0
    } else if rate > 0.0 {
        data_bits / rate
    } else {
        f64::INFINITY
    }
}

/// Uplink rates of every user under `beamformer`.
pub fn uplink_rates(channels: &ChannelSet, topology: &Topology, beamformer: &Beamformer) -> Result<Vec<f64>> {
    (0..channels.h.len())
        .map(|k| {
            let s = sinr(channels, &beamformer.u[k], k)?;
            Ok(uplink_rate(topology.uplink_bandwidth_hz[channels.serving_ru[k]], s))
        })
        .collect()
}

/// Channels, MMSE beamformers and rates for a scenario in one call.
pub fn scenario_rates(scenario: &Scenario) -> Result<Vec<f64>> {
    let channels = generate_channels(scenario);
    let beamformer = mmse_beamformers(&channels);
    uplink_rates(&channels, &scenario.topology, &beamformer)
}
