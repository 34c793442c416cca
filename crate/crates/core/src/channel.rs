//! Propagation and reception: pathloss, Nakagami-m block fading, receiver
//! sensitivity and capture between overlapping frames.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationParams {
    pub pathloss_exponent: f64,
    pub wavelength_m: f64,
    pub nakagami_m: f64,
    /// Receiver sensitivity per spreading factor, in dBm.
    pub sensitivity_dbm: BTreeMap<u8, f64>,
    /// A frame survives when it is at least this much stronger than the
    /// strongest overlapping interferer.
    pub capture_threshold_db: f64,
}

impl Default for PropagationParams {
    fn default() -> Self {
        Self {
            pathloss_exponent: 4.0,
            wavelength_m: SPEED_OF_LIGHT / 868.0e6,
            nakagami_m: 1.2,
            sensitivity_dbm: default_sensitivity_dbm(),
            capture_threshold_db: 6.0,
        }
    }
}

/// Typical 125 kHz datasheet sensitivities.
pub fn default_sensitivity_dbm() -> BTreeMap<u8, f64> {
    BTreeMap::from([
        (7, -123.0),
        (8, -126.0),
        (9, -129.0),
        (10, -132.0),
        (11, -134.5),
        (12, -137.0),
    ])
}

/// Sensitivity offset of the reference deployment relative to the datasheet
/// table. Raising every threshold by the same amount is equivalent to a
/// uniform excess path loss on all links.
pub const CALIBRATED_SENSITIVITY_OFFSET_DB: f64 = 14.0;

impl PropagationParams {
    /// Reference deployment: datasheet sensitivities raised by
    /// [`CALIBRATED_SENSITIVITY_OFFSET_DB`].
    pub fn calibrated() -> Self {
        Self::default().with_sensitivity_offset_db(CALIBRATED_SENSITIVITY_OFFSET_DB)
    }

    pub fn with_sensitivity_offset_db(mut self, offset_db: f64) -> Self {
        self.sensitivity_dbm.values_mut().for_each(|dbm| *dbm += offset_db);
        self
    }

    pub fn validate(&self, spreading_factors: &[u8]) -> Result<(), ConfigError> {
        if !(self.pathloss_exponent > 0.0) {
            return Err(ConfigError::invalid("pathloss_exponent", "must be positive"));
        }
        if !(self.wavelength_m > 0.0) {
            return Err(ConfigError::invalid("wavelength_m", "must be positive"));
        }
        if !(self.nakagami_m >= 0.5) {
            return Err(ConfigError::invalid("nakagami_m", "must be at least 0.5"));
        }
        if !(self.capture_threshold_db > 0.0) {
            return Err(ConfigError::invalid("capture_threshold_db", "must be positive"));
        }
        for sf in spreading_factors {
            if !self.sensitivity_dbm.contains_key(sf) {
                return Err(ConfigError::invalid("sensitivity_dbm", format!("no entry for SF{sf}")));
            }
        }
        Ok(())
    }

    /// Composite link constant `(lambda / 4 pi)^alpha * P` in mW.
    pub fn link_gain(&self, tx_power_dbm: f64) -> f64 {
        (self.wavelength_m / (4.0 * std::f64::consts::PI)).powf(self.pathloss_exponent) * dbm_to_mw(tx_power_dbm)
    }

    /// Sensitivity threshold in mW; `+inf` for unknown spreading factors.
    pub fn sensitivity_mw(&self, spreading_factor: u8) -> f64 {
        self.sensitivity_dbm
            .get(&spreading_factor)
            .map_or(f64::INFINITY, |&dbm| dbm_to_mw(dbm))
    }

    /// Linear power ratio corresponding to the capture threshold.
    pub fn capture_ratio(&self) -> f64 {
        dbm_to_mw(self.capture_threshold_db)
    }
}

/// Distance and power fading gain of one (frame, receiver) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDraw {
    pub distance_m: f64,
    pub fading_gain: f64,
}

/// Received power in mW: `gamma * A * d^-alpha`.
pub fn received_power(tx_power_dbm: f64, params: &PropagationParams, link: LinkDraw) -> f64 {
    params.link_gain(tx_power_dbm) * link.fading_gain * link.distance_m.powf(-params.pathloss_exponent)
}

/// Sampler for unit-mean Nakagami-m power gains, i.e. Gamma(m, 1/m).
#[derive(Debug, Clone, Copy)]
pub struct NakagamiFading {
    dist: Gamma<f64>,
}

impl NakagamiFading {
    pub fn new(m: f64) -> Self {
        assert!(m >= 0.5, "Nakagami m must be at least 0.5, got {m}");
        Self {
            dist: Gamma::new(m, 1.0 / m).expect("valid gamma parameters"),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // Gamma sampling can return exactly 0 for tiny shapes; keep gains positive.
        self.dist.sample(rng).max(f64::MIN_POSITIVE)
    }
}

pub fn sample_fading<R: Rng + ?Sized>(m: f64, rng: &mut R) -> f64 {
    NakagamiFading::new(m).sample(rng)
}

/// CDF of the unit-mean Gamma(m, 1/m) power gain: `P(m, m x)`.
pub fn fading_cdf(m: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    statrs::function::gamma::gamma_lr(m, m * x)
}

/// Density of the unit-mean Gamma(m, 1/m) power gain.
pub fn fading_pdf(m: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln = m * m.ln() + (m - 1.0) * x.ln() - m * x - statrs::function::gamma::ln_gamma(m);
    ln.exp()
}

/// Quantile of the fading gain, by bisection on [`fading_cdf`].
pub fn fading_quantile(m: f64, q: f64) -> f64 {
    assert!((0.0..1.0).contains(&q));
    let mut hi = 1.0;
    while fading_cdf(m, hi) < q {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if fading_cdf(m, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// One frame as seen by a particular receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signal {
    pub channel: u32,
    pub spreading_factor: u8,
    pub start_ns: u64,
    pub end_ns: u64,
    pub power_mw: f64,
}

impl Signal {
    pub fn overlaps(&self, other: &Signal) -> bool {
        self.start_ns < other.end_ns && other.start_ns < self.end_ns
    }

    /// Same channel, same spreading factor, and any temporal overlap.
    pub fn interferes_with(&self, other: &Signal) -> bool {
        self.channel == other.channel && self.spreading_factor == other.spreading_factor && self.overlaps(other)
    }
}

/// Whether `desired` is decoded in the presence of `others`. Only the
/// strongest colliding frame matters.
pub fn is_received<'a>(
    desired: &Signal,
    others: impl IntoIterator<Item = &'a Signal>,
    params: &PropagationParams,
) -> bool {
    if desired.power_mw < params.sensitivity_mw(desired.spreading_factor) {
        return false;
    }
    let strongest = others
        .into_iter()
        .filter(|other| desired.interferes_with(other))
        .map(|other| other.power_mw)
        .fold(0.0, f64::max);
    strongest == 0.0 || desired.power_mw >= params.capture_ratio() * strongest
}

/// Outcome for every frame in `frames` at one receiver.
pub fn resolve_receptions(frames: &[Signal], params: &PropagationParams) -> Vec<bool> {
    frames
        .iter()
        .enumerate()
        .map(|(i, desired)| {
            let others = frames.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, s)| s);
            is_received(desired, others, params)
        })
        .collect()
}
