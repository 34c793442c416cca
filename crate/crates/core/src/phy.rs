//! LoRa airtime arithmetic.
//!
//! Symbol counts are computed with integer arithmetic; durations are only
//! converted to seconds at the boundary. The frame length is tracked in
//! quarter symbols because the preamble carries 4.25 extra symbols, which
//! makes every duration an exact rational `quarter_symbols * 2^sf / (4 * bw)`.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Per-node PHY parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioConfig {
    pub spreading_factor: u8,
    pub bandwidth_hz: f64,
    /// Programmed preamble symbols (the radio adds 4.25 more).
    pub n_preamble: u32,
    /// `h` in the payload-symbol formula.
    pub header_enabled: bool,
    /// `l` in the payload-symbol formula.
    pub low_data_rate_opt: bool,
    /// Coding parameter `c`; 1 means code rate 4/5.
    pub code_param: u8,
    pub tx_power_dbm: f64,
    pub channels_hz: Vec<f64>,
}

impl RadioConfig {
    /// 125 kHz, 8 preamble symbols, header on, rate 4/5, 14 dBm, three EU868
    /// channels. Low data rate optimisation follows the usual rule: on for
    /// SF11 and SF12 at 125 kHz.
    pub fn with_spreading_factor(spreading_factor: u8) -> Self {
        Self {
            spreading_factor,
            bandwidth_hz: 125_000.0,
            n_preamble: 8,
            header_enabled: true,
            low_data_rate_opt: spreading_factor >= 11,
            code_param: 1,
            tx_power_dbm: 14.0,
            channels_hz: vec![860.0e6, 864.0e6, 868.0e6],
        }
    }

    pub fn sensor_default() -> Self {
        Self::with_spreading_factor(10)
    }

    pub fn relay_default() -> Self {
        Self::with_spreading_factor(7)
    }

    /// Relay radio profile that yields a 93-entry relay frame in the
    /// reference setup. Identical to [`RadioConfig::relay_default`] except
    /// that `h = 0` in the payload-symbol formula.
    pub fn relay_calibrated() -> Self {
        Self {
            header_enabled: false,
            ..Self::relay_default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(7..=12).contains(&self.spreading_factor) {
            return Err(ConfigError::invalid(
                "spreading_factor",
                format!("{} not in 7..=12", self.spreading_factor),
            ));
        }
        if !(1..=4).contains(&self.code_param) {
            return Err(ConfigError::invalid(
                "code_param",
                format!("{} not in 1..=4", self.code_param),
            ));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(ConfigError::invalid("bandwidth_hz", "must be positive"));
        }
        if self.symbol_denominator() <= 0 {
            return Err(ConfigError::invalid(
                "low_data_rate_opt",
                "spreading_factor - 2*l must be positive",
            ));
        }
        if self.channels_hz.is_empty() {
            return Err(ConfigError::invalid("channels_hz", "at least one channel required"));
        }
        Ok(())
    }

    fn symbol_denominator(&self) -> i64 {
        i64::from(self.spreading_factor) - 2 * i64::from(self.low_data_rate_opt)
    }

    /// Seconds per quarter symbol times four, i.e. `2^sf / bw`.
    fn symbol_scale(&self) -> f64 {
        (1u64 << self.spreading_factor) as f64 / self.bandwidth_hz
    }

    fn quarter_symbols_to_seconds(&self, quarter_symbols: u64) -> f64 {
        (quarter_symbols << self.spreading_factor) as f64 / (4.0 * self.bandwidth_hz)
    }
}

/// Traffic and storage parameters of the sensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficConfig {
    /// Sensing period `t` in seconds.
    pub measurement_period_s: f64,
    /// Bytes per measurement.
    pub measurement_bytes: u32,
    /// Bytes of the sensor identifier attached by a relay.
    pub sensor_id_bytes: u32,
    /// Storage available for past measurements.
    pub storage_bytes_max: u32,
    /// Age after which a measurement is no longer useful.
    pub delay_max_s: f64,
    pub duty_cycle_limit: f64,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        Self {
            measurement_period_s: 30.0,
            measurement_bytes: 1,
            sensor_id_bytes: 1,
            storage_bytes_max: 10,
            delay_max_s: 180.0,
            duty_cycle_limit: 0.01,
        }
    }
}

impl TrafficConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.measurement_period_s > 0.0) {
            return Err(ConfigError::invalid("measurement_period_s", "must be positive"));
        }
        if self.measurement_bytes == 0 {
            return Err(ConfigError::invalid("measurement_bytes", "must be positive"));
        }
        if self.sensor_id_bytes == 0 {
            return Err(ConfigError::invalid("sensor_id_bytes", "must be positive"));
        }
        if self.storage_bytes_max == 0 {
            return Err(ConfigError::invalid("storage_bytes_max", "must be positive"));
        }
        if !(self.delay_max_s >= self.measurement_period_s) {
            return Err(ConfigError::invalid(
                "delay_max_s",
                "must be at least measurement_period_s",
            ));
        }
        if !(self.duty_cycle_limit > 0.0 && self.duty_cycle_limit <= 1.0) {
            return Err(ConfigError::invalid("duty_cycle_limit", "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Payload bytes of a sensor frame carrying the current and `r` past
    /// measurements.
    pub fn sensor_payload_bytes(&self, redundancy: u32) -> u32 {
        (redundancy + 1) * self.measurement_bytes
    }

    /// Bytes one forwarded measurement occupies in a relay frame.
    pub fn relay_entry_bytes(&self) -> u32 {
        self.measurement_bytes + self.sensor_id_bytes
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhyError {
    #[error("even r = 0 violates the duty-cycle limit ({duty_cycle:.6} > {limit})")]
    DutyCycleInfeasible { duty_cycle: f64, limit: f64 },
    #[error("relay transmit window of {t_tx_s} s cannot carry a single entry ({one_entry_s} s needed)")]
    ZeroCapacity { t_tx_s: f64, one_entry_s: f64 },
}

pub fn symbol_duration(cfg: &RadioConfig) -> f64 {
    cfg.symbol_scale()
}

pub fn preamble_duration(cfg: &RadioConfig) -> f64 {
    cfg.quarter_symbols_to_seconds(preamble_quarter_symbols(cfg))
}

fn preamble_quarter_symbols(cfg: &RadioConfig) -> u64 {
    4 * u64::from(cfg.n_preamble) + 17
}

/// Number of payload symbols (header included) for `payload_bytes`.
pub fn payload_symbols(payload_bytes: u32, cfg: &RadioConfig) -> u64 {
    let numerator =
        2 * i64::from(payload_bytes) - i64::from(cfg.spreading_factor) - 5 * i64::from(cfg.header_enabled) + 11;
    let denominator = cfg.symbol_denominator();
    debug_assert!(denominator > 0);
    let blocks = if numerator <= 0 {
        0
    } else {
        (numerator + denominator - 1) / denominator
    };
    8 + (blocks * (i64::from(cfg.code_param) + 4)) as u64
}

pub fn payload_duration(payload_bytes: u32, cfg: &RadioConfig) -> f64 {
    cfg.quarter_symbols_to_seconds(4 * payload_symbols(payload_bytes, cfg))
}

/// Frame length in quarter symbols. Two payloads have the same airtime under
/// one radio config iff this value matches.
pub fn frame_quarter_symbols(payload_bytes: u32, cfg: &RadioConfig) -> u64 {
    preamble_quarter_symbols(cfg) + 4 * payload_symbols(payload_bytes, cfg)
}

pub fn frame_duration(payload_bytes: u32, cfg: &RadioConfig) -> f64 {
    cfg.quarter_symbols_to_seconds(frame_quarter_symbols(payload_bytes, cfg))
}

/// Frame duration rounded to whole nanoseconds. Exact for bandwidths that
/// divide `2^sf * 250_000_000`, which covers 125/250/500 kHz.
pub fn frame_duration_ns(payload_bytes: u32, cfg: &RadioConfig) -> u64 {
    let quarter = u128::from(frame_quarter_symbols(payload_bytes, cfg)) << cfg.spreading_factor;
    let bw = cfg.bandwidth_hz;
    if bw.fract() == 0.0 {
        let denom = 4 * bw as u128;
        ((quarter * 1_000_000_000 + denom / 2) / denom) as u64
    } else {
        (quarter as f64 * 1e9 / (4.0 * bw)).round() as u64
    }
}

/// Fraction of time a sensor transmits when sending one frame with `r`
/// past measurements every period.
pub fn duty_cycle(redundancy: u32, sensor: &RadioConfig, traffic: &TrafficConfig) -> f64 {
    frame_duration(traffic.sensor_payload_bytes(redundancy), sensor) / traffic.measurement_period_s
}

/// Largest admissible redundancy: bounded by storage, duty cycle and the
/// delay limit.
pub fn max_redundancy(sensor: &RadioConfig, traffic: &TrafficConfig) -> Result<u32, PhyError> {
    let limit = traffic.duty_cycle_limit;
    let at_zero = duty_cycle(0, sensor, traffic);
    if at_zero > limit {
        return Err(PhyError::DutyCycleInfeasible {
            duty_cycle: at_zero,
            limit,
        });
    }
    let storage_bound = traffic.storage_bytes_max / traffic.measurement_bytes;
    let delay_bound = floor_ratio(traffic.delay_max_s, traffic.measurement_period_s);

    let cap = storage_bound.min(delay_bound);
    // duty_cycle is nondecreasing in r, so stop at the first violation or at
    // the point where the other bounds take over anyway.
    let mut duty_bound = 0;
    while duty_bound < cap && duty_cycle(duty_bound + 1, sensor, traffic) <= limit {
        duty_bound += 1;
    }
    Ok(storage_bound.min(duty_bound).min(delay_bound))
}

fn floor_ratio(num: f64, den: f64) -> u32 {
    let ratio = num / den;
    let rounded = ratio.round();
    // 0.3 / 0.1 style ratios land a hair below the integer.
    if (ratio - rounded).abs() <= 1e-9 * rounded.abs().max(1.0) {
        rounded as u32
    } else {
        ratio.floor() as u32
    }
}

/// Largest number of (id, measurement) entries a relay frame can carry
/// without exceeding the transmit window.
pub fn relay_capacity(relay: &RadioConfig, traffic: &TrafficConfig, t_tx_s: f64) -> Result<u32, PhyError> {
    let entry = traffic.relay_entry_bytes();
    let fits = |entries: u32| frame_duration(entries * entry, relay) <= t_tx_s;
    if !fits(1) {
        return Err(PhyError::ZeroCapacity {
            t_tx_s,
            one_entry_s: frame_duration(entry, relay),
        });
    }
    let mut capacity = 1;
    while fits(capacity + 1) {
        capacity += 1;
    }
    Ok(capacity)
}
