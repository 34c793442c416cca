//! Discrete-event simulation of sensors, relays and a gateway.
//!
//! Sensors transmit one frame per period carrying the current and `r` past
//! measurements. Relays alternate between a receive window, during which
//! they keep the current measurement of every frame they decode, and a
//! transmit window, in which they forward up to `v` of them in one frame.
//! Relays transmit in disjoint slots on a spreading factor the sensors do
//! not use. Time is kept in integer nanoseconds.

mod engine;
mod metrics;
mod tally;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use engine::{run, run_with_trace, FrameRecord, SenderId, Trace};
pub use metrics::{AuditReport, MetricsReport, RelayCounters};
pub use tally::{tally_vs_analysis, Comparison};

use crate::analytic::{AnalyticInputs, DistanceLaws};
use crate::channel::PropagationParams;
use crate::error::{ConfigError, Error, Result};
use crate::phy::{self, RadioConfig, TrafficConfig};
use crate::rng::{stream, Stream};

/// Relays are tracked in a 32-bit mask per measurement.
pub const MAX_RELAYS: u32 = 32;
const PLACEMENT_ATTEMPTS: usize = 100_000;
const NS_PER_S: f64 = 1e9;

pub(crate) fn seconds_to_ns(seconds: f64) -> u64 {
    (seconds * NS_PER_S).round() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn square(min: f64, max: f64) -> Self {
        Self {
            x_min: min,
            x_max: max,
            y_min: min,
            y_max: max,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        (self.x_min..=self.x_max).contains(&p.x) && (self.y_min..=self.y_max).contains(&p.y)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point {
            x: rng.gen_range(self.x_min..=self.x_max),
            y: rng.gen_range(self.y_min..=self.y_max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementConfig {
    pub sensor_box: Rect,
    pub relay_box: Rect,
    pub relay_min_separation_m: f64,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        Self {
            sensor_box: Rect::square(30.0, 42.0),
            relay_box: Rect::square(10.0, 20.0),
            relay_min_separation_m: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelayWindows {
    pub t_rx_s: f64,
    pub t_tx_s: f64,
}

impl Default for RelayWindows {
    fn default() -> Self {
        Self {
            t_rx_s: 30.0,
            t_tx_s: 0.3,
        }
    }
}

impl RelayWindows {
    pub fn cycle_s(&self) -> f64 {
        self.t_rx_s + self.t_tx_s
    }
}

/// Everything needed to reproduce one simulation run. Fields missing from
/// a serialized config take their default values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_sensors: u32,
    pub n_relays: u32,
    pub placement: PlacementConfig,
    pub sensor_radio: RadioConfig,
    pub relay_radio: RadioConfig,
    pub traffic: TrafficConfig,
    pub relay_windows: RelayWindows,
    pub propagation: PropagationParams,
    pub redundancy: u32,
    pub run_length_s: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    /// Reference deployment, three hours of operation.
    fn default() -> Self {
        Self {
            n_sensors: 60,
            n_relays: 0,
            placement: PlacementConfig::default(),
            sensor_radio: RadioConfig::sensor_default(),
            relay_radio: RadioConfig::relay_calibrated(),
            traffic: TrafficConfig::default(),
            relay_windows: RelayWindows::default(),
            propagation: PropagationParams::calibrated(),
            redundancy: 3,
            run_length_s: 3.0 * 3600.0,
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sensor_radio.validate()?;
        self.relay_radio.validate()?;
        self.traffic.validate()?;
        self.propagation
            .validate(&[self.sensor_radio.spreading_factor, self.relay_radio.spreading_factor])?;
        if self.n_sensors == 0 {
            return Err(ConfigError::invalid("n_sensors", "at least one sensor required"));
        }
        if self.n_relays > MAX_RELAYS {
            return Err(ConfigError::invalid(
                "n_relays",
                format!("at most {MAX_RELAYS} relays supported"),
            ));
        }
        if self.sensor_radio.spreading_factor == self.relay_radio.spreading_factor {
            return Err(ConfigError::invalid(
                "relay_radio.spreading_factor",
                "relays must use a spreading factor different from the sensors",
            ));
        }
        let windows = &self.relay_windows;
        if !(windows.t_rx_s > 0.0 && windows.t_tx_s > 0.0) {
            return Err(ConfigError::invalid("relay_windows", "windows must be positive"));
        }
        if windows.t_tx_s / windows.cycle_s() > self.traffic.duty_cycle_limit * (1.0 + 1e-12) {
            return Err(ConfigError::invalid(
                "relay_windows",
                "t_tx / (t_rx + t_tx) exceeds the duty-cycle limit",
            ));
        }
        if f64::from(self.n_relays) * windows.t_tx_s > windows.cycle_s() {
            return Err(ConfigError::invalid(
                "n_relays",
                "relay transmit slots do not fit in one relay cycle",
            ));
        }
        if self.n_relays > 0 {
            phy::relay_capacity(&self.relay_radio, &self.traffic, windows.t_tx_s)
                .map_err(|e| ConfigError::invalid("relay_windows.t_tx_s", e.to_string()))?;
        }
        if phy::duty_cycle(self.redundancy, &self.sensor_radio, &self.traffic) > self.traffic.duty_cycle_limit {
            return Err(ConfigError::invalid(
                "redundancy",
                "sensor duty cycle exceeds the limit",
            ));
        }
        let frame = phy::frame_duration(self.traffic.sensor_payload_bytes(self.redundancy), &self.sensor_radio);
        if frame >= self.traffic.measurement_period_s {
            return Err(ConfigError::invalid(
                "redundancy",
                "sensor frame does not fit in one measurement period",
            ));
        }
        let placement = &self.placement;
        for (name, rect) in [("sensor_box", placement.sensor_box), ("relay_box", placement.relay_box)] {
            if !(rect.x_max >= rect.x_min && rect.y_max >= rect.y_min) {
                return Err(ConfigError::invalid(format!("placement.{name}"), "empty box"));
            }
        }
        if !(placement.relay_min_separation_m >= 0.0) {
            return Err(ConfigError::invalid(
                "placement.relay_min_separation_m",
                "must be non-negative",
            ));
        }
        if !(self.run_length_s > self.warmup_s() + self.traffic.delay_max_s) {
            return Err(ConfigError::invalid(
                "run_length_s",
                "run must outlast the warm-up and the final delay margin",
            ));
        }
        Ok(())
    }

    /// Measurements generated before this instant are not scored.
    pub fn warmup_s(&self) -> f64 {
        self.traffic.delay_max_s + self.relay_windows.cycle_s()
    }

    /// Inputs for the analytical model of this deployment.
    pub fn analytic_inputs(&self, laws: DistanceLaws, capture_factor: f64) -> AnalyticInputs {
        AnalyticInputs::from_parts(
            self.n_sensors,
            self.n_relays,
            self.redundancy,
            &self.sensor_radio,
            &self.relay_radio,
            &self.traffic,
            &self.propagation,
            self.relay_windows.t_rx_s,
            self.relay_windows.t_tx_s,
            laws,
            capture_factor,
        )
    }

    /// Hex SHA-256 of the configuration with the seed zeroed. Together with
    /// the seed it identifies a run.
    pub fn digest(&self) -> String {
        let canonical = ScenarioConfig {
            seed: 0,
            ..self.clone()
        };
        let json = serde_json::to_vec(&canonical).expect("scenario config serialises");
        let hash = Sha256::digest(&json);
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// A concrete deployment drawn from a [`ScenarioConfig`].
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub gateway: Point,
    pub sensors: Vec<Point>,
    pub relays: Vec<Point>,
    pub sensor_phase_ns: Vec<u64>,
    pub relay_offset_ns: Vec<u64>,
    pub relay_capacity: u32,
    pub(crate) timing: Timing,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Timing {
    pub period_ns: u64,
    pub sensor_frame_ns: u64,
    pub t_rx_ns: u64,
    pub cycle_ns: u64,
    pub delay_max_ns: u64,
    pub run_end_ns: u64,
    pub warmup_ns: u64,
}

impl Scenario {
    pub fn distance_to_gateway(&self, sensor: usize) -> f64 {
        self.sensors[sensor].distance(&self.gateway)
    }

    /// Start of relay `relay`'s receive window that contains `time_ns`, if
    /// the relay has started cycling.
    pub(crate) fn rx_window_start(&self, relay: usize, time_ns: u64) -> Option<u64> {
        let offset = self.relay_offset_ns[relay];
        let since = time_ns.checked_sub(offset)?;
        Some(offset + since / self.timing.cycle_ns * self.timing.cycle_ns)
    }

    /// Whether a frame occupying `[start, end)` lies inside one receive
    /// window of `relay`.
    pub fn relay_hears(&self, relay: usize, start_ns: u64, end_ns: u64) -> bool {
        self.rx_window_start(relay, start_ns)
            .is_some_and(|window| end_ns <= window + self.timing.t_rx_ns)
    }
}

/// Draws node positions and sensor phases. Relay cycles are staggered by
/// one transmit window each so their transmissions never overlap.
pub fn build_scenario(config: &ScenarioConfig) -> Result<Scenario> {
    config.validate()?;
    let seed = config.seed;

    let mut placement_rng = stream(seed, Stream::SensorPlacement, 0, 0);
    let sensors = (0..config.n_sensors)
        .map(|_| config.placement.sensor_box.sample(&mut placement_rng))
        .collect();

    let mut relay_rng = stream(seed, Stream::RelayPlacement, 0, 0);
    let mut relays: Vec<Point> = Vec::with_capacity(config.n_relays as usize);
    let min_sep = config.placement.relay_min_separation_m;
    let mut attempts = 0;
    while relays.len() < config.n_relays as usize {
        if attempts == PLACEMENT_ATTEMPTS {
            return Err(Error::Placement {
                relays: config.n_relays as usize,
                separation_m: min_sep,
                attempts,
            });
        }
        attempts += 1;
        let candidate = config.placement.relay_box.sample(&mut relay_rng);
        if relays.iter().all(|p| p.distance(&candidate) >= min_sep) {
            relays.push(candidate);
        }
    }

    let traffic = &config.traffic;
    let windows = &config.relay_windows;
    let period_ns = seconds_to_ns(traffic.measurement_period_s);
    let t_rx_ns = seconds_to_ns(windows.t_rx_s);
    let t_tx_ns = seconds_to_ns(windows.t_tx_s);
    let timing = Timing {
        period_ns,
        sensor_frame_ns: phy::frame_duration_ns(traffic.sensor_payload_bytes(config.redundancy), &config.sensor_radio),
        t_rx_ns,
        cycle_ns: t_rx_ns + t_tx_ns,
        delay_max_ns: seconds_to_ns(traffic.delay_max_s),
        run_end_ns: seconds_to_ns(config.run_length_s),
        warmup_ns: seconds_to_ns(config.warmup_s()),
    };

    let mut phase_rng = stream(seed, Stream::Phases, 0, 0);
    let sensor_phase_ns = (0..config.n_sensors)
        .map(|_| phase_rng.gen_range(0..period_ns))
        .collect();
    let relay_offset_ns = (0..u64::from(config.n_relays)).map(|i| i * t_tx_ns).collect();

    let relay_capacity = if config.n_relays > 0 {
        phy::relay_capacity(&config.relay_radio, traffic, windows.t_tx_s)?
    } else {
        0
    };

    Ok(Scenario {
        config: config.clone(),
        gateway: Point::ORIGIN,
        sensors,
        relays,
        sensor_phase_ns,
        relay_offset_ns,
        relay_capacity,
        timing,
    })
}
