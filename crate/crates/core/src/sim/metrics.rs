use serde::{Deserialize, Serialize};

use super::engine::{SenderId, Trace};
use super::Scenario;
use crate::channel::dbm_to_mw;

const HOUR_NS: u64 = 3_600_000_000_000;

/// Fate of one measurement. Relay sets are bit masks indexed by relay.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct MeasurementState {
    pub direct: bool,
    pub via: u32,
    pub heard_window: u32,
    pub overheard: u32,
    pub dropped: u32,
}

/// Per-window discard fractions `dropped / buffered` at one relay.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct WindowDrops {
    windows: u64,
    sum: f64,
    sum_sq: f64,
}

impl WindowDrops {
    pub fn record(&mut self, buffered: usize, dropped: usize) {
        let fraction = if buffered == 0 {
            0.0
        } else {
            dropped as f64 / buffered as f64
        };
        self.windows += 1;
        self.sum += fraction;
        self.sum_sq += fraction * fraction;
    }

    fn mean_and_se(&self) -> (f64, f64) {
        if self.windows == 0 {
            return (0.0, 0.0);
        }
        let n = self.windows as f64;
        let mean = self.sum / n;
        if self.windows < 2 {
            return (mean, 0.0);
        }
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (mean, (var / n).sqrt())
    }
}

/// Counters for one relay over the scored part of the run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RelayCounters {
    /// Scored measurements whose first frame fell inside a receive window.
    pub in_window: u64,
    /// Of those, measurements the relay decoded.
    pub overheard: u64,
    /// Of those, measurements discarded for lack of room.
    pub dropped: u64,
    /// Scored measurements the gateway received through this relay.
    pub delivered_via: u64,
    pub frames_sent: u64,
    pub frames_delivered: u64,
    pub windows: u64,
    /// Mean over receive windows of `dropped / buffered`.
    pub drop_fraction: f64,
    pub drop_fraction_se: f64,
}

/// Post-run protocol checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    /// Largest airtime share of any node over any sliding hour.
    pub max_airtime_fraction: f64,
    pub duty_cycle_limit: f64,
    pub relay_slots_disjoint: bool,
    pub relay_frames_within_capacity: bool,
    pub conservation: bool,
}

impl AuditReport {
    pub fn duty_cycle_ok(&self) -> bool {
        self.max_airtime_fraction <= self.duty_cycle_limit * (1.0 + 1e-9)
    }

    pub fn passed(&self) -> bool {
        self.duty_cycle_ok() && self.relay_slots_disjoint && self.relay_frames_within_capacity && self.conservation
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub seed: u64,
    pub config_digest: String,
    pub n_sensors: u32,
    pub n_relays: u32,
    pub redundancy: u32,
    pub generated: u64,
    pub delivered: u64,
    pub lost: u64,
    pub delivered_direct: u64,
    pub delivered_direct_only: u64,
    pub delivered_relay_only: u64,
    pub delivered_both: u64,
    /// (measurement, relay) pairs discarded at a full relay.
    pub dropped_at_relay: u64,
    pub mlr: f64,
    /// Energy of one sensor frame, J.
    pub frame_energy_j: f64,
    /// Energy per delivered measurement, J; infinite when nothing arrives.
    pub e_m_j: f64,
    pub e_m_infinite: bool,
    pub relays: Vec<RelayCounters>,
    pub audit: AuditReport,
}

impl MetricsReport {
    /// Fraction of scored measurements the gateway missed on the direct path.
    pub fn direct_failure(&self) -> f64 {
        1.0 - self.delivered_direct as f64 / self.generated as f64
    }
}

pub(crate) fn summarise(
    scenario: &Scenario,
    trace: &Trace,
    measurements: &[Vec<MeasurementState>],
    mut relays: Vec<RelayCounters>,
    window_drops: &[WindowDrops],
) -> MetricsReport {
    let config = &scenario.config;
    let timing = scenario.timing;
    let scored_end = timing.run_end_ns - timing.delay_max_ns;

    let mut generated = 0;
    let mut delivered = 0;
    let mut lost = 0;
    let mut via_relay = 0;
    let mut delivered_direct_only = 0;
    let mut delivered_relay_only = 0;
    let mut delivered_both = 0;
    let mut dropped_at_relay = 0;
    for (sensor, states) in measurements.iter().enumerate() {
        let phase = scenario.sensor_phase_ns[sensor];
        for (seq, state) in states.iter().enumerate() {
            let born = phase + seq as u64 * timing.period_ns;
            if born < timing.warmup_ns || born > scored_end {
                continue;
            }
            generated += 1;
            if state.direct || state.via != 0 {
                delivered += 1;
            } else {
                lost += 1;
            }
            via_relay += u64::from(state.via != 0);
            match (state.direct, state.via != 0) {
                (true, true) => delivered_both += 1,
                (true, false) => delivered_direct_only += 1,
                (false, true) => delivered_relay_only += 1,
                (false, false) => {}
            }
            dropped_at_relay += u64::from(state.dropped.count_ones());
            for (j, counters) in relays.iter_mut().enumerate() {
                let bit = 1 << j;
                counters.in_window += u64::from(state.heard_window & bit != 0);
                counters.overheard += u64::from(state.overheard & bit != 0);
                counters.dropped += u64::from(state.dropped & bit != 0);
                counters.delivered_via += u64::from(state.via & bit != 0);
            }
        }
    }
    for (counters, drops) in relays.iter_mut().zip(window_drops) {
        counters.windows = drops.windows;
        (counters.drop_fraction, counters.drop_fraction_se) = drops.mean_and_se();
    }

    let delivered_direct = delivered_direct_only + delivered_both;
    let mlr = if generated == 0 {
        0.0
    } else {
        lost as f64 / generated as f64
    };
    let frame_s = timing.sensor_frame_ns as f64 * 1e-9;
    let frame_energy_j = dbm_to_mw(config.sensor_radio.tx_power_dbm) * 1e-3 * frame_s;
    let e_m_infinite = delivered == 0;
    let e_m_j = if e_m_infinite {
        f64::INFINITY
    } else {
        frame_energy_j / (1.0 - mlr)
    };

    let audit = AuditReport {
        max_airtime_fraction: max_airtime_fraction(trace, config.n_sensors, config.n_relays),
        duty_cycle_limit: config.traffic.duty_cycle_limit,
        relay_slots_disjoint: relay_slots_disjoint(trace),
        relay_frames_within_capacity: relay_frames_within_capacity(trace, scenario.relay_capacity),
        conservation: generated == delivered + lost && delivered_direct + via_relay - delivered_both == delivered,
    };

    MetricsReport {
        seed: config.seed,
        config_digest: config.digest(),
        n_sensors: config.n_sensors,
        n_relays: config.n_relays,
        redundancy: config.redundancy,
        generated,
        delivered,
        lost,
        delivered_direct,
        delivered_direct_only,
        delivered_relay_only,
        delivered_both,
        dropped_at_relay,
        mlr,
        frame_energy_j,
        e_m_j,
        e_m_infinite,
        relays,
        audit,
    }
}

/// Largest airtime fraction of any node within any one-hour window. The
/// maximum is attained by a window that opens at a frame start.
fn max_airtime_fraction(trace: &Trace, n_sensors: u32, n_relays: u32) -> f64 {
    let mut per_node: Vec<Vec<(u64, u64)>> = vec![Vec::new(); (n_sensors + n_relays) as usize];
    for frame in &trace.frames {
        let node = match frame.sender {
            SenderId::Sensor(i) => i,
            SenderId::Relay(j) => n_sensors + j,
        };
        per_node[node as usize].push((frame.start_ns, frame.end_ns));
    }
    let mut worst = 0.0f64;
    for frames in &per_node {
        let mut last = 0;
        for (first, &(start, _)) in frames.iter().enumerate() {
            let window_end = start + HOUR_NS;
            while last < frames.len() && frames[last].0 < window_end {
                last += 1;
            }
            let airtime: u64 = frames[first..last].iter().map(|&(s, e)| e.min(window_end) - s).sum();
            worst = worst.max(airtime as f64 / HOUR_NS as f64);
        }
    }
    worst
}

fn relay_slots_disjoint(trace: &Trace) -> bool {
    let mut relay_frames: Vec<(u64, u64)> = trace
        .frames
        .iter()
        .filter(|f| matches!(f.sender, SenderId::Relay(_)))
        .map(|f| (f.start_ns, f.end_ns))
        .collect();
    relay_frames.sort_unstable();
    relay_frames.windows(2).all(|w| w[0].1 <= w[1].0)
}

fn relay_frames_within_capacity(trace: &Trace, capacity: u32) -> bool {
    trace
        .frames
        .iter()
        .filter(|f| matches!(f.sender, SenderId::Relay(_)))
        .all(|f| {
            let mut entries = f.entries.clone();
            entries.sort_unstable();
            entries.dedup();
            entries.len() == f.entries.len() && f.entries.len() <= capacity as usize
        })
}
