use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{self, MeasurementState, RelayCounters, WindowDrops};
use super::{MetricsReport, Scenario};
use crate::channel::{is_received, received_power, LinkDraw, NakagamiFading, Signal};
use crate::phy;
use crate::rng::{stream, Stream, StreamRng};

/// Stream index offset that keeps relay senders apart from sensor senders.
const RELAY_STREAM_BASE: u32 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SenderId {
    Sensor(u32),
    Relay(u32),
}

/// One transmission and what it carried as `(sensor, measurement_seq)`
/// pairs. A sensor frame lists its current measurement first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub sender: SenderId,
    pub channel: u32,
    pub spreading_factor: u8,
    pub start_ns: u64,
    pub end_ns: u64,
    pub entries: Vec<(u32, u32)>,
    pub gateway_received: bool,
}

impl FrameRecord {
    pub fn airtime_ns(&self) -> u64 {
        self.end_ns - self.start_ns
    }
}

/// Every frame transmitted during a run, in start order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub frames: Vec<FrameRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    FrameEnd(usize),
    SensorTx { sensor: u32, seq: u32 },
    RelayTx { relay: u32 },
}

impl Event {
    /// Frames finishing at an instant are resolved before new ones start.
    fn priority(&self) -> u8 {
        match self {
            Event::FrameEnd(_) => 0,
            Event::SensorTx { .. } | Event::RelayTx { .. } => 1,
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
struct Scheduled {
    time_ns: u64,
    priority: u8,
    seq: u64,
    event: Event,
}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time_ns, self.priority, self.seq).cmp(&(other.time_ns, other.priority, other.seq))
    }
}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct InFlight {
    /// Received power at the gateway (index 0) and at each relay.
    powers: Vec<f64>,
    /// Relays whose receive window fully contains the frame.
    heard_by: u32,
}

struct Engine<'a> {
    scenario: &'a Scenario,
    queue: BinaryHeap<Reverse<Scheduled>>,
    next_seq: u64,
    frames: Vec<FrameRecord>,
    in_flight: Vec<InFlight>,
    active: Vec<usize>,
    longest_frame_ns: u64,
    fading: NakagamiFading,
    sensor_channel_rng: Vec<StreamRng>,
    relay_channel_rng: Vec<StreamRng>,
    /// `[receiver][sensor]`, receiver 0 being the gateway.
    sensor_fading_rng: Vec<Vec<StreamRng>>,
    relay_fading_rng: Vec<StreamRng>,
    discard_rng: Vec<StreamRng>,
    /// `[receiver][sensor]` distances.
    sensor_distance: Vec<Vec<f64>>,
    relay_distance: Vec<f64>,
    buffers: Vec<BTreeSet<(u32, u32)>>,
    measurements: Vec<Vec<MeasurementState>>,
    relays: Vec<RelayCounters>,
    window_drops: Vec<WindowDrops>,
}

impl<'a> Engine<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        let config = &scenario.config;
        let seed = config.seed;
        let n = config.n_sensors;
        let omega = config.n_relays;
        let receivers: Vec<_> = std::iter::once(scenario.gateway)
            .chain(scenario.relays.iter().copied())
            .collect();
        let sensor_distance = receivers
            .iter()
            .map(|rx| scenario.sensors.iter().map(|s| s.distance(rx)).collect())
            .collect();
        let relay_distance = scenario.relays.iter().map(|r| r.distance(&scenario.gateway)).collect();
        let sensor_fading_rng = (0..=omega)
            .map(|rx| (0..n).map(|i| stream(seed, Stream::Fading, rx, i)).collect())
            .collect();
        let timing = scenario.timing;
        let longest_frame_ns = if omega > 0 {
            let entries = scenario.relay_capacity * config.traffic.relay_entry_bytes();
            timing
                .sensor_frame_ns
                .max(phy::frame_duration_ns(entries, &config.relay_radio))
        } else {
            timing.sensor_frame_ns
        };
        let seqs = (timing.run_end_ns / timing.period_ns + 1) as usize;
        Self {
            scenario,
            queue: BinaryHeap::new(),
            next_seq: 0,
            frames: Vec::new(),
            in_flight: Vec::new(),
            active: Vec::new(),
            longest_frame_ns,
            fading: NakagamiFading::new(config.propagation.nakagami_m),
            sensor_channel_rng: (0..n).map(|i| stream(seed, Stream::Channels, 0, i)).collect(),
            relay_channel_rng: (0..omega).map(|j| stream(seed, Stream::Channels, 1, j)).collect(),
            sensor_fading_rng,
            relay_fading_rng: (0..omega)
                .map(|j| stream(seed, Stream::Fading, 0, RELAY_STREAM_BASE + j))
                .collect(),
            discard_rng: (0..omega).map(|j| stream(seed, Stream::Discard, j, 0)).collect(),
            sensor_distance,
            relay_distance,
            buffers: vec![BTreeSet::new(); omega as usize],
            measurements: vec![vec![MeasurementState::default(); seqs]; n as usize],
            relays: vec![RelayCounters::default(); omega as usize],
            window_drops: vec![WindowDrops::default(); omega as usize],
        }
    }

    fn schedule(&mut self, time_ns: u64, event: Event) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Reverse(Scheduled {
            time_ns,
            priority: event.priority(),
            seq,
            event,
        }));
    }

    fn run(
        mut self,
    ) -> (
        Vec<FrameRecord>,
        Vec<Vec<MeasurementState>>,
        Vec<RelayCounters>,
        Vec<WindowDrops>,
    ) {
        let timing = self.scenario.timing;
        for (i, &phase) in self.scenario.sensor_phase_ns.iter().enumerate() {
            if phase <= timing.run_end_ns {
                self.schedule(
                    phase,
                    Event::SensorTx {
                        sensor: i as u32,
                        seq: 0,
                    },
                );
            }
        }
        for (j, &offset) in self.scenario.relay_offset_ns.iter().enumerate() {
            let first_tx = offset + timing.t_rx_ns;
            if first_tx <= timing.run_end_ns {
                self.schedule(first_tx, Event::RelayTx { relay: j as u32 });
            }
        }
        while let Some(Reverse(next)) = self.queue.pop() {
            match next.event {
                Event::SensorTx { sensor, seq } => self.sensor_tx(next.time_ns, sensor, seq),
                Event::RelayTx { relay } => self.relay_tx(next.time_ns, relay),
                Event::FrameEnd(frame) => self.frame_end(next.time_ns, frame),
            }
        }
        (self.frames, self.measurements, self.relays, self.window_drops)
    }

    fn begin_frame(&mut self, record: FrameRecord, in_flight: InFlight) -> usize {
        let id = self.frames.len();
        let end = record.end_ns;
        self.frames.push(record);
        self.in_flight.push(in_flight);
        self.active.push(id);
        self.schedule(end, Event::FrameEnd(id));
        id
    }

    fn sensor_tx(&mut self, now: u64, sensor: u32, seq: u32) {
        let scenario = self.scenario;
        let config = &scenario.config;
        let timing = scenario.timing;
        let i = sensor as usize;
        let end = now + timing.sensor_frame_ns;
        let n_channels = config.sensor_radio.channels_hz.len() as u32;
        let channel = self.sensor_channel_rng[i].gen_range(0..n_channels);

        let tx_dbm = config.sensor_radio.tx_power_dbm;
        let powers = (0..self.sensor_fading_rng.len())
            .map(|rx| {
                let link = LinkDraw {
                    distance_m: self.sensor_distance[rx][i],
                    fading_gain: self.fading.sample(&mut self.sensor_fading_rng[rx][i]),
                };
                received_power(tx_dbm, &config.propagation, link)
            })
            .collect();
        let heard_by = (0..config.n_relays)
            .filter(|&j| scenario.relay_hears(j as usize, now, end))
            .fold(0u32, |mask, j| mask | (1 << j));
        self.measurements[i][seq as usize].heard_window = heard_by;

        let oldest = seq.saturating_sub(config.redundancy);
        let entries = (oldest..=seq).rev().map(|k| (sensor, k)).collect();
        self.begin_frame(
            FrameRecord {
                sender: SenderId::Sensor(sensor),
                channel,
                spreading_factor: config.sensor_radio.spreading_factor,
                start_ns: now,
                end_ns: end,
                entries,
                gateway_received: false,
            },
            InFlight { powers, heard_by },
        );

        let next = now + timing.period_ns;
        if next <= timing.run_end_ns {
            self.schedule(next, Event::SensorTx { sensor, seq: seq + 1 });
        }
    }

    fn relay_tx(&mut self, now: u64, relay: u32) {
        let scenario = self.scenario;
        let config = &scenario.config;
        let timing = scenario.timing;
        let j = relay as usize;
        let buffered: Vec<(u32, u32)> = std::mem::take(&mut self.buffers[j]).into_iter().collect();
        let capacity = scenario.relay_capacity as usize;

        let kept: Vec<(u32, u32)> = if buffered.len() > capacity {
            let mut picked = index::sample(&mut self.discard_rng[j], buffered.len(), capacity).into_vec();
            picked.sort_unstable();
            let mut keep = vec![false; buffered.len()];
            picked.iter().for_each(|&k| keep[k] = true);
            for (&(sensor, seq), _) in buffered.iter().zip(&keep).filter(|(_, &k)| !k) {
                self.measurements[sensor as usize][seq as usize].dropped |= 1 << relay;
            }
            picked.into_iter().map(|k| buffered[k]).collect()
        } else {
            buffered.clone()
        };

        let window_start = now - timing.t_rx_ns;
        if window_start >= timing.warmup_ns && now + timing.delay_max_ns <= timing.run_end_ns {
            self.window_drops[j].record(buffered.len(), buffered.len() - kept.len());
        }

        if !kept.is_empty() {
            let bytes = kept.len() as u32 * config.traffic.relay_entry_bytes();
            let end = now + phy::frame_duration_ns(bytes, &config.relay_radio);
            let n_channels = config.relay_radio.channels_hz.len() as u32;
            let channel = self.relay_channel_rng[j].gen_range(0..n_channels);
            let link = LinkDraw {
                distance_m: self.relay_distance[j],
                fading_gain: self.fading.sample(&mut self.relay_fading_rng[j]),
            };
            let power = received_power(config.relay_radio.tx_power_dbm, &config.propagation, link);
            if self.scored_frame(now) {
                self.relays[j].frames_sent += 1;
            }
            self.begin_frame(
                FrameRecord {
                    sender: SenderId::Relay(relay),
                    channel,
                    spreading_factor: config.relay_radio.spreading_factor,
                    start_ns: now,
                    end_ns: end,
                    entries: kept,
                    gateway_received: false,
                },
                InFlight {
                    powers: vec![power],
                    heard_by: 0,
                },
            );
        }

        let next = now + timing.cycle_ns;
        if next <= timing.run_end_ns {
            self.schedule(next, Event::RelayTx { relay });
        }
    }

    fn scored_frame(&self, start_ns: u64) -> bool {
        let timing = self.scenario.timing;
        start_ns >= timing.warmup_ns && start_ns + timing.delay_max_ns <= timing.run_end_ns
    }

    fn signal(&self, frame: usize, receiver: usize) -> Signal {
        let record = &self.frames[frame];
        Signal {
            channel: record.channel,
            spreading_factor: record.spreading_factor,
            start_ns: record.start_ns,
            end_ns: record.end_ns,
            power_mw: self.in_flight[frame].powers.get(receiver).copied().unwrap_or(0.0),
        }
    }

    fn received_at(&self, frame: usize, receiver: usize) -> bool {
        let desired = self.signal(frame, receiver);
        let others: Vec<Signal> = self
            .active
            .iter()
            .filter(|&&other| other != frame)
            .map(|&other| self.signal(other, receiver))
            .collect();
        is_received(&desired, &others, &self.scenario.config.propagation)
    }

    fn frame_end(&mut self, now: u64, frame: usize) {
        let horizon = now.saturating_sub(self.longest_frame_ns);
        let frames = &self.frames;
        self.active.retain(|&f| frames[f].end_ns > horizon);

        let scenario = self.scenario;
        let timing = scenario.timing;
        let phases = &scenario.sensor_phase_ns;
        let generated_at = |sensor: u32, seq: u32| phases[sensor as usize] + u64::from(seq) * timing.period_ns;

        if self.received_at(frame, 0) {
            let start = self.frames[frame].start_ns;
            let scored = self.scored_frame(start);
            let record = &mut self.frames[frame];
            record.gateway_received = true;
            let fresh = |&&(sensor, seq): &&(u32, u32)| start - generated_at(sensor, seq) <= timing.delay_max_ns;
            match record.sender {
                SenderId::Sensor(_) => {
                    for &(sensor, seq) in record.entries.iter().filter(fresh) {
                        self.measurements[sensor as usize][seq as usize].direct = true;
                    }
                }
                SenderId::Relay(relay) => {
                    if scored {
                        self.relays[relay as usize].frames_delivered += 1;
                    }
                    for &(sensor, seq) in record.entries.iter().filter(fresh) {
                        self.measurements[sensor as usize][seq as usize].via |= 1 << relay;
                    }
                }
            }
        }

        let heard_by = self.in_flight[frame].heard_by;
        if heard_by != 0 {
            let (sensor, seq) = self.frames[frame].entries[0];
            for relay in (0..self.relays.len()).filter(|&j| heard_by & (1 << j) != 0) {
                if self.received_at(frame, relay + 1) {
                    self.buffers[relay].insert((sensor, seq));
                    self.measurements[sensor as usize][seq as usize].overheard |= 1 << relay;
                }
            }
        }
    }
}

/// Runs the scenario to completion and returns its metrics. Panics if the
/// run violates a protocol invariant (see [`super::AuditReport`]).
pub fn run(scenario: &Scenario) -> MetricsReport {
    run_with_trace(scenario).0
}

/// Like [`run`], also returning every transmitted frame.
pub fn run_with_trace(scenario: &Scenario) -> (MetricsReport, Trace) {
    let (frames, measurements, relays, window_drops) = Engine::new(scenario).run();
    let trace = Trace { frames };
    let report = metrics::summarise(scenario, &trace, &measurements, relays, &window_drops);
    assert!(
        report.audit.passed(),
        "simulation invariant violated: {:?}",
        report.audit
    );
    (report, trace)
}
