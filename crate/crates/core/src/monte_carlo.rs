//! Sampling oracles for the closed-form loss components.
//!
//! Each check draws the underlying random experiment directly and compares
//! the hit rate with the analytic value. The experiments use the physical
//! capture ratio of the channel model rather than the analysis' capture
//! factor, so a wrong factor shows up as a large z-score.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::analytic::{
    interferer_activity, outage_fading, outage_interference, p_drop_exact, p_receive_window, AnalyticError,
    AnalyticInputs, DistanceLaw, Link, LinkBudget, WindowArrivals,
};
use crate::channel::NakagamiFading;
use crate::error::{Error, Result};
use crate::rng::{stream, Stream};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    fn from_sums(sum: f64, sum_sq: f64, samples: u64) -> Self {
        let n = samples as f64;
        let value = sum / n;
        let var = ((sum_sq - n * value * value) / (n - 1.0)).max(0.0);
        Self {
            value,
            std_error: (var / n).sqrt(),
            samples,
        }
    }

    fn from_hits(hits: u64, samples: u64) -> Self {
        let h = hits as f64;
        Self::from_sums(h, h, samples)
    }
}

/// Fraction of links whose faded power falls below the sensitivity.
pub fn fading_outage<R: Rng + ?Sized>(
    law: &DistanceLaw,
    budget: LinkBudget,
    alpha: f64,
    m: f64,
    samples: u64,
    rng: &mut R,
) -> McEstimate {
    let fading = NakagamiFading::new(m);
    let hits = (0..samples)
        .filter(|_| {
            let d = law.sample(rng);
            budget.gamma_mw * fading.sample(rng) * d.powf(-alpha) < budget.psi_mw
        })
        .count() as u64;
    McEstimate::from_hits(hits, samples)
}

/// Fraction of frames, started uniformly over a relay cycle, that end
/// before the receive window closes.
pub fn receive_window_hit<R: Rng + ?Sized>(
    t_rx_s: f64,
    t_tx_s: f64,
    frame_s: f64,
    samples: u64,
    rng: &mut R,
) -> McEstimate {
    let cycle = t_rx_s + t_tx_s;
    let hits = (0..samples)
        .filter(|_| rng.gen_range(0.0..cycle) + frame_s <= t_rx_s)
        .count() as u64;
    McEstimate::from_hits(hits, samples)
}

/// Fraction of frames lost to interference when the number of overlapping
/// same-channel frames is Poisson with mean `mean_interferers`. Desired and
/// interfering senders draw their distances from `law`. A frame survives
/// when its power is at least `capture_ratio` times the strongest
/// interferer's.
pub fn interference_outage<R: Rng + ?Sized>(
    law: &DistanceLaw,
    alpha: f64,
    m: f64,
    capture_ratio: f64,
    mean_interferers: f64,
    samples: u64,
    rng: &mut R,
) -> McEstimate {
    let fading = NakagamiFading::new(m);
    let poisson = (mean_interferers > 0.0).then(|| Poisson::new(mean_interferers).expect("positive mean"));
    let hits = (0..samples)
        .filter(|_| {
            let desired = fading.sample(rng) * law.sample(rng).powf(-alpha);
            let count = poisson.as_ref().map_or(0, |p| p.sample(rng) as u64);
            let strongest = (0..count)
                .map(|_| fading.sample(rng) * law.sample(rng).powf(-alpha))
                .fold(0.0, f64::max);
            count > 0 && desired < capture_ratio * strongest
        })
        .count() as u64;
    McEstimate::from_hits(hits, samples)
}

/// Mean discard fraction `(1 - v / Z)^+` over simulated receive windows.
pub fn drop_fraction<R: Rng + ?Sized>(
    arrivals: WindowArrivals,
    theta: f64,
    capacity: u32,
    samples: u64,
    rng: &mut R,
) -> McEstimate {
    let extra = Binomial::new(u64::from(arrivals.n_sensors), arrivals.p_outside).expect("valid probability");
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let y = u64::from(arrivals.guaranteed()) + extra.sample(rng);
        let z = Binomial::new(y, 1.0 - theta).expect("valid probability").sample(rng);
        let fraction = if z > u64::from(capacity) {
            1.0 - f64::from(capacity) / z as f64
        } else {
            0.0
        };
        sum += fraction;
        sum_sq += fraction * fraction;
    }
    McEstimate::from_sums(sum, sum_sq, samples)
}

/// The loss components that have a sampling oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Interference,
    Fading,
    ReceiveWindow,
    Drop,
}

impl Check {
    pub const ALL: [Check; 4] = [Check::Interference, Check::Fading, Check::ReceiveWindow, Check::Drop];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Interference => "interference",
            Check::Fading => "fading",
            Check::ReceiveWindow => "receive_window",
            Check::Drop => "drop",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            Error::Usage(format!(
                "unknown check `{s}`; expected one of interference, fading, receive_window, drop"
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: Check,
    pub analytic: f64,
    pub monte_carlo: f64,
    pub std_error: f64,
    pub samples: u64,
    pub z: f64,
}

impl CheckResult {
    fn new(check: Check, analytic: f64, mc: McEstimate) -> Self {
        let diff = mc.value - analytic;
        // A binomial standard error at the analytic value keeps z finite
        // when the sample has no hits.
        let floor = (analytic * (1.0 - analytic) / mc.samples as f64).sqrt();
        let se = mc.std_error.max(floor);
        let z = if diff == 0.0 { 0.0 } else { diff / se };
        Self {
            check,
            analytic,
            monte_carlo: mc.value,
            std_error: mc.std_error,
            samples: mc.samples,
            z,
        }
    }

    pub fn passed(&self, sigmas: f64) -> bool {
        self.z.abs() <= sigmas
    }
}

/// Runs the selected checks against the sensor-to-gateway link (and the
/// relay window and drop model) of `inputs`. `capture_ratio` is the linear
/// power margin the sampled receivers require.
pub fn run_checks(
    inputs: &AnalyticInputs,
    checks: &[Check],
    capture_ratio: f64,
    samples: u64,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    if checks.is_empty() {
        return Err(Error::Usage("no checks selected".into()));
    }
    if samples < 2 {
        return Err(Error::Usage("at least two samples per check are required".into()));
    }
    inputs.validate()?;
    let alpha = inputs.pathloss_exponent;
    let m = inputs.nakagami_m;
    let r = inputs.redundancy;
    checks
        .iter()
        .map(|&check| {
            let mut rng = stream(seed, Stream::Oracle, check as u32, 0);
            let result = match check {
                Check::Interference => {
                    let analytic = outage_interference(inputs, Link::SensorGateway)?.value;
                    let mean = interferer_activity(inputs.n_sensors, inputs.n_channels, inputs.duty_cycle(r));
                    let law = inputs.dist_sensor_gateway;
                    CheckResult::new(
                        check,
                        analytic,
                        interference_outage(&law, alpha, m, capture_ratio, mean, samples, &mut rng),
                    )
                }
                Check::Fading => {
                    let law = inputs.dist_sensor_gateway;
                    let analytic = outage_fading(&law, inputs.sensor_gateway, alpha, m, inputs.quadrature_order)?.value;
                    CheckResult::new(
                        check,
                        analytic,
                        fading_outage(&law, inputs.sensor_gateway, alpha, m, samples, &mut rng),
                    )
                }
                Check::ReceiveWindow => {
                    let frame_s = inputs.sensor_frame_s(r);
                    let analytic = p_receive_window(inputs.t_rx_s, inputs.t_tx_s, frame_s)?;
                    CheckResult::new(
                        check,
                        analytic,
                        receive_window_hit(inputs.t_rx_s, inputs.t_tx_s, frame_s, samples, &mut rng),
                    )
                }
                Check::Drop => {
                    let capacity = inputs.relay_capacity().map_err(AnalyticError::from)?;
                    let arrivals = WindowArrivals {
                        n_sensors: inputs.n_sensors,
                        xi: inputs.window_ratio()?,
                        p_outside: (1.0 - inputs.sensor_frame_s(r) / inputs.traffic.measurement_period_s)
                            .clamp(0.0, 1.0),
                    };
                    let theta = DROP_CHECK_THETA;
                    let analytic = p_drop_exact(arrivals, theta, capacity);
                    CheckResult::new(
                        check,
                        analytic,
                        drop_fraction(arrivals, theta, capacity, samples, &mut rng),
                    )
                }
            };
            Ok(result)
        })
        .collect()
}

/// Relay reception failure used by the drop check; small enough that a
/// relay overhearing 120 sensors regularly overflows a 93-entry frame.
pub const DROP_CHECK_THETA: f64 = 0.2;
