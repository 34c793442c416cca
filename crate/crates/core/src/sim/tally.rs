use serde::{Deserialize, Serialize};

use super::{MetricsReport, Scenario};
use crate::analytic::{p_drop_exact, MlpBreakdown, WindowArrivals};

/// One model quantity next to its simulated estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub quantity: String,
    pub empirical: f64,
    /// Standard error of `empirical`.
    pub std_error: f64,
    pub analytic: f64,
    /// `(empirical - analytic) / se`, with the binomial standard error at the
    /// analytic value where the quantity is a proportion.
    pub z: f64,
    pub samples: u64,
}

impl Comparison {
    fn proportion(quantity: impl Into<String>, failures: u64, trials: u64, analytic: f64) -> Self {
        let n = trials.max(1) as f64;
        let empirical = failures as f64 / n;
        let std_error = (empirical * (1.0 - empirical) / n).sqrt();
        let null_se = (analytic * (1.0 - analytic) / n).sqrt();
        Self {
            quantity: quantity.into(),
            empirical,
            std_error,
            analytic,
            z: z_score(empirical - analytic, null_se.max(std_error)),
            samples: trials,
        }
    }

    fn mean(quantity: impl Into<String>, empirical: f64, std_error: f64, samples: u64, analytic: f64) -> Self {
        Self {
            quantity: quantity.into(),
            empirical,
            std_error,
            analytic,
            z: z_score(empirical - analytic, std_error),
            samples,
        }
    }

    pub fn within(&self, sigmas: f64) -> bool {
        self.z.abs() <= sigmas
    }
}

fn z_score(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff / se
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Aligns a run's counters with the analytic breakdown for the same
/// `(n, omega, r)`. Without relays only the direct path is compared.
///
/// The `p_drop@theta_sim` rows evaluate the drop model at the reception
/// failure rate the relay actually experienced, which isolates the drop
/// model from the reception model.
pub fn tally_vs_analysis(scenario: &Scenario, report: &MetricsReport, analysis: &MlpBreakdown) -> Vec<Comparison> {
    let config = &scenario.config;
    let period_s = config.traffic.measurement_period_s;
    let frame_s = scenario.timing.sensor_frame_ns as f64 * 1e-9;
    let arrivals = WindowArrivals {
        n_sensors: config.n_sensors,
        xi: (config.relay_windows.t_rx_s / period_s).round().max(1.0) as u32,
        p_outside: (1.0 - frame_s / period_s).clamp(0.0, 1.0),
    };
    let generated = report.generated;
    let mut rows = vec![Comparison::proportion(
        "p_dir",
        generated - report.delivered_direct,
        generated,
        analysis.p_dir,
    )];
    for (j, (counters, model)) in report.relays.iter().zip(&analysis.relays).enumerate() {
        rows.push(Comparison::proportion(
            format!("relay{j}.p_rw"),
            counters.in_window,
            generated,
            model.p_rw,
        ));
        rows.push(Comparison::proportion(
            format!("relay{j}.p_s_r"),
            counters.in_window - counters.overheard,
            counters.in_window,
            model.p_s_r,
        ));
        rows.push(Comparison::mean(
            format!("relay{j}.p_drop"),
            counters.drop_fraction,
            counters.drop_fraction_se,
            counters.windows,
            model.p_drop,
        ));
        let theta_sim = 1.0 - counters.overheard as f64 / counters.in_window.max(1) as f64;
        rows.push(Comparison::mean(
            format!("relay{j}.p_drop@theta_sim"),
            counters.drop_fraction,
            counters.drop_fraction_se,
            counters.windows,
            p_drop_exact(arrivals, theta_sim, scenario.relay_capacity),
        ));
        rows.push(Comparison::proportion(
            format!("relay{j}.p_r_g"),
            counters.frames_sent - counters.frames_delivered,
            counters.frames_sent,
            model.p_r_g,
        ));
        rows.push(Comparison::proportion(
            format!("relay{j}.p_ri"),
            generated - counters.delivered_via,
            generated,
            model.p_ri,
        ));
    }
    if !analysis.relays.is_empty() {
        rows.push(Comparison::proportion("mlp", report.lost, generated, analysis.mlp));
    }
    rows
}
