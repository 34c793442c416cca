//! One simulation run compared component by component with the analysis.
//!
//! ```text
//! cargo run --release --example simulate_relays -- [n_sensors] [relays] [redundancy] [hours] [seed]
//! ```

use std::time::Instant;

use lora_relay::analytic::{DistanceLaws, MlpModel};
use lora_relay::sim::{build_scenario, run, tally_vs_analysis, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let arg = |i: usize, default: f64| args.get(i).copied().unwrap_or(default);

    let config = ScenarioConfig {
        n_sensors: arg(0, 120.0) as u32,
        n_relays: arg(1, 1.0) as u32,
        redundancy: arg(2, 3.0) as u32,
        run_length_s: arg(3, 1.0) * 3600.0,
        seed: arg(4, 1.0) as u64,
        ..ScenarioConfig::default()
    };
    let scenario = build_scenario(&config)?;
    let started = Instant::now();
    let report = run(&scenario);
    println!(
        "simulated {:.1} h in {:.2?}: generated {}, delivered {} (direct only {}, relay only {}, both {}), dropped at relays {}",
        config.run_length_s / 3600.0,
        started.elapsed(),
        report.generated,
        report.delivered,
        report.delivered_direct_only,
        report.delivered_relay_only,
        report.delivered_both,
        report.dropped_at_relay,
    );
    println!(
        "MLR = {:.4e}, E_m = {:.4e} J, max hourly airtime {:.4}",
        report.mlr, report.e_m_j, report.audit.max_airtime_fraction
    );

    let model = MlpModel::new(&config.analytic_inputs(DistanceLaws::default(), 0.25))?;
    let analysis = model.breakdown()?;
    println!(
        "\n{:<14} {:>11} {:>10} {:>11} {:>8}",
        "quantity", "simulated", "std err", "analytic", "z"
    );
    for row in tally_vs_analysis(&scenario, &report, &analysis) {
        println!(
            "{:<24} {:>11.4e} {:>10.2e} {:>11.4e} {:>8.2}",
            row.quantity, row.empirical, row.std_error, row.analytic, row.z
        );
    }
    Ok(())
}
