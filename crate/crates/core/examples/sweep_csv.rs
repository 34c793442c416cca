//! Programmatic sweep written as CSV: analysis and simulation over the
//! number of sensors, the same tables the command-line tool emits.
//!
//! ```text
//! cargo run --release --example sweep_csv -- [out_dir]
//! ```

use std::path::PathBuf;

use lora_relay::experiment::{cmd_analyze, cmd_simulate, ExperimentSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let mut spec = ExperimentSpec::paper_setup();
    spec.apply_sweep_arg("n=20,40,60")?;
    spec.apply_sweep_arg("relays=0,2")?;
    spec.apply_sweep_arg("r=3")?;
    spec.base.run_length_s = 3600.0;
    spec.seeds.runs = 4;
    spec.seeds.max_runs = 8;

    let analysis = cmd_analyze(&spec)?;
    analysis.save(&out_dir.join("sweep_analyze.csv"))?;
    let simulation = cmd_simulate(&spec)?;
    simulation.save(&out_dir.join("sweep_simulate.csv"))?;

    let kind = simulation.column("kind").expect("kind column");
    let mlr = simulation.column("mlr").expect("mlr column");
    let se = simulation.column("mlr_se").expect("mlr_se column");
    let mlp = analysis.column("mlp").expect("mlp column");
    println!(
        "{:>4} {:>6} {:>12} {:>12} {:>12}",
        "n", "relays", "MLP", "MLR", "MLR se"
    );
    for (a, s) in analysis
        .rows
        .iter()
        .zip(simulation.rows.iter().filter(|r| r[kind] == "mean"))
    {
        println!(
            "{:>4} {:>6} {:>12} {:>12} {:>12}",
            a[1],
            a[2],
            &a[mlp][..a[mlp].len().min(12)],
            &s[mlr][..s[mlr].len().min(12)],
            &s[se][..s[se].len().min(12)]
        );
    }
    println!(
        "wrote sweep_analyze.csv and sweep_simulate.csv to {}",
        out_dir.display()
    );
    Ok(())
}
