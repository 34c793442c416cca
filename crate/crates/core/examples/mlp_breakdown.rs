//! Analytical loss breakdown for the reference deployment.
//!
//! ```text
//! cargo run --release --example mlp_breakdown -- [n_sensors] [redundancy]
//! ```

use std::time::Instant;

use lora_relay::analytic::{AnalyticInputs, MlpModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(60);
    let r: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);

    let started = Instant::now();
    let model = MlpModel::new(&AnalyticInputs::reference(n, 0, r))?;
    println!(
        "tables built in {:.2?}, relay capacity v = {}",
        started.elapsed(),
        model.relay_capacity()
    );

    println!(
        "{:>3} {:>3} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>12}",
        "r", "w", "P_i", "P_f", "P_dir", "P_s-r", "P_drop", "P_ri", "MLP"
    );
    for redundancy in [0, r] {
        for relays in [0, 1, 2, 4, 8] {
            let b = model.breakdown_at(n, relays, redundancy)?;
            let relay = b.relays.first();
            println!(
                "{:>3} {:>3} {:>10.4e} {:>10.4e} {:>10.4e} {:>10.4e} {:>10.4e} {:>10.4e} {:>12.4e}",
                redundancy,
                relays,
                b.p_i,
                b.p_f,
                b.p_dir,
                relay.map_or(f64::NAN, |x| x.p_s_r),
                relay.map_or(f64::NAN, |x| x.p_drop),
                relay.map_or(f64::NAN, |x| x.p_ri),
                b.mlp
            );
        }
    }
    Ok(())
}
