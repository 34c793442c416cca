//! Redundancy allocation for a loss target across relay counts.
//!
//! ```text
//! cargo run --release --example allocate_redundancy -- [n_sensors] [p_target]
//! ```

use lora_relay::allocator::allocate_with_model;
use lora_relay::analytic::{AnalyticInputs, MlpModel};
use lora_relay::phy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(60);
    let p_target: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1e-3);

    let inputs = AnalyticInputs::reference(n, 0, 0);
    let r_max = phy::max_redundancy(&inputs.sensor_radio, &inputs.traffic)?;
    let model = MlpModel::new(&inputs)?;
    println!("n = {n}, target MLP {p_target:e}, r_max = {r_max}");
    println!(
        "{:>6} {:>6} {:>6} {:>13} {:>13} {:>5}",
        "relays", "r*", "r~", "MLP(r*)", "MLP(r~)", "met"
    );
    for relays in 0..=8 {
        let out = allocate_with_model(&model, n, relays, p_target, r_max)?;
        println!(
            "{:>6} {:>6} {:>6} {:>13.4e} {:>13.4e} {:>5}",
            relays, out.r_star, out.r_tilde, out.mlp_at_r_star, out.mlp_at_r_tilde, out.met_target
        );
    }
    Ok(())
}
