//! Sampling oracles against the closed-form loss components, plus the same
//! checks with a wrong capture factor to show they detect it.
//!
//! ```text
//! cargo run --release --example cross_validate -- [samples]
//! ```

use lora_relay::analytic::AnalyticInputs;
use lora_relay::channel::PropagationParams;
use lora_relay::monte_carlo::{run_checks, Check};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(1_000_000);
    let inputs = AnalyticInputs::reference(120, 1, 3);
    let capture_ratio = PropagationParams::calibrated().capture_ratio();

    for (label, factor) in [("capture factor 0.25", 0.25), ("capture factor 0.5 (wrong)", 0.5)] {
        let inputs = AnalyticInputs {
            capture_factor: factor,
            ..inputs.clone()
        };
        println!("{label}");
        for r in run_checks(&inputs, &Check::ALL, capture_ratio, samples, 1)? {
            println!(
                "  {:<15} analytic {:.5e}  sampled {:.5e} ± {:.1e}  z {:+7.2}  {}",
                r.check.name(),
                r.analytic,
                r.monte_carlo,
                r.std_error,
                r.z,
                if r.passed(3.0) { "pass" } else { "FAIL" }
            );
        }
    }
    Ok(())
}
