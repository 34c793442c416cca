//! Capture effect at one receiver: a desired frame against an interferer
//! whose power and overlap vary.
//!
//! ```text
//! cargo run --example channel_capture
//! ```

use lora_relay::channel::{fading_cdf, is_received, mw_to_dbm, sample_fading, PropagationParams, Signal};
use lora_relay::rng::{stream, Stream};

fn main() {
    let params = PropagationParams::calibrated();
    let sf = 10;
    let desired = Signal {
        channel: 0,
        spreading_factor: sf,
        start_ns: 0,
        end_ns: 206_848_000,
        power_mw: params.sensitivity_mw(sf) * 100.0,
    };
    println!(
        "desired frame at {:.1} dBm, sensitivity {:.1} dBm, capture margin {} dB",
        mw_to_dbm(desired.power_mw),
        mw_to_dbm(params.sensitivity_mw(sf)),
        params.capture_threshold_db
    );
    println!("{:>14} {:>12} {:>10}", "margin dB", "overlap ms", "decoded");
    for margin_db in [3.0, 5.9, 6.0, 10.0] {
        for overlap_ms in [0u64, 1, 100] {
            let start = desired.end_ns - overlap_ms * 1_000_000;
            let interferer = Signal {
                start_ns: start,
                end_ns: start + 206_848_000,
                power_mw: desired.power_mw / 10f64.powf(margin_db / 10.0),
                ..desired
            };
            println!(
                "{:>14.1} {:>12} {:>10}",
                margin_db,
                overlap_ms,
                is_received(&desired, [&interferer], &params)
            );
        }
    }
    let other_channel = Signal {
        channel: 1,
        power_mw: desired.power_mw * 10.0,
        ..desired
    };
    println!(
        "stronger frame on another channel: decoded = {}",
        is_received(&desired, [&other_channel], &params)
    );

    let m = params.nakagami_m;
    let mut rng = stream(7, Stream::Oracle, 0, 0);
    let below = (0..100_000).filter(|_| sample_fading(m, &mut rng) < 0.5).count() as f64 / 1e5;
    println!(
        "Nakagami m = {m}: P(gain < 0.5) sampled {below:.4}, exact {:.4}",
        fading_cdf(m, 0.5)
    );
}
