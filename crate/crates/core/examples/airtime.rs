//! Frame durations, duty cycle, maximum redundancy and relay capacity.
//!
//! ```text
//! cargo run --example airtime
//! ```

use lora_relay::phy::{self, RadioConfig, TrafficConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sensor = RadioConfig::sensor_default();
    let traffic = TrafficConfig::default();

    println!(
        "sensor frames (SF{}, {} kHz)",
        sensor.spreading_factor,
        sensor.bandwidth_hz / 1e3
    );
    println!("{:>3} {:>8} {:>12} {:>11}", "r", "payload", "airtime ms", "duty cycle");
    for r in 0..=8 {
        let payload = traffic.sensor_payload_bytes(r);
        println!(
            "{:>3} {:>8} {:>12.3} {:>11.5}",
            r,
            payload,
            phy::frame_duration(payload, &sensor) * 1e3,
            phy::duty_cycle(r, &sensor, &traffic)
        );
    }
    println!(
        "maximum redundancy under the duty-cycle and storage limits: {}",
        phy::max_redundancy(&sensor, &traffic)?
    );

    let t_tx = 0.3;
    for (name, relay) in [
        ("header on", RadioConfig::relay_default()),
        ("header off", RadioConfig::relay_calibrated()),
    ] {
        let v = phy::relay_capacity(&relay, &traffic, t_tx)?;
        let full = phy::frame_duration(v * traffic.relay_entry_bytes(), &relay);
        println!(
            "relay capacity ({name}): v = {v} entries, frame {:.3} ms in a {:.0} ms slot",
            full * 1e3,
            t_tx * 1e3
        );
    }
    Ok(())
}
