//! Named random streams.
//!
//! Every random quantity in a run is drawn from its own ChaCha8 stream,
//! keyed by the run seed, a stream tag and up to two indices. Changing the
//! number of relays therefore leaves sensor placement, phases, channel
//! choices and sensor-to-gateway fading untouched, which turns comparisons
//! across relay counts into paired experiments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Stream {
    SensorPlacement = 1,
    RelayPlacement = 2,
    Phases = 3,
    Channels = 4,
    Fading = 5,
    Discard = 6,
    Oracle = 7,
}

pub type StreamRng = ChaCha8Rng;

/// Independent generator for `(seed, stream, a, b)`.
pub fn stream(seed: u64, kind: Stream, a: u32, b: u32) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((kind as u64) << 56) ^ (u64::from(a) << 28) ^ u64::from(b));
    rng
}
