//! Seeded, order-independent random streams.
//!
//! Every consumer derives its own ChaCha stream from the user seed, a
//! purpose tag and an index (usually the path number). Results therefore do
//! not depend on thread scheduling or on how many paths other consumers drew.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type StreamRng = ChaCha12Rng;

/// Purpose tags for derived streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Increments and jumps of simulated paths.
    Paths,
    /// Auxiliary randomness of randomized stopping rules.
    Rules,
    /// Brownian-bridge maxima between observation epochs.
    Bridge,
    /// Draws for characteristic-function checks and other diagnostics.
    Diagnostics,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Paths => 0x7061_7468,
            Stream::Rules => 0x7275_6c65,
            Stream::Bridge => 0x6272_6467,
            Stream::Diagnostics => 0x6469_6167,
        }
    }
}

/// Independent stream `index` of purpose `stream` under `root`.
pub fn substream(root: u64, stream: Stream, index: u64) -> StreamRng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&root.to_le_bytes());
    seed[8..16].copy_from_slice(&stream.tag().to_le_bytes());
    let mut rng = ChaCha12Rng::from_seed(seed);
    rng.set_stream(index);
    rng
}

/// Pairwise summation; the result does not depend on how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}
