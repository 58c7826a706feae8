//! Reproducible, splittable random streams.
//!
//! Every randomized routine takes an [`RngStream`] rather than a live
//! generator. A stream is just a `(seed, stream_id)` pair; the generator it
//! hands out is a ChaCha8 keyed by the seed and positioned on the ChaCha
//! stream `stream_id`, so two streams with different ids never overlap.
//! Child streams are derived by index, which lets a replication loop give
//! task `j` the stream `parent.substream(j)` and get the same draws no matter
//! which thread runs it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// The `index`-th child of this stream.
    ///
    /// The child key mixes both coordinates of the parent, so children of
    /// distinct parents do not collide.
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream {
            seed: mix64(self.seed ^ mix64(self.stream_id.wrapping_add(0x632b_e59b_d9b4_e019))),
            stream_id: index,
        }
    }
}

/// SplitMix64 finalizer.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
