//! Keyed ChaCha streams.
//!
//! Every random draw in the augmentation pipeline comes from a stream named
//! by `(master_seed, StreamId)`, so results never depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const PURPOSE_BITS: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StreamId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    Eta,
    TextureChoice,
    DecodeNoise,
    /// Texture-feature draws for the n-th processed instance of an image.
    InstanceSplats(u32),
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Eta => 0,
            Purpose::TextureChoice => 1,
            Purpose::DecodeNoise => 2,
            Purpose::InstanceSplats(n) => 16 + u64::from(n),
        }
    }
}

impl StreamId {
    /// Image index in the high 40 bits, purpose tag in the low 24.
    pub fn new(image_index: u64, purpose: Purpose) -> Self {
        let tag = purpose.tag();
        assert!(tag < (1 << PURPOSE_BITS), "purpose tag overflow");
        assert!(image_index < (1 << (64 - PURPOSE_BITS)), "image index overflow");
        StreamId((image_index << PURPOSE_BITS) | tag)
    }
}

pub fn stream(master_seed: u64, id: StreamId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(id.0);
    rng
}
