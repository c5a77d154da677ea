//! Seeded random streams.
//!
//! Every generator in the crate is a `ChaCha8Rng` seeded with
//! `seed_from_u64`. Independent purposes drawing from one seed use distinct
//! ChaCha stream ids ([`Stream`]); independent Monte Carlo trials use the
//! seed `master ^ trial_index`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream ids for the generators that may share a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Design = 1,
    Signal = 2,
    Noise = 3,
    Cone = 4,
    MonteCarlo = 5,
}

pub fn stream(seed: u64, which: Stream) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

pub fn trial_seed(master: u64, trial: u64) -> u64 {
    master ^ trial
}
