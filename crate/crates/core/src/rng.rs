//! Per-path random streams.
//!
//! Every path owns two ChaCha8 streams derived from the experiment's master
//! seed: the seed fed to `seed_from_u64` is `master_seed ^ path_index`, and
//! stream 0 supplies Wiener increments while stream 1 supplies the skew
//! coins used at semipermeable barriers. Keeping coins on their own stream
//! means two processes driven by the same path seed see identical
//! increments no matter how many coins either of them flips.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

const INCREMENT_STREAM: u64 = 0;
const COIN_STREAM: u64 = 1;

/// The seed handed to the generator for `path_index`.
pub fn path_seed(master_seed: u64, path_index: u64) -> u64 {
    master_seed ^ path_index
}

#[derive(Debug, Clone)]
pub struct PathStreams {
    pub increments: ChaCha8Rng,
    pub coins: ChaCha8Rng,
}

impl PathStreams {
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        Self::from_seed(path_seed(master_seed, path_index))
    }

    pub fn from_seed(seed: u64) -> Self {
        let mut increments = ChaCha8Rng::seed_from_u64(seed);
        increments.set_stream(INCREMENT_STREAM);
        let mut coins = ChaCha8Rng::seed_from_u64(seed);
        coins.set_stream(COIN_STREAM);
        PathStreams { increments, coins }
    }
}

/// How the Wiener increment `dW` of one step is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncrementMode {
    /// `sqrt(dt) * N(0, 1)`, the Euler-Maruyama increment.
    #[default]
    GaussianScaled,
    /// `N(0, 1)` regardless of `dt`.
    GaussianUnit,
    /// `+1` or `-1` with probability one half each.
    Binomial,
}

impl IncrementMode {
    #[inline]
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R, dt: f64) -> f64 {
        match self {
            IncrementMode::GaussianScaled => {
                let z: f64 = rng.sample(StandardNormal);
                dt.sqrt() * z
            }
            IncrementMode::GaussianUnit => rng.sample(StandardNormal),
            IncrementMode::Binomial => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Uniform draw in `[0, 1)` used to resolve a skew coin.
#[inline]
pub(crate) fn coin<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = PathStreams::new(42, 3);
        let mut b = PathStreams::new(42, 3);
        let xa: Vec<f64> = (0..8).map(|_| a.increments.random()).collect();
        let xb: Vec<f64> = (0..8).map(|_| b.increments.random()).collect();
        assert_eq!(xa, xb);
        let ca: Vec<f64> = (0..8).map(|_| a.coins.random()).collect();
        assert_ne!(xa, ca);
        let mut c = PathStreams::new(42, 4);
        let xc: Vec<f64> = (0..8).map(|_| c.increments.random()).collect();
        assert_ne!(xa, xc);
    }

    #[test]
    fn seed_split_is_xor() {
        assert_eq!(path_seed(0b1100, 0b1010), 0b0110);
    }

    #[test]
    fn binomial_is_plus_minus_one() {
        let mut s = PathStreams::new(1, 0);
        let draws: Vec<f64> = (0..200).map(|_| IncrementMode::Binomial.draw(&mut s.increments, 0.5)).collect();
        assert!(draws.iter().all(|d| *d == 1.0 || *d == -1.0));
        assert!(draws.contains(&1.0) && draws.contains(&-1.0));
    }
}
