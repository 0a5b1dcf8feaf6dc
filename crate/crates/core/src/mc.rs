//! Seeded Monte Carlo plumbing.
//!
//! Work is split into a fixed number of chunks; chunk `i` draws from the ChaCha stream `i` of the
//! master seed. Results depend only on (seed, samples, chunks), never on the worker count.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::action::Key;
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::weight::Weight;

pub const DEFAULT_CHUNKS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McPlan {
    pub samples: u64,
    pub seed: u64,
    pub chunks: u64,
}

impl McPlan {
    pub fn new(samples: u64, seed: u64) -> Self {
        McPlan { samples, seed, chunks: DEFAULT_CHUNKS }
    }

    pub fn rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(chunk);
        r
    }

    fn chunk_len(&self, i: u64) -> u64 {
        self.samples / self.chunks + u64::from(i < self.samples % self.chunks)
    }

    /// Runs `f(rng, count)` per chunk; results in chunk order.
    pub fn run<R: Send>(&self, f: impl Fn(&mut ChaCha8Rng, u64) -> R + Sync) -> Vec<R> {
        (0..self.chunks.max(1))
            .into_par_iter()
            .map(|i| {
                let mut rng = self.rng(i);
                f(&mut rng, self.chunk_len(i))
            })
            .collect()
    }
}

/// Draws atoms of a measure; refuses measures with truncation defect.
#[derive(Clone, Debug)]
pub struct Sampler<K> {
    items: Vec<K>,
    dist: WeightedIndex<f64>,
}

impl<K: Key> Sampler<K> {
    pub fn new<W: Weight>(m: &Measure<K, W>) -> Result<Self> {
        if !m.defect().is_zero() {
            return Err(Error::Config("cannot sample a measure with truncation defect".into()));
        }
        let items: Vec<K> = m.support().cloned().collect();
        let dist = WeightedIndex::new(m.iter().map(|(_, w)| w.to_f64()))
            .map_err(|e| Error::Config(format!("bad sampling weights: {e}")))?;
        Ok(Sampler { items, dist })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &K {
        &self.items[self.dist.sample(rng)]
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }

    pub fn items(&self) -> &[K] {
        &self.items
    }
}

/// Draw a fresh master seed from the OS.
pub fn fresh_seed() -> u64 {
    rand::random()
}
