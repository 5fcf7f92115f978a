//! Counter-based sampling of chart points and tangent vectors.
//!
//! Every draw is a pure function of `(seed, stream, index)`: the ChaCha
//! stream is selected per check family and the word position is advanced to a
//! fixed offset per sample index, so results do not depend on evaluation order.

use crate::error::{Error, Result};
use crate::geometry::{Chart, Local};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use alloc::vec::Vec;

/// Words reserved per sample index.
const WORDS_PER_INDEX: u32 = 20;
/// Rejection attempts per accepted sample.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sampler {
    seed: u64,
    stream: u64,
}

impl Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Generator positioned at the start of block `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(u128::from(index) << WORDS_PER_INDEX);
        rng
    }

    /// Sub-sampler for a derived stream, e.g. per check.
    pub fn substream(&self, k: u64) -> Self {
        Self { seed: self.seed, stream: self.stream.wrapping_mul(0x9E37_79B9).wrapping_add(k + 1) }
    }

    /// `count` points uniform in the chart box shrunk by `margin`, keeping
    /// only those accepted by `accept`.
    pub fn points<C: Chart>(&self, chart: &C, count: usize, margin: f64, accept: impl Fn(&[f64]) -> bool) -> Result<Vec<Vec<f64>>> {
        let mut out = Vec::with_capacity(count);
        let mut index = 0u64;
        let mut misses = 0usize;
        while out.len() < count {
            let mut rng = self.rng(index);
            index += 1;
            let p = uniform_in_box(&mut rng, chart, margin);
            if accept(&p) {
                out.push(p);
                misses = 0;
            } else {
                misses += 1;
                if misses >= MAX_ATTEMPTS {
                    return Err(Error::DegenerateSample("rejection sampling found no admissible points"));
                }
            }
        }
        Ok(out)
    }
}

pub fn uniform_in_box<C: Chart, R: Rng>(rng: &mut R, chart: &C, margin: f64) -> Vec<f64> {
    chart
        .bounds()
        .iter()
        .map(|b| {
            let (lo, hi) = (b.lo + margin, b.hi - margin);
            lo + (hi - lo) * rng.random::<f64>()
        })
        .collect()
}

/// Components uniform in `[−1, 1]`.
pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect()
}

/// Random vector normalized to unit `g`-length.
pub fn random_unit_vector<R: Rng>(rng: &mut R, local: &Local<f64>) -> Vec<f64> {
    loop {
        let v = random_vector(rng, local.dim());
        let norm = local.norm(&v);
        if norm > 1e-3 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

/// Random linear combination of `basis` with coefficients in `[−1, 1]`.
pub fn random_combination<R: Rng>(rng: &mut R, basis: &[Vec<f64>]) -> Vec<f64> {
    let n = basis.first().map_or(0, Vec::len);
    let mut v = alloc::vec![0.0; n];
    for b in basis {
        let c = 2.0 * rng.random::<f64>() - 1.0;
        for i in 0..n {
            v[i] += c * b[i];
        }
    }
    v
}
