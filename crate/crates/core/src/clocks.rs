//! Counter-based uniforms.
//!
//! Every random quantity in the engine is a pure function of a 64-bit seed and
//! a key (an edge, a site, a sample index). Evaluation order, laziness and the
//! number of worker threads therefore never change a result.

use crate::lattice::EdgeId;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Absorbs one word into a running hash state.
#[inline]
pub fn absorb(state: u64, word: u64) -> u64 {
    mix64(state.wrapping_add(GOLDEN) ^ mix64(word.wrapping_add(GOLDEN)))
}

/// Maps 64 random bits to a uniform in `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed for the `index`-th independent sample of a run seeded with `seed`.
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    absorb(absorb(seed, 0x5eed_0000_0000_0001), index)
}

/// Uniform keyed by an arbitrary word sequence.
pub fn keyed_uniform(seed: u64, words: impl IntoIterator<Item = u64>) -> f64 {
    let mut h = mix64(seed ^ 0x243f_6a88_85a3_08d3);
    for w in words {
        h = absorb(h, w);
    }
    to_unit(mix64(h))
}

/// The i.i.d. uniform clocks `U_e` of an edge set, generated lazily.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClockField {
    pub seed: u64,
}

impl ClockField {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// The clock of an edge; depends only on `(seed, edge)`.
    pub fn clock(&self, edge: &EdgeId) -> f64 {
        self.clock_of_key(edge_key(edge))
    }

    /// The clock of an edge given its precomputed [`edge_key`].
    #[inline]
    pub fn clock_of_key(&self, key: u64) -> f64 {
        to_unit(mix64(absorb(mix64(self.seed ^ 0x243f_6a88_85a3_08d3), key)))
    }
}

/// Seed-independent 64-bit digest of a canonical edge id.
pub fn edge_key(edge: &EdgeId) -> u64 {
    let mut h = 0xc0ff_ee00_u64 ^ edge.base.len() as u64;
    for &c in &edge.base {
        h = absorb(h, c as u64);
    }
    absorb(h, 0xd1u64 << 32 | edge.dir as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_interval() {
        assert_eq!(to_unit(0), 0.0);
        assert!(to_unit(u64::MAX) < 1.0);
    }

    #[test]
    fn clocks_are_reproducible_and_distinct() {
        let f = ClockField::new(7);
        let e = EdgeId::new(vec![1, -2, 3], 0);
        let g = EdgeId::new(vec![1, -2, 3], 1);
        assert_eq!(f.clock(&e), ClockField::new(7).clock(&e));
        assert_ne!(f.clock(&e), f.clock(&g));
        assert_ne!(f.clock(&e), ClockField::new(8).clock(&e));
    }

    #[test]
    fn clocks_look_uniform() {
        let f = ClockField::new(99);
        let n = 200_000;
        let mut bins = [0usize; 10];
        let mut sum = 0.0;
        for i in 0..n {
            let u = f.clock(&EdgeId::new(vec![i as i64, -(i as i64) / 3], (i % 2) as u8));
            sum += u;
            bins[(u * 10.0) as usize] += 1;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
        let expected = n as f64 / 10.0;
        let chi2: f64 = bins.iter().map(|&b| (b as f64 - expected).powi(2) / expected).sum();
        // 9 degrees of freedom, 99.9% quantile is 27.9
        assert!(chi2 < 27.9, "chi2 {chi2}");
    }
}
