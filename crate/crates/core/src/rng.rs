//! Counter-based deterministic random streams.
//!
//! A stream is addressed by `(seed, stream_id)`; the ChaCha8 block counter is
//! the position inside the stream. Two streams with the same address always
//! produce the same draws, and distinct `stream_id`s are independent keystreams.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u64 {
        self.inner.get_word_pos() as u64
    }

    /// A fresh stream with the same seed and a derived id.
    pub fn split(&self, sub_id: u64) -> RngStream {
        let id = self
            .stream_id
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(sub_id.wrapping_add(1));
        RngStream::new(self.seed, id)
    }

    /// Uniform index in `[0, n)`.
    pub fn uniform_index(&mut self, n: usize) -> Result<usize, CoreError> {
        if n == 0 {
            return Err(CoreError::EmptyRange);
        }
        Ok(self.inner.gen_range(0..n))
    }

    /// Bernoulli draw with success probability `num / den`, exact in integers.
    pub fn bernoulli_ratio(&mut self, num: u128, den: u128) -> bool {
        debug_assert!(den > 0 && num <= den);
        self.inner.gen_range(0..den) < num
    }

    pub fn unit_f64(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        use rand::seq::SliceRandom;
        items.shuffle(&mut self.inner);
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_outcome() {
        let mut rng = RngStream::new(7, 0);
        for _ in 0..100 {
            assert_eq!(rng.uniform_index(1).unwrap(), 0);
        }
    }

    #[test]
    fn zero_is_error() {
        let mut rng = RngStream::new(7, 0);
        assert_eq!(rng.uniform_index(0), Err(CoreError::EmptyRange));
    }

    #[test]
    fn deterministic_per_address() {
        let draw = |seed, id| {
            let mut rng = RngStream::new(seed, id);
            (0..64).map(|_| rng.uniform_index(1000).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(3, 1), draw(3, 1));
        assert_ne!(draw(3, 1), draw(3, 2));
        assert_ne!(draw(3, 1), draw(4, 1));
    }

    #[test]
    fn counter_advances() {
        let mut rng = RngStream::new(1, 1);
        assert_eq!(rng.counter(), 0);
        rng.next_u64();
        assert_eq!(rng.counter(), 2);
    }

    #[test]
    fn four_way_frequencies() {
        // 4000 draws, each frequency within 0.25 +- 0.03. The Pearson statistic
        // is also checked against the 0.999 quantile of chi-square(3) = 16.27.
        let mut rng = RngStream::new(2024, 0);
        let mut counts = [0usize; 4];
        for _ in 0..4000 {
            counts[rng.uniform_index(4).unwrap()] += 1;
        }
        let mut chi2 = 0.0;
        for &c in &counts {
            let freq = c as f64 / 4000.0;
            assert!((freq - 0.25).abs() <= 0.03, "{counts:?}");
            chi2 += (c as f64 - 1000.0).powi(2) / 1000.0;
        }
        assert!(chi2 < 16.27, "chi2 = {chi2}");
    }

    #[test]
    fn split_streams_differ() {
        let base = RngStream::new(9, 0);
        let mut a = base.split(0);
        let mut b = base.split(1);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }
}
