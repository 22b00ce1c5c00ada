//! Seeded random streams.
//!
//! A stream is addressed by `(seed, stream id, counter)`. Child streams get a
//! fresh stream id derived from the parent id and a label, so draws made in
//! one child never shift the draws of another.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::at(seed, 0, 0)
    }

    /// Positions a stream so that its next draw is the `counter`-th 64-bit
    /// word of stream `stream` under `seed`.
    pub fn at(seed: u64, stream: u64, counter: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        inner.set_word_pos(u128::from(counter) * 2);
        RngStream { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// 64-bit words consumed so far.
    pub fn counter(&self) -> u64 {
        (self.inner.get_word_pos() / 2) as u64
    }

    pub fn child(&self, label: &str) -> RngStream {
        Self::at(self.seed, mix(self.stream, fnv1a(label.as_bytes())), 0)
    }

    pub fn child_indexed(&self, label: &str, index: u64) -> RngStream {
        let id = mix(mix(self.stream, fnv1a(label.as_bytes())), index);
        Self::at(self.seed, id, 0)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn sign(&mut self) -> f64 {
        if self.inner.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

// splitmix64 finalizer over the pair
fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.rotate_left(29) ^ 0x9e37_79b9_7f4a_7c15;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_address_same_draws() {
        let mut a = RngStream::new(7);
        let first: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let mut b = RngStream::at(7, 0, 3);
        assert_eq!(b.next_u64(), first[3]);
        assert_eq!(a.counter(), 8);
    }

    #[test]
    fn children_are_distinct_and_stable() {
        let root = RngStream::new(1);
        let mut x = root.child("xi");
        let mut y = root.child("q");
        let mut x2 = root.child("xi");
        let a = x.next_u64();
        assert_ne!(a, y.next_u64());
        assert_eq!(a, x2.next_u64());
        assert_ne!(root.child_indexed("run", 0).stream(), root.child_indexed("run", 1).stream());
    }

    #[test]
    fn uniform_range() {
        let mut r = RngStream::new(3);
        for _ in 0..1000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            let v = r.uniform_open0();
            assert!(v > 0.0 && v <= 1.0);
        }
    }
}
