//! Seeded low-discrepancy sampling of unit spheres in coefficient space.
//!
//! Points come from a Halton sequence with a random Cranley-Patterson shift
//! drawn from the seed, mapped to Gaussian coordinates with Box-Muller, then
//! normalized. Different seeds give different but reproducible point sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{C64, Vector};

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut k = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= k).all(|&p| !k.is_multiple_of(p)) {
            out.push(k);
        }
        k += 1;
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

pub struct SphereSampler {
    primes: Vec<u64>,
    shift: Vec<f64>,
    index: u64,
    k: usize,
    complex: bool,
}

impl SphereSampler {
    /// Sampler for unit coefficient vectors of length `k`, real or complex.
    pub fn new(k: usize, complex: bool, seed: u64) -> Self {
        let dof = if complex { 2 * k } else { k };
        let dims = dof + dof % 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f5a_3b1e);
        let shift = (0..dims).map(|_| rng.random::<f64>()).collect();
        SphereSampler { primes: primes(dims), shift, index: 17, k, complex }
    }

    fn gaussians(&mut self) -> Vec<f64> {
        self.index += 1;
        let u: Vec<f64> = self
            .primes
            .iter()
            .zip(&self.shift)
            .map(|(&p, &s)| {
                let x = (radical_inverse(self.index, p) + s).fract();
                x.clamp(1e-300, 1.0 - 1e-16)
            })
            .collect();
        let mut g = Vec::with_capacity(u.len());
        for pair in u.chunks(2) {
            let r = (-2.0 * pair[0].ln()).sqrt();
            let t = std::f64::consts::TAU * pair[1];
            g.push(r * t.cos());
            g.push(r * t.sin());
        }
        g
    }

    /// Next unit coefficient vector.
    pub fn next_unit(&mut self) -> Vector {
        loop {
            let g = self.gaussians();
            let v = if self.complex {
                Vector::from_iterator(self.k, (0..self.k).map(|i| C64::new(g[2 * i], g[2 * i + 1])))
            } else {
                Vector::from_iterator(self.k, g.iter().take(self.k).map(|&x| C64::new(x, 0.0)))
            };
            let n = v.norm();
            if n > 1e-12 {
                return v / C64::new(n, 0.0);
            }
        }
    }
}
