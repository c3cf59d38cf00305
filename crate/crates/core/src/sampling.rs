//! Seed-deterministic sampling of small rationals and points.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{combine, Vector};
use crate::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational `n / d` with `|n| ≤ 3` and `d ∈ {1, 2}`.
pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let n: i64 = rng.gen_range(-3..=3);
    let d: i64 = rng.gen_range(1..=2);
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A random combination of `basis` with small rational coefficients.
pub fn combination<R: Rng>(rng: &mut R, basis: &[Vector], len: usize) -> Vector {
    let coeffs: Vec<Rational> = basis.iter().map(|_| small_rational(rng)).collect();
    combine(basis, &coeffs, len)
}

/// A point near the origin: coordinates `n / d` with `|n| ≤ 1`, `2 ≤ d ≤ 8`.
pub fn near_origin_point<R: Rng>(rng: &mut R, m: usize) -> Vec<Rational> {
    (0..m)
        .map(|_| {
            let n: i64 = rng.gen_range(-1..=1);
            let d: i64 = rng.gen_range(2..=8);
            Rational::new(BigInt::from(n), BigInt::from(d))
        })
        .collect()
}
