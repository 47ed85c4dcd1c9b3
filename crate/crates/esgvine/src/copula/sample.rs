//! Inverse-h sampling of bivariate copulas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::{HDir, PairCopula, EPS_U};

/// Draws `n` pairs from `pc` by conditional inversion:
/// u1 ~ U(0,1), u2 = h⁻¹(w | u1) with w ~ U(0,1).
///
/// Deterministic for a fixed `seed`.
pub fn sample_pair(pc: &PairCopula, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u1: f64 = rng.random::<f64>().clamp(EPS_U, 1.0 - EPS_U);
        let w: f64 = rng.random::<f64>().clamp(EPS_U, 1.0 - EPS_U);
        let u2 = pc.hinv(w, u1, HDir::CondFirst);
        out.push((u1, u2));
    }
    out
}
