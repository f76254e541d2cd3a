//! Seeded random streams.
//!
//! Every stochastic routine draws from ChaCha8 (`rand_chacha::ChaCha8Rng`),
//! keyed by `seed_from_u64(seed)` and switched to stream number `stream`
//! (the trial index). ChaCha output is fixed by its specification, so runs
//! are reproducible across platforms and independent of thread scheduling.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

use crate::numtheory::Prime;
use crate::pointsets::PSetParams;
use crate::sensing::SparseTrigPoly;

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `a` uniform in `[1, p−1]^d`, `ε` uniform in `{0,1}^{d−1}`.
pub fn certified_params(rng: &mut impl Rng, d: usize, p: Prime) -> PSetParams {
    let pv = p.get();
    let a = (0..d).map(|_| rng.gen_range(1..pv.max(2))).collect();
    let eps = (0..d.saturating_sub(1)).map(|_| rng.gen_range(0..=1u8)).collect();
    PSetParams::new(p, a, eps).expect("residues in range")
}

/// Unit-modulus coefficient with uniform phase (magnitude uniform in `[0.1, 10]` when `random_magnitude`).
pub fn coefficient(rng: &mut impl Rng, random_magnitude: bool) -> Complex64 {
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = if random_magnitude { 10f64.powf(rng.gen_range(-1.0..1.0)) } else { 1.0 };
    Complex64::from_polar(r, phase)
}

/// An `m`-sparse polynomial on `[−s, s]^d` with support drawn without replacement.
pub fn sparse_poly(rng: &mut impl Rng, d: usize, s: u64, m: usize, random_magnitude: bool) -> SparseTrigPoly {
    let side = 2 * s + 1;
    let dict = (side as usize).pow(d as u32);
    let mut f = SparseTrigPoly::new(d, s);
    for idx in sample(rng, dict, m.min(dict)).into_vec() {
        let k = SparseTrigPoly::frequency_at(d, s, idx);
        let c = coefficient(rng, random_magnitude);
        f.insert(k, c).expect("frequency inside the degree box");
    }
    f
}
