//! Equal-weight averages over point sets.
//!
//! For a trigonometric polynomial `f = Σ c_k e(k·x)` the average over `X`
//! differs from the integral `c₀` by `(1/N) Σ_{k≠0} c_k S(k)`, so any
//! exponential-sum bound on `X` turns into an error bound.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::{certificate, KahanSum, BOUND_TOL};
use crate::pointsets::PointSet;
use crate::sensing::{sample, SparseTrigPoly};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QmcEstimate {
    pub mean: Complex64,
    pub n: usize,
    /// Present only for trigonometric-polynomial integrands on sets with a certified sum bound.
    pub error_bound: Option<f64>,
}

fn average(values: impl IntoIterator<Item = Complex64>, n: usize) -> Complex64 {
    let mut acc = KahanSum::new();
    values.into_iter().for_each(|v| acc.add(v));
    acc.value() / n as f64
}

/// Average of `f` over `set`, with a certified error bound when the set has one.
pub fn qmc_mean(f: &SparseTrigPoly, set: &PointSet) -> Result<QmcEstimate> {
    let n = set.len();
    let cert = match certificate(set) {
        Ok(c) => Some(c),
        Err(Error::NotCertified(_)) => None,
        Err(e) => return Err(e),
    };
    if let Some(c) = &cert {
        let w = c.half_width as i64;
        if let Some(k) = f.support().find(|k| k.0.iter().any(|&ki| ki.abs() > w)) {
            return Err(Error::FrequencyOutOfBox(k.0.clone()));
        }
    }
    // average the oscillating part and add c₀ back, so constants integrate exactly
    let c0 = f.constant_term();
    let y = sample(f, set)?;
    let mean = c0 + average(y.values.into_iter().map(|v| v - c0), n);
    let error_bound = cert.map(|c| {
        let mass: f64 = f.terms().filter(|(k, _)| !k.is_zero()).map(|(_, c)| c.norm()).sum();
        mass * (c.bound * (1.0 + BOUND_TOL) + BOUND_TOL) / n as f64
    });
    Ok(QmcEstimate { mean, n, error_bound })
}

/// Average of an arbitrary integrand over `set`; no error bound is attached.
pub fn qmc_mean_fn<F: Fn(&[f64]) -> Complex64>(f: F, set: &PointSet) -> QmcEstimate {
    let mean = average(set.points().iter().map(|x| f(&x.to_f64())), set.len());
    QmcEstimate {
        mean,
        n: set.len(),
        error_bound: None,
    }
}
