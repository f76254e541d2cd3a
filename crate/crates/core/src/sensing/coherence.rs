use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::{certificate, reduced_phase, unit_root, visit_box, BoundFormula, FrequencyIndex, KahanSum};
use crate::pointsets::{PointSet, Provenance};

use super::SparseTrigPoly;

/// Default cap on the number of column pairs the Gram oracle may form.
pub const DEFAULT_GRAM_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// `(d−1)/√p` for a generalized p-set with nonzero parameters.
    PsetWeil,
    /// `((d−1)√(2m)+1)/(m−1)` for a `(p,q)`-set with `|ℒ| = m − 1`.
    PqWeil,
    None,
}

/// Mutual incoherence `μ` of the normalized `N × D` matrix with entries `exp(2πi k·x_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub set: String,
    pub n: usize,
    pub dict_size: usize,
    pub mu: f64,
    pub argmax_pair: Option<(FrequencyIndex, FrequencyIndex)>,
    pub certified_bound: Option<f64>,
    pub bound_source: BoundSource,
}

impl CoherenceReport {
    pub fn within_bound(&self) -> bool {
        self.certified_bound
            .is_none_or(|b| crate::expsum::within_bound(self.mu, b))
    }
}

/// The prime limiting the frequency box of a construction.
fn frequency_modulus(set: &PointSet) -> u64 {
    match set.provenance() {
        Provenance::Classical { p, .. } => p.get(),
        Provenance::PQ { p, q, .. } => p.get().min(q.get()),
        Provenance::Parameterized(params) | Provenance::QSquare(params) | Provenance::RSquare(params) => {
            params.p().get()
        }
    }
}

fn attached_bound(set: &PointSet, s: u64) -> (Option<f64>, BoundSource) {
    let Ok(cert) = certificate(set) else {
        return (None, BoundSource::None);
    };
    if 2 * s > cert.half_width {
        return (None, BoundSource::None);
    }
    let d = set.dim() as f64;
    match (cert.formula, set.provenance()) {
        (BoundFormula::PSet, _) => {
            let p = frequency_modulus(set) as f64;
            (Some((d - 1.0) / p.sqrt()), BoundSource::PsetWeil)
        }
        (BoundFormula::PQSet, Provenance::PQ { p, q, .. }) => {
            let m = (p.get() + q.get()) as f64;
            (Some(((d - 1.0) * (2.0 * m).sqrt() + 1.0) / (m - 1.0)), BoundSource::PqWeil)
        }
        _ => (None, BoundSource::None),
    }
}

/// A pair `(m, k)` in `[−s, s]^d` with `m − k = δ`.
fn pair_for_difference(delta: &[i64], s: u64) -> (FrequencyIndex, FrequencyIndex) {
    let s = s as i64;
    let k: Vec<i64> = delta.iter().map(|&dl| (-s).max(-s - dl)).collect();
    let m: Vec<i64> = delta.iter().zip(&k).map(|(&dl, &ki)| dl + ki).collect();
    (FrequencyIndex(m), FrequencyIndex(k))
}

/// `μ = max_{δ ∈ [−2s,2s]^d, δ ≠ 0} |S(δ)| / N`, using `⟨a_m, a_k⟩ = S(m − k)`.
pub fn coherence(set: &PointSet, s: u64) -> Result<CoherenceReport> {
    let modulus = frequency_modulus(set);
    if 2 * s >= modulus {
        return Err(Error::DegreeTooLarge { two_s: 2 * s, modulus });
    }
    let n = set.len();
    let mut best = 0.0f64;
    let mut arg: Option<Vec<i64>> = None;
    visit_box(set, 2 * s, u128::MAX, |delta, sum| {
        if delta.iter().all(|&x| x == 0) {
            return;
        }
        let a = sum.norm();
        if arg.is_none() || a > best {
            best = a;
            arg = Some(delta.to_vec());
        }
    })?;
    let (certified_bound, bound_source) = attached_bound(set, s);
    Ok(CoherenceReport {
        set: set.label(),
        n,
        dict_size: ((2 * s + 1) as usize).pow(set.dim() as u32),
        mu: best / n as f64,
        argmax_pair: arg.map(|delta| pair_for_difference(&delta, s)),
        certified_bound,
        bound_source,
    })
}

/// Builds every column `a_k` explicitly and maximizes the normalized inner
/// products over all pairs. Independent of the exponential-sum route; kept as
/// a cross-check.
pub fn coherence_gram_oracle(set: &PointSet, s: u64, budget: u128) -> Result<CoherenceReport> {
    let d = set.dim();
    let dict = ((2 * s + 1) as usize).pow(d as u32);
    let needed = (dict as u128) * (dict as u128);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let freqs: Vec<FrequencyIndex> = (0..dict).map(|i| SparseTrigPoly::frequency_at(d, s, i)).collect();
    let columns: Vec<Vec<Complex64>> = freqs
        .iter()
        .map(|k| {
            set.points()
                .iter()
                .map(|x| unit_root(reduced_phase(&k.0, &x.numerators, x.denominator), x.denominator))
                .collect()
        })
        .collect();
    let norms: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut best = 0.0f64;
    let mut arg = None;
    for i in 0..dict {
        for j in i + 1..dict {
            let mut acc = KahanSum::new();
            for (x, y) in columns[i].iter().zip(&columns[j]) {
                acc.add(x.conj() * y);
            }
            let v = acc.value().norm() / (norms[i] * norms[j]);
            if arg.is_none() || v > best {
                best = v;
                arg = Some((freqs[i].clone(), freqs[j].clone()));
            }
        }
    }
    let (certified_bound, bound_source) = attached_bound(set, s);
    Ok(CoherenceReport {
        set: set.label(),
        n: set.len(),
        dict_size: dict,
        mu: best,
        argmax_pair: arg,
        certified_bound,
        bound_source,
    })
}
