use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointsets::{PointSet, Provenance, SetSpec};
use crate::rng;

use super::{coherence, coherence_gram_oracle, sample, Dictionary, DEFAULT_GRAM_BUDGET};

/// A trial succeeds when the support matches and every coefficient is within this distance.
pub const COEFF_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub set: SetSpec,
    pub s: u64,
    pub sparsity: usize,
    pub trials: usize,
    pub seed: u64,
    /// OMP stops once `‖r‖₂ ≤ tol·√N`.
    pub tol: f64,
    pub random_magnitude: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub set: String,
    pub d: usize,
    pub s: u64,
    #[serde(rename = "M")]
    pub sparsity: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D")]
    pub dict_size: usize,
    pub mu: f64,
    pub mu_bound: Option<f64>,
    /// `μ < 1/(2M−1)` for the computed `μ`.
    pub guarantee_satisfied: bool,
    /// The prime-size condition that implies the guarantee a priori, when one applies.
    pub sufficient_condition: Option<bool>,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_residual: f64,
    pub max_coeff_error: f64,
    pub wall_ms: u64,
}

/// Size conditions on the primes under which the Weil bounds force `μ < 1/(2M−1)`.
fn sufficient_condition(set: &PointSet, s: u64, m: usize) -> Option<bool> {
    let d = set.dim() as f64;
    let k = (2 * m - 1) as f64;
    match set.provenance() {
        Provenance::Classical { .. } | Provenance::Parameterized(_) => {
            let params = set.provenance().pset_params()?;
            if !params.weil_certified() {
                return None;
            }
            let p = params.p().get() as f64;
            Some(p > (2 * s + 1) as f64 && p > (d - 1.0).powi(2) * k * k + 1.0)
        }
        Provenance::PQ { p, q, params, .. } => {
            if !set.pq_certified() || params.as_ref().is_some_and(|(a, b)| !a.weil_certified() || !b.weil_certified()) {
                return None;
            }
            let total = (p.get() + q.get()) as f64;
            let lhs = ((0.5f64.sqrt() + 0.5) * k * (d - 1.0) + (m as f64).sqrt()).powi(2);
            Some(p.get().min(q.get()) > 2 * s && total > lhs)
        }
        _ => None,
    }
}

struct TrialResult {
    success: bool,
    residual: f64,
    coeff_error: f64,
}

/// Recovers `trials` random `M`-sparse polynomials sampled on the configured set.
///
/// Trial `t` draws from stream `t` of the seed, so trials are independent of
/// one another and of the number of worker threads.
pub fn recovery_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let start = Instant::now();
    let set = cfg.set.build()?;
    let d = set.dim();
    let dict = Dictionary::new(&set, cfg.s);
    if cfg.sparsity == 0 || cfg.sparsity > dict.len() {
        return Err(Error::InvalidParams(format!(
            "sparsity must lie in 1..={}",
            dict.len()
        )));
    }
    let report = match coherence(&set, cfg.s) {
        Ok(r) => r,
        Err(Error::DegreeTooLarge { .. }) => coherence_gram_oracle(&set, cfg.s, DEFAULT_GRAM_BUDGET)?,
        Err(e) => return Err(e),
    };
    let results: Vec<Result<TrialResult>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(cfg.seed, t as u64);
            let f = rng::sparse_poly(&mut r, d, cfg.s, cfg.sparsity, cfg.random_magnitude);
            let y = sample(&f, &set)?;
            let out = match dict.recover(&y.values, cfg.sparsity, cfg.tol) {
                Ok(out) => out,
                Err(Error::IllConditioned(_)) => {
                    return Ok(TrialResult {
                        success: false,
                        residual: f64::NAN,
                        coeff_error: f64::INFINITY,
                    })
                }
                Err(e) => return Err(e),
            };
            let same_support = out.poly.support().eq(f.support());
            let coeff_error = f
                .support()
                .chain(out.poly.support())
                .map(|k| (f.coeff(k) - out.poly.coeff(k)).norm())
                .fold(0.0, f64::max);
            Ok(TrialResult {
                success: same_support && coeff_error <= COEFF_TOL,
                residual: out.residual_norm,
                coeff_error,
            })
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let successes = results.iter().filter(|r| r.success).count();
    let finite: Vec<f64> = results.iter().map(|r| r.residual).filter(|r| r.is_finite()).collect();
    let mean_residual = if finite.is_empty() {
        0.0
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    };
    let max_coeff_error = results.iter().map(|r| r.coeff_error).fold(0.0, f64::max);
    let threshold = 1.0 / (2 * cfg.sparsity - 1) as f64;
    Ok(ExperimentSummary {
        set: set.label(),
        d,
        s: cfg.s,
        sparsity: cfg.sparsity,
        n: set.len(),
        dict_size: dict.len(),
        mu: report.mu,
        mu_bound: report.certified_bound,
        guarantee_satisfied: report.mu < threshold,
        sufficient_condition: sufficient_condition(&set, cfg.s, cfg.sparsity),
        trials: cfg.trials,
        successes,
        success_rate: if cfg.trials == 0 { 0.0 } else { successes as f64 / cfg.trials as f64 },
        mean_residual,
        max_coeff_error: if max_coeff_error.is_finite() { max_coeff_error } else { f64::MAX },
        wall_ms: start.elapsed().as_millis() as u64,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::Family;

    fn cfg(set: SetSpec, s: u64, m: usize, trials: usize) -> ExperimentConfig {
        ExperimentConfig {
            set,
            s,
            sparsity: m,
            trials,
            seed: 2024,
            tol: 1e-10,
            random_magnitude: false,
        }
    }

    #[test]
    fn certified_pset_recovers_everything() {
        let c = cfg(SetSpec::new(Family::Pset, 2, 11), 2, 2, 200);
        let out = recovery_experiment(&c).unwrap();
        assert_eq!(out.sufficient_condition, Some(true));
        assert!(out.guarantee_satisfied);
        assert_eq!(out.successes, 200);
        assert_eq!(out.n, 11);
        assert_eq!(out.dict_size, 25);
    }

    #[test]
    fn pq_condition_recovers_everything() {
        // m = 24 > ((1/√2 + 1/2)·1·1 + 1)^2 ≈ 4.88
        let mut spec = SetSpec::new(Family::Pq, 2, 11);
        spec.q = Some(13);
        let out = recovery_experiment(&cfg(spec, 2, 1, 100)).unwrap();
        assert_eq!(out.sufficient_condition, Some(true));
        assert_eq!(out.successes, 100);
    }

    #[test]
    fn underdetermined_smoke_test() {
        let out = recovery_experiment(&cfg(SetSpec::new(Family::Pset, 2, 5), 2, 25, 5)).unwrap();
        assert!(!out.guarantee_satisfied);
        assert_eq!(out.trials, 5);
        assert!(out.successes <= 5);
    }

    #[test]
    fn experiments_are_deterministic() {
        let c = cfg(SetSpec::new(Family::Pset, 2, 7), 1, 2, 50);
        let mut a = recovery_experiment(&c).unwrap();
        let mut b = recovery_experiment(&c).unwrap();
        a.wall_ms = 0;
        b.wall_ms = 0;
        assert_eq!(a, b);
    }
}
