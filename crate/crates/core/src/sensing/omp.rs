use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::{reduced_phase, unit_root, FrequencyIndex};
use crate::pointsets::PointSet;

use super::{SampleVector, SparseTrigPoly};

/// Largest accepted condition estimate of a support Gram matrix.
pub const COND_LIMIT: f64 = 1e12;
/// Coefficients smaller than this are dropped from the result.
const PRUNE: f64 = 1e-12;
/// Correlations within this relative distance of the maximum count as ties.
const TIE_REL: f64 = 1e-12;

/// The sampling matrix `F_X` stored column by column, columns in lexicographic frequency order.
#[derive(Debug, Clone)]
pub struct Dictionary {
    d: usize,
    s: u64,
    freqs: Vec<FrequencyIndex>,
    columns: Vec<Vec<Complex64>>,
}

impl Dictionary {
    pub fn new(set: &PointSet, s: u64) -> Self {
        let d = set.dim();
        let dict = ((2 * s + 1) as usize).pow(d as u32);
        let freqs: Vec<FrequencyIndex> = (0..dict).map(|i| SparseTrigPoly::frequency_at(d, s, i)).collect();
        let columns = freqs
            .iter()
            .map(|k| {
                set.points()
                    .iter()
                    .map(|x| unit_root(reduced_phase(&k.0, &x.numerators, x.denominator), x.denominator))
                    .collect()
            })
            .collect();
        Dictionary { d, s, freqs, columns }
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmpOutcome {
    pub poly: SparseTrigPoly,
    pub iterations: usize,
    pub residual_norm: f64,
}

fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthogonal matching pursuit over `[−s, s]^d`.
///
/// Each step adds the frequency whose column correlates most with the residual
/// (ties go to the lexicographically smallest frequency), refits all selected
/// coefficients by least squares through the normal equations, and stops once
/// `‖r‖₂ ≤ tol·√N` or `max_terms` frequencies are selected.
pub fn omp_recover(y: &SampleVector, set: &PointSet, s: u64, max_terms: usize, tol: f64) -> Result<OmpOutcome> {
    Dictionary::new(set, s).recover(&y.values, max_terms, tol)
}

impl Dictionary {
    pub fn recover(&self, y: &[Complex64], max_terms: usize, tol: f64) -> Result<OmpOutcome> {
        let n = self.rows();
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: y.len(),
            });
        }
        if max_terms > self.len() {
            return Err(Error::InvalidParams(format!(
                "sparsity cap {max_terms} exceeds dictionary size {}",
                self.len()
            )));
        }
        let threshold = tol * (n as f64).sqrt();
        let mut residual = y.to_vec();
        let mut support: Vec<usize> = Vec::new();
        let mut coeffs: Vec<Complex64> = Vec::new();
        while support.len() < max_terms && norm(&residual) > threshold {
            let corr: Vec<f64> = self.columns.iter().map(|c| inner(c, &residual).norm()).collect();
            let best = support
                .iter()
                .fold(corr.clone(), |mut c, &i| {
                    c[i] = f64::NEG_INFINITY;
                    c
                })
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            if best <= 0.0 {
                break;
            }
            let pick = (0..self.len())
                .find(|i| !support.contains(i) && corr[*i] >= best * (1.0 - TIE_REL))
                .expect("maximum is attained");
            support.push(pick);
            coeffs = self.least_squares(&support, y)?;
            residual = y.to_vec();
            for (&i, c) in support.iter().zip(&coeffs) {
                for (r, a) in residual.iter_mut().zip(&self.columns[i]) {
                    *r -= c * a;
                }
            }
        }
        let mut poly = SparseTrigPoly::new(self.d, self.s);
        for (&i, &c) in support.iter().zip(&coeffs) {
            if c.norm() >= PRUNE {
                poly.insert(self.freqs[i].clone(), c)?;
            }
        }
        Ok(OmpOutcome {
            poly,
            iterations: support.len(),
            residual_norm: norm(&residual),
        })
    }

    fn least_squares(&self, support: &[usize], y: &[Complex64]) -> Result<Vec<Complex64>> {
        let t = support.len();
        let gram = DMatrix::from_fn(t, t, |i, j| inner(&self.columns[support[i]], &self.columns[support[j]]));
        let rhs = DVector::from_fn(t, |i, _| inner(&self.columns[support[i]], y));
        let eig = gram.clone().symmetric_eigenvalues();
        let (lo, hi) = eig
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if cond > COND_LIMIT {
            return Err(Error::IllConditioned(cond));
        }
        let chol = gram.cholesky().ok_or(Error::IllConditioned(cond))?;
        Ok(chol.solve(&rhs).iter().copied().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{next_prime, Prime};
    use crate::pointsets::classical_pset;
    use crate::sensing::sample;

    #[test]
    fn recovers_single_term() {
        let (d, s, m) = (2usize, 2u64, 1u64);
        let bound = (2 * s + 1).max(((d - 1) * (d - 1)) as u64 * (2 * m - 1).pow(2) + 1);
        let p = next_prime(bound);
        let x = classical_pset(d, p).unwrap();
        let mut f = SparseTrigPoly::new(d, s);
        let k0 = FrequencyIndex(vec![-1, 2]);
        f.insert(k0.clone(), Complex64::new(3.0, 0.0)).unwrap();
        let y = sample(&f, &x).unwrap();
        let out = omp_recover(&y, &x, s, 1, 1e-10).unwrap();
        assert_eq!(out.poly.support().cloned().collect::<Vec<_>>(), vec![k0.clone()]);
        assert!((out.poly.coeff(&k0) - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        assert!(out.residual_norm < 1e-10);
    }

    #[test]
    fn zero_samples_give_zero_polynomial() {
        let x = classical_pset(2, Prime::new(11).unwrap()).unwrap();
        let y = SampleVector {
            values: vec![Complex64::new(0.0, 0.0); 11],
            source: String::new(),
        };
        let out = omp_recover(&y, &x, 2, 3, 1e-10).unwrap();
        assert!(out.poly.is_empty());
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn argument_errors() {
        let x = classical_pset(2, Prime::new(5).unwrap()).unwrap();
        let y = SampleVector {
            values: vec![Complex64::new(1.0, 0.0); 4],
            source: String::new(),
        };
        assert!(matches!(omp_recover(&y, &x, 1, 1, 1e-10), Err(Error::DimensionMismatch { .. })));
        let y = SampleVector {
            values: vec![Complex64::new(1.0, 0.0); 5],
            source: String::new(),
        };
        assert!(matches!(omp_recover(&y, &x, 1, 10, 1e-10), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn dependent_columns_are_ill_conditioned() {
        // d = 1, p = 3, s = 2: frequencies −2 and 1 give identical columns
        let x = classical_pset(1, Prime::new(3).unwrap()).unwrap();
        let dict = Dictionary::new(&x, 2);
        let err = dict.least_squares(&[0, 3], &[Complex64::new(1.0, 0.0); 3]).unwrap_err();
        assert!(matches!(err, Error::IllConditioned(_)));
    }

    #[test]
    fn ties_go_to_the_smallest_frequency() {
        // d = 1, p = 3: columns for k and k+3 coincide, so k = −2 is chosen over k = 1
        let x = classical_pset(1, Prime::new(3).unwrap()).unwrap();
        let mut f = SparseTrigPoly::new(1, 2);
        f.insert(FrequencyIndex(vec![1]), Complex64::new(1.0, 0.0)).unwrap();
        let y = sample(&f, &x).unwrap();
        let out = omp_recover(&y, &x, 2, 1, 1e-10).unwrap();
        assert_eq!(out.poly.support().next().unwrap(), &FrequencyIndex(vec![-2]));
    }
}
