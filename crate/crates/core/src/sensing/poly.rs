use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::{reduced_phase, unit_root, FrequencyIndex, KahanSum};
use crate::pointsets::{PointSet, RationalPoint};

/// `f(x) = Σ_{k∈T} c_k exp(2πi k·x)` with `T ⊆ [−s, s]^d`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseTrigPoly {
    d: usize,
    s: u64,
    #[serde(with = "terms_serde")]
    coeffs: BTreeMap<FrequencyIndex, Complex64>,
}

mod terms_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<FrequencyIndex, Complex64>, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(m.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<BTreeMap<FrequencyIndex, Complex64>, D::Error> {
        let v: Vec<(FrequencyIndex, Complex64)> = Vec::deserialize(de)?;
        Ok(v.into_iter().collect())
    }
}

impl SparseTrigPoly {
    pub fn new(d: usize, s: u64) -> Self {
        SparseTrigPoly {
            d,
            s,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> u64 {
        self.s
    }

    /// `D = (2s+1)^d`.
    pub fn dictionary_size(&self) -> usize {
        ((2 * self.s + 1) as usize).pow(self.d as u32)
    }

    /// The `idx`-th frequency of `[−s, s]^d` in lexicographic order.
    pub fn frequency_at(d: usize, s: u64, mut idx: usize) -> FrequencyIndex {
        let side = (2 * s + 1) as usize;
        let mut k = vec![0i64; d];
        for slot in k.iter_mut().rev() {
            *slot = (idx % side) as i64 - s as i64;
            idx /= side;
        }
        FrequencyIndex(k)
    }

    /// Sets `c_k`, removing the term when `c` is zero.
    pub fn insert(&mut self, k: FrequencyIndex, c: Complex64) -> Result<()> {
        if k.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: k.dim(),
            });
        }
        if k.0.iter().any(|&x| x.unsigned_abs() > self.s) {
            return Err(Error::FrequencyOutOfBox(k.0));
        }
        if c == Complex64::new(0.0, 0.0) {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: &FrequencyIndex) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeff(&FrequencyIndex(vec![0; self.d]))
    }

    pub fn support(&self) -> impl Iterator<Item = &FrequencyIndex> {
        self.coeffs.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FrequencyIndex, &Complex64)> {
        self.coeffs.iter()
    }

    /// Coefficient-wise sum; the degree bound is the larger of the two.
    pub fn add(&self, other: &SparseTrigPoly) -> Result<SparseTrigPoly> {
        if other.d != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: other.d,
            });
        }
        let mut out = SparseTrigPoly::new(self.d, self.s.max(other.s));
        for (k, c) in self.terms().chain(other.terms()) {
            let sum = out.coeff(k) + c;
            out.insert(k.clone(), sum)?;
        }
        Ok(out)
    }
}

/// `f(x)` with exactly reduced phases.
pub fn evaluate(f: &SparseTrigPoly, x: &RationalPoint) -> Result<Complex64> {
    if x.dim() != f.d {
        return Err(Error::DimensionMismatch {
            expected: f.d,
            got: x.dim(),
        });
    }
    let mut acc = KahanSum::new();
    for (k, c) in f.terms() {
        acc.add(c * unit_root(reduced_phase(&k.0, &x.numerators, x.denominator), x.denominator));
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleVector {
    pub values: Vec<Complex64>,
    pub source: String,
}

impl SampleVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `y_j = f(x_j)` in point order.
pub fn sample(f: &SparseTrigPoly, set: &PointSet) -> Result<SampleVector> {
    if set.dim() != f.d {
        return Err(Error::DimensionMismatch {
            expected: f.d,
            got: set.dim(),
        });
    }
    let values = set.points().iter().map(|x| evaluate(f, x)).collect::<Result<_>>()?;
    Ok(SampleVector {
        values,
        source: set.label(),
    })
}
