use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{mod_mul, Prime};

/// Parameters `(d, p, a, ε)` of a generalized p-set (also used for the p²-families).
///
/// Coordinate `i` (1-based) of the point with index `j` has numerator
/// `Σ_{h<i} ε_h a_h j^h + a_i j^i`, reduced by the family's modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PSetParams {
    pub(crate) p: Prime,
    pub(crate) a: Vec<u64>,
    pub(crate) eps: Vec<u8>,
}

impl PSetParams {
    pub fn new(p: Prime, a: Vec<u64>, eps: Vec<u8>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        if eps.len() + 1 != a.len() {
            return Err(Error::InvalidParams(format!(
                "eps must have d-1 = {} entries, got {}",
                a.len() - 1,
                eps.len()
            )));
        }
        if let Some(x) = a.iter().find(|&&x| x >= p.get()) {
            return Err(Error::InvalidParams(format!("a entry {x} is not a residue mod {p}")));
        }
        if eps.iter().any(|&e| e > 1) {
            return Err(Error::InvalidParams("eps entries must be 0 or 1".into()));
        }
        Ok(PSetParams { p, a, eps })
    }

    /// `a = (1,…,1)`, `ε = (0,…,0)`: the classical p-set.
    pub fn classical(d: usize, p: Prime) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        Ok(PSetParams {
            p,
            a: vec![1; d],
            eps: vec![0; d - 1],
        })
    }

    pub fn d(&self) -> usize {
        self.a.len()
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn eps(&self) -> &[u8] {
        &self.eps
    }

    /// All `a_i` lie in `1..p`, the hypothesis under which the Weil-type bounds are claimed.
    pub fn weil_certified(&self) -> bool {
        self.a.iter().all(|&x| x != 0)
    }

    /// Numerators of point `j` with every coordinate reduced modulo `modulus`.
    pub(crate) fn numerators(&self, j: u64, modulus: u64) -> Vec<u64> {
        let d = self.d();
        let mut out = Vec::with_capacity(d);
        let mut carry = 0u64; // Σ_{h<i} ε_h a_h j^h
        let mut pw = 1 % modulus;
        let j = j % modulus;
        for i in 0..d {
            pw = mod_mul(pw, j, modulus);
            let term = mod_mul(self.a[i], pw, modulus);
            out.push((carry + term) % modulus);
            if i + 1 < d && self.eps[i] == 1 {
                carry = (carry + term) % modulus;
            }
        }
        out
    }

    /// The `ℛ`-family multiplier `Σ_{h<i} ε_h a_h j^{h-1} + a_i j^{i-1}` (mod p) per coordinate.
    pub(crate) fn row_multipliers(&self, j: u64) -> Vec<u64> {
        let p = self.p.get();
        let d = self.d();
        let mut out = Vec::with_capacity(d);
        let mut carry = 0u64;
        let mut pw = 1 % p;
        for i in 0..d {
            let term = mod_mul(self.a[i], pw, p);
            out.push((carry + term) % p);
            if i + 1 < d && self.eps[i] == 1 {
                carry = (carry + term) % p;
            }
            pw = mod_mul(pw, j % p, p);
        }
        out
    }
}
