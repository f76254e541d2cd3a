use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{parameterized_pset, PSetParams, PointSet};
use crate::error::{Error, Result};
use crate::numtheory::{mod_mul, mod_pow};

/// A residue `c ∈ ℤ_p^*` with `b_j c^j ≡ a_j (mod p)` on the indices that carry the condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceWitness {
    pub c: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Equivalence {
    Witness(EquivalenceWitness),
    /// The sets coincide but `a₁ = 0` with `ε′ ≠ ε″`, where the residue
    /// characterization is not available; decided by enumeration.
    EqualByEnumeration,
    NotEquivalent,
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        !matches!(self, Equivalence::NotEquivalent)
    }
}

fn check_compatible(a: &PSetParams, b: &PSetParams) -> Result<()> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch {
            expected: a.d(),
            got: b.d(),
        });
    }
    if a.p() != b.p() {
        return Err(Error::InvalidParams(format!("primes differ: {} vs {}", a.p(), b.p())));
    }
    Ok(())
}

/// Smallest `c ∈ 1..p` with `b_j c^j ≡ a_j` for every index `j` (1-based) in `indices`.
fn scan_witness(a: &PSetParams, b: &PSetParams, indices: &[usize]) -> Option<u64> {
    let p = a.p().get();
    (1..p).find(|&c| {
        indices
            .iter()
            .all(|&j| mod_mul(b.a()[j - 1], mod_pow(c, j as u64, p), p) == a.a()[j - 1])
    })
}

/// Decides whether two parameterized p-sets coincide.
///
/// Equal `ε`: scans `c` for `b_j c^j ≡ a_j` at every `j`. Different `ε` with
/// `a₁ ≠ 0`: requires `a_j = b_j = 0` wherever `ε′_j ≠ ε″_j` and the `c`
/// condition elsewhere. Different `ε` with `a₁ = 0` falls back to comparing
/// the generated sets.
pub fn find_equivalence_witness(a: &PSetParams, b: &PSetParams) -> Result<Equivalence> {
    check_compatible(a, b)?;
    let d = a.d();
    if a.eps() == b.eps() {
        let all: Vec<usize> = (1..=d).collect();
        return Ok(match scan_witness(a, b, &all) {
            Some(c) => Equivalence::Witness(EquivalenceWitness { c }),
            None => Equivalence::NotEquivalent,
        });
    }
    if a.a()[0] == 0 {
        log::warn!("a1 = 0 with differing eps: deciding equality by enumeration");
        return Ok(if sets_equal(&parameterized_pset(a), &parameterized_pset(b)) {
            Equivalence::EqualByEnumeration
        } else {
            Equivalence::NotEquivalent
        });
    }
    let mut matched = Vec::with_capacity(d);
    for j in 1..=d {
        if j < d && a.eps()[j - 1] != b.eps()[j - 1] {
            if a.a()[j - 1] != 0 || b.a()[j - 1] != 0 {
                return Ok(Equivalence::NotEquivalent);
            }
        } else {
            matched.push(j);
        }
    }
    Ok(match scan_witness(a, b, &matched) {
        Some(c) => Equivalence::Witness(EquivalenceWitness { c }),
        None => Equivalence::NotEquivalent,
    })
}

/// Set equality by enumeration (indexed families compared as sets).
pub fn sets_equal(x: &PointSet, y: &PointSet) -> bool {
    if x.dim() != y.dim() {
        return false;
    }
    let kx: HashSet<_> = x.points().iter().map(|pt| pt.key()).collect();
    let ky: HashSet<_> = y.points().iter().map(|pt| pt.key()).collect();
    kx == ky
}

/// Exact intersection, in ascending order of the first set's indices.
pub fn intersect(x: &PointSet, y: &PointSet) -> Result<PointSet> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let ky: HashSet<_> = y.points().iter().map(|pt| pt.key()).collect();
    let mut seen = HashSet::new();
    let points = x
        .points()
        .iter()
        .filter(|pt| {
            let k = pt.key();
            ky.contains(&k) && seen.insert(k)
        })
        .cloned()
        .collect();
    Ok(PointSet::from_parts(x.dim(), points, x.provenance().clone(), false))
}

/// The index sets `𝒵`, `ℓ₀`, `r` for two p-sets with `ε′ ≠ ε″`, and what they certify.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionProfile {
    /// Indices `j ≤ d−1` (1-based) with `ε′_j ≠ ε″_j` and `(a_j, b_j) ≠ (0, 0)`.
    pub z: Vec<usize>,
    pub ell0: Option<usize>,
    /// First index with `(a_j, b_j) ≠ (0, 0)`.
    pub r: Option<usize>,
    /// `r + 1` when `𝒵` is nonempty.
    pub intersection_bound: Option<usize>,
    /// `a_{ℓ₀+1} b₁^{ℓ₀+1} ≡ a₁^{ℓ₀+1} b_{ℓ₀+1}`, evaluated when `𝒵 ≠ ∅` and `a₁ ≠ 0`.
    pub congruence_holds: Option<bool>,
    /// The intersection is certified to be exactly the origin.
    pub certified_trivial: bool,
}

pub fn intersection_profile(a: &PSetParams, b: &PSetParams) -> Result<IntersectionProfile> {
    check_compatible(a, b)?;
    if a.eps() == b.eps() {
        return Err(Error::SameEpsilon);
    }
    let d = a.d();
    let p = a.p().get();
    let nonzero = |j: usize| a.a()[j - 1] != 0 || b.a()[j - 1] != 0;
    let z: Vec<usize> = (1..d).filter(|&j| a.eps()[j - 1] != b.eps()[j - 1] && nonzero(j)).collect();
    let ell0 = z.first().copied();
    let r = (1..=d).find(|&j| nonzero(j));
    let (intersection_bound, congruence_holds, certified_trivial) = match ell0 {
        None => {
            let distinct = find_equivalence_witness(a, b)? == Equivalence::NotEquivalent;
            (None, None, distinct)
        }
        Some(l0) => {
            let congruence = (a.a()[0] != 0).then(|| {
                let e = (l0 + 1) as u64;
                let lhs = mod_mul(a.a()[l0], mod_pow(b.a()[0], e, p), p);
                let rhs = mod_mul(mod_pow(a.a()[0], e, p), b.a()[l0], p);
                lhs == rhs
            });
            (r.map(|r| r + 1), congruence, congruence == Some(true))
        }
    };
    Ok(IntersectionProfile {
        z,
        ell0,
        r,
        intersection_bound,
        congruence_holds,
        certified_trivial,
    })
}

/// Default parameters for the `p = q` case of `ℒ_{p,q}`.
///
/// `a = (1,…,1)`, `ε′ = ε″ = 0` and `b = (g,1,…,1)` with the smallest `g` whose
/// set differs from `a`'s. When no such `g` exists (`d = 2` with `p ≤ 3`), the
/// first non-equivalent `b ∈ [1,p−1]^d` in lexicographic order is used, and
/// failing that `b = a` with `ε″ = (1,0,…,0)` provided the two sets meet only
/// at the origin.
pub fn default_pq_params(d: usize, p: crate::numtheory::Prime) -> Result<(PSetParams, PSetParams)> {
    let a = PSetParams::classical(d, p)?;
    let zeros = vec![0u8; d - 1];
    let pv = p.get();
    for g in 1..pv {
        let mut bv = vec![1u64; d];
        bv[0] = g;
        let b = PSetParams::new(p, bv, zeros.clone())?;
        if find_equivalence_witness(&a, &b)? == Equivalence::NotEquivalent {
            return Ok((a, b));
        }
    }
    let radix = pv - 1;
    let count = radix.checked_pow(d as u32).unwrap_or(u64::MAX);
    for idx in 0..count {
        let mut rest = idx;
        let mut bv = vec![0u64; d];
        for slot in bv.iter_mut().rev() {
            *slot = rest % radix + 1;
            rest /= radix;
        }
        let b = PSetParams::new(p, bv, zeros.clone())?;
        if find_equivalence_witness(&a, &b)? == Equivalence::NotEquivalent {
            return Ok((a, b));
        }
    }
    if d >= 2 {
        let mut eps = zeros;
        eps[0] = 1;
        let b = PSetParams::new(p, vec![1; d], eps)?;
        if find_equivalence_witness(&a, &b)? == Equivalence::NotEquivalent
            && intersect(&parameterized_pset(&a), &parameterized_pset(&b))?.len() == 1
        {
            return Ok((a, b));
        }
    }
    Err(Error::InvalidParams(format!("no admissible (p,p)-set parameters for d = {d}, p = {p}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::{is_prime, Prime};
    use crate::pointsets::classical_pset;

    fn pr(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn params(q: u64, a: &[u64], eps: &[u8]) -> PSetParams {
        PSetParams::new(pr(q), a.to_vec(), eps.to_vec()).unwrap()
    }

    #[test]
    fn witness_examples() {
        let a = params(5, &[1, 1], &[0]);
        assert_eq!(
            find_equivalence_witness(&a, &params(5, &[3, 4], &[0])).unwrap(),
            Equivalence::Witness(EquivalenceWitness { c: 2 })
        );
        assert_eq!(
            find_equivalence_witness(&a, &params(5, &[2, 3], &[0])).unwrap(),
            Equivalence::NotEquivalent
        );
        for eps in [[0u8, 1], [1, 1], [1, 0]] {
            let x = params(7, &[3, 5, 2], &eps);
            assert_eq!(
                find_equivalence_witness(&x, &x).unwrap(),
                Equivalence::Witness(EquivalenceWitness { c: 1 })
            );
        }
    }

    #[test]
    fn witness_argument_errors() {
        let a = params(5, &[1, 1], &[0]);
        assert!(matches!(
            find_equivalence_witness(&a, &params(5, &[1, 1, 1], &[0, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            find_equivalence_witness(&a, &params(7, &[1, 1], &[0])),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn witness_relation_is_an_equivalence() {
        for q in [3u64, 5, 7, 11, 13] {
            for eps in [0u8, 1] {
                let grid: Vec<PSetParams> = (1..q)
                    .flat_map(|x| (1..q).map(move |y| (x, y)))
                    .map(|(x, y)| params(q, &[x, y], &[eps]))
                    .collect();
                let rel = |x: &PSetParams, y: &PSetParams| find_equivalence_witness(x, y).unwrap().is_equal();
                for x in &grid {
                    assert!(rel(x, x));
                    for y in &grid {
                        assert_eq!(rel(x, y), rel(y, x));
                    }
                }
                // transitivity through class representatives
                for x in &grid {
                    let class: Vec<_> = grid.iter().filter(|y| rel(x, y)).collect();
                    for y in &class {
                        for z in &class {
                            assert!(rel(y, z));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn intersect_examples() {
        let x = classical_pset(2, pr(5)).unwrap();
        assert_eq!(intersect(&x, &x).unwrap().points(), x.points());
        let i = intersect(&classical_pset(2, pr(3)).unwrap(), &classical_pset(2, pr(7)).unwrap()).unwrap();
        assert_eq!(i.len(), 1);
        assert!(i.points()[0].is_origin());
        assert!(intersect(&x, &classical_pset(3, pr(5)).unwrap()).is_err());
    }

    #[test]
    fn profile_example_with_mismatch_at_first_index() {
        let a = params(5, &[1, 0, 1], &[1, 0]);
        let b = params(5, &[1, 0, 1], &[0, 0]);
        let prof = intersection_profile(&a, &b).unwrap();
        assert_eq!(prof.z, vec![1]);
        assert_eq!(prof.ell0, Some(1));
        assert_eq!(prof.r, Some(1));
        assert_eq!(prof.intersection_bound, Some(2));
        assert_eq!(prof.congruence_holds, Some(true));
        assert!(prof.certified_trivial);
        let i = intersect(&parameterized_pset(&a), &parameterized_pset(&b)).unwrap();
        assert_eq!(i.len(), 1);
    }

    #[test]
    fn profile_empty_z_certifies_trivial_intersection() {
        let a = params(7, &[2, 0, 3], &[0, 1]);
        let b = params(7, &[5, 0, 1], &[0, 0]);
        let prof = intersection_profile(&a, &b).unwrap();
        assert!(prof.z.is_empty());
        assert_eq!(prof.ell0, None);
        assert!(prof.certified_trivial);
        let i = intersect(&parameterized_pset(&a), &parameterized_pset(&b)).unwrap();
        assert_eq!(i.len(), 1);
        // identical sets are not certified even though 𝒵 is empty
        let c = params(7, &[2, 0, 3], &[0, 0]);
        assert!(!intersection_profile(&a, &c).unwrap().certified_trivial);
    }

    #[test]
    fn profile_rejects_equal_eps() {
        let a = params(5, &[1, 1], &[0]);
        assert_eq!(intersection_profile(&a, &a), Err(Error::SameEpsilon));
    }

    #[test]
    fn default_pq_params_are_admissible() {
        for q in (2..=31u64).filter(|&n| is_prime(n)) {
            for d in 2..=4 {
                let (a, b) = default_pq_params(d, pr(q)).unwrap();
                let l = crate::pointsets::pq_set(d, pr(q), pr(q), Some(&a), Some(&b)).unwrap();
                assert_eq!(l.len() as u64, 2 * q - 1, "d={d} p={q}");
            }
        }
        let (_, b) = default_pq_params(2, pr(5)).unwrap();
        assert_eq!(b.a(), &[2, 1]);
        assert!(default_pq_params(1, pr(5)).is_err());
    }
}
