//! Exponential sums `S(k) = Σ_{x∈X} exp(2πi k·x)` and exhaustive checks of the
//! Weil-type bounds over full frequency boxes.
//!
//! Phases are reduced exactly: `k·x` is evaluated as the integer
//! `(Σ k_i n_i) mod den` before it becomes an angle, so every term is one of the
//! `den`-th roots of unity and is bit-identical however the frequency was reached.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointsets::{parameterized_pset, PSetParams, PointSet, Provenance};

/// Default cap on `set size × number of sums evaluated`.
pub const DEFAULT_BUDGET: u128 = 100_000_000;
/// Relative and absolute slack for bound comparisons; covers float roundoff only.
pub const BOUND_TOL: f64 = 1e-9;
/// Reports keep at most this many violating frequencies.
const MAX_LISTED_VIOLATIONS: usize = 64;
/// Denominators up to this size get a cached table of roots of unity.
const ROOT_TABLE_LIMIT: u64 = 1 << 22;
/// Largest residue table (entries) used for memoized box scans.
const RESIDUE_TABLE_LIMIT: u128 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyIndex(pub Vec<i64>);

impl FrequencyIndex {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }
}

/// `exp(2πi r/den)` for a reduced residue `r`.
#[inline]
pub fn unit_root(r: u64, den: u64) -> Complex64 {
    let (s, c) = (TAU * (r as f64 / den as f64)).sin_cos();
    Complex64::new(c, s)
}

/// `(Σ k_i n_i) mod den`, exact.
#[inline]
pub fn reduced_phase(k: &[i64], numerators: &[u64], den: u64) -> u64 {
    let dot: i128 = k.iter().zip(numerators).map(|(&ki, &ni)| ki as i128 * ni as i128).sum();
    dot.rem_euclid(den as i128) as u64
}

/// Kahan-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: Complex64) {
        let y_re = x.re - self.comp.re;
        let t_re = self.sum.re + y_re;
        self.comp.re = (t_re - self.sum.re) - y_re;
        self.sum.re = t_re;
        let y_im = x.im - self.comp.im;
        let t_im = self.sum.im + y_im;
        self.comp.im = (t_im - self.sum.im) - y_im;
        self.sum.im = t_im;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}

/// Cached roots of unity, one table per denominator.
#[derive(Debug, Default)]
pub(crate) struct RootCache {
    tables: HashMap<u64, Vec<Complex64>>,
}

impl RootCache {
    pub(crate) fn for_set(set: &PointSet) -> Self {
        let mut cache = RootCache::default();
        for x in set.points() {
            let den = x.denominator;
            if den <= ROOT_TABLE_LIMIT && !cache.tables.contains_key(&den) {
                cache.tables.insert(den, (0..den).map(|r| unit_root(r, den)).collect());
            }
        }
        cache
    }

    #[inline]
    pub(crate) fn root(&self, r: u64, den: u64) -> Complex64 {
        match self.tables.get(&den) {
            Some(t) => t[r as usize],
            None => unit_root(r, den),
        }
    }
}

fn check_dim(set: &PointSet, k: &[i64]) -> Result<()> {
    if k.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: k.len(),
        });
    }
    Ok(())
}

/// `S(k)` summed sequentially in point order with compensation.
pub fn exp_sum(set: &PointSet, k: &[i64]) -> Result<Complex64> {
    check_dim(set, k)?;
    let mut acc = KahanSum::new();
    for x in set.points() {
        acc.add(unit_root(reduced_phase(k, &x.numerators, x.denominator), x.denominator));
    }
    Ok(acc.value())
}

fn exp_sum_cached(set: &PointSet, roots: &RootCache, k: &[i64]) -> Complex64 {
    let mut acc = KahanSum::new();
    for x in set.points() {
        acc.add(roots.root(reduced_phase(k, &x.numerators, x.denominator), x.denominator));
    }
    acc.value()
}

fn box_count(d: usize, half_width: u64) -> u128 {
    ((2 * half_width + 1) as u128).saturating_pow(d as u32)
}

/// Lexicographic enumeration of `[−w, w]^d`.
fn box_frequencies(d: usize, half_width: u64) -> impl Iterator<Item = Vec<i64>> {
    let w = half_width as i64;
    let side = 2 * half_width + 1;
    let count = box_count(d, half_width) as u64;
    (0..count).map(move |mut idx| {
        let mut k = vec![0i64; d];
        for slot in k.iter_mut().rev() {
            *slot = (idx % side) as i64 - w;
            idx /= side;
        }
        k
    })
}

/// Evaluates `S(k)` for every `k` in `[−w, w]^d` and hands them out in lexicographic order.
///
/// Sets sharing one denominator `den ≤ 2w+1` evaluate each residue class of
/// `k mod den` once; the per-term phases, and hence the sums, are identical
/// to direct evaluation.
pub(crate) fn visit_box(
    set: &PointSet,
    half_width: u64,
    budget: u128,
    mut visit: impl FnMut(&[i64], Complex64),
) -> Result<u128> {
    let d = set.dim();
    let n = set.len() as u128;
    let boxed = box_count(d, half_width);
    let roots = RootCache::for_set(set);
    match set.common_denominator() {
        Some(den) if (den as u128) <= 2 * half_width as u128 + 1 && (den as u128).pow(d as u32) <= RESIDUE_TABLE_LIMIT => {
            let table_len = (den as u128).pow(d as u32);
            let work = n * table_len;
            if work > budget {
                return Err(Error::RangeTooLarge { work, budget });
            }
            let table = residue_table(set, den, &roots);
            for k in box_frequencies(d, half_width) {
                let idx = k
                    .iter()
                    .fold(0u64, |acc, &ki| acc * den + ki.rem_euclid(den as i64) as u64);
                visit(&k, table[idx as usize]);
            }
        }
        _ => {
            let work = n * boxed;
            if work > budget {
                return Err(Error::RangeTooLarge { work, budget });
            }
            let ks: Vec<Vec<i64>> = box_frequencies(d, half_width).collect();
            let sums: Vec<Complex64> = ks.par_iter().map(|k| exp_sum_cached(set, &roots, k)).collect();
            for (k, s) in ks.iter().zip(sums) {
                visit(k, s);
            }
        }
    }
    Ok(boxed)
}

/// `S(r)` for all `r ∈ ℤ_den^d`, row-major with the first coordinate slowest.
fn residue_table(set: &PointSet, den: u64, roots: &RootCache) -> Vec<Complex64> {
    let d = set.dim();
    let nums: Vec<&[u64]> = set.points().iter().map(|x| x.numerators.as_slice()).collect();
    let stride = (den as usize).pow(d as u32 - 1);
    let mut table = vec![Complex64::new(0.0, 0.0); stride * den as usize];
    table.par_chunks_mut(stride).enumerate().for_each(|(r1, chunk)| {
        let phases: Vec<u64> = nums
            .iter()
            .map(|x| crate::numtheory::mod_mul(r1 as u64, x[0], den))
            .collect();
        fill_residues(&nums, den, roots, 1, &phases, chunk);
    });
    table
}

fn fill_residues(nums: &[&[u64]], den: u64, roots: &RootCache, level: usize, phases: &[u64], out: &mut [Complex64]) {
    let d = nums.first().map_or(0, |x| x.len());
    if level == d {
        let mut acc = KahanSum::new();
        for &ph in phases {
            acc.add(roots.root(ph, den));
        }
        out[0] = acc.value();
        return;
    }
    let stride = out.len() / den as usize;
    let mut cur = phases.to_vec();
    for (r, slot) in out.chunks_mut(stride).enumerate() {
        fill_residues(nums, den, roots, level + 1, &cur, slot);
        if r + 1 < den as usize {
            for (ph, x) in cur.iter_mut().zip(nums) {
                *ph += x[level];
                if *ph >= den {
                    *ph -= den;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundFormula {
    /// `(d−1)√p`
    PSet,
    /// `(d−1)√(2m) + 1`, `m = p + q`
    PQSet,
    /// `(d−1)p`
    QSquare,
    /// `(d−1)p`
    RSquare,
}

/// A bound `|S(k)| ≤ bound` claimed for every nonzero `k ∈ [−w, w]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumCertificate {
    pub formula: BoundFormula,
    pub half_width: u64,
    pub bound: f64,
}

/// The exponential-sum bound a set is entitled to, if any.
pub fn certificate(set: &PointSet) -> Result<SumCertificate> {
    let d = set.dim() as f64;
    match set.provenance() {
        Provenance::Classical { .. } | Provenance::Parameterized(_) => {
            let params = set.provenance().pset_params().expect("p-set provenance");
            pset_certificate(&params)
        }
        Provenance::PQ { p, q, params, .. } => {
            if let Some((a, b)) = params {
                if !a.weil_certified() || !b.weil_certified() {
                    return Err(Error::NotCertified("a or b has zero entries".into()));
                }
            }
            if !set.pq_certified() {
                return Err(Error::NotCertified(format!(
                    "|L| = {} but p + q - 1 = {}",
                    set.len(),
                    p.get() + q.get() - 1
                )));
            }
            let m = (p.get() + q.get()) as f64;
            Ok(SumCertificate {
                formula: BoundFormula::PQSet,
                half_width: p.get().min(q.get()) - 1,
                bound: (d - 1.0) * (2.0 * m).sqrt() + 1.0,
            })
        }
        Provenance::QSquare(params) | Provenance::RSquare(params) => {
            if !params.weil_certified() {
                return Err(Error::NotCertified("a has zero entries".into()));
            }
            let formula = if matches!(set.provenance(), Provenance::QSquare(_)) {
                BoundFormula::QSquare
            } else {
                BoundFormula::RSquare
            };
            let p = params.p().get();
            Ok(SumCertificate {
                formula,
                half_width: p - 1,
                bound: (d - 1.0) * p as f64,
            })
        }
    }
}

fn pset_certificate(params: &PSetParams) -> Result<SumCertificate> {
    if !params.weil_certified() {
        return Err(Error::NotCertified("a has zero entries".into()));
    }
    let p = params.p().get();
    Ok(SumCertificate {
        formula: BoundFormula::PSet,
        half_width: p - 1,
        bound: (params.d() as f64 - 1.0) * (p as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub budget: u128,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub k: FrequencyIndex,
    pub abs_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpSumReport {
    pub set: String,
    pub bound_formula: BoundFormula,
    pub bound_value: f64,
    /// Frequencies checked: `[−w, w]^d` without the origin.
    pub k_half_width: u64,
    pub max_abs_sum: f64,
    pub max_ratio: f64,
    pub argmax_k: Option<FrequencyIndex>,
    pub n_frequencies: u128,
    pub violations: Vec<Violation>,
    pub n_violations: u64,
    pub trivial_dimension: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ExpSumReport {
    pub fn passed(&self) -> bool {
        self.n_violations == 0
    }
}

#[inline]
pub fn within_bound(abs_sum: f64, bound: f64) -> bool {
    abs_sum <= bound * (1.0 + BOUND_TOL) + BOUND_TOL
}

/// Checks `|S(k)| ≤ bound` for every nonzero `k` in the certificate's box.
pub fn check_certificate(set: &PointSet, cert: SumCertificate, cfg: &VerifyConfig) -> Result<ExpSumReport> {
    let trivial_dimension = cert.bound == 0.0;
    let mut max_abs = 0.0f64;
    let mut max_ratio = 0.0f64;
    let mut argmax: Option<Vec<i64>> = None;
    let mut violations = Vec::new();
    let mut n_violations = 0u64;
    let boxed = visit_box(set, cert.half_width, cfg.budget, |k, s| {
        if k.iter().all(|&x| x == 0) {
            return;
        }
        let a = s.norm();
        if argmax.is_none() || a > max_abs {
            max_abs = a;
            argmax = Some(k.to_vec());
        }
        if cert.bound > 0.0 {
            max_ratio = max_ratio.max(a / cert.bound);
        }
        if !within_bound(a, cert.bound) {
            n_violations += 1;
            if violations.len() < MAX_LISTED_VIOLATIONS {
                violations.push(Violation {
                    k: FrequencyIndex(k.to_vec()),
                    abs_sum: a,
                });
            }
        }
    })?;
    Ok(ExpSumReport {
        set: set.label(),
        bound_formula: cert.formula,
        bound_value: cert.bound,
        k_half_width: cert.half_width,
        max_abs_sum: max_abs,
        max_ratio,
        argmax_k: argmax.map(FrequencyIndex),
        n_frequencies: boxed.saturating_sub(1),
        violations,
        n_violations,
        trivial_dimension,
        note: trivial_dimension.then(|| "d = 1: the bound is 0 and only vanishing sums are accepted".into()),
    })
}

/// `|S(k)| ≤ (d−1)√p` over `[−p+1, p−1]^d \ {0}` for `𝒫^{a,ε}_{d,p}`.
pub fn verify_weil_pset(params: &PSetParams, cfg: &VerifyConfig) -> Result<ExpSumReport> {
    let cert = pset_certificate(params)?;
    check_certificate(&parameterized_pset(params), cert, cfg)
}

/// `|S(k)| ≤ (d−1)√(2m) + 1` over the common box for a `(p,q)`-set.
///
/// Sets with `|ℒ| ≠ p + q − 1` fall outside the hypothesis; they are returned
/// unchecked with a note rather than tested against a bound that was never claimed.
pub fn verify_weil_pq(set: &PointSet, cfg: &VerifyConfig) -> Result<ExpSumReport> {
    let Provenance::PQ { p, q, .. } = set.provenance() else {
        return Err(Error::InvalidParams("not a (p,q)-set".into()));
    };
    match certificate(set) {
        Ok(cert) => check_certificate(set, cert, cfg),
        Err(Error::NotCertified(why)) => {
            let d = set.dim() as f64;
            let m = (p.get() + q.get()) as f64;
            Ok(ExpSumReport {
                set: set.label(),
                bound_formula: BoundFormula::PQSet,
                bound_value: (d - 1.0) * (2.0 * m).sqrt() + 1.0,
                k_half_width: p.get().min(q.get()) - 1,
                max_abs_sum: 0.0,
                max_ratio: 0.0,
                argmax_k: None,
                n_frequencies: 0,
                violations: vec![],
                n_violations: 0,
                trivial_dimension: false,
                note: Some(format!("skipped: cardinality hypothesis fails ({why})")),
            })
        }
        Err(e) => Err(e),
    }
}

/// `|S(k)| ≤ (d−1)p` over `[−p+1, p−1]^d \ {0}` for `𝒬^{a,ε}` or the full `ℛ^{a,ε}` family.
pub fn verify_weil_square(set: &PointSet, cfg: &VerifyConfig) -> Result<ExpSumReport> {
    if !matches!(set.provenance(), Provenance::QSquare(_) | Provenance::RSquare(_)) {
        return Err(Error::InvalidParams("not a p^2-set".into()));
    }
    let cert = certificate(set)?;
    check_certificate(set, cert, cfg)
}

/// Runs whichever bound applies to the set's construction.
pub fn verify_weil(set: &PointSet, cfg: &VerifyConfig) -> Result<ExpSumReport> {
    match set.provenance() {
        Provenance::Classical { .. } | Provenance::Parameterized(_) => {
            let params = set.provenance().pset_params().expect("p-set provenance");
            let cert = pset_certificate(&params)?;
            check_certificate(set, cert, cfg)
        }
        Provenance::PQ { .. } => verify_weil_pq(set, cfg),
        Provenance::QSquare(_) | Provenance::RSquare(_) => verify_weil_square(set, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::Prime;
    use crate::pointsets::{classical_pset, pq_set, qsquare_set, rsquare_set};

    fn pr(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn params(q: u64, a: &[u64], eps: &[u8]) -> PSetParams {
        PSetParams::new(pr(q), a.to_vec(), eps.to_vec()).unwrap()
    }

    /// Direct float evaluation without exact phase reduction.
    fn naive_sum(set: &PointSet, k: &[i64]) -> Complex64 {
        set.points()
            .iter()
            .map(|x| {
                let t: f64 = k.iter().zip(x.to_f64()).map(|(&ki, xi)| ki as f64 * xi).sum();
                Complex64::from_polar(1.0, TAU * t)
            })
            .sum()
    }

    #[test]
    fn exp_sum_examples() {
        let x = classical_pset(2, pr(5)).unwrap();
        assert_eq!(exp_sum(&x, &[0, 0]).unwrap(), Complex64::new(5.0, 0.0));
        assert!(exp_sum(&x, &[1, 0]).unwrap().norm() < 1e-12);
        assert!((exp_sum(&x, &[0, 1]).unwrap().norm() - 5f64.sqrt()).abs() < 1e-12);
        assert!((naive_sum(&x, &[0, 1]).norm() - 5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(exp_sum(&x, &[1]), Err(Error::DimensionMismatch { .. })));
        let r = rsquare_set(&params(3, &[1, 1], &[0]));
        assert_eq!(exp_sum(&r, &[0, 0]).unwrap(), Complex64::new(9.0, 0.0));
    }

    #[test]
    fn conjugate_symmetry_and_reduction() {
        let sets = [
            parameterized_pset(&params(13, &[3, 5, 7], &[1, 0])),
            pq_set(2, pr(5), pr(7), None, None).unwrap(),
            qsquare_set(&params(5, &[2, 3], &[1])),
            rsquare_set(&params(5, &[2, 3], &[1])),
        ];
        for set in &sets {
            let d = set.dim();
            for k in box_frequencies(d, 4) {
                let s = exp_sum(set, &k).unwrap();
                let neg: Vec<i64> = k.iter().map(|x| -x).collect();
                assert!((exp_sum(set, &neg).unwrap() - s.conj()).norm() < 1e-12);
                assert!((naive_sum(set, &k) - s).norm() < 1e-12, "{k:?}");
            }
        }
    }

    #[test]
    fn visit_box_matches_direct_sums() {
        let set = parameterized_pset(&params(7, &[2, 3, 5], &[0, 1]));
        let mut seen = 0;
        visit_box(&set, 6, DEFAULT_BUDGET, |k, s| {
            assert_eq!(s, exp_sum(&set, k).unwrap());
            seen += 1;
        })
        .unwrap();
        assert_eq!(seen, 13 * 13 * 13);
    }

    #[test]
    fn weil_pset_examples() {
        let cfg = VerifyConfig::default();
        let r = verify_weil_pset(&params(7, &[3], &[]), &cfg).unwrap();
        assert!(r.trivial_dimension);
        assert_eq!(r.max_ratio, 0.0);
        assert!(r.passed());
        assert!(r.max_abs_sum < 1e-12);
        let r = verify_weil_pset(&params(5, &[1, 1], &[0]), &cfg).unwrap();
        assert_eq!(r.n_frequencies, 80);
        assert!((r.max_ratio - 1.0).abs() < 1e-12);
        assert!(r.passed());
        let r = verify_weil_pset(&params(11, &[1, 1, 1], &[0, 0]), &cfg).unwrap();
        assert_eq!(r.n_frequencies, 21u128.pow(3) - 1);
        assert!(r.max_ratio <= 1.0 + BOUND_TOL);
        assert!(r.passed());
        assert!(matches!(
            verify_weil_pset(&params(5, &[1, 0], &[0]), &cfg),
            Err(Error::NotCertified(_))
        ));
    }

    #[test]
    fn zero_parameter_breaks_the_bound() {
        // a = (1, 0), k = (0, 1): every term is 1
        let set = parameterized_pset(&params(5, &[1, 0], &[0]));
        assert_eq!(exp_sum(&set, &[0, 1]).unwrap(), Complex64::new(5.0, 0.0));
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = VerifyConfig { budget: 1000 };
        assert!(matches!(
            verify_weil_pset(&params(11, &[1, 1, 1], &[0, 0]), &cfg),
            Err(Error::RangeTooLarge { .. })
        ));
    }

    #[test]
    fn weil_pq_examples() {
        let cfg = VerifyConfig::default();
        let l = pq_set(2, pr(3), pr(7), None, None).unwrap();
        let r = verify_weil_pq(&l, &cfg).unwrap();
        assert_eq!(r.n_frequencies, 24);
        assert!(r.passed());
        assert_eq!(exp_sum(&l, &[0, 0]).unwrap().re, 9.0);
        let (a, b) = crate::pointsets::default_pq_params(2, pr(5)).unwrap();
        let l = pq_set(2, pr(5), pr(5), Some(&a), Some(&b)).unwrap();
        let r = verify_weil_pq(&l, &cfg).unwrap();
        assert_eq!(r.n_frequencies, 80);
        assert!(r.passed());
        assert!((r.bound_value - (20f64.sqrt() + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn weil_square_examples() {
        let cfg = VerifyConfig::default();
        let r = verify_weil_square(&qsquare_set(&params(3, &[1, 1], &[0])), &cfg).unwrap();
        assert_eq!(r.n_frequencies, 24);
        assert!(r.max_abs_sum <= 3.0 + 1e-9);
        assert!(r.passed());
        let r = verify_weil_square(&rsquare_set(&params(3, &[1, 1], &[0])), &cfg).unwrap();
        assert!(r.passed());
        let r = verify_weil_square(&rsquare_set(&params(5, &[2], &[])), &cfg).unwrap();
        assert!(r.trivial_dimension && r.passed());
        assert!(matches!(
            verify_weil_square(&rsquare_set(&params(3, &[1, 0], &[0])), &cfg),
            Err(Error::NotCertified(_))
        ));
    }

    #[test]
    fn gauss_sums_saturate_the_bound() {
        let cfg = VerifyConfig::default();
        for q in [5u64, 13, 17] {
            let r = verify_weil_pset(&PSetParams::classical(2, pr(q)).unwrap(), &cfg).unwrap();
            assert!(r.max_ratio >= 0.99 && r.passed(), "p = {q}: {}", r.max_ratio);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = VerifyConfig::default();
        let pp = params(13, &[4, 9, 2], &[1, 1]);
        let a = serde_json::to_string(&verify_weil_pset(&pp, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&verify_weil_pset(&pp, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
