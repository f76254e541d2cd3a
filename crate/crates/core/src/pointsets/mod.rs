//! Exact construction of the p-set families and their set relations.
//!
//! Every point is a [`RationalPoint`]; equality and deduplication go through
//! cross-multiplication (equivalently, lowest-terms keys), never floats.

mod params;
mod point;
mod relations;
mod spec;

use std::collections::HashSet;

pub use params::PSetParams;
pub use point::RationalPoint;
pub use relations::{
    default_pq_params, find_equivalence_witness, intersect, intersection_profile, sets_equal, Equivalence,
    EquivalenceWitness, IntersectionProfile,
};
pub use spec::{Family, PointSetDoc, SetSpec};

use crate::error::{Error, Result};
use crate::numtheory::{mod_mul, Prime};

/// Which construction produced a set, with the parameters needed to rebuild it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Classical { d: usize, p: Prime },
    Parameterized(PSetParams),
    PQ {
        d: usize,
        p: Prime,
        q: Prime,
        /// Present only when `p = q`.
        params: Option<(PSetParams, PSetParams)>,
    },
    QSquare(PSetParams),
    RSquare(PSetParams),
}

impl Provenance {
    pub fn family(&self) -> Family {
        match self {
            Provenance::Classical { .. } => Family::Pset,
            Provenance::Parameterized(_) => Family::ParamPset,
            Provenance::PQ { .. } => Family::Pq,
            Provenance::QSquare(_) => Family::Qsquare,
            Provenance::RSquare(_) => Family::Rsquare,
        }
    }

    /// Parameters of a single-prime p-set (classical sets map to `a = 1`, `ε = 0`).
    pub fn pset_params(&self) -> Option<PSetParams> {
        match self {
            Provenance::Classical { d, p } => PSetParams::classical(*d, *p).ok(),
            Provenance::Parameterized(params) => Some(params.clone()),
            _ => None,
        }
    }
}

/// An ordered collection of exact points plus the construction that produced it.
///
/// Points are pairwise distinct except for the `ℛ` family, which keeps its
/// full `(j,k)`-indexed family of `p²` entries (see [`PointSet::distinct`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    d: usize,
    points: Vec<RationalPoint>,
    provenance: Provenance,
    indexed_family: bool,
}

impl PointSet {
    pub(crate) fn from_parts(d: usize, points: Vec<RationalPoint>, provenance: Provenance, indexed_family: bool) -> Self {
        PointSet {
            d,
            points,
            provenance,
            indexed_family,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[RationalPoint] {
        &self.points
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_indexed_family(&self) -> bool {
        self.indexed_family
    }

    /// The common denominator when every point shares one.
    pub fn common_denominator(&self) -> Option<u64> {
        let first = self.points.first()?.denominator;
        self.points.iter().all(|x| x.denominator == first).then_some(first)
    }

    /// Deduplicated view, first occurrence kept.
    pub fn distinct(&self) -> PointSet {
        PointSet {
            d: self.d,
            points: dedup(self.points.iter().cloned()),
            provenance: self.provenance.clone(),
            indexed_family: false,
        }
    }

    pub fn contains(&self, x: &RationalPoint) -> bool {
        self.points.iter().any(|y| y == x)
    }

    /// For `(p,q)`-sets: whether `|ℒ| = p + q − 1`.
    pub fn pq_certified(&self) -> bool {
        match &self.provenance {
            Provenance::PQ { p, q, .. } => self.len() as u64 == p.get() + q.get() - 1,
            _ => false,
        }
    }

    pub fn spec(&self) -> SetSpec {
        SetSpec::from_provenance(&self.provenance)
    }

    pub fn label(&self) -> String {
        self.spec().label()
    }

    pub fn to_doc(&self) -> PointSetDoc {
        PointSetDoc::from_set(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("point set serializes")
    }

    pub fn from_json(text: &str) -> Result<PointSet> {
        let doc: PointSetDoc = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        doc.into_set()
    }
}

fn dedup(points: impl IntoIterator<Item = RationalPoint>) -> Vec<RationalPoint> {
    let mut seen = HashSet::new();
    points.into_iter().filter(|x| seen.insert(x.key())).collect()
}

/// `{(j/p, j²/p, …, j^d/p) : j ∈ ℤ_p}`.
pub fn classical_pset(d: usize, p: Prime) -> Result<PointSet> {
    let params = PSetParams::classical(d, p)?;
    let points = (0..p.get())
        .map(|j| RationalPoint::new(params.numerators(j, p.get()), p.get()))
        .collect();
    Ok(PointSet::from_parts(d, points, Provenance::Classical { d, p }, false))
}

/// The generalized p-set `𝒫^{a,ε}_{d,p}`, indexed by `j = 0..p−1`.
pub fn parameterized_pset(params: &PSetParams) -> PointSet {
    let p = params.p().get();
    let points = dedup((0..p).map(|j| RationalPoint::new(params.numerators(j, p), p)));
    PointSet::from_parts(params.d(), points, Provenance::Parameterized(params.clone()), false)
}

/// The `(p,q)`-set: two classical sets for `p ≠ q`, two parameterized sets for `p = q`.
///
/// The union keeps the first set's points in order, then the new points of the
/// second. For `p = q` the two parameter sets must not generate the same set.
pub fn pq_set(
    d: usize,
    p: Prime,
    q: Prime,
    params_a: Option<&PSetParams>,
    params_b: Option<&PSetParams>,
) -> Result<PointSet> {
    if p != q {
        if params_a.is_some() || params_b.is_some() {
            return Err(Error::InvalidParams("parameters apply only when p = q".into()));
        }
        let first = classical_pset(d, p)?;
        let second = classical_pset(d, q)?;
        let points = dedup(first.points.into_iter().chain(second.points));
        return Ok(PointSet::from_parts(d, points, Provenance::PQ { d, p, q, params: None }, false));
    }
    let (Some(a), Some(b)) = (params_a, params_b) else {
        return Err(Error::InvalidParams("p = q requires both parameter sets".into()));
    };
    for params in [a, b] {
        if params.d() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: params.d(),
            });
        }
        if params.p() != p {
            return Err(Error::InvalidParams(format!("parameter prime {} differs from {p}", params.p())));
        }
    }
    match find_equivalence_witness(a, b)? {
        Equivalence::Witness(w) => return Err(Error::DegenerateParams { witness: Some(w.c) }),
        Equivalence::EqualByEnumeration => return Err(Error::DegenerateParams { witness: None }),
        Equivalence::NotEquivalent => {}
    }
    let first = parameterized_pset(a);
    let second = parameterized_pset(b);
    let points = dedup(first.points.into_iter().chain(second.points));
    Ok(PointSet::from_parts(
        d,
        points,
        Provenance::PQ {
            d,
            p,
            q,
            params: Some((a.clone(), b.clone())),
        },
        false,
    ))
}

/// `𝒬^{a,ε}_{p²,d}`: indices `j = 0..p²−1`, denominator `p²`.
pub fn qsquare_set(params: &PSetParams) -> PointSet {
    let p = params.p().get();
    let modulus = p * p;
    let points = dedup((0..modulus).map(|j| RationalPoint::new(params.numerators(j, modulus), modulus)));
    PointSet::from_parts(params.d(), points, Provenance::QSquare(params.clone()), false)
}

/// `ℛ^{a,ε}_{p²,d}` as the full `(j,k)`-indexed family, `j` major, denominator `p`.
pub fn rsquare_set(params: &PSetParams) -> PointSet {
    let p = params.p().get();
    let mut points = Vec::with_capacity((p * p) as usize);
    for j in 0..p {
        let row = params.row_multipliers(j);
        for k in 0..p {
            points.push(RationalPoint::new(row.iter().map(|&m| mod_mul(m, k, p)).collect(), p));
        }
    }
    PointSet::from_parts(params.d(), points, Provenance::RSquare(params.clone()), true)
}
