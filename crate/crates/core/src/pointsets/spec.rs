use serde::{Deserialize, Serialize};

use super::{
    classical_pset, default_pq_params, parameterized_pset, pq_set, qsquare_set, rsquare_set, PSetParams, PointSet,
    Provenance, RationalPoint,
};
use crate::error::{Error, Result};
use crate::numtheory::Prime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Pset,
    ParamPset,
    Pq,
    Qsquare,
    Rsquare,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Pset => "pset",
            Family::ParamPset => "param-pset",
            Family::Pq => "pq",
            Family::Qsquare => "qsquare",
            Family::Rsquare => "rsquare",
        }
    }
}

/// A serializable recipe for any constructible set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSpec {
    #[serde(rename = "construction")]
    pub family: Family,
    pub d: usize,
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_b: Option<Vec<u8>>,
}

impl SetSpec {
    pub fn new(family: Family, d: usize, p: u64) -> Self {
        SetSpec {
            family,
            d,
            p,
            q: None,
            a: None,
            eps: None,
            b: None,
            eps_b: None,
        }
    }

    fn params(p: Prime, d: usize, a: &Option<Vec<u64>>, eps: &Option<Vec<u8>>) -> Result<PSetParams> {
        let a = a.clone().unwrap_or_else(|| vec![1; d]);
        if a.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: a.len() });
        }
        let eps = eps.clone().unwrap_or_else(|| vec![0; d.saturating_sub(1)]);
        PSetParams::new(p, a, eps)
    }

    pub fn build(&self) -> Result<PointSet> {
        if self.d == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        let p = Prime::new(self.p)?;
        let d = self.d;
        match self.family {
            Family::Pset => {
                if self.a.is_some() || self.eps.is_some() {
                    return Err(Error::InvalidParams("the classical p-set takes no a/eps".into()));
                }
                classical_pset(d, p)
            }
            Family::ParamPset => Ok(parameterized_pset(&Self::params(p, d, &self.a, &self.eps)?)),
            Family::Qsquare => Ok(qsquare_set(&Self::params(p, d, &self.a, &self.eps)?)),
            Family::Rsquare => Ok(rsquare_set(&Self::params(p, d, &self.a, &self.eps)?)),
            Family::Pq => {
                let q = Prime::new(self.q.ok_or_else(|| Error::InvalidParams("pq requires q".into()))?)?;
                if p != q {
                    return pq_set(d, p, q, None, None);
                }
                let given = self.a.is_some() || self.eps.is_some() || self.b.is_some() || self.eps_b.is_some();
                let (a, b) = if given {
                    (Self::params(p, d, &self.a, &self.eps)?, Self::params(p, d, &self.b, &self.eps_b)?)
                } else {
                    default_pq_params(d, p)?
                };
                pq_set(d, p, q, Some(&a), Some(&b))
            }
        }
    }

    pub fn from_provenance(prov: &Provenance) -> SetSpec {
        let with = |family, params: &PSetParams| SetSpec {
            a: Some(params.a().to_vec()),
            eps: Some(params.eps().to_vec()),
            ..SetSpec::new(family, params.d(), params.p().get())
        };
        match prov {
            Provenance::Classical { d, p } => SetSpec::new(Family::Pset, *d, p.get()),
            Provenance::Parameterized(params) => with(Family::ParamPset, params),
            Provenance::QSquare(params) => with(Family::Qsquare, params),
            Provenance::RSquare(params) => with(Family::Rsquare, params),
            Provenance::PQ { d, p, q, params } => {
                let mut spec = SetSpec::new(Family::Pq, *d, p.get());
                spec.q = Some(q.get());
                if let Some((a, b)) = params {
                    spec.a = Some(a.a().to_vec());
                    spec.eps = Some(a.eps().to_vec());
                    spec.b = Some(b.a().to_vec());
                    spec.eps_b = Some(b.eps().to_vec());
                }
                spec
            }
        }
    }

    pub fn label(&self) -> String {
        let mut s = format!("{}(d={},p={}", self.family.name(), self.d, self.p);
        if let Some(q) = self.q {
            s += &format!(",q={q}");
        }
        for (name, v) in [("a", &self.a), ("b", &self.b)] {
            if let Some(v) = v {
                s += &format!(",{name}={v:?}");
            }
        }
        for (name, v) in [("eps", &self.eps), ("eps_b", &self.eps_b)] {
            if let Some(v) = v {
                s += &format!(",{name}={v:?}");
            }
        }
        s.push(')');
        s.replace(' ', "")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenominatorRun {
    pub denominator: u64,
    pub count: usize,
}

/// On-disk form of a [`PointSet`]: the recipe, run-length denominators and raw numerators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSetDoc {
    #[serde(flatten)]
    pub spec: SetSpec,
    pub indexed_family: bool,
    pub cardinality: usize,
    pub denominators: Vec<DenominatorRun>,
    pub points: Vec<Vec<u64>>,
}

impl PointSetDoc {
    pub fn from_set(set: &PointSet) -> Self {
        let mut runs: Vec<DenominatorRun> = Vec::new();
        for x in set.points() {
            match runs.last_mut() {
                Some(run) if run.denominator == x.denominator => run.count += 1,
                _ => runs.push(DenominatorRun {
                    denominator: x.denominator,
                    count: 1,
                }),
            }
        }
        PointSetDoc {
            spec: set.spec(),
            indexed_family: set.is_indexed_family(),
            cardinality: set.len(),
            denominators: runs,
            points: set.points().iter().map(|x| x.numerators.clone()).collect(),
        }
    }

    /// Rebuilds the set from the stored numerators, checking the stored structure
    /// (not the construction itself, which callers may compare separately).
    pub fn into_set(self) -> Result<PointSet> {
        let spec = self.spec;
        let d = spec.d;
        if d == 0 {
            return Err(Error::Malformed("d must be at least 1".into()));
        }
        let total: usize = self.denominators.iter().map(|r| r.count).sum();
        if total != self.points.len() || self.cardinality != self.points.len() {
            return Err(Error::Malformed(format!(
                "cardinality {} / denominator runs {} / points {} disagree",
                self.cardinality,
                total,
                self.points.len()
            )));
        }
        let mut points = Vec::with_capacity(total);
        let mut rows = self.points.into_iter();
        for run in &self.denominators {
            if run.denominator == 0 {
                return Err(Error::Malformed("zero denominator".into()));
            }
            for row in rows.by_ref().take(run.count) {
                if row.len() != d {
                    return Err(Error::Malformed(format!("point of dimension {} in a d = {d} set", row.len())));
                }
                if row.iter().any(|&n| n >= run.denominator) {
                    return Err(Error::Malformed(format!("numerator not below {}", run.denominator)));
                }
                points.push(RationalPoint::new(row, run.denominator));
            }
        }
        let provenance = provenance_of(&spec)?;
        if self.indexed_family != (spec.family == super::Family::Rsquare) {
            return Err(Error::Malformed("indexed_family applies exactly to rsquare".into()));
        }
        let set = PointSet::from_parts(d, points, provenance, self.indexed_family);
        if !set.is_indexed_family() && set.distinct().len() != set.len() {
            return Err(Error::Malformed("duplicate points".into()));
        }
        Ok(set)
    }
}

fn provenance_of(spec: &SetSpec) -> Result<Provenance> {
    let p = Prime::new(spec.p)?;
    let d = spec.d;
    let params = |a: &Option<Vec<u64>>, eps: &Option<Vec<u8>>| SetSpec::params(p, d, a, eps);
    Ok(match spec.family {
        Family::Pset => Provenance::Classical { d, p },
        Family::ParamPset => Provenance::Parameterized(params(&spec.a, &spec.eps)?),
        Family::Qsquare => Provenance::QSquare(params(&spec.a, &spec.eps)?),
        Family::Rsquare => Provenance::RSquare(params(&spec.a, &spec.eps)?),
        Family::Pq => {
            let q = Prime::new(spec.q.ok_or_else(|| Error::Malformed("pq requires q".into()))?)?;
            let pair = if p == q {
                Some((params(&spec.a, &spec.eps)?, params(&spec.b, &spec.eps_b)?))
            } else {
                None
            };
            Provenance::PQ { d, p, q, params: pair }
        }
    })
}
