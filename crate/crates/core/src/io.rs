//! JSON file formats. Rationals are always strings; indices are 1-based.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly, TruncSeries};
use crate::potential::Potential;
use crate::rational::serde_str;
use crate::realization::PolynomialMetric;
use crate::structure::{
    curvature_orbit, model_from_components, one_based, quadruples, zero_based, CurvatureModel, Kind,
    Structure, Tensor4, ThetaTensor,
};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry4 {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    #[serde(with = "serde_str")]
    pub v: Rational,
}

impl Entry4 {
    fn quadruple(&self) -> [usize; 4] {
        [self.i, self.j, self.k, self.l]
    }

    fn new([i, j, k, l]: [usize; 4], v: Rational) -> Self {
        Self { i, j, k, l, v }
    }
}

/// `{"m":4,"kind":"complex","A":[{"i":1,"j":2,"k":2,"l":1,"v":"1"}]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub m: usize,
    pub kind: Kind,
    #[serde(rename = "A")]
    pub a: Vec<Entry4>,
}

impl ModelFile {
    /// One entry per nonzero symmetry orbit, at its lexicographically least quadruple.
    pub fn from_tensor(s: &Structure, a: &Tensor4) -> Self {
        let mut entries = Vec::new();
        for q in quadruples(s.m()) {
            let v = a.get(q);
            if v.is_zero() {
                continue;
            }
            let least = curvature_orbit(q).iter().map(|(p, _)| *p).min().expect("nonempty orbit");
            if least == q {
                entries.push(Entry4::new(one_based(q), v.clone()));
            }
        }
        Self {
            m: s.m(),
            kind: s.kind(),
            a: entries,
        }
    }

    pub fn from_model(model: &CurvatureModel) -> Self {
        Self::from_tensor(model.structure(), model.tensor())
    }

    pub fn structure(&self) -> Result<Structure> {
        Structure::standard(self.m, self.kind)
    }

    /// Completes the symmetries and validates the result.
    pub fn to_model(&self) -> Result<CurvatureModel> {
        let s = self.structure()?;
        let entries: Vec<([usize; 4], Rational)> =
            self.a.iter().map(|e| (e.quadruple(), e.v.clone())).collect();
        model_from_components(&s, &entries)
    }
}

/// Sparse `Θ_ijkl`; the reader completes the `(i,j)` and `(k,l)` symmetries and
/// the writer emits entries with `i ≤ j`, `k ≤ l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaFile {
    pub m: usize,
    pub kind: Kind,
    #[serde(rename = "Theta")]
    pub theta: Vec<Entry4>,
}

impl ThetaFile {
    pub fn from_theta(theta: &ThetaTensor) -> Self {
        let s = theta.structure();
        let entries = quadruples(s.m())
            .filter(|[i, j, k, l]| i <= j && k <= l)
            .filter(|q| !theta.get(*q).is_zero())
            .map(|q| Entry4::new(one_based(q), theta.get(q).clone()))
            .collect();
        Self {
            m: s.m(),
            kind: s.kind(),
            theta: entries,
        }
    }

    pub fn to_theta(&self) -> Result<ThetaTensor> {
        let s = Structure::standard(self.m, self.kind)?;
        let mut t = Tensor4::zeros(self.m);
        let mut seen = std::collections::HashMap::new();
        for e in &self.theta {
            let [i, j, k, l] = zero_based(e.quadruple(), self.m)?;
            for q in [[i, j, k, l], [j, i, k, l], [i, j, l, k], [j, i, l, k]] {
                if let Some(prev) = seen.insert(q, e.v.clone()) {
                    if prev != e.v {
                        return Err(Error::BadTheta { at: one_based(q) });
                    }
                }
                t.set(q, e.v.clone());
            }
        }
        ThetaTensor::new(s, t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub exp: Vec<u32>,
    #[serde(with = "serde_str")]
    pub c: Rational,
}

fn poly_terms(p: &Poly) -> Vec<Term> {
    p.terms()
        .map(|(mono, c)| Term {
            exp: mono.exponents(p.nvars()),
            c: c.clone(),
        })
        .collect()
}

fn poly_from_terms(m: usize, terms: &[Term]) -> Result<Poly> {
    let mut p = Poly::zero(m);
    for t in terms {
        if t.exp.len() != m {
            return Err(Error::Parse(format!("exponent vector {:?} must have length {m}", t.exp)));
        }
        if t.exp.iter().any(|&e| e > u32::from(u8::MAX)) {
            return Err(Error::Parse(format!("exponent in {:?} is too large", t.exp)));
        }
        p.add_term(Monomial::from_exponents(&t.exp), t.c.clone());
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricEntry {
    pub i: usize,
    pub j: usize,
    pub monomials: Vec<Term>,
}

/// `{"m":4,"kind":"complex","entries":[{"i":1,"j":1,"monomials":[{"exp":[2,0,0,0],"c":"1/2"}]}]}`
///
/// Only `i ≤ j` entries are written; missing entries read as zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricFile {
    pub m: usize,
    pub kind: Kind,
    pub entries: Vec<MetricEntry>,
}

impl MetricFile {
    pub fn from_metric(g: &PolynomialMetric) -> Self {
        let m = g.m();
        let mut entries = Vec::new();
        for i in 0..m {
            for j in i..m {
                let e = g.entry(i, j);
                if !e.is_zero() {
                    entries.push(MetricEntry {
                        i: i + 1,
                        j: j + 1,
                        monomials: poly_terms(e),
                    });
                }
            }
        }
        Self {
            m,
            kind: g.structure().kind(),
            entries,
        }
    }

    pub fn to_metric(&self) -> Result<PolynomialMetric> {
        let s = Structure::standard(self.m, self.kind)?;
        let m = self.m;
        let mut polys: Vec<Option<Poly>> = vec![None; m * m];
        for e in &self.entries {
            let [i, j, _, _] = zero_based([e.i, e.j, 1, 1], m)?;
            let p = poly_from_terms(m, &e.monomials)?;
            for k in [i * m + j, j * m + i] {
                if let Some(prev) = &polys[k] {
                    if *prev != p {
                        return Err(Error::BadMetric(format!("conflicting entries at ({}, {})", e.i, e.j)));
                    }
                }
                polys[k] = Some(p.clone());
            }
        }
        let entries = polys.into_iter().map(|p| p.unwrap_or_else(|| Poly::zero(m))).collect();
        PolynomialMetric::new(s, entries)
    }
}

/// `{"m":4,"kind":"complex","c":"-2","N":8,"phi":[{"exp":[0,0,0,5],"c":"…"}],"residual_zero_through":4}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialFile {
    pub m: usize,
    pub kind: Kind,
    #[serde(with = "serde_str")]
    pub c: Rational,
    #[serde(rename = "N")]
    pub n: u32,
    pub phi: Vec<Term>,
    pub residual_zero_through: u32,
}

impl PotentialFile {
    pub fn from_potential(p: &Potential) -> Self {
        Self {
            m: p.structure.m(),
            kind: p.structure.kind(),
            c: p.c.clone(),
            n: p.n,
            phi: poly_terms(p.phi.poly()),
            residual_zero_through: p.residual_zero_through,
        }
    }

    pub fn to_potential(&self) -> Result<Potential> {
        let s = Structure::standard(self.m, self.kind)?;
        let phi = poly_from_terms(self.m, &self.phi)?;
        if phi.degree().is_some_and(|d| d > self.n) {
            return Err(Error::Parse("phi exceeds the truncation degree".into()));
        }
        Ok(Potential {
            structure: s,
            phi: TruncSeries::new(phi, self.n),
            c: self.c.clone(),
            n: self.n,
            residual_zero_through: self.residual_zero_through,
        })
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
