//! Curvature identity checkers, contractions, the Nijenhuis tensor and the
//! exact (para-)Kaehler subspace of algebraic curvature tensors.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gram_project, Matrix, RowReducer, Vector};
use crate::sampling;
use crate::structure::{
    one_based, quadruples, tensor_ip_flat, CurvatureModel, Kind, Structure, SymBil, Tensor4,
};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Identity {
    Bianchi,
    Gray,
    Kaehler,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Identity::Bianchi => "bianchi",
            Identity::Gray => "gray",
            Identity::Kaehler => "kaehler",
        })
    }
}

/// Outcome of an identity check; on failure, the lexicographically first
/// offending basis quadruple (1-based) and the value of the identity there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: Identity,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<[usize; 4]>,
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
}

impl IdentityReport {
    fn from_first(identity: Identity, first: Option<([usize; 4], Rational)>) -> Self {
        match first {
            None => Self {
                identity,
                holds: true,
                at: None,
                value: Rational::zero(),
            },
            Some((q, v)) => Self {
                identity,
                holds: false,
                at: Some(one_based(q)),
                value: v,
            },
        }
    }
}

fn first_nonzero(
    m: usize,
    mut f: impl FnMut([usize; 4]) -> Rational,
) -> Option<([usize; 4], Rational)> {
    quadruples(m).find_map(|q| {
        let v = f(q);
        (!v.is_zero()).then_some((q, v))
    })
}

const MIXED_MASKS: [[bool; 4]; 6] = [
    [true, true, false, false],
    [true, false, true, false],
    [true, false, false, true],
    [false, true, true, false],
    [false, true, false, true],
    [false, false, true, true],
];

fn gray_value(a: &Tensor4, s: &Structure, q: [usize; 4]) -> Rational {
    let mut acc = a.get(q) + a.get_twisted(s, q, [true; 4]);
    let mut mixed = Rational::zero();
    for mask in MIXED_MASKS {
        mixed += a.get_twisted(s, q, mask);
    }
    // complex: mixed terms enter with -1, para: +1
    if s.sigma() == 1 {
        acc -= mixed;
    } else {
        acc += mixed;
    }
    acc
}

/// The eight-term Gray identity (para: with the six mixed terms added).
pub fn check_gray(model: &CurvatureModel) -> IdentityReport {
    let (a, s) = (model.tensor(), model.structure());
    IdentityReport::from_first(Identity::Gray, first_nonzero(s.m(), |q| gray_value(a, s, q)))
}

/// `A(x,y,z,w) = σ A(Jx,Jy,z,w)`.
pub fn check_kaehler(model: &CurvatureModel) -> IdentityReport {
    kaehler_report(model.tensor(), model.structure())
}

pub(crate) fn kaehler_report(a: &Tensor4, s: &Structure) -> IdentityReport {
    IdentityReport::from_first(
        Identity::Kaehler,
        first_nonzero(s.m(), |q| kaehler_value(a, s, q)),
    )
}

fn kaehler_value(a: &Tensor4, s: &Structure, q: [usize; 4]) -> Rational {
    let tw = a.get_twisted(s, q, [true, true, false, false]);
    if s.sigma() == 1 {
        a.get(q) - tw
    } else {
        a.get(q) + tw
    }
}

/// Report for the first Bianchi identity (always holds for a constructed model).
pub fn check_bianchi(model: &CurvatureModel) -> IdentityReport {
    let a = model.tensor();
    IdentityReport::from_first(
        Identity::Bianchi,
        first_nonzero(a.m(), |[i, j, k, l]| {
            a.get([i, j, k, l]) + a.get([j, k, i, l]) + a.get([k, i, j, l])
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionReport {
    pub rho: SymBil,
    pub rho_star: Matrix,
    pub tau: Rational,
    pub tau_star: Rational,
}

/// Ricci, ⋆-Ricci, scalar and ⋆-scalar curvature.
///
/// Summation indices are weighted by `ε_i = g0(e_i, e_i)`. The ⋆-contractions
/// carry an extra factor `σ`, so `τ⋆ = τ` holds for Kaehler models of both
/// kinds.
pub fn contractions(model: &CurvatureModel) -> ContractionReport {
    let (a, s) = (model.tensor(), model.structure());
    let m = s.m();
    let sigma = Rational::from_integer(s.sigma().into());
    let mut rho = SymBil::zeros(m);
    let mut rho_star = Matrix::zeros(m, m);
    for x in 0..m {
        for y in 0..m {
            let mut r = Rational::zero();
            let mut rs = Rational::zero();
            for i in 0..m {
                let e = s.eps(i);
                let v = a.get([x, i, i, y]);
                let w = a.get_twisted(s, [x, i, i, y], [false, false, true, true]);
                if e == 1 {
                    r += v;
                    rs += w;
                } else {
                    r -= v;
                    rs -= w;
                }
            }
            if x <= y {
                rho.set(x, y, r);
            }
            rho_star[(x, y)] = &sigma * rs;
        }
    }
    let trace = |f: &dyn Fn(usize) -> Rational| -> Rational {
        (0..m)
            .map(|i| if s.eps(i) == 1 { f(i) } else { -f(i) })
            .sum()
    };
    let tau = trace(&|i| rho.get(i, i).clone());
    let tau_star = trace(&|i| rho_star[(i, i)].clone());

    if kaehler_report(a, s).holds {
        // J^*ρ = σρ for (para-)Kaehler tensors
        for x in 0..m {
            for y in 0..m {
                assert_eq!(
                    rho.twisted(s, x, y),
                    &sigma * rho.get(x, y),
                    "Ricci tensor of a Kaehler model must satisfy J*rho = sigma rho"
                );
            }
        }
    }
    ContractionReport {
        rho,
        rho_star,
        tau,
        tau_star,
    }
}

/// `N(∂_i, ∂_j)` at a point from the 1-jet of an almost (para-)complex structure.
///
/// `j0` is `J` at the point (column `b` is the image of `∂_b`) and `dj[k]` is
/// `∂_k J` there. Complex: `N(x,y) = [x,y] + J[Jx,y] + J[x,Jy] - [Jx,Jy]`;
/// para: `[x,y] - J[Jx,y] - J[x,Jy] + [Jx,Jy]`.
pub fn nijenhuis_at(j0: &Matrix, dj: &[Matrix], i: usize, j: usize, kind: Kind) -> Vector {
    let m = j0.rows();
    assert_eq!(dj.len(), m, "one derivative matrix per coordinate");
    // [J∂_i, ∂_j]^c = -∂_j J^c_i
    let b1: Vector = (0..m).map(|c| -dj[j][(c, i)].clone()).collect();
    // [∂_i, J∂_j]^c = ∂_i J^c_j
    let b2: Vector = (0..m).map(|c| dj[i][(c, j)].clone()).collect();
    // [J∂_i, J∂_j]^c = J^a_i ∂_a J^c_j - J^a_j ∂_a J^c_i
    let b3: Vector = (0..m)
        .map(|c| {
            let mut acc = Rational::zero();
            for a in 0..m {
                acc += &j0[(a, i)] * &dj[a][(c, j)];
                acc -= &j0[(a, j)] * &dj[a][(c, i)];
            }
            acc
        })
        .collect();
    let inner: Vector = b1.iter().zip(&b2).map(|(x, y)| x + y).collect();
    let j_inner = j0.mul_vec(&inner);
    let sigma = Rational::from_integer(kind.sigma().into());
    j_inner
        .iter()
        .zip(&b3)
        .map(|(x, y)| &sigma * (x - y))
        .collect()
}

/// Linear parametrization of tensors with `A(x,y,z,w) = -A(y,x,z,w) = A(z,w,x,y)`
/// by a symmetric matrix over index pairs `a < b`.
pub(crate) struct PairParam {
    m: usize,
    pair_index: Vec<Option<usize>>,
    npairs: usize,
}

impl PairParam {
    pub(crate) fn new(m: usize) -> Self {
        let mut pair_index = vec![None; m * m];
        let mut n = 0;
        for a in 0..m {
            for b in a + 1..m {
                pair_index[a * m + b] = Some(n);
                n += 1;
            }
        }
        Self {
            m,
            pair_index,
            npairs: n,
        }
    }

    pub(crate) fn unknowns(&self) -> usize {
        self.npairs * (self.npairs + 1) / 2
    }

    fn pair(&self, a: usize, b: usize) -> Option<(usize, i64)> {
        if a < b {
            self.pair_index[a * self.m + b].map(|p| (p, 1))
        } else if a > b {
            self.pair_index[b * self.m + a].map(|p| (p, -1))
        } else {
            None
        }
    }

    /// Unknown index and sign carried by component `A(i,j,k,l)`.
    pub(crate) fn slot(&self, [i, j, k, l]: [usize; 4]) -> Option<(usize, i64)> {
        let (p, s1) = self.pair(i, j)?;
        let (q, s2) = self.pair(k, l)?;
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        // row-major upper triangle
        let idx = lo * self.npairs - lo * (lo + 1) / 2 + hi;
        Some((idx, s1 * s2))
    }

    pub(crate) fn to_tensor(&self, x: &[Rational]) -> Tensor4 {
        Tensor4::from_fn(self.m, |q| match self.slot(q) {
            Some((idx, 1)) => x[idx].clone(),
            Some((idx, _)) => -x[idx].clone(),
            None => Rational::zero(),
        })
    }

    fn push_row(&self, rr: &mut RowReducer, terms: &[([usize; 4], i64)]) {
        let mut row = vec![Rational::zero(); self.unknowns()];
        let mut any = false;
        for (q, c) in terms {
            if let Some((idx, s)) = self.slot(*q) {
                row[idx] += Rational::from_integer((c * s).into());
                any = true;
            }
        }
        if any {
            rr.push(row);
        }
    }

    fn bianchi_rows(&self, rr: &mut RowReducer) {
        for [i, j, k, l] in quadruples(self.m) {
            // distinct i, j, k only; otherwise the identity follows from antisymmetry
            if i < j && j < k {
                self.push_row(rr, &[([i, j, k, l], 1), ([j, k, i, l], 1), ([k, i, j, l], 1)]);
            }
        }
    }

    fn kaehler_rows(&self, rr: &mut RowReducer, s: &Structure) {
        for q in quadruples(self.m) {
            let [i, j, k, l] = q;
            let (ji, si) = s.j_image(i);
            let (jj, sj) = s.j_image(j);
            // A(q) - σ A(Jx, Jy, z, w)
            let c = -s.sigma() * si * sj;
            self.push_row(rr, &[(q, 1), ([ji, jj, k, l], c)]);
        }
    }
}

type BasisCache = Mutex<HashMap<(usize, Kind, bool), Arc<Vec<Tensor4>>>>;

fn basis_cache() -> &'static BasisCache {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cached_basis(s: &Structure, kaehler: bool) -> Arc<Vec<Tensor4>> {
    let key = (s.m(), s.kind(), kaehler);
    if let Some(b) = basis_cache().lock().unwrap().get(&key) {
        return Arc::clone(b);
    }
    let param = PairParam::new(s.m());
    let mut rr = RowReducer::new(param.unknowns());
    param.bianchi_rows(&mut rr);
    if kaehler {
        param.kaehler_rows(&mut rr, s);
    }
    let basis: Vec<Tensor4> = rr.nullspace().iter().map(|x| param.to_tensor(x)).collect();
    let basis = Arc::new(basis);
    basis_cache()
        .lock()
        .unwrap()
        .insert(key, Arc::clone(&basis));
    basis
}

/// Exact basis of the algebraic curvature tensors on R^m.
pub fn curvature_space_basis(s: &Structure) -> Arc<Vec<Tensor4>> {
    cached_basis(s, false)
}

/// Exact basis of the algebraic curvature tensors satisfying the kind's Kaehler identity.
pub fn kaehler_space_basis(s: &Structure) -> Arc<Vec<Tensor4>> {
    cached_basis(s, true)
}

/// Seed-deterministic random model; Kaehler if `kaehler_only`, otherwise
/// a generic algebraic curvature tensor.
pub fn random_model(s: &Structure, seed: u64, kaehler_only: bool) -> CurvatureModel {
    let basis = if kaehler_only {
        kaehler_space_basis(s)
    } else {
        curvature_space_basis(s)
    };
    let vecs: Vec<Vector> = basis.iter().map(|t| t.as_slice().to_vec()).collect();
    let mut rng = sampling::rng(seed);
    let m = s.m();
    let x = sampling::combination(&mut rng, &vecs, m * m * m * m);
    CurvatureModel::new(s.clone(), Tensor4::from_vec(m, x)).expect("span of curvature tensors")
}

/// Orthogonal projection onto the Kaehler subspace under the ε-weighted tensor inner product.
pub fn project_to_kaehler(a: &Tensor4, s: &Structure) -> Result<Tensor4> {
    let basis = kaehler_space_basis(s);
    let vecs: Vec<Vector> = basis.iter().map(|t| t.as_slice().to_vec()).collect();
    let (_, p) = gram_project(&vecs, a.as_slice(), tensor_ip_flat(s))?;
    Ok(Tensor4::from_vec(s.m(), p))
}

/// Fails with [`Error::NotKaehler`] unless the model satisfies the Kaehler identity.
pub fn require_kaehler(model: &CurvatureModel) -> Result<()> {
    let r = check_kaehler(model);
    match r.at {
        None => Ok(()),
        Some(at) => Err(Error::NotKaehler { at }),
    }
}
