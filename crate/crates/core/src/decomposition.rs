//! Tricerri–Vanhecke splitting of (para-)Kaehler curvature tensors into the
//! three pieces `W1 ⊕ W2 ⊕ W3`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::identities::{contractions, kaehler_space_basis, require_kaehler};
use crate::linalg::{combine, gram_project, rref, solve_linear, Matrix, Vector};
use crate::rational::{int, rat};
use crate::structure::{
    kind_eigenspace_basis, tensor_ip_flat, CurvatureModel, Kind, Structure, SymBil, Tensor4,
};
use crate::Rational;

/// `p1 + p2 + p3 = A` with `p_i ∈ W_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TVSplit {
    pub p1: Tensor4,
    pub p2: Tensor4,
    pub p3: Tensor4,
}

impl TVSplit {
    pub fn parts(&self) -> [&Tensor4; 3] {
        [&self.p1, &self.p2, &self.p3]
    }
}

fn ip(s: &Structure, a: usize, b: usize) -> Rational {
    int(s.ip(a, b))
}

fn om(s: &Structure, a: usize, b: usize) -> Rational {
    int(s.omega(a, b))
}

/// `θ(J e_a, e_b)`.
fn theta_j(theta: &SymBil, s: &Structure, a: usize, b: usize) -> Rational {
    let (t, sg) = s.j_image(a);
    let v = theta.get(t, b);
    if sg == 1 {
        v.clone()
    } else {
        -v.clone()
    }
}

/// `π1(x,y,z,w) = ⟨x,w⟩⟨y,z⟩ - ⟨x,z⟩⟨y,w⟩`.
pub fn pi1(s: &Structure) -> Tensor4 {
    Tensor4::from_fn(s.m(), |[x, y, z, w]| {
        ip(s, x, w) * ip(s, y, z) - ip(s, x, z) * ip(s, y, w)
    })
}

/// `π2(x,y,z,w) = ⟨Jx,w⟩⟨Jy,z⟩ - ⟨Jx,z⟩⟨Jy,w⟩ - 2⟨Jx,y⟩⟨Jz,w⟩`.
pub fn pi2(s: &Structure) -> Tensor4 {
    Tensor4::from_fn(s.m(), |[x, y, z, w]| {
        om(s, x, w) * om(s, y, z) - om(s, x, z) * om(s, y, w) - int(2) * om(s, x, y) * om(s, z, w)
    })
}

fn require_eigen(theta: &SymBil, s: &Structure) -> Result<()> {
    if theta.m() != s.m() {
        return Err(Error::DimensionMismatch {
            expected: s.m(),
            found: theta.m(),
        });
    }
    if !theta.in_kind_eigenspace(s) {
        return Err(Error::BadThetaSymmetry);
    }
    Ok(())
}

/// `φ(θ)(x,y,z,w) = ⟨x,w⟩θ(y,z) - ⟨x,z⟩θ(y,w) + θ(x,w)⟨y,z⟩ - θ(x,z)⟨y,w⟩`.
pub fn phi(theta: &SymBil, s: &Structure) -> Result<Tensor4> {
    require_eigen(theta, s)?;
    Ok(Tensor4::from_fn(s.m(), |[x, y, z, w]| {
        ip(s, x, w) * theta.get(y, z) - ip(s, x, z) * theta.get(y, w)
            + theta.get(x, w) * ip(s, y, z)
            - theta.get(x, z) * ip(s, y, w)
    }))
}

/// `ψ(θ)`: the `J`-twisted companion of `φ(θ)`.
pub fn psi(theta: &SymBil, s: &Structure) -> Result<Tensor4> {
    require_eigen(theta, s)?;
    let two = int(2);
    Ok(Tensor4::from_fn(s.m(), |[x, y, z, w]| {
        om(s, x, w) * theta_j(theta, s, y, z) - om(s, x, z) * theta_j(theta, s, y, w)
            - &two * om(s, x, y) * theta_j(theta, s, z, w)
            + theta_j(theta, s, x, w) * om(s, y, z)
            - theta_j(theta, s, x, z) * om(s, y, w)
            - &two * theta_j(theta, s, x, y) * om(s, z, w)
    }))
}

/// Closed-form projections of a complex Kaehler model:
/// `p1 = τ/(4m̄(m̄+1)) (π1+π2)`, `p2 = 1/(4(m̄+2)) (φ+ψ)(2ρ - (τ/m̄)⟨·,·⟩)`,
/// `p3 = A - p1 - p2`.
pub fn tv_project_closed_form(model: &CurvatureModel) -> Result<TVSplit> {
    let s = model.structure();
    if s.kind() != Kind::Complex {
        return Err(Error::WrongKind);
    }
    require_kaehler(model)?;
    let mbar = s.mbar() as i64;
    let c = contractions(model);
    let a = model.tensor();

    let p1 = pi1(s)
        .add(&pi2(s))
        .scale(&(&c.tau * rat(1, 4 * mbar * (mbar + 1))));

    let g = SymBil::inner_product(s);
    let theta = c.rho.scale(&int(2)).add(&g.scale(&-(&c.tau / int(mbar))));
    let p2 = phi(&theta, s)?
        .add(&psi(&theta, s)?)
        .scale(&rat(1, 4 * (mbar + 2)));
    let p3 = a.sub(&p1).sub(&p2);
    Ok(TVSplit { p1, p2, p3 })
}

/// Bases of `W1`, `W2`, `W3` inside the (para-)Kaehler space, mutually
/// orthogonal under the ε-weighted tensor inner product.
#[derive(Debug, Clone)]
pub struct TvSubspaces {
    pub w1: Vec<Tensor4>,
    pub w2: Vec<Tensor4>,
    pub w3: Vec<Tensor4>,
}

/// Basis of the span of `vectors` (nonzero rows of the echelon form).
fn span_basis(vectors: &[Vector], len: usize) -> Vec<Vector> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (r, _, k) = rref(&Matrix::from_rows(vectors.to_vec()));
    debug_assert!(r.cols() == len);
    (0..k).map(|i| r.row(i).to_vec()).collect()
}

/// Removes from each vector its component along `span(onto)`.
fn orthogonal_complement_part(
    s: &Structure,
    vectors: &[Vector],
    onto: &[Vector],
) -> Result<Vec<Vector>> {
    let f = tensor_ip_flat(s);
    vectors
        .iter()
        .map(|v| {
            let (_, p) = gram_project(onto, v, &f)?;
            Ok(v.iter().zip(&p).map(|(a, b)| a - b).collect())
        })
        .collect()
}

impl TvSubspaces {
    pub fn new(s: &Structure) -> Result<Self> {
        let m = s.m();
        let len = m * m * m * m;
        let f = tensor_ip_flat(s);
        let kaehler: Vec<Vector> = kaehler_space_basis(s)
            .iter()
            .map(|t| t.as_slice().to_vec())
            .collect();
        let to_k = |t: &Tensor4| -> Result<Vector> { Ok(gram_project(&kaehler, t.as_slice(), &f)?.1) };

        let w1_raw = vec![to_k(&pi1(s))?, to_k(&pi2(s))?];
        let w1 = span_basis(&w1_raw, len);

        let mut w12_raw = w1.clone();
        for theta in kind_eigenspace_basis(s) {
            w12_raw.push(to_k(&phi(&theta, s)?)?);
            w12_raw.push(to_k(&psi(&theta, s)?)?);
        }
        let w12 = span_basis(&w12_raw, len);
        let w2 = span_basis(&orthogonal_complement_part(s, &w12, &w1)?, len);
        let w12 = [w1.clone(), w2.clone()].concat();
        let w3 = span_basis(&orthogonal_complement_part(s, &kaehler, &w12)?, len);

        let to_t = |v: Vec<Vector>| v.into_iter().map(|x| Tensor4::from_vec(m, x)).collect();
        Ok(Self {
            w1: to_t(w1),
            w2: to_t(w2),
            w3: to_t(w3),
        })
    }

    /// Cached per `(m, kind)`.
    pub fn for_structure(s: &Structure) -> Result<Arc<Self>> {
        type Cache = Mutex<HashMap<(usize, Kind), Arc<TvSubspaces>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (s.m(), s.kind());
        if let Some(v) = cache.lock().unwrap().get(&key) {
            return Ok(Arc::clone(v));
        }
        let v = Arc::new(Self::new(s)?);
        cache.lock().unwrap().insert(key, Arc::clone(&v));
        Ok(v)
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.w1.len(), self.w2.len(), self.w3.len()]
    }

    /// Splits a tensor of the Kaehler space along `W1 ⊕ W2 ⊕ W3`.
    pub fn split(&self, a: &Tensor4) -> Result<TVSplit> {
        let m = a.m();
        let len = m * m * m * m;
        let all: Vec<Vector> = self
            .w1
            .iter()
            .chain(&self.w2)
            .chain(&self.w3)
            .map(|t| t.as_slice().to_vec())
            .collect();
        let mat = Matrix::from_columns(len, &all);
        let coeffs = solve_linear(&mat, a.as_slice())
            .ok_or_else(|| Error::NoSolution("tensor outside the Kaehler space".into()))?;
        let [d1, d2, _] = self.dims();
        let part = |lo: usize, hi: usize| {
            Tensor4::from_vec(m, combine(&all[lo..hi], &coeffs[lo..hi], len))
        };
        Ok(TVSplit {
            p1: part(0, d1),
            p2: part(d1, d1 + d2),
            p3: part(d1 + d2, all.len()),
        })
    }
}

/// Gram-based projections, valid for both kinds.
pub fn tv_project_gram(model: &CurvatureModel) -> Result<TVSplit> {
    require_kaehler(model)?;
    TvSubspaces::for_structure(model.structure())?.split(model.tensor())
}

/// `⟨p_i A, p_i A⟩` for each part.
pub fn split_norms(split: &TVSplit, s: &Structure) -> [Rational; 3] {
    let f = tensor_ip_flat(s);
    split.parts().map(|p| f(p.as_slice(), p.as_slice()))
}

pub fn is_zero_split(split: &TVSplit) -> [bool; 3] {
    split.parts().map(|p| p.as_slice().iter().all(Zero::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::{check_kaehler, random_model};
    use crate::structure::{model_from_components, tensor_ip};

    fn complex(m: usize) -> Structure {
        Structure::standard(m, Kind::Complex).unwrap()
    }

    fn para(m: usize) -> Structure {
        Structure::standard(m, Kind::Para).unwrap()
    }

    fn surface_model(s: &Structure) -> CurvatureModel {
        model_from_components(s, &[([1, 2, 2, 1], int(1))]).unwrap()
    }

    const Q3443: [usize; 4] = [2, 3, 3, 2];

    #[test]
    fn building_block_values() {
        let s = complex(4);
        assert_eq!(*pi1(&s).get(Q3443), int(1));
        assert_eq!(*pi2(&s).get(Q3443), int(3));
        let g = SymBil::inner_product(&s);
        assert_eq!(*phi(&g, &s).unwrap().get(Q3443), int(2));
        assert_eq!(*psi(&g, &s).unwrap().get(Q3443), int(6));
        let rho = contractions(&surface_model(&s)).rho;
        assert_eq!(*phi(&rho, &s).unwrap().get(Q3443), int(0));
        assert_eq!(*psi(&rho, &s).unwrap().get(Q3443), int(0));
        assert!(phi(&SymBil::zeros(4), &s).unwrap().is_zero());
        for q in crate::structure::quadruples(4).filter(|q| q[0] == q[1]) {
            assert!(pi1(&s).get(q).is_zero());
        }
    }

    #[test]
    fn building_blocks_are_curvature_tensors() {
        for s in [complex(4), para(4), complex(6), para(6)] {
            assert!(CurvatureModel::new(s.clone(), pi1(&s)).is_ok());
            assert!(CurvatureModel::new(s.clone(), pi2(&s)).is_ok());
            for theta in kind_eigenspace_basis(&s) {
                assert!(CurvatureModel::new(s.clone(), phi(&theta, &s).unwrap()).is_ok());
                assert!(CurvatureModel::new(s.clone(), psi(&theta, &s).unwrap()).is_ok());
            }
        }
    }

    #[test]
    fn bad_theta_rejected() {
        let s = complex(4);
        let bad = crate::structure::elementary_sym(4, 0, 0);
        assert_eq!(phi(&bad, &s), Err(Error::BadThetaSymmetry));
        assert_eq!(psi(&bad, &s), Err(Error::BadThetaSymmetry));
    }

    #[test]
    fn closed_form_surface_values() {
        let s = complex(4);
        let split = tv_project_closed_form(&surface_model(&s)).unwrap();
        assert_eq!(*split.p1.get(Q3443), rat(1, 3));
        assert_eq!(*split.p2.get(Q3443), rat(-1, 2));
        assert_eq!(*split.p3.get(Q3443), rat(1, 6));
        // the printed intermediate -(2(m̄+2) - 4(m̄+1)) / (m̄(m̄+1)(m̄+2)) at m̄ = 2
        assert_eq!(*split.p3.get(Q3443), rat(-(2 * 4 - 4 * 3), 2 * 3 * 4));
    }

    #[test]
    fn closed_form_errors() {
        assert_eq!(tv_project_closed_form(&surface_model(&para(4))), Err(Error::WrongKind));
        let s = complex(4);
        let bad = model_from_components(&s, &[([1, 3, 3, 1], int(1))]).unwrap();
        assert!(matches!(tv_project_closed_form(&bad), Err(Error::NotKaehler { .. })));
        assert!(matches!(tv_project_gram(&bad), Err(Error::NotKaehler { .. })));
    }

    #[test]
    fn subspace_dimensions() {
        assert_eq!(TvSubspaces::for_structure(&complex(4)).unwrap().dims(), [1, 3, 5]);
        assert_eq!(TvSubspaces::for_structure(&para(4)).unwrap().dims(), [1, 3, 5]);
        assert_eq!(TvSubspaces::for_structure(&complex(6)).unwrap().dims(), [1, 8, 27]);
    }

    #[test]
    fn gram_matches_closed_form_on_surface() {
        let s = complex(4);
        let m = surface_model(&s);
        assert_eq!(tv_project_gram(&m).unwrap(), tv_project_closed_form(&m).unwrap());
    }

    #[test]
    fn parts_are_orthogonal_kaehler_and_trace_separated() {
        for s in [complex(4), para(4)] {
            for seed in 0..4 {
                let model = random_model(&s, seed, true);
                let split = tv_project_gram(&model).unwrap();
                assert_eq!(split.p1.add(&split.p2).add(&split.p3), *model.tensor());
                let parts = split.parts();
                for i in 0..3 {
                    let pm = CurvatureModel::new(s.clone(), parts[i].clone()).unwrap();
                    assert!(check_kaehler(&pm).holds);
                    for j in i + 1..3 {
                        assert!(tensor_ip(parts[i], parts[j], &s).is_zero());
                    }
                }
                let tau = |t: &Tensor4| contractions(&CurvatureModel::new(s.clone(), t.clone()).unwrap()).tau;
                assert_eq!(tau(&split.p1), contractions(&model).tau);
                assert!(tau(&split.p2).is_zero());
                assert!(tau(&split.p3).is_zero());
            }
        }
    }

    #[test]
    fn gram_projection_idempotent() {
        for s in [complex(4), para(4)] {
            let model = random_model(&s, 9, true);
            let split = tv_project_gram(&model).unwrap();
            for (slot, part) in split.parts().into_iter().enumerate() {
                let again = tv_project_gram(&CurvatureModel::new(s.clone(), part.clone()).unwrap()).unwrap();
                for (k, p) in again.parts().into_iter().enumerate() {
                    if k == slot {
                        assert_eq!(p, part);
                    } else {
                        assert!(p.is_zero());
                    }
                }
            }
        }
    }
}
