//! Polynomial metrics `g_ij = g0_ij + Θ_ijkl u^k u^l`, the linearized Kaehler
//! constraint `K`, the origin-curvature map `L`, and realization of
//! (para-)Kaehler models by solving `L(Θ) = A` on `ker K`.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::identities::require_kaehler;
use crate::linalg::{solve_linear, Matrix, RowReducer, Vector};
use crate::poly::{Monomial, Poly};
use crate::rational::rat;
use crate::structure::{
    elementary_sym, kind_eigenspace_basis, CurvatureModel, Kind, Structure, SymBil, Tensor4,
    ThetaTensor,
};
use crate::Rational;

/// Symmetric matrix of polynomials in `u_1..u_m` whose value at the origin is `g0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialMetric {
    structure: Structure,
    entries: Vec<Poly>,
}

impl PolynomialMetric {
    /// Validates shape, symmetry and `g(0) = g0`.
    pub fn new(structure: Structure, entries: Vec<Poly>) -> Result<Self> {
        let m = structure.m();
        if entries.len() != m * m {
            return Err(Error::BadMetric(format!(
                "expected {} entries, got {}",
                m * m,
                entries.len()
            )));
        }
        let g0 = structure.g0();
        for i in 0..m {
            for j in 0..m {
                let e = &entries[i * m + j];
                if e.nvars() != m {
                    return Err(Error::BadMetric(format!("entry ({}, {}) has wrong variable count", i + 1, j + 1)));
                }
                if *e != entries[j * m + i] {
                    return Err(Error::BadMetric(format!("not symmetric at ({}, {})", i + 1, j + 1)));
                }
                if e.constant_term() != g0[(i, j)] {
                    return Err(Error::BadMetric(format!(
                        "value at the origin differs from g0 at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { structure, entries })
    }

    pub fn flat(structure: &Structure) -> Self {
        let m = structure.m();
        let g0 = structure.g0();
        let entries = (0..m * m)
            .map(|k| Poly::constant(m, g0[(k / m, k % m)].clone()))
            .collect();
        Self {
            structure: structure.clone(),
            entries,
        }
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn m(&self) -> usize {
        self.structure.m()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.m() + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn eval(&self, p: &[Rational]) -> Matrix {
        let m = self.m();
        Matrix::from_fn(m, m, |i, j| self.entry(i, j).eval(p))
    }

    /// `g + k` for a symmetric polynomial form `k` vanishing at the origin.
    pub fn add_form(&self, k: &[Poly]) -> Result<Self> {
        if k.len() != self.entries.len() {
            return Err(Error::BadMetric("form has wrong shape".into()));
        }
        let entries = self.entries.iter().zip(k).map(|(a, b)| a.add(b)).collect();
        Self::new(self.structure.clone(), entries)
    }

    /// Entries truncated to total degree `d`.
    pub fn truncate(&self, d: u32) -> Self {
        Self {
            structure: self.structure.clone(),
            entries: self.entries.iter().map(|e| e.truncate(d)).collect(),
        }
    }

    pub fn degree(&self) -> u32 {
        self.entries.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }
}

/// `g_ij = g0_ij + Σ_kl Θ_ijkl u_k u_l`.
pub fn metric_from_theta(theta: &ThetaTensor) -> PolynomialMetric {
    let s = theta.structure();
    let m = s.m();
    let mut metric = PolynomialMetric::flat(s);
    for i in 0..m {
        for j in 0..m {
            let e = &mut metric.entries[i * m + j];
            for k in 0..m {
                for l in 0..m {
                    let c = theta.get([i, j, k, l]);
                    if !c.is_zero() {
                        let mono = Monomial::var(k).mul(&Monomial::var(l));
                        e.add_term(mono, c.clone());
                    }
                }
            }
        }
    }
    metric
}

/// `½ θ ⊗ θ` with `θ = e¹⊗e¹ + σ e²⊗e²`: the surface-product example, whose
/// metric is `g0 + ½(u₁² + σu₂²)(du₁² + σdu₂²)`.
pub fn surface_product_theta(s: &Structure) -> ThetaTensor {
    let m = s.m();
    let mut theta = SymBil::zeros(m);
    theta.set(0, 0, Rational::one());
    theta.set(1, 1, Rational::from_integer(s.sigma().into()));
    let half = theta.scale(&rat(1, 2));
    ThetaTensor::from_product(s, &half, &theta).expect("θ lies in the kind's eigenspace")
}

/// Basis `θ_a ⊗ (e^k e^l)` of the constrained Θ-space, `θ_a` running over the
/// kind's eigenspace and `k ≤ l`.
pub fn theta_basis(s: &Structure) -> Vec<ThetaTensor> {
    let m = s.m();
    let eig = kind_eigenspace_basis(s);
    let mut out = Vec::with_capacity(eig.len() * m * (m + 1) / 2);
    for theta in &eig {
        for k in 0..m {
            for l in k..m {
                let t = ThetaTensor::from_product(s, theta, &elementary_sym(m, k, l))
                    .expect("eigenspace basis element");
                out.push(t);
            }
        }
    }
    out
}

/// `Θ(x, Jy, z, w)` on basis vectors.
fn theta_j2(theta: &ThetaTensor, x: usize, y: usize, z: usize, w: usize) -> Rational {
    let (t, sg) = theta.structure().j_image(y);
    let v = theta.get([x, t, z, w]);
    if sg == 1 {
        v.clone()
    } else {
        -v.clone()
    }
}

/// `K(Θ)(x,y,z,w) = Θ(x,Jy,z,w) + Θ(y,Jz,x,w) + Θ(z,Jx,y,w)`.
#[allow(non_snake_case)]
pub fn apply_K(theta: &ThetaTensor) -> Tensor4 {
    Tensor4::from_fn(theta.structure().m(), |[x, y, z, w]| {
        theta_j2(theta, x, y, z, w) + theta_j2(theta, y, z, x, w) + theta_j2(theta, z, x, y, w)
    })
}

/// `L(Θ)(x,y,z,w) = Θ(x,z,y,w) + Θ(y,w,x,z) - Θ(x,w,y,z) - Θ(y,z,x,w)`.
#[allow(non_snake_case)]
pub fn L(theta: &ThetaTensor) -> Tensor4 {
    Tensor4::from_fn(theta.structure().m(), |[x, y, z, w]| {
        theta.get([x, z, y, w]) + theta.get([y, w, x, z])
            - theta.get([x, w, y, z])
            - theta.get([y, z, x, w])
    })
}

/// Seed-deterministic random element of the constrained Θ-space.
pub fn random_theta(s: &Structure, seed: u64) -> ThetaTensor {
    let basis = theta_basis(s);
    let coeffs: Vec<Rational> = {
        let mut rng = crate::sampling::rng(seed);
        basis.iter().map(|_| crate::sampling::small_rational(&mut rng)).collect()
    };
    ThetaTensor::combination(s, &basis, &coeffs)
}

/// Kernel of `K` within the constrained Θ-space.
#[allow(non_snake_case)]
pub fn K_kernel_basis(s: &Structure) -> Vec<ThetaTensor> {
    Realizer::for_structure(s).kernel().to_vec()
}

/// Coordinates of `theta` in [`theta_basis`], if it lies in that span.
pub fn theta_coordinates(theta: &ThetaTensor) -> Option<Vector> {
    let s = theta.structure();
    let m = s.m();
    let cols: Vec<Vector> = theta_basis(s)
        .iter()
        .map(|b| b.tensor().as_slice().to_vec())
        .collect();
    solve_linear(&Matrix::from_columns(m * m * m * m, &cols), theta.tensor().as_slice())
}

/// Row-space basis of the matrix whose columns are `columns`, by distinct
/// nonzero rows fed through an incremental reducer.
fn independent_rows(columns: &[Vec<Rational>], nrows: usize) -> (RowReducer, Vec<usize>) {
    let mut rr = RowReducer::new(columns.len());
    let mut seen: HashSet<Vec<Rational>> = HashSet::new();
    let mut picked = Vec::new();
    for r in 0..nrows {
        let row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
        if row.iter().all(Zero::is_zero) || !seen.insert(row.clone()) {
            continue;
        }
        if rr.push(row) {
            picked.push(r);
        }
    }
    (rr, picked)
}

/// Per-structure data for realization: `ker K` and a square-enough slice of `L` on it.
#[derive(Debug)]
pub struct Realizer {
    structure: Structure,
    kernel: Vec<ThetaTensor>,
    l_columns: Vec<Vec<Rational>>,
    rows: Vec<usize>,
    reduced: Matrix,
}

impl Realizer {
    pub fn new(s: &Structure) -> Self {
        let m = s.m();
        let n4 = m * m * m * m;
        let basis = theta_basis(s);
        let k_cols: Vec<Vec<Rational>> = basis.iter().map(|b| apply_K(b).into_vec()).collect();
        let (rr, _) = independent_rows(&k_cols, n4);
        let kernel: Vec<ThetaTensor> = rr
            .nullspace()
            .iter()
            .map(|x| ThetaTensor::combination(s, &basis, x))
            .collect();
        let l_columns: Vec<Vec<Rational>> = kernel.iter().map(|t| L(t).into_vec()).collect();
        let (_, rows) = independent_rows(&l_columns, n4);
        let reduced = Matrix::from_fn(rows.len(), kernel.len(), |i, j| l_columns[j][rows[i]].clone());
        Self {
            structure: s.clone(),
            kernel,
            l_columns,
            rows,
            reduced,
        }
    }

    /// Shared instance per `(m, kind)`.
    pub fn for_structure(s: &Structure) -> Arc<Self> {
        type Cache = Mutex<HashMap<(usize, Kind), Arc<Realizer>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (s.m(), s.kind());
        if let Some(r) = cache.lock().unwrap().get(&key) {
            return Arc::clone(r);
        }
        let r = Arc::new(Self::new(s));
        cache.lock().unwrap().insert(key, Arc::clone(&r));
        r
    }

    pub fn kernel(&self) -> &[ThetaTensor] {
        &self.kernel
    }

    /// Rank of `L` restricted to `ker K`.
    pub fn l_rank(&self) -> usize {
        self.rows.len()
    }

    /// `Θ ∈ ker K` with `L(Θ) = A`; free coordinates are zeroed.
    pub fn realize(&self, model: &CurvatureModel) -> Result<ThetaTensor> {
        if model.structure() != &self.structure {
            return Err(Error::DimensionMismatch {
                expected: self.structure.m(),
                found: model.structure().m(),
            });
        }
        require_kaehler(model)?;
        let a = model.tensor().as_slice();
        let rhs: Vector = self.rows.iter().map(|&r| a[r].clone()).collect();
        let x = solve_linear(&self.reduced, &rhs)
            .ok_or_else(|| Error::NoSolution("L restricted to ker K".into()))?;
        let theta = ThetaTensor::combination(&self.structure, &self.kernel, &x);
        let n4 = a.len();
        for r in 0..n4 {
            let v: Rational = self
                .l_columns
                .iter()
                .zip(&x)
                .filter(|(_, c)| !c.is_zero())
                .map(|(col, c)| &col[r] * c)
                .sum();
            if v != a[r] {
                return Err(Error::NoSolution("A is outside the image of L".into()));
            }
        }
        Ok(theta)
    }
}

/// Realizes a (para-)Kaehler model: returns `Θ ∈ ker K` with `L(Θ) = A`.
pub fn realize(model: &CurvatureModel) -> Result<ThetaTensor> {
    Realizer::for_structure(model.structure()).realize(model)
}
