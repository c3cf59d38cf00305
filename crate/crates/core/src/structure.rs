//! Flat (para-)Hermitian structures on R^m and the tensors living on them.
//!
//! Internally every index is 0-based. File formats and error values use
//! 1-based indices.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Complex,
    Para,
}

impl Kind {
    /// `+1` for complex, `-1` for para.
    pub fn sigma(self) -> i64 {
        match self {
            Kind::Complex => 1,
            Kind::Para => -1,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Complex => "complex",
            Kind::Para => "para",
        })
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complex" => Ok(Kind::Complex),
            "para" => Ok(Kind::Para),
            other => Err(Error::Parse(format!("unknown kind `{other}`"))),
        }
    }
}

/// The canonical flat structure `(R^m, g0, J)`.
///
/// `J e_{2k+1} = e_{2k+2}` and `J e_{2k+2} = -σ e_{2k+1}` (1-based), so
/// `J^2 = -σ id`. The inner product is the identity for the complex kind and
/// `diag(-1, 1, -1, 1, ...)` for the para kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    m: usize,
    kind: Kind,
    j: Matrix,
    // J e_i = jsign[i] * e_{jperm[i]}
    jperm: Vec<usize>,
    jsign: Vec<i64>,
    eps: Vec<i64>,
}

pub fn standard_structure(m: usize, kind: Kind) -> Result<Structure> {
    Structure::standard(m, kind)
}

impl Structure {
    pub fn standard(m: usize, kind: Kind) -> Result<Self> {
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::BadDimension(m));
        }
        let mut jperm = vec![0; m];
        let mut jsign = vec![0; m];
        for k in 0..m / 2 {
            let (a, b) = (2 * k, 2 * k + 1);
            jperm[a] = b;
            jsign[a] = 1;
            jperm[b] = a;
            jsign[b] = -kind.sigma();
        }
        let mut j = Matrix::zeros(m, m);
        for i in 0..m {
            // column i holds the image of e_i
            j[(jperm[i], i)] = Rational::from_integer(jsign[i].into());
        }
        let eps = (0..m)
            .map(|i| match kind {
                Kind::Complex => 1,
                Kind::Para if i % 2 == 0 => -1,
                Kind::Para => 1,
            })
            .collect();
        Ok(Self {
            m,
            kind,
            j,
            jperm,
            jsign,
            eps,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mbar(&self) -> usize {
        self.m / 2
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn sigma(&self) -> i64 {
        self.kind.sigma()
    }

    /// Matrix of `J` acting on column vectors.
    pub fn j(&self) -> &Matrix {
        &self.j
    }

    /// `J e_i = sign * e_target`, returned as `(target, sign)`.
    pub fn j_image(&self, i: usize) -> (usize, i64) {
        (self.jperm[i], self.jsign[i])
    }

    /// `g0(e_i, e_i)`.
    pub fn eps(&self, i: usize) -> i64 {
        self.eps[i]
    }

    pub fn g0(&self) -> Matrix {
        Matrix::from_fn(self.m, self.m, |i, j| {
            if i == j {
                Rational::from_integer(self.eps[i].into())
            } else {
                Rational::zero()
            }
        })
    }

    /// `g0(x, y)` on basis vectors.
    pub fn ip(&self, i: usize, j: usize) -> i64 {
        if i == j {
            self.eps[i]
        } else {
            0
        }
    }

    /// `g0(J e_i, e_j)`.
    pub fn omega(&self, i: usize, j: usize) -> i64 {
        let (t, s) = self.j_image(i);
        s * self.ip(t, j)
    }
}

fn check_index(i: usize, m: usize) -> Result<usize> {
    if i == 0 || i > m {
        Err(Error::IndexOutOfRange { index: i, m })
    } else {
        Ok(i - 1)
    }
}

/// Converts a 1-based quadruple into 0-based indices.
pub fn zero_based(q: [usize; 4], m: usize) -> Result<[usize; 4]> {
    Ok([
        check_index(q[0], m)?,
        check_index(q[1], m)?,
        check_index(q[2], m)?,
        check_index(q[3], m)?,
    ])
}

pub fn one_based(q: [usize; 4]) -> [usize; 4] {
    [q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1]
}

/// Iterates every index quadruple of `0..m` in lexicographic order.
pub fn quadruples(m: usize) -> impl Iterator<Item = [usize; 4]> {
    (0..m * m * m * m).map(move |n| [n / (m * m * m), (n / (m * m)) % m, (n / m) % m, n % m])
}

/// Dense rank-4 covariant tensor on R^m.
#[derive(Clone, PartialEq, Eq)]
pub struct Tensor4 {
    m: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Tensor4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nz: Vec<String> = quadruples(self.m)
            .filter(|q| !self.get(*q).is_zero())
            .map(|q| format!("{:?}={}", one_based(q), self.get(q)))
            .collect();
        write!(f, "Tensor4(m={}, {{{}}})", self.m, nz.join(", "))
    }
}

impl Tensor4 {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            data: vec![Rational::zero(); m * m * m * m],
        }
    }

    pub fn from_fn(m: usize, mut f: impl FnMut([usize; 4]) -> Rational) -> Self {
        Self {
            m,
            data: quadruples(m).map(&mut f).collect(),
        }
    }

    /// Builds a tensor from its flattened (row-major) components.
    pub fn from_vec(m: usize, data: Vec<Rational>) -> Self {
        assert_eq!(data.len(), m * m * m * m);
        Self { m, data }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Rational> {
        self.data
    }

    fn offset(&self, [i, j, k, l]: [usize; 4]) -> usize {
        ((i * self.m + j) * self.m + k) * self.m + l
    }

    pub fn get(&self, q: [usize; 4]) -> &Rational {
        &self.data[self.offset(q)]
    }

    pub fn set(&mut self, q: [usize; 4], v: Rational) {
        let o = self.offset(q);
        self.data[o] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Tensor4) -> Tensor4 {
        assert_eq!(self.m, other.m);
        Tensor4 {
            m: self.m,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor4) -> Tensor4 {
        assert_eq!(self.m, other.m);
        Tensor4 {
            m: self.m,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Tensor4 {
        Tensor4 {
            m: self.m,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// Evaluates the tensor with `J` applied in the slots flagged by `mask`.
    ///
    /// `T(J^{mask0} e_i, J^{mask1} e_j, ...)` for the given structure.
    pub fn get_twisted(&self, s: &Structure, q: [usize; 4], mask: [bool; 4]) -> Rational {
        let mut idx = q;
        let mut sign = 1i64;
        for slot in 0..4 {
            if mask[slot] {
                let (t, sg) = s.j_image(q[slot]);
                idx[slot] = t;
                sign *= sg;
            }
        }
        let v = self.get(idx);
        if sign == 1 {
            v.clone()
        } else {
            -v.clone()
        }
    }

    /// Pullback `(T^* A)(x, y, z, w) = A(Tx, Ty, Tz, Tw)` by a linear map.
    pub fn pullback(&self, t: &Matrix) -> Tensor4 {
        let m = self.m;
        assert_eq!((t.rows(), t.cols()), (m, m));
        // contract one slot at a time
        let mut cur = self.clone();
        for slot in 0..4 {
            cur = Tensor4::from_fn(m, |q| {
                let mut acc = Rational::zero();
                for a in 0..m {
                    let c = &t[(a, q[slot])];
                    if c.is_zero() {
                        continue;
                    }
                    let mut idx = q;
                    idx[slot] = a;
                    acc += c * cur.get(idx);
                }
                acc
            });
        }
        cur
    }
}

/// Symmetric bilinear form on R^m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymBil {
    m: usize,
    data: Vec<Rational>,
}

impl SymBil {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            data: vec![Rational::zero(); m * m],
        }
    }

    /// Builds a form from a matrix; fails unless the matrix is symmetric.
    pub fn from_matrix(a: &Matrix) -> Result<Self> {
        let m = a.rows();
        if a.cols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: a.cols(),
            });
        }
        for i in 0..m {
            for j in 0..i {
                if a[(i, j)] != a[(j, i)] {
                    return Err(Error::Parse(format!(
                        "form is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self {
            m,
            data: (0..m * m).map(|n| a[(n / m, n % m)].clone()).collect(),
        })
    }

    /// The structure's inner product `g0`.
    pub fn inner_product(s: &Structure) -> Self {
        Self::from_matrix(&s.g0()).expect("diagonal")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.m + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.m + j] = v.clone();
        self.data[j * self.m + i] = v;
    }

    pub fn add(&self, other: &SymBil) -> SymBil {
        SymBil {
            m: self.m,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> SymBil {
        SymBil {
            m: self.m,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.m, self.m, |i, j| self.get(i, j).clone())
    }

    /// `θ(J e_i, J e_j)`.
    pub fn twisted(&self, s: &Structure, i: usize, j: usize) -> Rational {
        let (a, sa) = s.j_image(i);
        let (b, sb) = s.j_image(j);
        let v = self.get(a, b);
        if sa * sb == 1 {
            v.clone()
        } else {
            -v.clone()
        }
    }

    /// Whether `J^*θ = σθ` for the structure's kind.
    pub fn in_kind_eigenspace(&self, s: &Structure) -> bool {
        let sigma = Rational::from_integer(s.sigma().into());
        (0..self.m).all(|i| (0..self.m).all(|j| self.twisted(s, i, j) == &sigma * self.get(i, j)))
    }
}

/// The eight index permutations generated by `A(x,y,z,w) = -A(y,x,z,w) = A(z,w,x,y)`,
/// with the sign each one introduces.
pub fn curvature_orbit([i, j, k, l]: [usize; 4]) -> [([usize; 4], i64); 8] {
    [
        ([i, j, k, l], 1),
        ([j, i, k, l], -1),
        ([i, j, l, k], -1),
        ([j, i, l, k], 1),
        ([k, l, i, j], 1),
        ([l, k, i, j], -1),
        ([k, l, j, i], -1),
        ([l, k, j, i], 1),
    ]
}

/// First offending quadruple (0-based) of the antisymmetry / pair symmetry identities.
pub fn first_symmetry_violation(a: &Tensor4) -> Option<[usize; 4]> {
    quadruples(a.m()).find(|&q| {
        let v = a.get(q);
        let [i, j, k, l] = q;
        *a.get([j, i, k, l]) != -v.clone() || a.get([k, l, i, j]) != v
    })
}

/// First offending quadruple (0-based) of the first Bianchi identity, with the cyclic sum.
pub fn first_bianchi_violation(a: &Tensor4) -> Option<([usize; 4], Rational)> {
    quadruples(a.m()).find_map(|[i, j, k, l]| {
        let s = a.get([i, j, k, l]) + a.get([j, k, i, l]) + a.get([k, i, j, l]);
        (!s.is_zero()).then_some(([i, j, k, l], s))
    })
}

/// A structure together with an algebraic curvature tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvatureModel {
    structure: Structure,
    a: Tensor4,
}

impl CurvatureModel {
    /// Validates every curvature symmetry component-wise.
    pub fn new(structure: Structure, a: Tensor4) -> Result<Self> {
        if a.m() != structure.m() {
            return Err(Error::DimensionMismatch {
                expected: structure.m(),
                found: a.m(),
            });
        }
        if let Some(q) = first_symmetry_violation(&a) {
            let [i, j, k, l] = q;
            return Err(Error::SymmetryConflict {
                at: one_based(q),
                existing: a.get(q).clone(),
                requested: if *a.get([j, i, k, l]) != -a.get(q).clone() {
                    -a.get([j, i, k, l]).clone()
                } else {
                    a.get([k, l, i, j]).clone()
                },
            });
        }
        if let Some((q, value)) = first_bianchi_violation(&a) {
            return Err(Error::BianchiViolation {
                at: one_based(q),
                value,
            });
        }
        Ok(Self { structure, a })
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn tensor(&self) -> &Tensor4 {
        &self.a
    }

    pub fn into_tensor(self) -> Tensor4 {
        self.a
    }
}

/// Completes sparse 1-based components by the curvature symmetries and validates.
pub fn model_from_components(
    s: &Structure,
    entries: &[([usize; 4], Rational)],
) -> Result<CurvatureModel> {
    let m = s.m();
    let mut a = Tensor4::zeros(m);
    let mut assigned = vec![false; m * m * m * m];
    for (q1, v) in entries {
        let q = zero_based(*q1, m)?;
        for (p, sign) in curvature_orbit(q) {
            let want = if sign == 1 { v.clone() } else { -v.clone() };
            let off = a.offset(p);
            // a self-conjugate slot (e.g. i == j) forces want == -want
            if assigned[off] && a.data[off] != want {
                return Err(Error::SymmetryConflict {
                    at: one_based(p),
                    existing: a.data[off].clone(),
                    requested: want,
                });
            }
            a.data[off] = want;
            assigned[off] = true;
        }
    }
    if let Some(q) = first_symmetry_violation(&a) {
        let [i, j, _, _] = q;
        return Err(Error::SymmetryConflict {
            at: one_based(q),
            existing: a.get(q).clone(),
            requested: if i == j { Rational::zero() } else { -a.get(q).clone() },
        });
    }
    CurvatureModel::new(s.clone(), a)
}

/// `⟨A, B⟩ = Σ ε_i ε_j ε_k ε_l A_ijkl B_ijkl`.
pub fn tensor_ip(a: &Tensor4, b: &Tensor4, s: &Structure) -> Rational {
    assert_eq!(a.m(), b.m());
    assert_eq!(a.m(), s.m());
    let mut acc = Rational::zero();
    for (q, (x, y)) in quadruples(a.m()).zip(a.as_slice().iter().zip(b.as_slice())) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let w = s.eps(q[0]) * s.eps(q[1]) * s.eps(q[2]) * s.eps(q[3]);
        if w == 1 {
            acc += x * y;
        } else {
            acc -= x * y;
        }
    }
    acc
}

/// Flat-vector form of [`tensor_ip`] for use with the Gram machinery.
pub fn tensor_ip_flat(s: &Structure) -> impl Fn(&[Rational], &[Rational]) -> Rational + '_ {
    let m = s.m();
    let weights: Vec<bool> = quadruples(m)
        .map(|q| s.eps(q[0]) * s.eps(q[1]) * s.eps(q[2]) * s.eps(q[3]) == 1)
        .collect();
    move |x: &[Rational], y: &[Rational]| {
        let mut acc = Rational::zero();
        for ((a, b), &pos) in x.iter().zip(y).zip(&weights) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            if pos {
                acc += a * b;
            } else {
                acc -= a * b;
            }
        }
        acc
    }
}

/// Quadratic coefficient `Θ_ijkl` of a metric `g_ij = g0_ij + Θ_ijkl u^k u^l`.
///
/// The first pair indexes metric directions and lies in the structure's
/// `J^*θ = σθ` eigenspace; the second pair indexes coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaTensor {
    structure: Structure,
    t: Tensor4,
}

impl ThetaTensor {
    pub fn new(structure: Structure, t: Tensor4) -> Result<Self> {
        if t.m() != structure.m() {
            return Err(Error::DimensionMismatch {
                expected: structure.m(),
                found: t.m(),
            });
        }
        let sigma = structure.sigma();
        for q in quadruples(t.m()) {
            let [i, j, k, l] = q;
            let v = t.get(q);
            if t.get([j, i, k, l]) != v || t.get([i, j, l, k]) != v {
                return Err(Error::BadTheta { at: one_based(q) });
            }
            let tw = t.get_twisted(&structure, q, [true, true, false, false]);
            let expected = if sigma == 1 { v.clone() } else { -v.clone() };
            if tw != expected {
                return Err(Error::BadThetaSymmetry);
            }
        }
        Ok(Self { structure, t })
    }

    pub fn zero(structure: &Structure) -> Self {
        Self {
            structure: structure.clone(),
            t: Tensor4::zeros(structure.m()),
        }
    }

    /// `θ ⊗ s` with `θ` in the kind's eigenspace and `s` symmetric.
    pub fn from_product(structure: &Structure, theta: &SymBil, s: &SymBil) -> Result<Self> {
        if !theta.in_kind_eigenspace(structure) {
            return Err(Error::BadThetaSymmetry);
        }
        let t = Tensor4::from_fn(structure.m(), |[i, j, k, l]| theta.get(i, j) * s.get(k, l));
        Ok(Self {
            structure: structure.clone(),
            t,
        })
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn tensor(&self) -> &Tensor4 {
        &self.t
    }

    pub fn get(&self, q: [usize; 4]) -> &Rational {
        self.t.get(q)
    }

    pub fn add(&self, other: &ThetaTensor) -> ThetaTensor {
        ThetaTensor {
            structure: self.structure.clone(),
            t: self.t.add(&other.t),
        }
    }

    pub fn scale(&self, c: &Rational) -> ThetaTensor {
        ThetaTensor {
            structure: self.structure.clone(),
            t: self.t.scale(c),
        }
    }

    /// Linear combination of thetas sharing one structure (unchecked: the
    /// constrained space is a linear subspace).
    pub fn combination(structure: &Structure, parts: &[ThetaTensor], coeffs: &[Rational]) -> Self {
        let mut t = Tensor4::zeros(structure.m());
        for (p, c) in parts.iter().zip(coeffs) {
            if !c.is_zero() {
                t = t.add(&p.t.scale(c));
            }
        }
        Self {
            structure: structure.clone(),
            t,
        }
    }
}

/// Exact basis of the symmetric forms with `J^*θ = σθ` (`S²₊` for the
/// complex kind, `S²₋` for the para kind).
pub fn kind_eigenspace_basis(s: &Structure) -> Vec<SymBil> {
    let m = s.m();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let index = |a: usize, b: usize| {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        pairs.iter().position(|&p| p == (a, b)).unwrap()
    };
    let mut rr = crate::linalg::RowReducer::new(pairs.len());
    for &(i, j) in &pairs {
        // θ(J e_i, J e_j) - σ θ(e_i, e_j) = 0
        let (a, sa) = s.j_image(i);
        let (b, sb) = s.j_image(j);
        let mut row = vec![Rational::zero(); pairs.len()];
        row[index(a, b)] += Rational::from_integer((sa * sb).into());
        row[index(i, j)] -= Rational::from_integer(s.sigma().into());
        rr.push(row);
    }
    rr.nullspace()
        .into_iter()
        .map(|x| {
            let mut f = SymBil::zeros(m);
            for (&(i, j), v) in pairs.iter().zip(x) {
                f.set(i, j, v);
            }
            f
        })
        .collect()
}

/// `e^a ⊗ e^b` symmetrized: the form with `1` at (a,b) and (b,a).
pub fn elementary_sym(m: usize, a: usize, b: usize) -> SymBil {
    let mut s = SymBil::zeros(m);
    s.set(a, b, Rational::one());
    s
}
