//! Levi-Civita curvature of polynomial metrics evaluated exactly at rational points.
//!
//! Convention: `R(x,y,z,w) = g(R(x,y)z, w)` with `R(x,y) = ∇_x∇_y - ∇_y∇_x - ∇_[x,y]`,
//! so that the curvature of `g0 + Θ_ijkl u^k u^l` at the origin is `L(Θ)`.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::{Monomial, Poly};
use crate::rational::{self, rat};
use crate::realization::{metric_from_theta, theta_basis, PolynomialMetric};
use crate::sampling;
use crate::structure::{Structure, Tensor4};
use crate::Rational;

/// A point of coordinate space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point(Vec<Rational>);

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self(coords)
    }

    pub fn origin(m: usize) -> Self {
        Self(vec![Rational::zero(); m])
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn check(&self, m: usize) -> Result<()> {
        if self.0.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: self.0.len(),
            });
        }
        Ok(())
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Comma-separated rationals, e.g. `1/4,0,0,0`.
    fn from_str(s: &str) -> Result<Self> {
        rational::parse_list(s).map(Point)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(rational::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// `Γ^l_jk` at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Christoffels {
    m: usize,
    data: Vec<Rational>,
}

impl Christoffels {
    /// `Γ^l_jk`.
    pub fn get(&self, l: usize, j: usize, k: usize) -> &Rational {
        &self.data[(l * self.m + j) * self.m + k]
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

/// Values of `g`, `∂g` and `∂∂g` at a point, plus `g^{-1}`.
struct Jet {
    m: usize,
    inv: Matrix,
    dg: Vec<Rational>,
    ddg: Vec<Rational>,
}

impl Jet {
    fn at(g: &PolynomialMetric, p: &Point) -> Result<Self> {
        let m = g.m();
        p.check(m)?;
        let x = p.coords();
        let inv = g.eval(x).inverse().ok_or(Error::SingularMetric)?;
        let mut dg = vec![Rational::zero(); m * m * m];
        let mut ddg = vec![Rational::zero(); m * m * m * m];
        for i in 0..m {
            for j in i..m {
                let e = g.entry(i, j);
                for a in 0..m {
                    let d = e.derivative(a);
                    let v = d.eval(x);
                    dg[(a * m + i) * m + j] = v.clone();
                    dg[(a * m + j) * m + i] = v;
                    for b in a..m {
                        let v = d.derivative(b).eval(x);
                        for (aa, bb) in [(a, b), (b, a)] {
                            ddg[((aa * m + bb) * m + i) * m + j] = v.clone();
                            ddg[((aa * m + bb) * m + j) * m + i] = v.clone();
                        }
                    }
                }
            }
        }
        Ok(Self { m, inv, dg, ddg })
    }

    /// `∂_a g_ij`.
    fn d(&self, a: usize, i: usize, j: usize) -> &Rational {
        &self.dg[(a * self.m + i) * self.m + j]
    }

    /// `∂_a ∂_b g_ij`.
    fn dd(&self, a: usize, b: usize, i: usize, j: usize) -> &Rational {
        &self.ddg[((a * self.m + b) * self.m + i) * self.m + j]
    }

    /// First-kind symbols `Γ_{jk,l} = ½(∂_j g_kl + ∂_k g_jl - ∂_l g_jk)`.
    fn first_kind(&self) -> Vec<Rational> {
        let m = self.m;
        let half = rat(1, 2);
        let mut out = Vec::with_capacity(m * m * m);
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    out.push((self.d(j, k, l) + self.d(k, j, l) - self.d(l, j, k)) * &half);
                }
            }
        }
        out
    }

    fn second_kind(&self, first: &[Rational]) -> Vec<Rational> {
        let m = self.m;
        let mut out = vec![Rational::zero(); m * m * m];
        for a in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let mut acc = Rational::zero();
                    for l in 0..m {
                        let gi = &self.inv[(a, l)];
                        if !gi.is_zero() {
                            acc += gi * &first[(j * m + k) * m + l];
                        }
                    }
                    out[(a * m + j) * m + k] = acc;
                }
            }
        }
        out
    }
}

/// Levi-Civita symbols `Γ^l_jk = ½ g^{la}(∂_j g_ka + ∂_k g_ja - ∂_a g_jk)` at `p`.
pub fn christoffels_at(g: &PolynomialMetric, p: &Point) -> Result<Christoffels> {
    let jet = Jet::at(g, p)?;
    let first = jet.first_kind();
    Ok(Christoffels {
        m: jet.m,
        data: jet.second_kind(&first),
    })
}

/// Curvature tensor `R_ijkl = R(e_i, e_j, e_k, e_l)` at `p`.
pub fn curvature_at(g: &PolynomialMetric, p: &Point) -> Result<Tensor4> {
    let jet = Jet::at(g, p)?;
    let m = jet.m;
    let first = jet.first_kind();
    let second = jet.second_kind(&first);
    let half = rat(1, 2);
    let gam1 = |j: usize, k: usize, l: usize| &first[(j * m + k) * m + l];
    let gam2 = |a: usize, j: usize, k: usize| &second[(a * m + j) * m + k];
    // ∂_i Γ_{jk,l}
    let d_gam1 = |i: usize, j: usize, k: usize, l: usize| {
        (jet.dd(i, j, k, l) + jet.dd(i, k, j, l) - jet.dd(i, l, j, k)) * &half
    };
    Ok(Tensor4::from_fn(m, |[i, j, k, l]| {
        let mut v = d_gam1(i, j, k, l) - d_gam1(j, i, k, l);
        for a in 0..m {
            let x = gam2(a, i, k);
            if !x.is_zero() {
                v += x * gam1(j, l, a);
            }
            let y = gam2(a, j, k);
            if !y.is_zero() {
                v -= y * gam1(i, l, a);
            }
        }
        v
    }))
}

/// `τ = g^{il} g^{jk} R_ijkl` at `p`.
pub fn scalar_curvature_at(g: &PolynomialMetric, p: &Point) -> Result<Rational> {
    let r = curvature_at(g, p)?;
    let inv = Jet::at(g, p)?.inv;
    let m = g.m();
    let mut tau = Rational::zero();
    for i in 0..m {
        for l in 0..m {
            if inv[(i, l)].is_zero() {
                continue;
            }
            for j in 0..m {
                for k in 0..m {
                    let c = &inv[(j, k)];
                    let v = r.get([i, j, k, l]);
                    if !c.is_zero() && !v.is_zero() {
                        tau += &inv[(i, l)] * c * v;
                    }
                }
            }
        }
    }
    Ok(tau)
}

/// Fully antisymmetric 3-form on coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeForm {
    m: usize,
    data: Vec<Rational>,
}

impl ThreeForm {
    pub fn get(&self, a: usize, b: usize, c: usize) -> &Rational {
        &self.data[(a * self.m + b) * self.m + c]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// First nonzero component, 0-based.
    pub fn first_nonzero(&self) -> Option<[usize; 3]> {
        let m = self.m;
        self.data
            .iter()
            .position(|v| !v.is_zero())
            .map(|k| [k / (m * m), (k / m) % m, k % m])
    }
}

/// Polynomial Kaehler form `Ω_bc = g(e_b, J e_c)`.
fn kaehler_form(g: &PolynomialMetric) -> Vec<Poly> {
    let s = g.structure();
    let m = s.m();
    let mut out = Vec::with_capacity(m * m);
    for b in 0..m {
        for c in 0..m {
            let (t, sg) = s.j_image(c);
            let e = g.entry(b, t);
            out.push(if sg == 1 { e.clone() } else { e.neg() });
        }
    }
    out
}

/// `(dΩ)_abc = ∂_aΩ_bc - ∂_bΩ_ac + ∂_cΩ_ab` as polynomials, row-major over `(a,b,c)`.
pub fn kaehler_form_d(g: &PolynomialMetric) -> Vec<Poly> {
    let m = g.m();
    let om = kaehler_form(g);
    let o = |i: usize, j: usize| &om[i * m + j];
    let mut out = Vec::with_capacity(m * m * m);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let v = o(b, c)
                    .derivative(a)
                    .sub(&o(a, c).derivative(b))
                    .add(&o(a, b).derivative(c));
                out.push(v);
            }
        }
    }
    out
}

/// `dΩ` evaluated at `p`.
pub fn kaehler_form_d_at(g: &PolynomialMetric, p: &Point) -> Result<ThreeForm> {
    let m = g.m();
    p.check(m)?;
    let data = kaehler_form_d(g).iter().map(|e| e.eval(p.coords())).collect();
    Ok(ThreeForm { m, data })
}

/// Matrix of the linear map `Θ ↦ coefficients of dΩ(g_Θ)`, with `Θ` in
/// [`theta_basis`] coordinates. Rows run over `(a, b, c, u_k)`; `dΩ(g_Θ)` is
/// linear in the coordinates because `g0` is constant and `Θ` quadratic.
pub fn d_omega_linearization(s: &Structure) -> Matrix {
    let m = s.m();
    let cols: Vec<Vec<Rational>> = theta_basis(s)
        .iter()
        .map(|t| {
            let d = kaehler_form_d(&metric_from_theta(t));
            let mut col = Vec::with_capacity(m * m * m * m);
            for e in &d {
                debug_assert!(e.degree().is_none_or(|k| k == 1));
                for k in 0..m {
                    col.push(e.coeff(&Monomial::var(k)));
                }
            }
            col
        })
        .collect();
    Matrix::from_columns(m * m * m * m, &cols)
}

/// `n` seed-deterministic points near the origin at which `g` is nondegenerate.
pub fn random_points(g: &PolynomialMetric, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = sampling::rng(seed);
    let m = g.m();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point::new(sampling::near_origin_point(&mut rng, m));
        if g.eval(p.coords()).inverse().is_some() {
            out.push(p);
        }
    }
    out
}
