//! Truncated-series scalar curvature and the order-by-order solution of
//! `τ(g_Θ + κ_Φ) = c` for a Kaehler potential `Φ = O(u_m^4)`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{solve_linear, Matrix};
use crate::poly::{Monomial, Poly, TruncSeries};
use crate::rational::{int, rat};
use crate::realization::{apply_K, metric_from_theta, PolynomialMetric};
use crate::structure::{Structure, ThetaTensor};
use crate::Rational;

/// Inverse of a series with nonzero constant term, through its precision.
pub fn series_invert_unit(s: &TruncSeries) -> Result<TruncSeries> {
    s.invert_unit()
}

/// `∂_a ∂_b Φ` as a polynomial.
fn hessian(phi: &Poly, a: usize, b: usize) -> Poly {
    phi.derivative(a).derivative(b)
}

/// `κ_Φ(∂_a, ∂_b) = ¼(∂_a∂_bΦ + σ (∂²Φ)(J∂_a, J∂_b))`, row-major.
pub fn kappa_poly(phi: &Poly, s: &Structure) -> Vec<Poly> {
    let m = s.m();
    let quarter = rat(1, 4);
    let sigma = int(s.sigma());
    let mut out = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            let (ta, sa) = s.j_image(a);
            let (tb, sb) = s.j_image(b);
            let twisted = hessian(phi, ta, tb).scale(&(&sigma * int(sa * sb)));
            out.push(hessian(phi, a, b).add(&twisted).scale(&quarter));
        }
    }
    out
}

/// [`kappa_poly`] on a truncated series; the result is exact through two
/// degrees less than `phi`.
pub fn kappa(phi: &TruncSeries, s: &Structure) -> Vec<TruncSeries> {
    let p = phi.precision().saturating_sub(2);
    kappa_poly(phi.poly(), s)
        .into_iter()
        .map(|e| TruncSeries::new(e, p))
        .collect()
}

/// Symmetric matrix of truncated series, row-major.
pub type SeriesMetric = Vec<TruncSeries>;

/// A polynomial metric as series exact through degree `precision`.
pub fn metric_series(g: &PolynomialMetric, precision: u32) -> SeriesMetric {
    g.entries()
        .iter()
        .map(|e| TruncSeries::new(e.clone(), precision))
        .collect()
}

fn mat_mul(a: &[TruncSeries], b: &[TruncSeries], m: usize) -> Vec<TruncSeries> {
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let mut acc: Option<TruncSeries> = None;
            for k in 0..m {
                let x = &a[i * m + k];
                let y = &b[k * m + j];
                let t = x.mul(y);
                acc = Some(match acc {
                    None => t,
                    Some(s) => s.add(&t),
                });
            }
            out.push(acc.expect("m > 0"));
        }
    }
    out
}

/// `h^{-1}` through degree `precision` by `X = H0⁻¹ - H0⁻¹ E X`, `E = h - h(0)`.
fn inverse_series(h: &[TruncSeries], m: usize, precision: u32) -> Result<Vec<TruncSeries>> {
    let n = h[0].nvars();
    let h0 = Matrix::from_fn(m, m, |i, j| h[i * m + j].constant_term());
    let inv0 = h0.inverse().ok_or(Error::SingularMetric)?;
    let c = |r: &Rational| TruncSeries::constant(n, r.clone(), precision);
    let inv0_s: Vec<TruncSeries> = (0..m * m).map(|k| c(&inv0[(k / m, k % m)])).collect();
    // -H0⁻¹ E
    let e: Vec<TruncSeries> = (0..m * m)
        .map(|k| h[k].with_precision(precision).sub(&c(&h0[(k / m, k % m)])))
        .collect();
    let step: Vec<TruncSeries> = mat_mul(&inv0_s, &e, m).into_iter().map(|x| x.neg()).collect();
    let mut x = inv0_s.clone();
    for _ in 0..precision {
        let next: Vec<TruncSeries> = mat_mul(&step, &x, m)
            .into_iter()
            .zip(&inv0_s)
            .map(|(a, b)| a.add(b))
            .collect();
        if next == x {
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Christoffel data of a series metric: `Γ_{jk,l}` and `Γ^l_jk`.
struct SeriesConnection {
    m: usize,
    first: Vec<TruncSeries>,
    second: Vec<TruncSeries>,
}

fn connection(h: &[TruncSeries], inv: &[TruncSeries], m: usize) -> SeriesConnection {
    let half = rat(1, 2);
    let d = |a: usize, i: usize, j: usize| h[i * m + j].derivative(a).expect("precision at least 1");
    let mut first = Vec::with_capacity(m * m * m);
    for j in 0..m {
        for k in 0..m {
            for l in 0..m {
                first.push(d(j, k, l).add(&d(k, j, l)).sub(&d(l, j, k)).scale(&half));
            }
        }
    }
    let mut second = Vec::with_capacity(m * m * m);
    for a in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut acc = inv[a * m].mul(&first[(j * m + k) * m]);
                for l in 1..m {
                    acc = acc.add(&inv[a * m + l].mul(&first[(j * m + k) * m + l]));
                }
                second.push(acc);
            }
        }
    }
    SeriesConnection { m, first, second }
}

impl SeriesConnection {
    fn first(&self, j: usize, k: usize, l: usize) -> &TruncSeries {
        &self.first[(j * self.m + k) * self.m + l]
    }

    fn second(&self, a: usize, j: usize, k: usize) -> &TruncSeries {
        &self.second[(a * self.m + j) * self.m + k]
    }
}

fn check_series_metric(h: &[TruncSeries], s: &Structure, degree: u32) -> Result<usize> {
    let m = s.m();
    if h.len() != m * m {
        return Err(Error::BadMetric(format!("expected {} entries", m * m)));
    }
    if h.iter().any(|e| e.precision() < degree + 2) {
        return Err(Error::BadMetric(format!(
            "entries must be exact through degree {}",
            degree + 2
        )));
    }
    Ok(m)
}

/// Scalar curvature of `h` as a series exact through total degree `degree`.
///
/// `h` must be exact through `degree + 2`.
pub fn scalar_curvature_series(h: &[TruncSeries], s: &Structure, degree: u32) -> Result<TruncSeries> {
    let m = check_series_metric(h, s, degree)?;
    let h: Vec<TruncSeries> = h.iter().map(|e| e.with_precision(degree + 2)).collect();
    let inv = inverse_series(&h, m, degree + 1)?;
    let con = connection(&h, &inv, m);
    let g2 = |a, j, k| con.second(a, j, k);
    let dg2 = |i: usize, a, j, k| g2(a, j, k).derivative(i).expect("precision at least 1");
    // Ric_jk = ∂_iΓ^i_jk - ∂_jΓ^i_ik + Γ^i_ip Γ^p_jk - Γ^i_jp Γ^p_ik
    let trace: Vec<TruncSeries> = (0..m)
        .map(|p| {
            (1..m).fold(g2(0, 0, p).clone(), |acc, i| acc.add(g2(i, i, p)))
        })
        .collect();
    let mut tau = TruncSeries::zero(h[0].nvars(), degree);
    for j in 0..m {
        for k in j..m {
            let ginv = inv[j * m + k].with_precision(degree);
            if ginv.is_zero() {
                continue;
            }
            let mut ric = TruncSeries::zero(h[0].nvars(), degree);
            for i in 0..m {
                ric = ric.add(&dg2(i, i, j, k)).sub(&dg2(j, i, i, k));
            }
            for (p, tr) in trace.iter().enumerate() {
                ric = ric.add(&tr.mul(g2(p, j, k)));
                for i in 0..m {
                    ric = ric.sub(&g2(i, j, p).mul(g2(p, i, k)));
                }
            }
            let term = ginv.mul(&ric);
            tau = if j == k { tau.add(&term) } else { tau.add(&term.scale(&int(2))) };
        }
    }
    Ok(tau)
}

/// Full curvature tensor `R_ijkl` of `h` as series exact through `degree`, row-major.
pub fn curvature_series(h: &[TruncSeries], s: &Structure, degree: u32) -> Result<Vec<TruncSeries>> {
    let m = check_series_metric(h, s, degree)?;
    let h: Vec<TruncSeries> = h.iter().map(|e| e.with_precision(degree + 2)).collect();
    let inv = inverse_series(&h, m, degree + 1)?;
    let con = connection(&h, &inv, m);
    let d1 = |i: usize, j, k, l| con.first(j, k, l).derivative(i).expect("precision at least 1");
    let mut out = Vec::with_capacity(m * m * m * m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let mut v = d1(i, j, k, l).sub(&d1(j, i, k, l));
                    for a in 0..m {
                        v = v
                            .add(&con.second(a, i, k).mul(con.first(j, l, a)))
                            .sub(&con.second(a, j, k).mul(con.first(i, l, a)));
                    }
                    out.push(v);
                }
            }
        }
    }
    Ok(out)
}

/// Linearization of `τ` at the flat `g0` applied to a form `k`:
/// `Σ ε_iε_j (∂_i∂_j k_ij - ∂_i∂_i k_jj)`.
pub fn flat_linearization(k: &[Poly], s: &Structure) -> Poly {
    let m = s.m();
    let mut out = Poly::zero(m);
    for i in 0..m {
        for j in 0..m {
            let e = int(s.eps(i) * s.eps(j));
            let t = hessian(&k[i * m + j], i, j).sub(&hessian(&k[j * m + j], i, i));
            out.add_assign(&t.scale(&e));
        }
    }
    out
}

/// A formal constant-scalar-curvature potential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    pub structure: Structure,
    pub phi: TruncSeries,
    pub c: Rational,
    pub n: u32,
    pub residual_zero_through: u32,
}

impl Potential {
    /// No monomial of `phi` has `u_m`-exponent at most 3.
    pub fn cauchy_data_vanish(&self) -> bool {
        let last = self.structure.m() - 1;
        self.phi.poly().terms().all(|(mono, _)| mono.exponent(last) >= 4)
    }

    /// All coefficients of total degree at most 4 vanish.
    pub fn four_jet_vanishes(&self) -> bool {
        self.phi.poly().terms().all(|(mono, _)| mono.degree() >= 5)
    }

    pub fn kappa(&self) -> Vec<Poly> {
        kappa_poly(self.phi.poly(), &self.structure)
    }

    /// `g_Θ + κ_Φ` as a polynomial metric.
    pub fn corrected_metric(&self, theta: &ThetaTensor) -> Result<PolynomialMetric> {
        metric_from_theta(theta).add_form(&self.kappa())
    }
}

/// Coefficient of `∂_m⁴Φ` in the scalar curvature of `g0 + κ_Φ` at the origin.
pub fn leading_coefficient(s: &Structure) -> Rational {
    let m = s.m();
    let phi = Poly::monomial(m, Monomial::one().raise(m - 1, 4), Rational::one());
    flat_linearization(&kappa_poly(&phi, s), s).constant_term() / int(24)
}

/// Solves `τ(g_Θ + κ_Φ) = c` through total degree `n - 4` with `Φ` divisible by `u_m^4`.
///
/// At each degree `d` the residual's degree-`d` part is cancelled by the
/// degree-`d + 4` slice of `Φ`, which enters only through the flat linearization.
pub fn solve_csc(theta: &ThetaTensor, c: &Rational, n: u32) -> Result<Potential> {
    let s = theta.structure();
    if n < 4 {
        return Err(Error::BadDegree(n));
    }
    if !apply_K(theta).is_zero() {
        return Err(Error::NotInKernel);
    }
    if leading_coefficient(s).is_zero() {
        return Err(Error::LeadingCoefficientDegenerate);
    }
    let m = s.m();
    let last = m - 1;
    let g = metric_from_theta(theta);
    let mut phi = Poly::zero(m);
    let target = |d: u32| TruncSeries::constant(m, c.clone(), d);

    for d in 0..=n - 4 {
        let h = g.add_form(&kappa_poly(&phi, s))?;
        let tau = scalar_curvature_series(&metric_series(&h, d + 2), s, d)?;
        let r = tau.sub(&target(d)).poly().homogeneous(d);
        if r.is_zero() {
            continue;
        }
        let rows = Monomial::of_degree(m, d);
        let unknowns: Vec<Monomial> = rows.iter().map(|mono| mono.raise(last, 4)).collect();
        let cols: Vec<Vec<Rational>> = unknowns
            .iter()
            .map(|u| {
                let lin = flat_linearization(&kappa_poly(&Poly::monomial(m, *u, Rational::one()), s), s);
                rows.iter().map(|mono| lin.coeff(mono)).collect()
            })
            .collect();
        let a = Matrix::from_columns(rows.len(), &cols);
        let rhs: Vec<Rational> = rows.iter().map(|mono| -r.coeff(mono)).collect();
        let x = solve_linear(&a, &rhs)
            .ok_or_else(|| Error::NoSolution(format!("degree {d} slice of the potential")))?;
        for (u, v) in unknowns.iter().zip(x) {
            if !v.is_zero() {
                phi.add_term(*u, v);
            }
        }
    }

    let top = n - 4;
    let h = g.add_form(&kappa_poly(&phi, s))?;
    let tau = scalar_curvature_series(&metric_series(&h, top + 2), s, top)?;
    if !tau.sub(&target(top)).is_zero() {
        return Err(Error::NoSolution("residual survives the recursion".into()));
    }
    Ok(Potential {
        structure: s.clone(),
        phi: TruncSeries::new(phi, n),
        c: c.clone(),
        n,
        residual_zero_through: top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{curvature_at, kaehler_form_d, scalar_curvature_at, Point};
    use crate::realization::{surface_product_theta, L};
    use crate::sampling;
    use crate::structure::{Kind, SymBil};

    fn st(m: usize, kind: Kind) -> Structure {
        Structure::standard(m, kind).unwrap()
    }

    fn mono(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e)
    }

    #[test]
    fn invert_unit_examples() {
        let one = TruncSeries::constant(4, int(1), 3);
        assert_eq!(series_invert_unit(&one).unwrap(), one);
        let s = TruncSeries::new(Poly::constant(4, int(1)).add(&Poly::var(4, 0)), 3);
        let inv = series_invert_unit(&s).unwrap();
        let mut expected = Poly::zero(4);
        for k in 0..=3u32 {
            expected.add_term(mono(&[k, 0, 0, 0]), int(if k % 2 == 0 { 1 } else { -1 }));
        }
        assert_eq!(*inv.poly(), expected);
        assert_eq!(s.mul(&inv), one);
        assert_eq!(series_invert_unit(&TruncSeries::new(Poly::var(4, 1), 3)), Err(Error::NotAUnit));
    }

    #[test]
    fn kappa_examples() {
        let s = st(4, Kind::Complex);
        let phi = Poly::monomial(4, mono(&[2, 0, 0, 0]), int(1)).add(&Poly::monomial(4, mono(&[0, 2, 0, 0]), int(1)));
        let k = kappa_poly(&phi, &s);
        for a in 0..4 {
            for b in 0..4 {
                let expected = if a == b && a < 2 { int(1) } else { int(0) };
                assert_eq!(k[a * 4 + b], Poly::constant(4, expected));
            }
        }
        let phi = Poly::monomial(4, mono(&[2, 0, 0, 0]), int(1)).sub(&Poly::monomial(4, mono(&[0, 2, 0, 0]), int(1)));
        assert!(kappa_poly(&phi, &s).iter().all(Poly::is_zero));

        let phi = Poly::monomial(4, mono(&[0, 0, 0, 4]), int(1));
        let k = kappa_poly(&phi, &s);
        let expected = Poly::monomial(4, mono(&[0, 0, 0, 2]), int(3));
        assert_eq!(k[2 * 4 + 2], expected);
        assert_eq!(k[3 * 4 + 3], expected);
        assert!(k[2 * 4 + 3].is_zero());
        assert!(k[0].is_zero());
    }

    fn random_poly(m: usize, seed: u64, deg: u32) -> Poly {
        let mut rng = sampling::rng(seed);
        let mut p = Poly::zero(m);
        for d in 2..=deg {
            for mono in Monomial::of_degree(m, d) {
                p.add_term(mono, sampling::small_rational(&mut rng));
            }
        }
        p
    }

    #[test]
    fn kappa_lies_in_kind_eigenspace_and_is_closed() {
        for kind in [Kind::Complex, Kind::Para] {
            let s = st(4, kind);
            let phi = random_poly(4, 3, 5);
            let k = kappa_poly(&phi, &s);
            let x: Vec<Rational> = vec![rat(1, 2), rat(-1, 3), int(1), rat(2, 5)];
            let mut form = SymBil::zeros(4);
            for a in 0..4 {
                for b in 0..4 {
                    form.set(a, b, k[a * 4 + b].eval(&x));
                }
            }
            assert!(form.in_kind_eigenspace(&s));
            let flat = crate::realization::PolynomialMetric::flat(&s);
            let shifted: Vec<Poly> = k.iter().map(|e| e.sub(&Poly::constant(4, e.constant_term()))).collect();
            let g = flat.add_form(&shifted).unwrap();
            assert!(kaehler_form_d(&g).iter().all(Poly::is_zero));
        }
    }

    #[test]
    fn leading_coefficient_is_minus_quarter() {
        for kind in [Kind::Complex, Kind::Para] {
            assert_eq!(leading_coefficient(&st(4, kind)), rat(-1, 4));
            assert_eq!(leading_coefficient(&st(6, kind)), rat(-1, 4));
        }
    }

    #[test]
    fn flat_linearization_matches_series_engine() {
        for kind in [Kind::Complex, Kind::Para] {
            let s = st(4, kind);
            let phi = random_poly(4, 17, 6);
            let k = kappa_poly(&phi, &s);
            let shifted: Vec<Poly> = k.iter().map(|e| e.sub(&Poly::constant(4, e.constant_term()))).collect();
            // scaling by t and keeping the t-linear part isolates the linearization
            let t = rat(1, 1_000_000_007);
            let small: Vec<Poly> = shifted.iter().map(|e| e.scale(&t)).collect();
            let g = PolynomialMetric::flat(&s).add_form(&small).unwrap();
            let tau = scalar_curvature_series(&metric_series(&g, 2), &s, 0).unwrap();
            let lin = flat_linearization(&shifted, &s).constant_term();
            let quad = (tau.constant_term() - &t * &lin) / (&t * &t);
            // the remainder is quadratic in t: bounded after dividing by t²
            assert!(crate::rational::abs(&quad) < int(1_000_000));
        }
    }

    #[test]
    fn series_matches_engine_at_origin_and_points() {
        for kind in [Kind::Complex, Kind::Para] {
            let s = st(4, kind);
            let g = metric_from_theta(&surface_product_theta(&s));
            let tau = scalar_curvature_series(&metric_series(&g, 2), &s, 0).unwrap();
            assert_eq!(tau.constant_term(), int(-2));
            let r = curvature_series(&metric_series(&g, 2), &s, 0).unwrap();
            let at0 = curvature_at(&g, &Point::origin(4)).unwrap();
            for (k, v) in r.iter().enumerate() {
                assert_eq!(v.constant_term(), at0.as_slice()[k]);
            }
        }
        // polynomial metric with cubic terms: derivatives at the origin against finite shifts
        let s = st(4, Kind::Complex);
        let theta = crate::realization::K_kernel_basis(&s)[2].clone();
        let base = metric_from_theta(&theta);
        let cubic = kappa_poly(&random_poly(4, 5, 5).homogeneous(5), &s);
        let g = base.add_form(&cubic).unwrap();
        let tau = scalar_curvature_series(&metric_series(&g, 4), &s, 2).unwrap();
        let tau0 = scalar_curvature_at(&g, &Point::origin(4)).unwrap();
        assert_eq!(tau.constant_term(), tau0);
        // τ(t e_1) = τ0 + t a + t² b + O(t³)
        let along = |t: Rational| {
            scalar_curvature_at(&g, &Point::new(vec![t, int(0), int(0), int(0)])).unwrap()
        };
        let a = tau.coeff(&mono(&[1, 0, 0, 0]));
        let b = tau.coeff(&mono(&[2, 0, 0, 0]));
        let t = rat(1, 10_000);
        let err = along(t.clone()) - &tau0 - &t * &a - &t * &t * &b;
        assert!(crate::rational::abs(&(err / (&t * &t * &t))) < int(1_000_000));
    }

    #[test]
    fn second_bianchi_at_origin() {
        // ∇ = ∂ at the origin since Γ(0) = 0; cyclic sum over (e, i, j) of ∂_e R_ijkl
        let s = st(4, Kind::Complex);
        let surface = metric_from_theta(&surface_product_theta(&s));
        let cubic = kappa_poly(&random_poly(4, 9, 5).homogeneous(5), &s);
        for g in [surface.clone(), surface.add_form(&cubic).unwrap()] {
            let r = curvature_series(&metric_series(&g, 3), &s, 1).unwrap();
            let d = |e: usize, q: [usize; 4]| {
                let [i, j, k, l] = q;
                r[((i * 4 + j) * 4 + k) * 4 + l].coeff(&Monomial::var(e))
            };
            for e in 0..4 {
                for q in crate::structure::quadruples(4) {
                    let [i, j, k, l] = q;
                    let sum = d(e, q) + d(i, [j, e, k, l]) + d(j, [e, i, k, l]);
                    assert!(sum.is_zero(), "e={e} q={q:?}");
                }
            }
        }
    }

    #[test]
    fn flat_zero_target_gives_zero_potential() {
        let s = st(4, Kind::Complex);
        let pot = solve_csc(&ThetaTensor::zero(&s), &int(0), 6).unwrap();
        assert!(pot.phi.is_zero());
        assert_eq!(pot.residual_zero_through, 2);
    }

    #[test]
    fn flat_unit_target() {
        let s = st(4, Kind::Complex);
        let pot = solve_csc(&ThetaTensor::zero(&s), &int(1), 6).unwrap();
        assert!(!pot.phi.is_zero());
        assert!(pot.cauchy_data_vanish());
        // c differs from the origin value, so the u_m^4 slice cannot vanish
        assert_eq!(pot.phi.coeff(&mono(&[0, 0, 0, 4])), rat(-1, 6));
        assert!(!pot.four_jet_vanishes());
        let g = pot.corrected_metric(&ThetaTensor::zero(&s)).unwrap();
        let tau = scalar_curvature_series(&metric_series(&g, 4), &s, 2).unwrap();
        assert_eq!(tau, TruncSeries::constant(4, int(1), 2));
    }

    #[test]
    fn surface_example_csc() {
        for kind in [Kind::Complex, Kind::Para] {
            let s = st(4, kind);
            let theta = surface_product_theta(&s);
            let pot = solve_csc(&theta, &int(-2), 6).unwrap();
            assert!(pot.cauchy_data_vanish());
            assert!(pot.four_jet_vanishes());
            let g = pot.corrected_metric(&theta).unwrap();
            assert_eq!(curvature_at(&g, &Point::origin(4)).unwrap(), L(&theta));
            assert!(kaehler_form_d(&g).iter().all(Poly::is_zero));
        }
    }

    #[test]
    fn csc_errors() {
        let s = st(4, Kind::Complex);
        let mut t = SymBil::zeros(4);
        t.set(0, 0, int(1));
        t.set(1, 1, int(1));
        let theta = ThetaTensor::from_product(&s, &t, &crate::structure::elementary_sym(4, 2, 2)).unwrap();
        assert_eq!(solve_csc(&theta, &int(0), 6), Err(Error::NotInKernel));
        assert_eq!(solve_csc(&ThetaTensor::zero(&s), &int(0), 3), Err(Error::BadDegree(3)));
    }
}
