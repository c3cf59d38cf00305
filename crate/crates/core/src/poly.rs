//! Sparse multivariate polynomials and truncated power series over the rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Largest supported number of variables.
pub const MAX_VARS: usize = 8;

/// Exponent vector of a monomial `u_1^{a_1} ... u_n^{a_n}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial([u8; MAX_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_exponents(exp: &[u32]) -> Self {
        assert!(exp.len() <= MAX_VARS, "too many variables");
        let mut a = [0u8; MAX_VARS];
        for (slot, &e) in a.iter_mut().zip(exp) {
            *slot = u8::try_from(e).expect("exponent too large");
        }
        Self(a)
    }

    pub fn var(i: usize) -> Self {
        let mut a = [0u8; MAX_VARS];
        a[i] = 1;
        Self(a)
    }

    pub fn exponent(&self, i: usize) -> u32 {
        u32::from(self.0[i])
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        self.0[..nvars].iter().map(|&e| u32::from(e)).collect()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(other.0) {
            *x += y;
        }
        Monomial(a)
    }

    /// `self / u_i`, or `None` if `u_i` does not divide it.
    pub fn lower(&self, i: usize) -> Option<Monomial> {
        if self.0[i] == 0 {
            return None;
        }
        let mut a = self.0;
        a[i] -= 1;
        Some(Monomial(a))
    }

    pub fn raise(&self, i: usize, by: u32) -> Monomial {
        let mut a = self.0;
        a[i] += u8::try_from(by).expect("exponent too large");
        Monomial(a)
    }

    /// All monomials in `nvars` variables of total degree exactly `d`.
    pub fn of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        fn rec(v: usize, nvars: usize, left: u32, cur: &mut [u8; MAX_VARS], out: &mut Vec<Monomial>) {
            if v + 1 == nvars {
                cur[v] = left as u8;
                out.push(Monomial(*cur));
                cur[v] = 0;
                return;
            }
            for e in (0..=left).rev() {
                cur[v] = e as u8;
                rec(v + 1, nvars, left - e, cur, out);
            }
            cur[v] = 0;
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if d == 0 {
                out.push(Monomial::one());
            }
            return out;
        }
        rec(0, nvars, d, &mut [0; MAX_VARS], &mut out);
        out
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u^{:?}", self.0)
    }
}

/// Sparse polynomial in `nvars` variables; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS);
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, Monomial::one(), c)
    }

    pub fn monomial(nvars: usize, mono: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(mono, c);
        p
    }

    /// The coordinate function `u_i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, Monomial::var(i), Rational::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one())
    }

    pub fn add_term(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Highest total degree of a stored term (`None` for the zero polynomial).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Lowest total degree of a stored term (`None` for the zero polynomial).
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars);
        for (m, c) in &other.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Rational::one())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.mul_truncated(other, u32::MAX)
    }

    /// Product with all terms of total degree above `max_deg` discarded.
    pub fn mul_truncated(&self, other: &Poly, max_deg: u32) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        let rhs: Vec<(Monomial, u32, &Rational)> =
            other.terms.iter().map(|(m, c)| (*m, m.degree(), c)).collect();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > max_deg {
                continue;
            }
            for (mb, db, cb) in &rhs {
                if da + db > max_deg {
                    continue;
                }
                out.add_term(ma.mul(mb), ca * *cb);
            }
        }
        out
    }

    /// Terms of total degree at most `d`.
    pub fn truncate(&self, d: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous(&self, d: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Partial derivative with respect to `u_i` (0-based).
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            out.add_term(m.lower(i).unwrap(), c * Rational::from_integer(e.into()));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars, "point dimension");
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                let e = m.exponent(i);
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }
}

/// Truncated power series: a polynomial whose coefficients are known exactly
/// through total degree `precision`. Higher-degree terms are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncSeries {
    poly: Poly,
    precision: u32,
}

impl TruncSeries {
    pub fn new(poly: Poly, precision: u32) -> Self {
        Self {
            poly: poly.truncate(precision),
            precision,
        }
    }

    pub fn zero(nvars: usize, precision: u32) -> Self {
        Self::new(Poly::zero(nvars), precision)
    }

    pub fn constant(nvars: usize, c: Rational, precision: u32) -> Self {
        Self::new(Poly::constant(nvars, c), precision)
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn into_poly(self) -> Poly {
        self.poly
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.poly.coeff(m)
    }

    pub fn constant_term(&self) -> Rational {
        self.poly.constant_term()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        assert!(precision <= self.precision, "cannot raise precision");
        Self::new(self.poly.clone(), precision)
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        let p = self.precision.min(other.precision);
        TruncSeries::new(self.poly.add(&other.poly), p)
    }

    pub fn sub(&self, other: &TruncSeries) -> TruncSeries {
        let p = self.precision.min(other.precision);
        TruncSeries::new(self.poly.sub(&other.poly), p)
    }

    pub fn scale(&self, c: &Rational) -> TruncSeries {
        TruncSeries {
            poly: self.poly.scale(c),
            precision: self.precision,
        }
    }

    pub fn neg(&self) -> TruncSeries {
        self.scale(&-Rational::one())
    }

    /// Product, exact through the smaller precision of the two factors.
    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        let p = self.precision.min(other.precision);
        TruncSeries {
            poly: self.poly.mul_truncated(&other.poly, p),
            precision: p,
        }
    }

    /// Partial derivative; exact through one degree less than `self`.
    ///
    /// Returns `None` when `self` carries no information about degree one
    /// terms (precision 0).
    pub fn derivative(&self, i: usize) -> Option<TruncSeries> {
        let p = self.precision.checked_sub(1)?;
        Some(TruncSeries::new(self.poly.derivative(i), p))
    }

    /// Multiplicative inverse through the same precision.
    pub fn invert_unit(&self) -> Result<TruncSeries> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let n = self.nvars();
        let inv0 = c0.recip();
        // self = c0 (1 + e), e without constant term
        let e = self
            .scale(&inv0)
            .sub(&TruncSeries::constant(n, Rational::one(), self.precision));
        let minus_e = e.neg();
        let mut term = TruncSeries::constant(n, Rational::one(), self.precision);
        let mut sum = term.clone();
        for _ in 0..self.precision {
            term = term.mul(&minus_e);
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
        }
        Ok(sum.scale(&inv0))
    }
}
