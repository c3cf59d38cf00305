//! Exact rational scalars and their canonical string form.
//!
//! Rationals are written as `"p/q"` in lowest terms, or `"p"` when `q = 1`;
//! only the numerator carries a sign.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d` reduced to lowest terms. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Canonical `"p/q"` string.
pub fn to_string(r: &Rational) -> String {
    // BigRational keeps the sign on the numerator and reduces on construction.
    r.to_string()
}

/// Parses `"p"`, `"p/q"` (any sign placement, not necessarily reduced).
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(num).map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    let d = BigInt::from_str(den).map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(n, d))
}

/// Parses a comma-separated list such as `"1/4,0,0,0"`.
pub fn parse_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse).collect()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Serde adapter storing a rational as its canonical string.
pub mod serde_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_strings() {
        assert_eq!(to_string(&rat(2, 4)), "1/2");
        assert_eq!(to_string(&rat(3, -6)), "-1/2");
        assert_eq!(to_string(&int(-7)), "-7");
        assert_eq!(to_string(&zero()), "0");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse(" -4/8 ").unwrap(), rat(-1, 2));
        assert_eq!(parse("3/-9").unwrap(), rat(-1, 3));
        assert_eq!(parse("5").unwrap(), int(5));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("").is_err());
        assert_eq!(
            parse_list("1/4,0,0,-1").unwrap(),
            vec![rat(1, 4), zero(), zero(), int(-1)]
        );
    }

    #[test]
    fn string_round_trip_is_canonical() {
        for (n, d) in [(0, 1), (6, 4), (-10, 15), (7, 1), (-3, 9)] {
            let r = rat(n, d);
            assert_eq!(parse(&to_string(&r)).unwrap(), r);
        }
    }
}
