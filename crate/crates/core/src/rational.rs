//! Exact rationals and their `"p/q"` string form.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{BdkError, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Reduced fraction string: `"4/3"`, `"-1/2"`, or `"2"` for integers.
pub fn to_fraction_string(r: &Rational) -> String {
    r.to_string()
}

/// Parses `"p"` or `"p/q"` with optional sign and surrounding whitespace.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let bad = |reason: &str| BdkError::MalformedRational {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(bad("empty"));
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let parse_int = |t: &str| -> Result<BigInt> {
        let digits = t.strip_prefix(['+', '-']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("expected an integer"));
        }
        t.parse::<BigInt>().map_err(|_| bad("expected an integer"))
    };
    let numer = parse_int(num)?;
    let denom = match den {
        Some(d) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            d
        }
        None => BigInt::one(),
    };
    Ok(Rational::new(numer, denom))
}

/// Absolute distance between an `f64` and an exact rational.
pub fn float_error(value: f64, exact: &Rational) -> Option<Rational> {
    Rational::from_float(value).map(|v| (v - exact).abs())
}

/// Serde adapter storing a rational as its fraction string.
pub mod fraction {
    use super::{parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}
