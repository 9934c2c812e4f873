//! Exact rationals extended with a single point at positive infinity.
//!
//! Every cost, objective value and tolerance in the crate is an
//! [`ExtendedValue`]. Finite values are arbitrary-precision rationals kept
//! in lowest terms by `num-rational`, so equality tests such as
//! "is this restricted optimum equal to the unrestricted one" are decided
//! exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// Builds an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds `num / den`, normalized.
///
/// Panics when `den` is zero.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a decimal integer (`"-3"`) or a fraction (`"7/2"`).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("`{text}` is not an integer or p/q rational"));
    match text.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("`{text}` has a zero denominator")));
            }
            Ok(Rational::new(p, q))
        }
        None => BigInt::from_str(text)
            .map(Rational::from_integer)
            .map_err(|_| bad()),
    }
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders an approximate decimal expansion with `digits` fractional digits,
/// rounding half away from zero.
pub fn format_decimal(q: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = q * Rational::from_integer(scale.clone());
    let rounded = scaled.round().to_integer();
    let negative = rounded.is_negative();
    let magnitude = rounded.abs();
    let whole = &magnitude / &scale;
    let frac = &magnitude % &scale;
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!(
            "{sign}{whole}.{:0>width$}",
            frac.to_string(),
            width = digits
        )
    }
}

/// A finite exact rational or `+inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedValue {
    Finite(Rational),
    Infinity,
}

impl ExtendedValue {
    pub fn zero() -> Self {
        ExtendedValue::Finite(Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        ExtendedValue::Finite(int(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedValue::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedValue::Infinity)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedValue::Finite(q) => Some(q),
            ExtendedValue::Infinity => None,
        }
    }

    /// `self - other`.
    ///
    /// `inf - finite` is `inf`; subtracting infinity is an error.
    pub fn checked_sub(&self, other: &ExtendedValue) -> Result<ExtendedValue> {
        match (self, other) {
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => {
                Ok(ExtendedValue::Finite(a - b))
            }
            (ExtendedValue::Infinity, ExtendedValue::Finite(_)) => Ok(ExtendedValue::Infinity),
            (_, ExtendedValue::Infinity) => {
                Err(Error::Arithmetic(format!("{self} - {other} is undefined")))
            }
        }
    }

    /// `self - q` for a finite `q`; never fails.
    pub fn minus(&self, q: &Rational) -> ExtendedValue {
        match self {
            ExtendedValue::Finite(a) => ExtendedValue::Finite(a - q),
            ExtendedValue::Infinity => ExtendedValue::Infinity,
        }
    }

    /// `factor * self` for a nonnegative rational factor.
    ///
    /// `0 * inf` is taken to be `0`. A negative factor is an error.
    pub fn scale(&self, factor: &Rational) -> Result<ExtendedValue> {
        if factor.is_negative() {
            return Err(Error::Arithmetic(format!(
                "scaling by negative factor {}",
                format_rational(factor)
            )));
        }
        Ok(match self {
            ExtendedValue::Finite(a) => ExtendedValue::Finite(a * factor),
            ExtendedValue::Infinity if factor.is_zero() => ExtendedValue::zero(),
            ExtendedValue::Infinity => ExtendedValue::Infinity,
        })
    }

    /// Renders with `digits` fractional digits; infinity stays `inf`.
    pub fn to_decimal(&self, digits: usize) -> String {
        match self {
            ExtendedValue::Finite(q) => format_decimal(q, digits),
            ExtendedValue::Infinity => "inf".to_string(),
        }
    }
}

impl From<Rational> for ExtendedValue {
    fn from(q: Rational) -> Self {
        ExtendedValue::Finite(q)
    }
}

impl Ord for ExtendedValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => a.cmp(b),
            (ExtendedValue::Finite(_), ExtendedValue::Infinity) => Ordering::Less,
            (ExtendedValue::Infinity, ExtendedValue::Finite(_)) => Ordering::Greater,
            (ExtendedValue::Infinity, ExtendedValue::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtendedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq<Rational> for ExtendedValue {
    fn eq(&self, other: &Rational) -> bool {
        self.finite() == Some(other)
    }
}

impl Add for &ExtendedValue {
    type Output = ExtendedValue;

    fn add(self, rhs: &ExtendedValue) -> ExtendedValue {
        match (self, rhs) {
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => ExtendedValue::Finite(a + b),
            _ => ExtendedValue::Infinity,
        }
    }
}

impl Add for ExtendedValue {
    type Output = ExtendedValue;

    fn add(self, rhs: ExtendedValue) -> ExtendedValue {
        &self + &rhs
    }
}

impl std::iter::Sum for ExtendedValue {
    fn sum<I: Iterator<Item = ExtendedValue>>(iter: I) -> Self {
        iter.fold(ExtendedValue::zero(), |acc, v| acc + v)
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Finite(q) => f.write_str(&format_rational(q)),
            ExtendedValue::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtendedValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "∞" => Ok(ExtendedValue::Infinity),
            other => parse_rational(other).map(ExtendedValue::Finite),
        }
    }
}

impl Serialize for ExtendedValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtendedValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
