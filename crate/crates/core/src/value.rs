//! Exact extended nonnegative values.
//!
//! Every distance, gauge value and modular in the crate lives in `[0, ∞]`.
//! Finite values are arbitrary-precision rationals so that zero tests and
//! triangle checks are decisions rather than tolerance judgments.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational used throughout the crate.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("cannot parse `{0}` as a rational number")]
    Parse(String),
    #[error("value `{0}` is negative")]
    Negative(String),
    #[error("division by zero in `{0}`")]
    ZeroDenominator(String),
}

/// A nonnegative rational or `+∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtNonNeg {
    Finite(Rational),
    Infinite,
}

impl ExtNonNeg {
    pub fn zero() -> Self {
        ExtNonNeg::Finite(Rational::zero())
    }

    pub fn one() -> Self {
        ExtNonNeg::Finite(Rational::one())
    }

    pub fn infinity() -> Self {
        ExtNonNeg::Infinite
    }

    /// Builds a finite value, rejecting negatives.
    pub fn finite(r: Rational) -> Result<Self, ValueError> {
        if r.is_negative() {
            Err(ValueError::Negative(format_rational(&r)))
        } else {
            Ok(ExtNonNeg::Finite(r))
        }
    }

    pub fn from_int(n: u64) -> Self {
        ExtNonNeg::Finite(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        ExtNonNeg::Finite(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtNonNeg::Finite(r) if r.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtNonNeg::Infinite)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtNonNeg::Finite(r) => Some(r),
            ExtNonNeg::Infinite => None,
        }
    }

    pub fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// `self / lambda` for a positive finite scale. `∞ / λ = ∞`.
    pub fn div_scale(&self, lambda: &Rational) -> Self {
        debug_assert!(lambda.is_positive());
        match self {
            ExtNonNeg::Finite(r) => ExtNonNeg::Finite(r / lambda),
            ExtNonNeg::Infinite => ExtNonNeg::Infinite,
        }
    }

    /// Multiplication by a nonnegative finite rational with `0 · ∞ = 0`.
    pub fn mul_rational(&self, k: &Rational) -> Self {
        debug_assert!(!k.is_negative());
        match self {
            ExtNonNeg::Finite(r) => ExtNonNeg::Finite(r * k),
            ExtNonNeg::Infinite if k.is_zero() => ExtNonNeg::zero(),
            ExtNonNeg::Infinite => ExtNonNeg::Infinite,
        }
    }

    /// Closest `f64`, with `∞` mapped to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExtNonNeg::Finite(r) => r.to_f64().unwrap_or(f64::INFINITY),
            ExtNonNeg::Infinite => f64::INFINITY,
        }
    }

    /// Comparison `self ≤ other + tol`, or exact comparison when `tol` is `None`.
    pub fn le_tol(&self, other: &Self, tol: Option<&Rational>) -> bool {
        match (tol, self, other) {
            (None, _, _) => self <= other,
            (Some(_), _, ExtNonNeg::Infinite) => true,
            (Some(_), ExtNonNeg::Infinite, ExtNonNeg::Finite(_)) => false,
            (Some(t), ExtNonNeg::Finite(a), ExtNonNeg::Finite(b)) => a <= &(b + t),
        }
    }

    /// Zero test, exact or within the absolute tolerance.
    pub fn is_zero_tol(&self, tol: Option<&Rational>) -> bool {
        match (tol, self) {
            (None, _) => self.is_zero(),
            (Some(_), ExtNonNeg::Infinite) => false,
            (Some(t), ExtNonNeg::Finite(a)) => a <= t,
        }
    }
}

impl Ord for ExtNonNeg {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNonNeg::Finite(a), ExtNonNeg::Finite(b)) => a.cmp(b),
            (ExtNonNeg::Finite(_), ExtNonNeg::Infinite) => Ordering::Less,
            (ExtNonNeg::Infinite, ExtNonNeg::Finite(_)) => Ordering::Greater,
            (ExtNonNeg::Infinite, ExtNonNeg::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtNonNeg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &ExtNonNeg {
    type Output = ExtNonNeg;

    fn add(self, rhs: &ExtNonNeg) -> ExtNonNeg {
        match (self, rhs) {
            (ExtNonNeg::Finite(a), ExtNonNeg::Finite(b)) => ExtNonNeg::Finite(a + b),
            _ => ExtNonNeg::Infinite,
        }
    }
}

impl Add for ExtNonNeg {
    type Output = ExtNonNeg;

    fn add(self, rhs: ExtNonNeg) -> ExtNonNeg {
        &self + &rhs
    }
}

impl fmt::Display for ExtNonNeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNonNeg::Finite(r) => f.write_str(&format_rational(r)),
            ExtNonNeg::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtNonNeg {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "inf" || t == "∞" || t == "+inf" {
            return Ok(ExtNonNeg::Infinite);
        }
        ExtNonNeg::finite(parse_rational(t)?)
    }
}

impl Serialize for ExtNonNeg {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtNonNeg {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `"3"`, `"-3/2"` or `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ValueError> {
    let t = s.trim();
    let bad = || ValueError::Parse(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let num: BigInt = n.trim().parse().map_err(|_| bad())?;
        let den: BigInt = d.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(ValueError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_digits}{frac_part}");
        let mut num: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
        return Ok(Rational::new(num, den));
    }
    let num: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(num))
}

/// Canonical string form: `"3"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact `n`-th root of a nonnegative rational, if it is rational.
pub fn exact_root(x: &Rational, n: u32) -> Option<Rational> {
    if x.is_negative() || n == 0 {
        return None;
    }
    if n == 1 || x.is_zero() {
        return Some(x.clone());
    }
    let num_root = x.numer().nth_root(n);
    let den_root = x.denom().nth_root(n);
    if num_root.pow(n) == *x.numer() && den_root.pow(n) == *x.denom() {
        Some(Rational::new(num_root, den_root))
    } else {
        None
    }
}

/// Exact `x^p` for rational `p = a/b > 0`, if the result is rational.
pub fn exact_pow(x: &Rational, p: &Rational) -> Option<Rational> {
    if !p.is_positive() || x.is_negative() {
        return None;
    }
    let a = p.numer().to_u32()?;
    let b = p.denom().to_u32()?;
    let root = exact_root(x, b)?;
    Some(num_traits::pow(root, a as usize))
}

/// Converts a finite `f64` into the exact rational it denotes.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let v: ExtNonNeg = "3/2".parse().unwrap();
        assert_eq!(v.to_string(), "3/2");
        assert_eq!("6/4".parse::<ExtNonNeg>().unwrap().to_string(), "3/2");
        assert_eq!("inf".parse::<ExtNonNeg>().unwrap(), ExtNonNeg::Infinite);
        assert_eq!("0.25".parse::<ExtNonNeg>().unwrap(), ExtNonNeg::ratio(1, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), frac(-1, 2));
        assert!(matches!("-1".parse::<ExtNonNeg>(), Err(ValueError::Negative(_))));
        assert!(matches!("1/0".parse::<ExtNonNeg>(), Err(ValueError::ZeroDenominator(_))));
        assert!("abc".parse::<ExtNonNeg>().is_err());
        assert!("1.".parse::<ExtNonNeg>().is_err());
    }

    #[test]
    fn infinity_absorbs_and_is_maximal() {
        let a = ExtNonNeg::from_int(5);
        assert_eq!(&a + &ExtNonNeg::Infinite, ExtNonNeg::Infinite);
        assert!(ExtNonNeg::Infinite > a);
        assert_eq!(ExtNonNeg::max_of(&a, &ExtNonNeg::Infinite), ExtNonNeg::Infinite);
        assert_eq!(ExtNonNeg::min_of(&a, &ExtNonNeg::Infinite), a);
        assert_eq!(ExtNonNeg::Infinite.mul_rational(&int(0)), ExtNonNeg::zero());
    }

    #[test]
    fn roots() {
        assert_eq!(exact_root(&frac(9, 4), 2), Some(frac(3, 2)));
        assert_eq!(exact_root(&int(2), 2), None);
        assert_eq!(exact_pow(&int(4), &frac(3, 2)), Some(int(8)));
        assert_eq!(exact_pow(&int(2), &frac(1, 2)), None);
    }

    #[test]
    fn tolerance_comparisons() {
        let tol = frac(1, 1000);
        let a = ExtNonNeg::ratio(1001, 1000);
        assert!(a.le_tol(&ExtNonNeg::one(), Some(&tol)));
        assert!(!a.le_tol(&ExtNonNeg::one(), None));
        assert!(ExtNonNeg::ratio(1, 2000).is_zero_tol(Some(&tol)));
        assert!(!ExtNonNeg::Infinite.is_zero_tol(Some(&tol)));
    }
}
