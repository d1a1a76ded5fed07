//! Unreduced big rationals.
//!
//! The binomial tails checked here have denominators of `10^5` bits and more;
//! normalizing by gcd after every operation would dominate the run time, and
//! every comparison we need is a single cross-multiplication.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `num / den` with `den > 0`, never reduced.
#[derive(Debug, Clone)]
pub struct Exact {
    num: BigInt,
    den: BigInt,
}

impl Exact {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if den.is_negative() {
            Self { num: -num, den: -den }
        } else {
            Self { num, den }
        }
    }

    pub fn zero() -> Self {
        Self::new(BigInt::zero(), BigInt::one())
    }

    pub fn one() -> Self {
        Self::new(BigInt::one(), BigInt::one())
    }

    pub fn from_ratio(r: &BigRational) -> Self {
        Self::new(r.numer().clone(), r.denom().clone())
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn sub(&self, other: &Exact) -> Exact {
        if self.den == other.den {
            return Exact::new(&self.num - &other.num, self.den.clone());
        }
        Exact::new(&self.num * &other.den - &other.num * &self.den, &self.den * &other.den)
    }

    pub fn mul(&self, other: &Exact) -> Exact {
        Exact::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn div(&self, other: &Exact) -> Exact {
        assert!(!other.is_zero(), "division by zero");
        Exact::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn to_f64(&self) -> f64 {
        BigRational::new_raw(self.num.clone(), self.den.clone())
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(self.num.clone(), self.den.clone())
    }

    pub fn cmp_exact(&self, other: &Exact) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }

    pub fn cmp_ratio(&self, other: &BigRational) -> Ordering {
        (&self.num * other.denom()).cmp(&(other.numer() * &self.den))
    }

    pub fn gt(&self, other: &BigRational) -> bool {
        self.cmp_ratio(other) == Ordering::Greater
    }
}

impl PartialEq for Exact {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_exact(other) == Ordering::Equal
    }
}

/// Parses a plain decimal literal (`"1.7"`, `"-0.05"`, `"3"`) into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a decimal number: `{s}`"));
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// The decimal value printed by `f64`'s shortest round-trip formatting.
pub fn decimal_from_f64(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(format!("{x} is not finite")));
    }
    let s = format!("{x}");
    if s.contains('e') {
        return BigRational::from_float(x).ok_or(Error::Parse(s));
    }
    parse_decimal(&s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimals() {
        assert_eq!(parse_decimal("1.7").unwrap(), r(17, 10));
        assert_eq!(parse_decimal("-0.05").unwrap(), r(-1, 20));
        assert_eq!(parse_decimal("3").unwrap(), r(3, 1));
        assert_eq!(parse_decimal(".5").unwrap(), r(1, 2));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("abc").is_err());
        assert_eq!(decimal_from_f64(0.17).unwrap(), r(17, 100));
    }

    #[test]
    fn arithmetic_without_reduction() {
        let a = Exact::from_ratio(&r(1, 3));
        let b = Exact::new(2.into(), 6.into());
        assert!(a == b);
        let c = Exact::one().sub(&a).div(&b);
        assert_eq!(c.to_ratio(), r(2, 1));
        assert!(c.gt(&r(199, 100)));
        assert!(!c.gt(&r(2, 1)));
        assert!((a.mul(&b).to_f64() - 1.0 / 9.0).abs() < 1e-16);
    }
}
