//! Exact rational numbers.
//!
//! Every probability, time, path value and payoff in this crate is a
//! [`Rational`]: an arbitrary-precision fraction kept in lowest terms with a
//! positive denominator. Nothing is ever rounded.

use core::fmt;
use core::str::FromStr;

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = num_rational::BigRational;

/// Shorthand for `numer / denom`. Panics if `denom == 0`.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError {
    pub input: String,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a rational literal: {:?} (expected \"p/q\" or an integer)", self.input)
    }
}

impl core::error::Error for ParseRationalError {}

/// Parses `"p/q"` or an integer literal. Surrounding whitespace is ignored.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { input: input.into() };
    let trimmed = input.trim();
    let (numer, denom) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let numer = BigInt::from_str(numer).map_err(|_| err())?;
    let denom = BigInt::from_str(denom).map_err(|_| err())?;
    if denom.is_zero() {
        return Err(err());
    }
    Ok(Rational::new(numer, denom))
}

/// Serializes as `"p/q"`, or as a bare integer when the denominator is 1.
pub fn format_rational(value: &Rational) -> String {
    alloc::format!("{value}")
}

/// Nearest `f64`; only used for display and Monte Carlo comparisons.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(if value.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

/// Prefix sums `[v0, v0 + v1, ...]`.
pub fn cumulative(values: &[Rational]) -> Vec<Rational> {
    let mut acc = Rational::zero();
    values
        .iter()
        .map(|v| {
            acc += v;
            acc.clone()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -3 ").unwrap(), int(-3));
        assert_eq!(parse_rational("3/-6").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = rat(6, -8);
        assert_eq!(*r.numer(), BigInt::from(-3));
        assert_eq!(*r.denom(), BigInt::from(4));
        assert_eq!(format_rational(&r), "-3/4");
        assert_eq!(format_rational(&int(5)), "5");
    }

    #[test]
    fn cumulative_sums() {
        let c = cumulative(&[rat(1, 4), rat(1, 4), rat(1, 2)]);
        assert_eq!(c, [rat(1, 4), rat(1, 2), one()]);
        assert_eq!(sum(&c), rat(7, 4));
        assert_eq!(to_f64(&rat(1, 4)), 0.25);
    }
}
