//! Exact rational arithmetic helpers.
//!
//! All probabilities, costs and values in this crate are `BigRational`
//! (arbitrary-precision `p/q`). Nothing in the solve path ever touches
//! floating point, so equality of beliefs and values is exact.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::error::Error;

pub type Rational = BigRational;

/// Shorthand for a rational from two machine integers.
pub fn rat(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    BigRational::zero()
}

pub fn one() -> Rational {
    BigRational::one()
}

/// Parses `"p/q"` or a bare integer string into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let bad = |_| Error::BadRational(text.to_string());
    match text.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(bad)?;
            let d: BigInt = den.trim().parse().map_err(bad)?;
            if d.is_zero() {
                return Err(Error::BadRational(text.to_string()));
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = text.trim().parse().map_err(bad)?;
            Ok(BigRational::from_integer(n))
        }
    }
}

/// Renders a rational as `p/q`, always with an explicit denominator
/// (`0` prints as `0/1`), so reports are byte-deterministic.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Renders a slice of rationals as a comma-separated `p/q` list. Used as
/// the canonical printable form of a belief's weight vector.
pub fn format_vector(weights: &[Rational]) -> String {
    weights.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_fraction_and_integer() {
        assert_eq!(parse_rational("2/3").unwrap(), rat(2, 3));
        assert_eq!(parse_rational("-7").unwrap(), rat_int(-7));
        assert_eq!(parse_rational(" 4 / 6 ").unwrap(), rat(2, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn format_always_has_denominator() {
        assert_eq!(format_rational(&rat_int(0)), "0/1");
        assert_eq!(format_rational(&rat(47, 60)), "47/60");
        assert_eq!(format_rational(&rat(-1, 2)), "-1/2");
    }
}
