//! Rational scalars.
//!
//! [`Scalar`] is an arbitrary-precision rational kept in lowest terms with a
//! positive denominator. The textual form is `"a/b"`, or just `"a"` when the
//! denominator is one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    assert!(den != 0, "zero denominator");
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// `(-1)^k`.
pub fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        one()
    } else {
        -one()
    }
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let t = s.trim();
    let bad = || Error::parse(format!("\"{s}\""), "expected a rational \"a/b\" or integer \"a\"");
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::parse(format!("\"{s}\""), "zero denominator"));
            }
            Ok(Scalar::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Scalar::from_integer(n))
        }
    }
}

pub fn format_scalar(x: &Scalar) -> String {
    x.to_string()
}

pub fn format_vector(v: &[Scalar]) -> String {
    let parts: Vec<String> = v.iter().map(format_scalar).collect();
    format!("({})", parts.join(", "))
}

pub fn is_integral(x: &Scalar) -> bool {
    x.denom().is_one()
}

pub fn abs(x: &Scalar) -> Scalar {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_agree() {
        assert_eq!(parse_scalar("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse_scalar("-3").unwrap(), int(-3));
        assert_eq!(parse_scalar("4/-2").unwrap(), int(-2));
        assert_eq!(format_scalar(&ratio(6, 4)), "3/2");
        assert_eq!(format_scalar(&int(5)), "5");
        assert_eq!(format_scalar(&ratio(-1, 3)), "-1/3");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar("").is_err());
    }

    #[test]
    fn always_reduced_with_positive_denominator() {
        let x = parse_scalar("10/-4").unwrap();
        assert_eq!(x.numer(), &BigInt::from(-5));
        assert_eq!(x.denom(), &BigInt::from(2));
    }
}
