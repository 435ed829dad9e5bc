use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::Field;
use crate::error::{Error, Result};

/// Arbitrary precision rational number with positive reduced denominator.
pub type Rational = BigRational;

impl Field for BigRational {
    const KIND: &'static str = "rational";
    const EXACT: bool = true;

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }

    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::MAX)
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        match rng.gen_range(0..5) {
            0 => BigRational::one(),
            1 => -BigRational::one(),
            2 => half,
            3 => -half,
            _ => BigRational::from_integer(BigInt::from(2)),
        }
    }
}

/// Parse an unsigned decimal literal such as `12`, `0.25` or `3/4` exactly.
pub(crate) fn parse_decimal(text: &str) -> Result<BigRational> {
    let bad = || Error::Parse {
        offset: 0,
        message: format!("invalid number `{text}`"),
    };
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_decimal(num)?;
        let den = parse_decimal(den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(num / den);
    }
    let (int_part, frac_part) = text.split_once('.').unwrap_or((text, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok(BigRational::new(numer, denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(
            parse_decimal("0.25").unwrap(),
            BigRational::new(1.into(), 4.into())
        );
        assert_eq!(
            parse_decimal("3/6").unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        assert!(parse_decimal("1/0").is_err());
        assert!(parse_decimal("x").is_err());
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(BigRational::zero().inv(), Err(Error::DivisionByZero));
    }
}
