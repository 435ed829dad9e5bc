use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{approx_eq, ComplexFloat, Field, GaussianRational, RatFunc};
use crate::error::{Error, Result};

/// Which coefficient field a run uses.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Rational,
    Gaussian,
    Ratfunc,
    Float,
}

/// A coefficient of any supported field.
///
/// Binary operations require both operands to carry the same variant.
#[derive(Clone, PartialEq, Debug)]
pub enum Scalar {
    Rational(BigRational),
    Gaussian(GaussianRational),
    RatFunc(RatFunc),
    Float(ComplexFloat),
}

macro_rules! binary {
    ($name:ident, $method:ident) => {
        pub fn $name(&self, other: &Self) -> Result<Self> {
            Ok(match (self, other) {
                (Self::Rational(a), Self::Rational(b)) => Self::Rational(a.$method(b)),
                (Self::Gaussian(a), Self::Gaussian(b)) => Self::Gaussian(a.$method(b)),
                (Self::RatFunc(a), Self::RatFunc(b)) => Self::RatFunc(a.$method(b)),
                (Self::Float(a), Self::Float(b)) => Self::Float(a.$method(b)),
                _ => return Err(Error::VariantMismatch(self.kind_name(), other.kind_name())),
            })
        }
    };
}

impl Scalar {
    pub fn kind(&self) -> ScalarKind {
        match self {
            Self::Rational(_) => ScalarKind::Rational,
            Self::Gaussian(_) => ScalarKind::Gaussian,
            Self::RatFunc(_) => ScalarKind::Ratfunc,
            Self::Float(_) => ScalarKind::Float,
        }
    }

    fn kind_name(&self) -> &'static str {
        match self {
            Self::Rational(_) => BigRational::KIND,
            Self::Gaussian(_) => GaussianRational::KIND,
            Self::RatFunc(_) => RatFunc::KIND,
            Self::Float(_) => ComplexFloat::KIND,
        }
    }

    /// Parse `text` into the field selected by `kind`.
    pub fn parse(kind: ScalarKind, text: &str) -> Result<Self> {
        use crate::expr::parse_scalar;
        Ok(match kind {
            ScalarKind::Rational => Self::Rational(parse_scalar(text)?),
            ScalarKind::Gaussian => Self::Gaussian(parse_scalar(text)?),
            ScalarKind::Ratfunc => Self::RatFunc(parse_scalar(text)?),
            ScalarKind::Float => Self::Float(parse_scalar(text)?),
        })
    }

    binary!(checked_add, add_ref);
    binary!(checked_sub, sub_ref);
    binary!(checked_mul, mul_ref);

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(match self {
            Self::Rational(a) => Self::Rational(a.inv()?),
            Self::Gaussian(a) => Self::Gaussian(a.inv()?),
            Self::RatFunc(a) => Self::RatFunc(a.inv()?),
            Self::Float(a) => Self::Float(a.inv()?),
        })
    }

    pub fn conj(&self) -> Self {
        match self {
            Self::Rational(a) => Self::Rational(a.conj()),
            Self::Gaussian(a) => Self::Gaussian(a.conj()),
            Self::RatFunc(a) => Self::RatFunc(a.conj()),
            Self::Float(a) => Self::Float(a.conj()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Rational(a) => a.is_zero(),
            Self::Gaussian(a) => a.is_zero(),
            Self::RatFunc(a) => a.is_zero(),
            Self::Float(a) => a.is_zero(),
        }
    }

    /// Equality: structural for exact variants, relative tolerance for floats.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> Result<bool> {
        match (self, other) {
            (Self::Float(a), Self::Float(b)) => Ok(approx_eq(a, b, tol)),
            _ if self.kind() == other.kind() => Ok(self == other),
            _ => Err(Error::VariantMismatch(self.kind_name(), other.kind_name())),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational(a) => write!(f, "{}", a),
            Self::Gaussian(a) => write!(f, "{a}"),
            Self::RatFunc(a) => write!(f, "{a}"),
            Self::Float(a) => write!(f, "{a}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixing_variants_is_an_error() {
        let a = Scalar::parse(ScalarKind::Rational, "1/2").unwrap();
        let b = Scalar::parse(ScalarKind::Gaussian, "i").unwrap();
        assert!(matches!(a.checked_add(&b), Err(Error::VariantMismatch(..))));
        assert!(a.approx_eq(&b, 1e-9).is_err());
    }

    #[test]
    fn division_by_zero() {
        let a = Scalar::parse(ScalarKind::Ratfunc, "s").unwrap();
        let z = Scalar::parse(ScalarKind::Ratfunc, "0").unwrap();
        assert_eq!(a.checked_div(&z), Err(Error::DivisionByZero));
    }

    #[test]
    fn float_equality_uses_tolerance() {
        let a = Scalar::parse(ScalarKind::Float, "1").unwrap();
        let b = Scalar::parse(ScalarKind::Float, "1.0000000001").unwrap();
        assert!(a.approx_eq(&b, 1e-9).unwrap());
        assert!(!a.approx_eq(&b, 1e-12).unwrap());
    }

    #[test]
    fn rational_rejects_imaginary_unit() {
        assert!(Scalar::parse(ScalarKind::Rational, "i").is_err());
    }
}
