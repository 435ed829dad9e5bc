use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use super::Field;
use crate::error::{Error, Result};

/// Double precision complex number; equality is decided by callers with a
/// relative tolerance.
#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub struct ComplexFloat(pub Complex64);

impl ComplexFloat {
    pub fn new(re: f64, im: f64) -> Self {
        Self(Complex64::new(re, im))
    }

    /// `exp(i * theta)`.
    pub fn phase(theta: f64) -> Self {
        Self(Complex64::from_polar(1.0, theta))
    }
}

impl Add for ComplexFloat {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(self.0 + o.0)
    }
}

impl Sub for ComplexFloat {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(self.0 - o.0)
    }
}

impl Mul for ComplexFloat {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self(self.0 * o.0)
    }
}

impl Neg for ComplexFloat {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Zero for ComplexFloat {
    fn zero() -> Self {
        Self::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }
}

impl One for ComplexFloat {
    fn one() -> Self {
        Self::new(1.0, 0.0)
    }
}

impl Field for ComplexFloat {
    const KIND: &'static str = "float";
    const EXACT: bool = false;

    fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Self(self.0.inv()))
        }
    }

    fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    fn from_rational(r: &BigRational) -> Self {
        Self::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn from_literal(text: &str) -> Result<Self> {
        if text.contains('/') {
            return Ok(Self::from_rational(&super::rational::parse_decimal(text)?));
        }
        text.parse::<f64>()
            .map(|x| Self::new(x, 0.0))
            .map_err(|_| Error::Parse {
                offset: 0,
                message: format!("invalid number `{text}`"),
            })
    }

    fn imag_unit() -> Option<Self> {
        Some(Self::new(0.0, 1.0))
    }

    fn is_negligible(&self, tol: f64, scale: f64) -> bool {
        self.0.norm() <= tol * scale
    }

    fn magnitude(&self) -> f64 {
        self.0.norm()
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }
}

impl fmt::Display for ComplexFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Complex64 { re, im } = self.0;
        if im == 0.0 {
            return write!(f, "{re}");
        }
        if re != 0.0 {
            write!(f, "{re}")?;
            if im > 0.0 {
                write!(f, "+")?;
            }
        }
        write!(f, "{im}*i")
    }
}

impl FromStr for ComplexFloat {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        crate::expr::parse_scalar(text)
    }
}
