use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::Field;
use crate::error::{Error, Result};

/// Element `re + im*i` of the Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(
            BigRational::from_integer(re.into()),
            BigRational::from_integer(im.into()),
        )
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `re^2 + im^2`.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussianRational::new(&self.re * &o.re, BigRational::zero());
        }
        GaussianRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

macro_rules! forward_by_value {
    ($ty:ty, $($tr:ident $method:ident),*) => {$(
        impl $tr for $ty {
            type Output = $ty;
            fn $method(self, o: $ty) -> $ty {
                $tr::$method(&self, &o)
            }
        }
    )*};
}
pub(crate) use forward_by_value;

forward_by_value!(GaussianRational, Add add, Sub sub, Mul mul);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }
}

impl Field for GaussianRational {
    const KIND: &'static str = "gaussian";
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
            return Err(Error::DivisionByZero);
        }
        if self.im.is_zero() {
            return Ok(Self::new(self.re.recip(), BigRational::zero()));
        }
        let n = self.norm_sqr();
        Ok(Self::new(&self.re / &n, -&self.im / &n))
    }

    fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    fn from_rational(r: &BigRational) -> Self {
        Self::new(r.clone(), BigRational::zero())
    }

    fn imag_unit() -> Option<Self> {
        Some(Self::i())
    }

    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        match rng.gen_range(0..6) {
            0 => Self::one(),
            1 => -Self::one(),
            2 => Self::i(),
            3 => -Self::i(),
            4 => Self::from_rational(&half),
            _ => Self::from_rational(&-half),
        }
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write_rational(f, &self.re);
        }
        if !self.re.is_zero() {
            write_rational(f, &self.re)?;
            if self.im.is_positive() {
                write!(f, "+")?;
            }
        }
        if self.im.is_one() {
            write!(f, "i")
        } else if (-&self.im).is_one() {
            write!(f, "-i")
        } else {
            write_rational(f, &self.im)?;
            write!(f, "*i")
        }
    }
}

impl FromStr for GaussianRational {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        crate::expr::parse_scalar(text)
    }
}
