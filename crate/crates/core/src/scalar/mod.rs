//! Coefficient fields.
//!
//! Every algebraic structure in the crate is generic over [`Field`]. Four
//! implementations are provided: [`Rational`], [`GaussianRational`],
//! [`RatFunc`] (rational functions in the square root `s` of the deformation
//! parameter `q = s^2`, over the Gaussian rationals) and [`ComplexFloat`].
//! The tagged [`Scalar`] union carries any of them and refuses to mix
//! variants silently.

mod float;
mod gaussian;
mod poly;
mod ratfunc;
mod rational;
mod tagged;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

pub use float::ComplexFloat;
pub use gaussian::GaussianRational;
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use rational::Rational;
pub use tagged::{Scalar, ScalarKind};

use crate::error::Result;

/// A commutative field with an involutive conjugation.
///
/// Exact implementations compare structurally; the floating point one uses
/// [`Field::is_negligible`] with a caller supplied relative tolerance.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Short name used in error messages and reports.
    const KIND: &'static str;
    /// True when equality is exact.
    const EXACT: bool;

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }

    fn inv(&self) -> Result<Self>;

    fn div_ref(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_ref(&other.inv()?))
    }

    /// Field automorphism `i -> -i` (fixing `s`).
    fn conj(&self) -> Self;

    fn from_rational(r: &BigRational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(n.into()))
    }

    /// Numeric literal as written in the canonical text syntax.
    fn from_literal(text: &str) -> Result<Self> {
        Ok(Self::from_rational(&rational::parse_decimal(text)?))
    }

    /// The imaginary unit, if the field contains it.
    fn imag_unit() -> Option<Self> {
        None
    }

    /// The square root `s` of the deformation parameter, if present.
    fn param_s() -> Option<Self> {
        None
    }

    /// Zero test up to a relative tolerance `tol * scale`.
    fn is_negligible(&self, _tol: f64, _scale: f64) -> bool {
        self.is_zero()
    }

    /// Magnitude used for scaling tolerances and choosing pivots.
    fn magnitude(&self) -> f64;

    /// Draw from the small coefficient alphabet used by random checks.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Rendering suitable as the left factor of a product.
    fn render_factor(&self) -> String {
        let text = self.to_string();
        if needs_parens(&text) {
            format!("({text})")
        } else {
            text
        }
    }

    fn pow_i(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul_ref(&base);
        }
        Ok(acc)
    }
}

/// True if `text` contains a top-level `+`, `-` or `/` past its first character.
pub(crate) fn needs_parens(text: &str) -> bool {
    let mut depth = 0i32;
    for (pos, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' | '/' if depth == 0 && pos > 0 => return true,
            _ => {}
        }
    }
    false
}

/// `1 + q + ... + q^(n-1)` for `n >= 0`, with `q = s^2`.
pub fn q_integer(n: u32) -> RatFunc {
    let q = RatFunc::q();
    let mut acc = RatFunc::zero();
    let mut power = RatFunc::one();
    for _ in 0..n {
        acc = acc.add_ref(&power);
        power = power.mul_ref(&q);
    }
    acc
}

/// Approximate equality with tolerance relative to the operands.
pub fn approx_eq<F: Field>(a: &F, b: &F, tol: f64) -> bool {
    let scale = 1f64.max(a.magnitude()).max(b.magnitude());
    a.sub_ref(b).is_negligible(tol, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_integers() {
        assert!(q_integer(0).is_zero());
        assert!(q_integer(1).is_one());
        let three: RatFunc = "1+q+q^2".parse().unwrap();
        assert_eq!(q_integer(3), three);
    }

    #[test]
    fn q_integer_at_q_two() {
        let value = q_integer(3)
            .evaluate_complex(num_complex::Complex64::new(2f64.sqrt(), 0.0), 1e-12)
            .unwrap();
        assert!((value.re - 7.0).abs() < 1e-12 && value.im.abs() < 1e-12);
    }

    #[test]
    fn parens_detection() {
        assert!(needs_parens("1+2*i"));
        assert!(!needs_parens("-s^2"));
        assert!(needs_parens("1/s"));
    }
}
