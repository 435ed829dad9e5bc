use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::gaussian::forward_by_value;
use super::{Field, GaussianRational, Poly};
use crate::error::{Error, Result};

type GPoly = Poly<GaussianRational>;

/// Reduced quotient of polynomials in `s` over the Gaussian rationals.
///
/// The deformation parameter is `q = s^2`. The denominator is monic and
/// coprime to the numerator; zero is `0/1`.
#[derive(Clone, PartialEq, Debug)]
pub struct RatFunc {
    num: GPoly,
    den: GPoly,
}

impl RatFunc {
    pub fn new(num: GPoly, den: GPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    pub fn from_poly(num: GPoly) -> Self {
        Self {
            num,
            den: GPoly::one(),
        }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(GPoly::constant(c))
    }

    pub fn s() -> Self {
        Self::from_poly(GPoly::monomial(GaussianRational::one(), 1))
    }

    pub fn q() -> Self {
        Self::from_poly(GPoly::monomial(GaussianRational::one(), 2))
    }

    /// `s^k` for any integer `k`.
    pub fn s_pow(k: i64) -> Self {
        let mono = GPoly::monomial(GaussianRational::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            Self::from_poly(mono)
        } else {
            Self {
                num: GPoly::one(),
                den: mono,
            }
        }
    }

    pub fn numer(&self) -> &GPoly {
        &self.num
    }

    pub fn denom(&self) -> &GPoly {
        &self.den
    }

    /// Constant value, if the function does not depend on `s`.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(GaussianRational::zero()),
            (Some(0), Some(0)) => Some(self.num.coeffs()[0].clone()),
            _ => None,
        }
    }

    fn reduced(num: GPoly, den: GPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_one() {
            return Self { num, den };
        }
        let (num, den) = if den.is_monomial() {
            let k = den.valuation().unwrap().min(num.valuation().unwrap());
            (num.shift_down(k), den.shift_down(k))
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let lead = den.lead().unwrap().clone();
        if lead.is_one() {
            Self { num, den }
        } else {
            let inv = lead.inv().unwrap();
            Self {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    /// Substitute `s = s0`.
    pub fn evaluate_at(&self, s0: &GaussianRational) -> Result<GaussianRational> {
        let d = self.den.eval(s0);
        if d.is_zero() {
            return Err(Error::Pole(format!("s = {s0}")));
        }
        self.num.eval(s0).div_ref(&d)
    }

    /// Substitute a floating point `s = s0`; a denominator below `tol` is a pole.
    pub fn evaluate_complex(&self, s0: Complex64, tol: f64) -> Result<Complex64> {
        let eval = |p: &GPoly| {
            p.coeffs()
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, c| acc * s0 + c.to_complex())
        };
        let d = eval(&self.den);
        if d.norm() <= tol {
            return Err(Error::Pole(format!("s = {s0}")));
        }
        Ok(eval(&self.num) / d)
    }

    /// Square root in the real subfield, if both parts are perfect squares of
    /// polynomials with rational coefficients.
    pub fn real_sqrt(&self) -> Option<Self> {
        let num = poly_sqrt(&self.num)?;
        let den = poly_sqrt(&self.den)?;
        Some(Self::reduced(num, den))
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r < &BigRational::zero() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

/// Square root of a polynomial with real rational coefficients, positive lead.
fn poly_sqrt(p: &GPoly) -> Option<GPoly> {
    if p.is_zero() {
        return Some(GPoly::zero());
    }
    if p.coeffs().iter().any(|c| !c.is_real()) {
        return None;
    }
    let deg = p.degree()?;
    if deg % 2 == 1 {
        return None;
    }
    let half = deg / 2;
    let lead = rational_sqrt(&p.lead()?.re)?;
    let two_lead = GaussianRational::from_rational(&(&lead + &lead));
    let mut root = vec![GaussianRational::zero(); half + 1];
    root[half] = GaussianRational::from_rational(&lead);
    for k in (0..half).rev() {
        let mut acc = p.coeffs()[half + k].clone();
        for j in (k + 1)..=half {
            let other = half + k - j;
            if other > k && other <= half {
                acc = acc.sub_ref(&root[j].mul_ref(&root[other]));
            }
        }
        root[k] = acc.div_ref(&two_lead).ok()?;
    }
    let root = GPoly::from_coeffs(root);
    (root.mul(&root) == *p).then_some(root)
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_one() {
                return RatFunc::from_poly(self.num.add(&o.num));
            }
            return RatFunc::reduced(self.num.add(&o.num), self.den.clone());
        }
        if self.den.is_monomial() && o.den.is_monomial() {
            let (a, b) = (self.den.degree().unwrap(), o.den.degree().unwrap());
            let k = a.max(b);
            let num = self.num.shift_up(k - a).add(&o.num.shift_up(k - b));
            return RatFunc::reduced(num, GPoly::monomial(GaussianRational::one(), k));
        }
        RatFunc::reduced(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.num.is_zero() || o.num.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(self.num.mul(&o.num));
        }
        RatFunc::reduced(self.num.mul(&o.num), self.den.mul(&o.den))
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

forward_by_value!(RatFunc, Add add, Sub sub, Mul mul);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        Self::from_poly(GPoly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        Self::from_poly(GPoly::one())
    }
    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
}

impl Field for RatFunc {
    const KIND: &'static str = "ratfunc";
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
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone()))
    }

    fn conj(&self) -> Self {
        Self {
            num: self.num.map(Field::conj),
            den: self.den.map(Field::conj),
        }
    }

    fn from_rational(r: &BigRational) -> Self {
        Self::constant(GaussianRational::from_rational(r))
    }

    fn imag_unit() -> Option<Self> {
        Some(Self::constant(GaussianRational::i()))
    }

    fn param_s() -> Option<Self> {
        Some(Self::s())
    }

    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        match rng.gen_range(0..8) {
            6 => Self::s(),
            7 => Self::s_pow(-1),
            _ => Self::constant(GaussianRational::sample(rng)),
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.num.render("s");
        if self.den.is_one() {
            return write!(f, "{num}");
        }
        let num_terms = self.num.coeffs().iter().filter(|c| !c.is_zero()).count();
        let num = if num_terms > 1 { format!("({num})") } else { num };
        let den = self.den.render("s");
        if self.den.is_monomial() {
            write!(f, "{num}/{den}")
        } else {
            write!(f, "{num}/({den})")
        }
    }
}

impl FromStr for RatFunc {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        crate::expr::parse_scalar(text)
    }
}
