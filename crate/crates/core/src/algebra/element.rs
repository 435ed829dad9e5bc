use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::presentation::{accumulate, Presentation, Terms, Word};
use crate::error::{Error, Result};
use crate::scalar::Field;

/// Element of a presented algebra, kept in normal form.
#[derive(Clone)]
pub struct Element<F: Field> {
    pres: Arc<Presentation<F>>,
    terms: Terms<F>,
}

impl<F: Field> Element<F> {
    /// Reduce raw terms to normal form.
    pub fn from_terms(pres: &Arc<Presentation<F>>, raw: &Terms<F>) -> Self {
        Self {
            pres: pres.clone(),
            terms: pres.reduce(raw),
        }
    }

    pub(crate) fn from_normal(pres: &Arc<Presentation<F>>, terms: Terms<F>) -> Self {
        Self {
            pres: pres.clone(),
            terms,
        }
    }

    pub fn zero(pres: &Arc<Presentation<F>>) -> Self {
        Self::from_normal(pres, BTreeMap::new())
    }

    pub fn one(pres: &Arc<Presentation<F>>) -> Self {
        Self::scalar(pres, F::one())
    }

    pub fn scalar(pres: &Arc<Presentation<F>>, c: F) -> Self {
        let mut terms = BTreeMap::new();
        accumulate(&mut terms, Vec::new(), c);
        Self::from_normal(pres, terms)
    }

    pub fn generator(pres: &Arc<Presentation<F>>, index: u8) -> Self {
        Self::word(pres, &[index])
    }

    pub fn word(pres: &Arc<Presentation<F>>, w: &[u8]) -> Self {
        Self::from_normal(pres, pres.reduce_word(w).into_iter().collect())
    }

    /// Parse the canonical element syntax.
    pub fn parse(pres: &Arc<Presentation<F>>, text: &str) -> Result<Self> {
        Ok(Self::from_terms(pres, &pres.parse_free(text)?))
    }

    pub fn presentation(&self) -> &Arc<Presentation<F>> {
        &self.pres
    }

    pub fn terms(&self) -> &Terms<F> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a normal-form word.
    pub fn coeff(&self, w: &[u8]) -> F {
        self.terms.get(w).cloned().unwrap_or_else(F::zero)
    }

    /// Scalar value if the element is a multiple of the unit.
    pub fn as_scalar(&self) -> Option<F> {
        match self.terms.len() {
            0 => Some(F::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// Maximal word length, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Vec::len).max()
    }

    fn same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.pres, &other.pres) {
            Ok(())
        } else {
            Err(Error::PresentationMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            accumulate(&mut terms, w.clone(), c.clone());
        }
        Ok(Self::from_normal(&self.pres, terms))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        let mut terms = BTreeMap::new();
        for (u, x) in &self.terms {
            for (v, y) in &other.terms {
                let c = x.mul_ref(y);
                let mut w: Word = u.clone();
                w.extend_from_slice(v);
                for (nw, c2) in self.pres.reduce_word(&w) {
                    accumulate(&mut terms, nw, c.mul_ref(&c2));
                }
            }
        }
        Ok(Self::from_normal(&self.pres, terms))
    }

    pub fn neg_ref(&self) -> Self {
        Self::from_normal(
            &self.pres,
            self.terms.iter().map(|(w, c)| (w.clone(), c.neg_ref())).collect(),
        )
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(&self.pres);
        }
        Self::from_normal(
            &self.pres,
            self.terms.iter().map(|(w, x)| (w.clone(), c.mul_ref(x))).collect(),
        )
    }

    /// Image under the star structure of the presentation.
    pub fn star(&self) -> Result<Self> {
        Ok(Self::from_normal(&self.pres, self.pres.star_terms(&self.terms)?))
    }

    /// Apply a scalar map to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&F) -> F) -> Self {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            accumulate(&mut terms, w.clone(), f(c));
        }
        Self::from_normal(&self.pres, terms)
    }
}

impl<F: Field> PartialEq for Element<F> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.pres, &other.pres) && self.terms == other.terms
    }
}

impl<F: Field> fmt::Display for Element<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pres.render_terms(&self.terms))
    }
}

impl<F: Field> fmt::Debug for Element<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

// Operator forms panic when the operands come from different presentations;
// use the `try_` methods to get an error instead.
impl<F: Field> Add for &Element<F> {
    type Output = Element<F>;
    fn add(self, o: &Element<F>) -> Element<F> {
        self.try_add(o).expect("presentation mismatch")
    }
}

impl<F: Field> Sub for &Element<F> {
    type Output = Element<F>;
    fn sub(self, o: &Element<F>) -> Element<F> {
        self.try_sub(o).expect("presentation mismatch")
    }
}

impl<F: Field> Mul for &Element<F> {
    type Output = Element<F>;
    fn mul(self, o: &Element<F>) -> Element<F> {
        self.try_mul(o).expect("presentation mismatch")
    }
}

impl<F: Field> Neg for &Element<F> {
    type Output = Element<F>;
    fn neg(self) -> Element<F> {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PresentationBuilder;
    use crate::scalar::RatFunc;

    #[test]
    fn mismatch_is_an_error() {
        let p1 = Arc::new(
            PresentationBuilder::new(&["x"])
                .build::<RatFunc>()
                .unwrap(),
        );
        let p2 = Arc::new(
            PresentationBuilder::new(&["x"])
                .build::<RatFunc>()
                .unwrap(),
        );
        let a = Element::generator(&p1, 0);
        let b = Element::generator(&p2, 0);
        assert_eq!(a.try_mul(&b), Err(Error::PresentationMismatch));
    }

    #[test]
    fn render_parse_round_trip() {
        let p = Arc::new(
            PresentationBuilder::new(&["x", "y"])
                .commutative()
                .build::<RatFunc>()
                .unwrap(),
        );
        let e = Element::parse(&p, "(1+q)*y*x^2 - s/(q-1) + i*y").unwrap();
        let text = e.to_string();
        assert_eq!(Element::parse(&p, &text).unwrap(), e, "{text}");
    }
}
