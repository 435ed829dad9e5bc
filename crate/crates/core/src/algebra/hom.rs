use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use super::element::Element;
use super::presentation::{accumulate, Presentation, Terms};
use crate::error::{Error, Result};
use crate::scalar::Field;

/// Unital algebra homomorphism given by generator images.
///
/// A homomorphism that scales every generator (`g -> c_g g` on the same
/// presentation) is recorded as diagonal and applied without multiplication.
pub struct AlgebraHom<F: Field> {
    source: Arc<Presentation<F>>,
    target: Arc<Presentation<F>>,
    images: Vec<Element<F>>,
    diagonal: Option<Vec<F>>,
    cache: RwLock<HashMap<Vec<u8>, Terms<F>>>,
}

impl<F: Field> Clone for AlgebraHom<F> {
    fn clone(&self) -> Self {
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            images: self.images.clone(),
            diagonal: self.diagonal.clone(),
            cache: RwLock::new(HashMap::new()),
        }
    }
}

impl<F: Field> std::fmt::Debug for AlgebraHom<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names = self.source.generator_names();
        let parts: Vec<String> = names
            .iter()
            .zip(&self.images)
            .map(|(n, img)| format!("{n} -> {img}"))
            .collect();
        write!(f, "AlgebraHom({})", parts.join(", "))
    }
}

impl<F: Field> AlgebraHom<F> {
    /// Homomorphism with the given generator images; checked against every
    /// relation of the source.
    pub fn new(
        source: &Arc<Presentation<F>>,
        target: &Arc<Presentation<F>>,
        images: Vec<Element<F>>,
    ) -> Result<Self> {
        if images.len() != source.num_generators() {
            return Err(Error::DimensionMismatch {
                expected: source.num_generators(),
                got: images.len(),
            });
        }
        if images.iter().any(|e| !Arc::ptr_eq(e.presentation(), target)) {
            return Err(Error::PresentationMismatch);
        }
        let diagonal = if Arc::ptr_eq(source, target) {
            images
                .iter()
                .enumerate()
                .map(|(g, img)| {
                    let t = img.terms();
                    match t.len() {
                        0 => Some(F::zero()),
                        1 => t.get(&vec![g as u8]).cloned(),
                        _ => None,
                    }
                })
                .collect::<Option<Vec<F>>>()
        } else {
            None
        };
        let hom = Self {
            source: source.clone(),
            target: target.clone(),
            images,
            diagonal,
            cache: RwLock::new(HashMap::new()),
        };
        hom.check_relations()?;
        Ok(hom)
    }

    /// Endomorphism from generator images written in the element syntax.
    pub fn parse_endo(pres: &Arc<Presentation<F>>, images: &[&str]) -> Result<Self> {
        let images = images
            .iter()
            .map(|t| Element::parse(pres, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pres, pres, images)
    }

    pub fn identity(pres: &Arc<Presentation<F>>) -> Self {
        let images = (0..pres.num_generators() as u8)
            .map(|g| Element::generator(pres, g))
            .collect();
        Self::new(pres, pres, images).expect("identity respects every relation")
    }

    /// `g -> factors[g] * g`.
    pub fn diagonal(pres: &Arc<Presentation<F>>, factors: Vec<F>) -> Result<Self> {
        let images = factors
            .iter()
            .enumerate()
            .map(|(g, c)| Element::generator(pres, g as u8).scale(c))
            .collect();
        Self::new(pres, pres, images)
    }

    pub fn source(&self) -> &Arc<Presentation<F>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presentation<F>> {
        &self.target
    }

    pub fn images(&self) -> &[Element<F>] {
        &self.images
    }

    pub fn diagonal_factors(&self) -> Option<&[F]> {
        self.diagonal.as_deref()
    }

    pub fn apply_word(&self, w: &[u8]) -> Terms<F> {
        if let Some(factors) = &self.diagonal {
            let c = w
                .iter()
                .fold(F::one(), |acc, &g| acc.mul_ref(&factors[g as usize]));
            let mut out = BTreeMap::new();
            for (nw, c2) in self.target.reduce_word(w) {
                accumulate(&mut out, nw, c.mul_ref(&c2));
            }
            return out;
        }
        if let Some(hit) = self.cache.read().expect("cache lock").get(w) {
            return hit.clone();
        }
        let mut acc = Element::one(&self.target);
        for &g in w {
            acc = &acc * &self.images[g as usize];
        }
        let out = acc.terms().clone();
        self.cache
            .write()
            .expect("cache lock")
            .insert(w.to_vec(), out.clone());
        out
    }

    pub fn apply_terms(&self, terms: &Terms<F>) -> Terms<F> {
        let mut out = BTreeMap::new();
        for (w, c) in terms {
            for (nw, c2) in self.apply_word(w) {
                accumulate(&mut out, nw, c.mul_ref(&c2));
            }
        }
        out
    }

    pub fn apply(&self, f: &Element<F>) -> Element<F> {
        Element::from_normal(&self.target, self.apply_terms(f.terms()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(other.target(), &self.source) {
            return Err(Error::PresentationMismatch);
        }
        let images = other.images.iter().map(|img| self.apply(img)).collect();
        Self::new(&other.source, &self.target, images)
    }

    /// Integer power of a diagonal endomorphism, or a nonnegative power of any.
    pub fn pow(&self, n: i64) -> Result<Self> {
        if let Some(factors) = &self.diagonal {
            let factors = factors
                .iter()
                .map(|c| c.pow_i(n))
                .collect::<Result<Vec<_>>>()?;
            return Self::diagonal(&self.source, factors);
        }
        if n < 0 {
            return Err(Error::NonInvertible(
                "negative power of a non-diagonal map".into(),
            ));
        }
        let mut acc = Self::identity(&self.source);
        for _ in 0..n {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// `alpha^*(g) = alpha(g^*)^*` on generators.
    pub fn star_conjugate(&self) -> Result<Self> {
        let table = self.source.star_table().ok_or(Error::NoStarStructure)?;
        let images = table
            .iter()
            .map(|&gs| self.images[gs as usize].star())
            .collect::<Result<Vec<_>>>()?;
        Self::new(&self.source, &self.target, images)
    }

    fn check_relations(&self) -> Result<()> {
        for rule in self.source.rules() {
            let lhs = self.apply_word(&rule.lhs);
            let rhs_terms: Terms<F> = rule.rhs.iter().cloned().collect();
            let rhs = self.apply_terms(&rhs_terms);
            if lhs != rhs {
                return Err(Error::RelationViolated {
                    relation: rule.name.clone(),
                    witness: format!(
                        "{} vs {}",
                        self.target.render_terms(&lhs),
                        self.target.render_terms(&rhs)
                    ),
                });
            }
        }
        Ok(())
    }
}

impl<F: Field> PartialEq for AlgebraHom<F> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.source, &other.source)
            && Arc::ptr_eq(&self.target, &other.target)
            && self.images == other.images
    }
}
