use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use super::element::Element;
use super::hom::AlgebraHom;
use super::presentation::{accumulate, free_mul, Presentation, Terms};
use crate::error::{Error, Result};
use crate::scalar::Field;

/// Linear map with `X(fg) = sigma(f) X(g) + X(f) tau(g)`, given by its values
/// on generators and extended to words by the twisted Leibniz rule.
pub struct SigmaTauDerivation<F: Field> {
    name: String,
    sigma: AlgebraHom<F>,
    tau: AlgebraHom<F>,
    images: Vec<Element<F>>,
    cache: RwLock<HashMap<Vec<u8>, Terms<F>>>,
}

impl<F: Field> Clone for SigmaTauDerivation<F> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            sigma: self.sigma.clone(),
            tau: self.tau.clone(),
            images: self.images.clone(),
            cache: RwLock::new(HashMap::new()),
        }
    }
}

impl<F: Field> std::fmt::Debug for SigmaTauDerivation<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SigmaTauDerivation({})", self.name)
    }
}

impl<F: Field> SigmaTauDerivation<F> {
    /// Build from generator images, rejecting maps that do not respect every
    /// defining relation.
    pub fn new(
        name: &str,
        sigma: AlgebraHom<F>,
        tau: AlgebraHom<F>,
        images: Vec<Element<F>>,
    ) -> Result<Self> {
        let pres = sigma.source().clone();
        if !Arc::ptr_eq(&pres, sigma.target())
            || !Arc::ptr_eq(&pres, tau.source())
            || !Arc::ptr_eq(&pres, tau.target())
            || images.iter().any(|e| !Arc::ptr_eq(e.presentation(), &pres))
        {
            return Err(Error::PresentationMismatch);
        }
        if images.len() != pres.num_generators() {
            return Err(Error::DimensionMismatch {
                expected: pres.num_generators(),
                got: images.len(),
            });
        }
        let der = Self {
            name: name.to_string(),
            sigma,
            tau,
            images,
            cache: RwLock::new(HashMap::new()),
        };
        der.check_well_defined()?;
        Ok(der)
    }

    /// Generator images written in the element syntax.
    pub fn parse(
        name: &str,
        sigma: AlgebraHom<F>,
        tau: AlgebraHom<F>,
        images: &[&str],
    ) -> Result<Self> {
        let pres = sigma.source().clone();
        let images = images
            .iter()
            .map(|t| Element::parse(&pres, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, sigma, tau, images)
    }

    /// Inner derivation `f -> tau(f) - sigma(f)`. It is simultaneously a
    /// `(sigma, tau)`- and a `(tau, sigma)`-derivation.
    pub fn inner(name: &str, sigma: AlgebraHom<F>, tau: AlgebraHom<F>) -> Result<Self> {
        let pres = sigma.source().clone();
        let images = (0..pres.num_generators() as u8)
            .map(|g| {
                let x = Element::generator(&pres, g);
                &tau.apply(&x) - &sigma.apply(&x)
            })
            .collect();
        Self::new(name, sigma, tau, images)
    }

    /// Build without the well-definedness check; used by solvers that test
    /// candidate tables themselves.
    pub(crate) fn unchecked(
        name: &str,
        sigma: AlgebraHom<F>,
        tau: AlgebraHom<F>,
        images: Vec<Element<F>>,
    ) -> Self {
        Self {
            name: name.to_string(),
            sigma,
            tau,
            images,
            cache: RwLock::new(HashMap::new()),
        }
    }

    /// Same generator images with the roles of `sigma` and `tau` exchanged.
    pub fn swapped(&self, name: &str) -> Result<Self> {
        Self::new(name, self.tau.clone(), self.sigma.clone(), self.images.clone())
    }

    /// Difference `X(lhs) - X(rhs)` for every defining relation.
    pub fn relation_defects(&self) -> Vec<(String, Terms<F>)> {
        let pres = self.presentation().clone();
        pres.rules()
            .iter()
            .map(|rule| {
                let mut d = self.apply_word(&rule.lhs);
                for (w, c) in &rule.rhs {
                    for (nw, c2) in self.apply_word(w) {
                        accumulate(&mut d, nw, c.mul_ref(&c2).neg_ref());
                    }
                }
                (rule.name.clone(), d)
            })
            .collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sigma(&self) -> &AlgebraHom<F> {
        &self.sigma
    }

    pub fn tau(&self) -> &AlgebraHom<F> {
        &self.tau
    }

    pub fn images(&self) -> &[Element<F>] {
        &self.images
    }

    pub fn presentation(&self) -> &Arc<Presentation<F>> {
        self.sigma.source()
    }

    /// Value on an arbitrary (not necessarily normal) word.
    pub fn apply_word(&self, w: &[u8]) -> Terms<F> {
        if w.is_empty() {
            return BTreeMap::new();
        }
        if let Some(hit) = self.cache.read().expect("cache lock").get(w) {
            return hit.clone();
        }
        let pres = self.presentation();
        // X(g w') = sigma(g) X(w') + X(g) tau(w')
        let (head, rest) = (w[0], &w[1..]);
        let mut raw = free_mul(&self.sigma.apply_word(&[head]), &self.apply_word(rest));
        let tail = self.tau.apply_word(rest);
        for (u, c) in free_mul(self.images[head as usize].terms(), &tail) {
            accumulate(&mut raw, u, c);
        }
        let out = pres.reduce(&raw);
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
        Element::from_normal(self.presentation(), self.apply_terms(f.terms()))
    }

    fn check_well_defined(&self) -> Result<()> {
        let pres = self.presentation().clone();
        for rule in pres.rules() {
            let lhs = self.apply_word(&rule.lhs);
            let rhs_terms: Terms<F> = rule.rhs.iter().cloned().collect();
            let rhs = self.apply_terms(&rhs_terms);
            if lhs != rhs {
                return Err(Error::IllDefinedDerivation {
                    derivation: self.name.clone(),
                    relation: rule.name.clone(),
                    witness: format!(
                        "{} vs {}",
                        pres.render_terms(&lhs),
                        pres.render_terms(&rhs)
                    ),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PresentationBuilder;
    use crate::scalar::RatFunc;

    fn plane() -> Arc<Presentation<RatFunc>> {
        Arc::new(
            PresentationBuilder::new(&["x", "y"])
                .rule("yx", "y*x", "q*x*y")
                .build::<RatFunc>()
                .unwrap(),
        )
    }

    #[test]
    fn twisted_leibniz_on_words() {
        let p = plane();
        let sigma = AlgebraHom::parse_endo(&p, &["x", "q*y"]).unwrap();
        let id = AlgebraHom::identity(&p);
        let d = SigmaTauDerivation::parse("dx", sigma, id, &["1", "0"]).unwrap();
        let x2 = Element::parse(&p, "x^2").unwrap();
        assert_eq!(d.apply(&x2), Element::parse(&p, "2*x").unwrap());
    }

    #[test]
    fn ill_defined_derivation_is_rejected() {
        let p = plane();
        let id = AlgebraHom::identity(&p);
        let err = SigmaTauDerivation::parse("bad", id.clone(), id, &["1", "0"]).unwrap_err();
        assert!(matches!(err, Error::IllDefinedDerivation { .. }), "{err}");
    }

    #[test]
    fn inner_derivation_is_well_defined() {
        let p = plane();
        let id = AlgebraHom::identity(&p);
        let sigma = AlgebraHom::parse_endo(&p, &["2*x", "y"]).unwrap();
        let d = SigmaTauDerivation::inner("ad", sigma, id).unwrap();
        let x = Element::generator(&p, 0);
        assert_eq!(d.apply(&x), x.scale(&RatFunc::from_i64(-1)));
        assert!(d.swapped("ad'").is_ok());
    }
}
