use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use super::derivation::SigmaTauDerivation;
use super::element::Element;
use super::presentation::{accumulate, Presentation, Word};
use super::{pick, seeded, Algebra, SeededRng, SigmaTau};
use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::scalar::Field;

/// Presented algebra with an indexed family of twisted derivations.
#[derive(Clone, Debug)]
pub struct PresentedSigma<F: Field> {
    pres: Arc<Presentation<F>>,
    derivations: Vec<SigmaTauDerivation<F>>,
    iota: Option<Vec<usize>>,
    sample_words: Vec<Word>,
    tolerance: f64,
}

/// Maximal degree of the monomials used by `random_element`.
const SAMPLE_DEGREE: usize = 3;

impl<F: Field> PresentedSigma<F> {
    pub fn new(
        pres: &Arc<Presentation<F>>,
        derivations: Vec<SigmaTauDerivation<F>>,
        iota: Option<Vec<usize>>,
    ) -> Result<Self> {
        if derivations
            .iter()
            .any(|d| !Arc::ptr_eq(d.presentation(), pres))
        {
            return Err(Error::PresentationMismatch);
        }
        if let Some(iota) = &iota {
            let n = derivations.len();
            if iota.len() != n || (0..n).any(|a| iota[a] >= n || iota[iota[a]] != a) {
                return Err(Error::NotInvolution(n));
            }
            if pres.star_table().is_none() {
                return Err(Error::NoStarStructure);
            }
        }
        Ok(Self {
            pres: pres.clone(),
            derivations,
            iota,
            sample_words: pres.normal_words(SAMPLE_DEGREE),
            tolerance: 1e-9,
        })
    }

    /// Comparison tolerance used when the scalar field is inexact.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn presentation(&self) -> &Arc<Presentation<F>> {
        &self.pres
    }

    pub fn derivations(&self) -> &[SigmaTauDerivation<F>] {
        &self.derivations
    }

    pub fn derivation(&self, a: usize) -> &SigmaTauDerivation<F> {
        &self.derivations[a]
    }

    pub fn parse(&self, text: &str) -> Result<Element<F>> {
        Element::parse(&self.pres, text)
    }
}

impl<F: Field> Algebra for PresentedSigma<F> {
    type Scalar = F;
    type Elem = Element<F>;

    fn zero(&self) -> Element<F> {
        Element::zero(&self.pres)
    }

    fn one(&self) -> Element<F> {
        Element::one(&self.pres)
    }

    fn from_scalar(&self, c: F) -> Element<F> {
        Element::scalar(&self.pres, c)
    }

    fn add(&self, x: &Element<F>, y: &Element<F>) -> Element<F> {
        x + y
    }

    fn neg(&self, x: &Element<F>) -> Element<F> {
        -x
    }

    fn sub(&self, x: &Element<F>, y: &Element<F>) -> Element<F> {
        x - y
    }

    fn mul(&self, x: &Element<F>, y: &Element<F>) -> Element<F> {
        x * y
    }

    fn scale(&self, c: &F, x: &Element<F>) -> Element<F> {
        x.scale(c)
    }

    fn approx_eq(&self, x: &Element<F>, y: &Element<F>) -> bool {
        if F::EXACT {
            return x == y;
        }
        let diff = x - y;
        let scale = x
            .terms()
            .values()
            .chain(y.terms().values())
            .map(Field::magnitude)
            .fold(1.0, f64::max);
        diff.terms()
            .values()
            .all(|c| c.is_negligible(self.tolerance, scale))
    }

    fn is_zero(&self, x: &Element<F>) -> bool {
        if F::EXACT {
            x.is_zero()
        } else {
            self.approx_eq(x, &self.zero())
        }
    }

    fn star(&self, x: &Element<F>) -> Result<Element<F>> {
        x.star()
    }

    fn inverse(&self, x: &Element<F>) -> Option<Element<F>> {
        let c = x.as_scalar()?;
        c.inv().ok().map(|ci| self.from_scalar(ci))
    }

    fn render(&self, x: &Element<F>) -> String {
        x.to_string()
    }

    fn generators(&self) -> Vec<Element<F>> {
        (0..self.pres.num_generators() as u8)
            .map(|g| Element::generator(&self.pres, g))
            .collect()
    }

    fn random_element(&self, rng: &mut SeededRng) -> Element<F> {
        let count = rng.gen_range(1..=3);
        let mut terms = BTreeMap::new();
        for _ in 0..count {
            let w = self.sample_words[pick(rng, self.sample_words.len())].clone();
            accumulate(&mut terms, w, F::sample(rng));
        }
        Element::from_normal(&self.pres, terms)
    }
}

impl<F: Field> SigmaTau for PresentedSigma<F> {
    fn num_derivations(&self) -> usize {
        self.derivations.len()
    }

    fn sigma(&self, a: usize, f: &Element<F>) -> Element<F> {
        self.derivations[a].sigma().apply(f)
    }

    fn tau(&self, a: usize, f: &Element<F>) -> Element<F> {
        self.derivations[a].tau().apply(f)
    }

    fn derive(&self, a: usize, f: &Element<F>) -> Element<F> {
        self.derivations[a].apply(f)
    }

    fn iota(&self) -> Option<&[usize]> {
        self.iota.as_deref()
    }

    fn derivation_name(&self, a: usize) -> String {
        self.derivations[a].name().to_string()
    }
}

/// Check that `(phi, psi)` intertwines the tangent spaces:
/// `phi(psi(Y_b)(f)) = Y_b(phi(f))` for every basis derivation `Y_b` of the
/// target and every generator (plus random samples) `f` of the source.
///
/// `psi[b][a]` is the coefficient of the source derivation `X_a` in `psi(Y_b)`.
pub fn st_morphism_check<A, B>(
    name: &str,
    source: &A,
    target: &B,
    phi: &(dyn Fn(&A::Elem) -> B::Elem + Sync),
    psi: &[Vec<A::Scalar>],
    samples: usize,
    seed: u64,
) -> CheckReport
where
    A: SigmaTau,
    B: SigmaTau<Scalar = A::Scalar>,
{
    let anchor = "phi(psi(Y)(f)) = Y(phi(f))";
    if psi.len() != target.num_derivations()
        || psi.iter().any(|row| row.len() != source.num_derivations())
    {
        return CheckReport::fail(
            name,
            anchor,
            Error::DimensionMismatch {
                expected: target.num_derivations(),
                got: psi.len(),
            }
            .to_string(),
        );
    }
    let mut elems = source.generators();
    let mut rng = seeded(seed);
    elems.extend((0..samples).map(|_| source.random_element(&mut rng)));
    for (b, row) in psi.iter().enumerate() {
        for f in &elems {
            let pulled = row
                .iter()
                .enumerate()
                .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
                .fold(source.zero(), |acc, (a, c)| {
                    source.add(&acc, &source.scale(c, &source.derive(a, f)))
                });
            let lhs = phi(&pulled);
            let rhs = target.derive(b, &phi(f));
            if !target.approx_eq(&lhs, &rhs) {
                return CheckReport::fail(
                    name,
                    anchor,
                    format!(
                        "Y = {}, f = {}: lhs = {}, rhs = {}",
                        target.derivation_name(b),
                        source.render(f),
                        target.render(&lhs),
                        target.render(&rhs)
                    ),
                );
            }
        }
    }
    CheckReport::pass(
        name,
        anchor,
        format!("{} derivations, {} elements", psi.len(), elems.len()),
    )
}
