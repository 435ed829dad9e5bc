//! Algebras with twisted derivations.
//!
//! [`Algebra`] abstracts over presented algebras (rewriting engine) and dense
//! matrix algebras. [`SigmaTau`] adds an indexed family of derivations `X_a`
//! with endomorphisms `sigma_a`, `tau_a` satisfying
//! `X_a(fg) = sigma_a(f) X_a(g) + X_a(f) tau_a(g)`, and optionally an index
//! involution `iota` describing the star structure.

mod derivation;
mod element;
mod hom;
mod presentation;
mod presented;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use derivation::SigmaTauDerivation;
pub use element::Element;
pub use hom::AlgebraHom;
pub use presentation::{Presentation, PresentationBuilder, Rule, Terms, Word};
pub use presented::{st_morphism_check, PresentedSigma};

use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::scalar::Field;

/// Deterministic generator used by every randomized check.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unital associative algebra over a [`Field`].
pub trait Algebra: Send + Sync {
    type Scalar: Field;
    type Elem: Clone + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_scalar(&self, c: Self::Scalar) -> Self::Elem;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.add(x, &self.neg(y))
    }
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn scale(&self, c: &Self::Scalar, x: &Self::Elem) -> Self::Elem;
    /// Exact equality, or equality within the algebra's configured tolerance.
    fn approx_eq(&self, x: &Self::Elem, y: &Self::Elem) -> bool;
    fn is_zero(&self, x: &Self::Elem) -> bool {
        self.approx_eq(x, &self.zero())
    }
    /// Anti-linear anti-multiplicative involution.
    fn star(&self, x: &Self::Elem) -> Result<Self::Elem>;
    /// Two-sided inverse when it can be decided.
    fn inverse(&self, x: &Self::Elem) -> Option<Self::Elem>;
    fn render(&self, x: &Self::Elem) -> String;
    fn generators(&self) -> Vec<Self::Elem>;
    fn random_element(&self, rng: &mut SeededRng) -> Self::Elem;

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

/// Algebra carrying derivations `X_a` of type `(sigma_a, tau_a)`.
pub trait SigmaTau: Algebra {
    fn num_derivations(&self) -> usize;
    fn sigma(&self, a: usize, f: &Self::Elem) -> Self::Elem;
    fn tau(&self, a: usize, f: &Self::Elem) -> Self::Elem;
    fn derive(&self, a: usize, f: &Self::Elem) -> Self::Elem;
    /// Index involution with `X_a^* = X_iota(a)`, when a star structure exists.
    fn iota(&self) -> Option<&[usize]>;
    fn derivation_name(&self, a: usize) -> String {
        format!("X{}", a + 1)
    }
}

/// Borrowed map on algebra elements.
pub type MapRef<'a, E> = &'a (dyn Fn(&E) -> E + Sync);

/// Check `x(fg) = sigma(f) x(g) + x(f) tau(g)` on all generator pairs and on
/// `samples` random pairs. The first violating pair is the witness.
pub fn leibniz_check<A: Algebra + ?Sized>(
    alg: &A,
    name: &str,
    x: MapRef<A::Elem>,
    sigma: MapRef<A::Elem>,
    tau: MapRef<A::Elem>,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let anchor = "X(fg) = sigma(f)X(g) + X(f)tau(g)";
    let gens = alg.generators();
    let mut pairs: Vec<(A::Elem, A::Elem)> = Vec::new();
    for f in &gens {
        for g in &gens {
            pairs.push((f.clone(), g.clone()));
        }
    }
    let mut rng = seeded(seed);
    for _ in 0..samples {
        let f = alg.random_element(&mut rng);
        let g = alg.random_element(&mut rng);
        pairs.push((f, g));
    }
    let count = pairs.len();
    for (f, g) in pairs {
        let lhs = x(&alg.mul(&f, &g));
        let rhs = alg.add(&alg.mul(&sigma(&f), &x(&g)), &alg.mul(&x(&f), &tau(&g)));
        if !alg.approx_eq(&lhs, &rhs) {
            return CheckReport::fail(
                name,
                anchor,
                format!(
                    "f = {}, g = {}: lhs = {}, rhs = {}",
                    alg.render(&f),
                    alg.render(&g),
                    alg.render(&lhs),
                    alg.render(&rhs)
                ),
            );
        }
    }
    CheckReport::pass(name, anchor, format!("{count} pairs"))
}

/// Leibniz rule of every derivation of `alg` against its own twists.
pub fn leibniz_check_all<A: SigmaTau>(alg: &A, prefix: &str, samples: usize, seed: u64) -> Vec<CheckReport> {
    (0..alg.num_derivations())
        .map(|a| {
            leibniz_check(
                alg,
                &format!("{prefix}.leibniz.{}", alg.derivation_name(a)),
                &|f| alg.derive(a, f),
                &|f| alg.sigma(a, f),
                &|f| alg.tau(a, f),
                samples,
                seed.wrapping_add(a as u64),
            )
        })
        .collect()
}

/// `alpha^*(f) = alpha(f^*)^*`.
pub fn star_of_map<A: Algebra + ?Sized>(alg: &A, alpha: MapRef<A::Elem>, f: &A::Elem) -> Result<A::Elem> {
    alg.star(&alpha(&alg.star(f)?))
}

/// Verify that `iota` is an involution and that `X_a^* = X_iota(a)` and
/// `sigma_iota(a) = tau_a^*` on generators and random samples.
pub fn st_star_structure_check<A: SigmaTau>(alg: &A, name: &str, samples: usize, seed: u64) -> CheckReport {
    let anchor = "X_a^* = X_iota(a), sigma_iota(a) = tau_a^*";
    let n = alg.num_derivations();
    let Some(iota) = alg.iota() else {
        return CheckReport::fail(name, anchor, "no index involution");
    };
    if iota.len() != n || (0..n).any(|a| iota[a] >= n || iota[iota[a]] != a) {
        return CheckReport::fail(name, anchor, Error::NotInvolution(n).to_string());
    }
    let mut elems = alg.generators();
    let mut rng = seeded(seed);
    elems.extend((0..samples).map(|_| alg.random_element(&mut rng)));
    for a in 0..n {
        let b = iota[a];
        for f in &elems {
            let attempt = (|| -> Result<Option<String>> {
                let xs = star_of_map(alg, &|g| alg.derive(a, g), f)?;
                let xb = alg.derive(b, f);
                if !alg.approx_eq(&xs, &xb) {
                    return Ok(Some(format!(
                        "{}^*({}) = {} but {}({}) = {}",
                        alg.derivation_name(a),
                        alg.render(f),
                        alg.render(&xs),
                        alg.derivation_name(b),
                        alg.render(f),
                        alg.render(&xb)
                    )));
                }
                let ts = star_of_map(alg, &|g| alg.tau(a, g), f)?;
                let sb = alg.sigma(b, f);
                if !alg.approx_eq(&ts, &sb) {
                    return Ok(Some(format!(
                        "tau_{}^*({}) = {} but sigma_{}({}) = {}",
                        a + 1,
                        alg.render(f),
                        alg.render(&ts),
                        b + 1,
                        alg.render(f),
                        alg.render(&sb)
                    )));
                }
                Ok(None)
            })();
            match attempt {
                Ok(None) => {}
                Ok(Some(w)) => return CheckReport::fail(name, anchor, w),
                Err(e) => return CheckReport::fail(name, anchor, e.to_string()),
            }
        }
    }
    CheckReport::pass(name, anchor, format!("{n} derivations, {} elements", elems.len()))
}

/// Pick a random index below `n`.
pub(crate) fn pick(rng: &mut SeededRng, n: usize) -> usize {
    rng.gen_range(0..n)
}
