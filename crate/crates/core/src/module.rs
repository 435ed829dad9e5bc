//! Sigma-modules over an algebra with twisted derivations, hermitian forms
//! and their law checks.
//!
//! Elements are coefficient tuples `m = m^i e_i` over a free module of finite
//! rank. A projective (or more generally image) module keeps the ambient free
//! module and the endomorphism whose image it is.

use std::sync::Arc;

use crate::algebra::{seeded, Algebra, SeededRng, SigmaTau};
use crate::error::{Error, Result};
use crate::report::CheckReport;

/// Element of a rank-`n` module: coefficients with respect to `e_1..e_n`.
pub type ModElem<A> = Vec<<A as Algebra>::Elem>;

/// Map between module elements.
pub type ModMap<E> = Arc<dyn Fn(&[E]) -> Vec<E> + Send + Sync>;

/// Map on algebra elements.
pub type EndoFn<E> = Arc<dyn Fn(&E) -> E + Send + Sync>;

/// Module over a [`SigmaTau`] algebra with per-derivation maps
/// `sigma_hat_a`, `tau_hat_a`.
///
/// A right action, when present, is `(m^i e_i) f = m^i theta_i(f) e_i` for a
/// twist `theta_i` per basis element (the identity for the ordinary free
/// bimodule). With a star structure, `(m^i e_i)^* = theta_i((m^i)^*) e_i`.
pub struct SigmaModule<A: SigmaTau> {
    alg: Arc<A>,
    rank: usize,
    sigma_hat: Vec<ModMap<A::Elem>>,
    tau_hat: Vec<ModMap<A::Elem>>,
    image_of: Option<ModMap<A::Elem>>,
    right_twist: Option<Vec<EndoFn<A::Elem>>>,
    star: bool,
    basis_names: Vec<String>,
}

impl<A: SigmaTau> Clone for SigmaModule<A> {
    fn clone(&self) -> Self {
        Self {
            alg: self.alg.clone(),
            rank: self.rank,
            sigma_hat: self.sigma_hat.clone(),
            tau_hat: self.tau_hat.clone(),
            image_of: self.image_of.clone(),
            right_twist: self.right_twist.clone(),
            star: self.star,
            basis_names: self.basis_names.clone(),
        }
    }
}

impl<A: SigmaTau> std::fmt::Debug for SigmaModule<A> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SigmaModule(rank {}, {} derivations{}{}{})",
            self.rank,
            self.sigma_hat.len(),
            if self.image_of.is_some() { ", image" } else { "" },
            if self.right_twist.is_some() { ", bimodule" } else { "" },
            if self.star { ", star" } else { "" }
        )
    }
}

fn default_names(rank: usize) -> Vec<String> {
    (1..=rank).map(|i| format!("e{i}")).collect()
}

impl<A: SigmaTau + 'static> SigmaModule<A> {
    /// Free module `A^n` with `sigma_hat_a(m) = sigma_a(m^i) e_i` and
    /// likewise for `tau_hat_a`.
    pub fn free(alg: &Arc<A>, rank: usize) -> Self {
        let maps = |use_sigma: bool| -> Vec<ModMap<A::Elem>> {
            (0..alg.num_derivations())
                .map(|a| {
                    let alg = alg.clone();
                    Arc::new(move |m: &[A::Elem]| {
                        m.iter()
                            .map(|x| if use_sigma { alg.sigma(a, x) } else { alg.tau(a, x) })
                            .collect()
                    }) as ModMap<A::Elem>
                })
                .collect()
        };
        Self {
            alg: alg.clone(),
            rank,
            sigma_hat: maps(true),
            tau_hat: maps(false),
            image_of: None,
            right_twist: None,
            star: false,
            basis_names: default_names(rank),
        }
    }

    /// Free module with prescribed images: `sigma_hat_a(m) = sigma_a(m^i) s_a(e_i)`
    /// where `sigma_images[a][i] = s_a(e_i)`, and likewise for `tau_hat_a`.
    pub fn free_with_images(
        alg: &Arc<A>,
        rank: usize,
        sigma_images: Vec<Vec<ModElem<A>>>,
        tau_images: Vec<Vec<ModElem<A>>>,
    ) -> Result<Self> {
        let n = alg.num_derivations();
        for table in [&sigma_images, &tau_images] {
            if table.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: table.len() });
            }
            for row in table.iter() {
                if row.len() != rank || row.iter().any(|v| v.len() != rank) {
                    return Err(Error::DimensionMismatch { expected: rank, got: row.len() });
                }
            }
        }
        let build = |images: Vec<Vec<ModElem<A>>>, use_sigma: bool| -> Vec<ModMap<A::Elem>> {
            images
                .into_iter()
                .enumerate()
                .map(|(a, imgs)| {
                    let alg = alg.clone();
                    Arc::new(move |m: &[A::Elem]| {
                        let mut out = vec![alg.zero(); rank];
                        for (coef, img) in m.iter().zip(&imgs) {
                            let c = if use_sigma { alg.sigma(a, coef) } else { alg.tau(a, coef) };
                            for (o, v) in out.iter_mut().zip(img) {
                                *o = alg.add(o, &alg.mul(&c, v));
                            }
                        }
                        out
                    }) as ModMap<A::Elem>
                })
                .collect()
        };
        Ok(Self {
            alg: alg.clone(),
            rank,
            sigma_hat: build(sigma_images, true),
            tau_hat: build(tau_images, false),
            image_of: None,
            right_twist: None,
            star: false,
            basis_names: default_names(rank),
        })
    }

    /// Module with arbitrary maps; nothing is assumed about them.
    pub fn from_maps(
        alg: &Arc<A>,
        rank: usize,
        sigma_hat: Vec<ModMap<A::Elem>>,
        tau_hat: Vec<ModMap<A::Elem>>,
    ) -> Result<Self> {
        let n = alg.num_derivations();
        if sigma_hat.len() != n || tau_hat.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: sigma_hat.len().min(tau_hat.len()),
            });
        }
        Ok(Self {
            alg: alg.clone(),
            rank,
            sigma_hat,
            tau_hat,
            image_of: None,
            right_twist: None,
            star: false,
            basis_names: default_names(rank),
        })
    }

    /// Turn into a bimodule with `e_i f = theta_i(f) e_i`.
    pub fn with_right_twist(mut self, twist: Vec<EndoFn<A::Elem>>) -> Result<Self> {
        if twist.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, got: twist.len() });
        }
        self.right_twist = Some(twist);
        Ok(self)
    }

    /// Enable the star structure; an untwisted right action is added if none
    /// is present.
    pub fn with_star(mut self) -> Result<Self> {
        if self.alg.iota().is_none() {
            return Err(Error::NoStarStructure);
        }
        if self.right_twist.is_none() {
            let id: EndoFn<A::Elem> = Arc::new(|f: &A::Elem| f.clone());
            self.right_twist = Some(vec![id; self.rank]);
        }
        self.star = true;
        Ok(self)
    }

    pub fn with_basis_names<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        if names.len() == self.rank {
            self.basis_names = names.iter().map(|s| s.as_ref().to_string()).collect();
        }
        self
    }

    pub fn algebra(&self) -> &Arc<A> {
        &self.alg
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_derivations(&self) -> usize {
        self.sigma_hat.len()
    }

    pub fn is_bimodule(&self) -> bool {
        self.right_twist.is_some()
    }

    pub fn has_star(&self) -> bool {
        self.star
    }

    /// The endomorphism whose image this module is, if any.
    pub fn image_map(&self) -> Option<&ModMap<A::Elem>> {
        self.image_of.as_ref()
    }

    pub fn zero(&self) -> ModElem<A> {
        vec![self.alg.zero(); self.rank]
    }

    /// Ambient basis vector `e_i`.
    pub fn unit(&self, i: usize) -> ModElem<A> {
        let mut m = self.zero();
        m[i] = self.alg.one();
        m
    }

    /// Generators of the module: `e_i`, mapped into the image when relevant.
    pub fn generators(&self) -> Vec<ModElem<A>> {
        (0..self.rank).map(|i| self.restrict(&self.unit(i))).collect()
    }

    /// Map an ambient tuple into the module (identity for free modules).
    pub fn restrict(&self, m: &[A::Elem]) -> ModElem<A> {
        match &self.image_of {
            Some(t) => t(m),
            None => m.to_vec(),
        }
    }

    pub fn from_coeffs(&self, coeffs: Vec<A::Elem>) -> Result<ModElem<A>> {
        if coeffs.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, got: coeffs.len() });
        }
        Ok(coeffs)
    }

    pub fn add(&self, m1: &[A::Elem], m2: &[A::Elem]) -> ModElem<A> {
        m1.iter().zip(m2).map(|(x, y)| self.alg.add(x, y)).collect()
    }

    pub fn sub(&self, m1: &[A::Elem], m2: &[A::Elem]) -> ModElem<A> {
        m1.iter().zip(m2).map(|(x, y)| self.alg.sub(x, y)).collect()
    }

    pub fn scale(&self, c: &A::Scalar, m: &[A::Elem]) -> ModElem<A> {
        m.iter().map(|x| self.alg.scale(c, x)).collect()
    }

    /// `f m`.
    pub fn left_mul(&self, f: &A::Elem, m: &[A::Elem]) -> ModElem<A> {
        m.iter().map(|x| self.alg.mul(f, x)).collect()
    }

    /// `m f`; `None` for left-only modules.
    pub fn right_mul(&self, m: &[A::Elem], f: &A::Elem) -> Option<ModElem<A>> {
        let twist = self.right_twist.as_ref()?;
        Some(
            m.iter()
                .zip(twist)
                .map(|(x, theta)| self.alg.mul(x, &theta(f)))
                .collect(),
        )
    }

    pub fn star(&self, m: &[A::Elem]) -> Result<ModElem<A>> {
        if !self.star {
            return Err(Error::NoStarStructure);
        }
        let twist = self.right_twist.as_ref().expect("star modules carry a right action");
        m.iter()
            .zip(twist)
            .map(|(x, theta)| Ok(theta(&self.alg.star(x)?)))
            .collect()
    }

    pub fn sigma_hat(&self, a: usize, m: &[A::Elem]) -> ModElem<A> {
        (self.sigma_hat[a])(m)
    }

    pub fn tau_hat(&self, a: usize, m: &[A::Elem]) -> ModElem<A> {
        (self.tau_hat[a])(m)
    }

    pub fn approx_eq(&self, m1: &[A::Elem], m2: &[A::Elem]) -> bool {
        m1.len() == m2.len() && m1.iter().zip(m2).all(|(x, y)| self.alg.approx_eq(x, y))
    }

    pub fn is_zero(&self, m: &[A::Elem]) -> bool {
        m.iter().all(|x| self.alg.is_zero(x))
    }

    pub fn random_element(&self, rng: &mut SeededRng) -> ModElem<A> {
        let raw: Vec<A::Elem> = (0..self.rank).map(|_| self.alg.random_element(rng)).collect();
        self.restrict(&raw)
    }

    pub fn render(&self, m: &[A::Elem]) -> String {
        let parts: Vec<String> = m
            .iter()
            .zip(&self.basis_names)
            .filter(|(x, _)| !self.alg.is_zero(x))
            .map(|(x, name)| format!("({})*{name}", self.alg.render(x)))
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// The module `T(M)` with maps `T∘sigma_hat_a`, `T∘tau_hat_a`, after
    /// checking that `T` is additive and left linear on random samples.
    pub fn image(&self, t: ModMap<A::Elem>, samples: usize, seed: u64) -> Result<Self> {
        let mut rng = seeded(seed);
        for _ in 0..samples.max(1) {
            let f = self.alg.random_element(&mut rng);
            let m1 = self.random_element(&mut rng);
            let m2 = self.random_element(&mut rng);
            let lhs = t(&self.add(&self.left_mul(&f, &m1), &m2));
            let rhs = self.add(&self.left_mul(&f, &t(&m1)), &t(&m2));
            if !self.approx_eq(&lhs, &rhs) {
                return Err(Error::NonLinear(format!(
                    "f = {}, m1 = {}, m2 = {}: T(f m1 + m2) = {} but f T(m1) + T(m2) = {}",
                    self.alg.render(&f),
                    self.render(&m1),
                    self.render(&m2),
                    self.render(&lhs),
                    self.render(&rhs)
                )));
            }
        }
        let compose = |maps: &[ModMap<A::Elem>]| -> Vec<ModMap<A::Elem>> {
            maps.iter()
                .map(|inner| {
                    let (inner, t) = (inner.clone(), t.clone());
                    Arc::new(move |m: &[A::Elem]| t(&inner(m))) as ModMap<A::Elem>
                })
                .collect()
        };
        let image_of: ModMap<A::Elem> = match &self.image_of {
            Some(prev) => {
                let (prev, t) = (prev.clone(), t.clone());
                Arc::new(move |m: &[A::Elem]| t(&prev(m)))
            }
            None => t.clone(),
        };
        Ok(Self {
            alg: self.alg.clone(),
            rank: self.rank,
            sigma_hat: compose(&self.sigma_hat),
            tau_hat: compose(&self.tau_hat),
            image_of: Some(image_of),
            right_twist: self.right_twist.clone(),
            star: self.star,
            basis_names: self.basis_names.clone(),
        })
    }

    pub(crate) fn sample_elements(&self, samples: usize, seed: u64) -> (Vec<A::Elem>, Vec<ModElem<A>>) {
        let mut rng = seeded(seed);
        let mut fs = self.alg.generators();
        fs.extend((0..samples).map(|_| self.alg.random_element(&mut rng)));
        let mut ms = self.generators();
        ms.extend((0..samples).map(|_| self.random_element(&mut rng)));
        (fs, ms)
    }
}

/// Pair up algebra and module samples, cycling the shorter list.
fn pairs<X: Clone, Y: Clone>(xs: &[X], ys: &[Y]) -> Vec<(X, Y)> {
    let n = xs.len().max(ys.len());
    if xs.is_empty() || ys.is_empty() {
        return Vec::new();
    }
    (0..n)
        .map(|k| (xs[k % xs.len()].clone(), ys[k % ys.len()].clone()))
        .collect()
}

/// Verify the left law `sigma_hat_a(f m) = sigma_a(f) sigma_hat_a(m)` (and for
/// `tau`), the right laws and associativity for bimodules, and for star
/// modules the involution, `(f m g)^* = g^* m^* f^*` and
/// `sigma_hat_iota(a) = tau_hat_a^*`.
pub fn module_law_check<A: SigmaTau + 'static>(
    module: &SigmaModule<A>,
    name: &str,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let anchor = "sigma_hat(f m) = sigma(f) sigma_hat(m)";
    let alg = module.algebra();
    let (fs, ms) = module.sample_elements(samples, seed);
    let gs: Vec<A::Elem> = fs.iter().rev().cloned().collect();
    let fail = |w: String| CheckReport::fail(name, anchor, w);
    for a in 0..module.num_derivations() {
        for (f, m) in pairs(&fs, &ms) {
            let fm = module.left_mul(&f, &m);
            for (label, hat, base) in [
                ("sigma", module.sigma_hat(a, &fm), alg.sigma(a, &f)),
                ("tau", module.tau_hat(a, &fm), alg.tau(a, &f)),
            ] {
                let m_hat = if label == "sigma" { module.sigma_hat(a, &m) } else { module.tau_hat(a, &m) };
                let rhs = module.left_mul(&base, &m_hat);
                if !module.approx_eq(&hat, &rhs) {
                    return fail(format!(
                        "{label}_hat_{}(f m) with f = {}, m = {}: {} vs {}",
                        a + 1,
                        alg.render(&f),
                        module.render(&m),
                        module.render(&hat),
                        module.render(&rhs)
                    ));
                }
            }
            if module.is_bimodule() {
                let mf = module.right_mul(&m, &f).expect("bimodule");
                for (label, hat, base, m_hat) in [
                    ("sigma", module.sigma_hat(a, &mf), alg.sigma(a, &f), module.sigma_hat(a, &m)),
                    ("tau", module.tau_hat(a, &mf), alg.tau(a, &f), module.tau_hat(a, &m)),
                ] {
                    let rhs = module.right_mul(&m_hat, &base).expect("bimodule");
                    if !module.approx_eq(&hat, &rhs) {
                        return fail(format!(
                            "{label}_hat_{}(m f) with f = {}, m = {}: {} vs {}",
                            a + 1,
                            alg.render(&f),
                            module.render(&m),
                            module.render(&hat),
                            module.render(&rhs)
                        ));
                    }
                }
            }
        }
    }
    if module.is_bimodule() {
        for ((f, m), g) in pairs(&fs, &ms).into_iter().zip(gs.iter().cycle()) {
            let left_first = module.right_mul(&module.left_mul(&f, &m), g).expect("bimodule");
            let right_first = module.left_mul(&f, &module.right_mul(&m, g).expect("bimodule"));
            if !module.approx_eq(&left_first, &right_first) {
                return fail(format!(
                    "(f m) g != f (m g) for f = {}, m = {}, g = {}",
                    alg.render(&f),
                    module.render(&m),
                    alg.render(g)
                ));
            }
        }
    }
    if module.has_star() {
        let iota = alg.iota().expect("star modules need an index involution").to_vec();
        for ((f, m), g) in pairs(&fs, &ms).into_iter().zip(gs.iter().cycle()) {
            let outcome = (|| -> Result<Option<String>> {
                let ms_ = module.star(&m)?;
                if !module.approx_eq(&module.star(&ms_)?, &m) {
                    return Ok(Some(format!("m^** != m for m = {}", module.render(&m))));
                }
                let fmg = module.right_mul(&module.left_mul(&f, &m), g).expect("bimodule");
                let lhs = module.star(&fmg)?;
                let rhs = module
                    .right_mul(&module.left_mul(&alg.star(g)?, &ms_), &alg.star(&f)?)
                    .expect("bimodule");
                if !module.approx_eq(&lhs, &rhs) {
                    return Ok(Some(format!(
                        "(f m g)^* != g^* m^* f^* for f = {}, m = {}, g = {}: {} vs {}",
                        alg.render(&f),
                        module.render(&m),
                        alg.render(g),
                        module.render(&lhs),
                        module.render(&rhs)
                    )));
                }
                for (a, &b) in iota.iter().enumerate() {
                    let lhs = module.sigma_hat(b, &m);
                    let rhs = module.star(&module.tau_hat(a, &ms_))?;
                    if !module.approx_eq(&lhs, &rhs) {
                        return Ok(Some(format!(
                            "sigma_hat_{}(m) != tau_hat_{}^*(m) for m = {}: {} vs {}",
                            b + 1,
                            a + 1,
                            module.render(&m),
                            module.render(&lhs),
                            module.render(&rhs)
                        )));
                    }
                }
                Ok(None)
            })();
            match outcome {
                Ok(None) => {}
                Ok(Some(w)) => return fail(w),
                Err(e) => return fail(e.to_string()),
            }
        }
    }
    CheckReport::pass(
        name,
        anchor,
        format!("{} derivations, {} samples", module.num_derivations(), ms.len()),
    )
}

/// Check `p^2 = p` (error otherwise), then `[sigma_hat_a, p] = [tau_hat_a, p] = 0`.
pub fn projective_commutation_check<A: SigmaTau + 'static>(
    module: &SigmaModule<A>,
    p: &ModMap<A::Elem>,
    name: &str,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let anchor = "[sigma_hat_a, p] = [tau_hat_a, p] = 0";
    let (_, ms) = module.sample_elements(samples, seed);
    for m in &ms {
        let pm = p(m);
        if !module.approx_eq(&p(&pm), &pm) {
            return Err(Error::NotProjection(format!(
                "p(p(m)) != p(m) for m = {}",
                module.render(m)
            )));
        }
    }
    for a in 0..module.num_derivations() {
        for m in &ms {
            for (label, hat_p, p_hat) in [
                ("sigma", module.sigma_hat(a, &p(m)), p(&module.sigma_hat(a, m))),
                ("tau", module.tau_hat(a, &p(m)), p(&module.tau_hat(a, m))),
            ] {
                if !module.approx_eq(&hat_p, &p_hat) {
                    return Ok(CheckReport::fail(
                        name,
                        anchor,
                        format!(
                            "[{label}_hat_{}, p] at m = {}: {} vs {}",
                            a + 1,
                            module.render(m),
                            module.render(&hat_p),
                            module.render(&p_hat)
                        ),
                    ));
                }
            }
        }
    }
    Ok(CheckReport::pass(name, anchor, format!("{} samples", ms.len())))
}

/// Hermitian form on a free module given by components `h_ij = h(e_i, e_j)`,
/// evaluated as `h(m1, m2) = m1^i h_ij (m2^j)^*`.
#[derive(Debug)]
pub struct HermitianForm<A: Algebra> {
    components: Vec<Vec<A::Elem>>,
}

impl<A: Algebra> Clone for HermitianForm<A> {
    fn clone(&self) -> Self {
        Self { components: self.components.clone() }
    }
}

impl<A: Algebra> HermitianForm<A> {
    /// Components must satisfy `h_ij^* = h_ji`.
    pub fn new(alg: &A, components: Vec<Vec<A::Elem>>) -> Result<Self> {
        let n = components.len();
        if components.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: components[0].len() });
        }
        for i in 0..n {
            for j in 0..n {
                let hs = alg.star(&components[i][j])?;
                if !alg.approx_eq(&hs, &components[j][i]) {
                    return Err(Error::StarStructure(format!(
                        "h_{}{}^* = {} but h_{}{} = {}",
                        i + 1,
                        j + 1,
                        alg.render(&hs),
                        j + 1,
                        i + 1,
                        alg.render(&components[j][i])
                    )));
                }
            }
        }
        Ok(Self { components })
    }

    /// `h_ij = delta_ij`.
    pub fn identity(alg: &A, rank: usize) -> Self {
        let components = (0..rank)
            .map(|i| (0..rank).map(|j| if i == j { alg.one() } else { alg.zero() }).collect())
            .collect();
        Self { components }
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<A::Elem>] {
        &self.components
    }

    pub fn eval(&self, alg: &A, m1: &[A::Elem], m2: &[A::Elem]) -> Result<A::Elem> {
        let n = self.rank();
        if m1.len() != n || m2.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m1.len().min(m2.len()) });
        }
        let mut acc = alg.zero();
        for (i, x) in m1.iter().enumerate() {
            if alg.is_zero(x) {
                continue;
            }
            for (j, y) in m2.iter().enumerate() {
                let h = &self.components[i][j];
                if alg.is_zero(h) || alg.is_zero(y) {
                    continue;
                }
                acc = alg.add(&acc, &alg.mul(&alg.mul(x, h), &alg.star(y)?));
            }
        }
        Ok(acc)
    }
}

fn eval_or_fail<A: SigmaTau>(
    h: &HermitianForm<A>,
    alg: &A,
    m1: &[A::Elem],
    m2: &[A::Elem],
) -> std::result::Result<A::Elem, String> {
    h.eval(alg, m1, m2).map_err(|e| e.to_string())
}

/// The three axioms: additivity, `h(f m1, m2) = f h(m1, m2)` and
/// `h(m1, m2)^* = h(m2, m1)`, plus self-adjointness of `h(m, m)`.
pub fn hermitian_axioms_check<A: SigmaTau + 'static>(
    h: &HermitianForm<A>,
    module: &SigmaModule<A>,
    name: &str,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let anchor = "h(f m1, m2) = f h(m1, m2), h(m1, m2)^* = h(m2, m1)";
    let alg = module.algebra().as_ref();
    let (fs, ms) = module.sample_elements(samples, seed);
    let run = || -> std::result::Result<Option<String>, String> {
        for (k, (f, m1)) in pairs(&fs, &ms).into_iter().enumerate() {
            let m2 = &ms[(k * 7 + 3) % ms.len()];
            let m3 = &ms[(k * 5 + 1) % ms.len()];
            let h12 = eval_or_fail(h, alg, &m1, m2)?;
            let lhs = eval_or_fail(h, alg, &module.add(&m1, m3), m2)?;
            let rhs = alg.add(&h12, &eval_or_fail(h, alg, m3, m2)?);
            if !alg.approx_eq(&lhs, &rhs) {
                return Ok(Some(format!("additivity fails at m1 = {}", module.render(&m1))));
            }
            let lhs = eval_or_fail(h, alg, &module.left_mul(&f, &m1), m2)?;
            let rhs = alg.mul(&f, &h12);
            if !alg.approx_eq(&lhs, &rhs) {
                return Ok(Some(format!(
                    "h(f m1, m2) = {} but f h(m1, m2) = {} for f = {}",
                    alg.render(&lhs),
                    alg.render(&rhs),
                    alg.render(&f)
                )));
            }
            let h21 = eval_or_fail(h, alg, m2, &m1)?;
            let h12s = alg.star(&h12).map_err(|e| e.to_string())?;
            if !alg.approx_eq(&h12s, &h21) {
                return Ok(Some(format!(
                    "h(m1, m2)^* = {} but h(m2, m1) = {}",
                    alg.render(&h12s),
                    alg.render(&h21)
                )));
            }
            let hmm = eval_or_fail(h, alg, &m1, &m1)?;
            if !alg.approx_eq(&alg.star(&hmm).map_err(|e| e.to_string())?, &hmm) {
                return Ok(Some(format!("h(m, m) not self-adjoint for m = {}", module.render(&m1))));
            }
        }
        Ok(None)
    };
    match run() {
        Ok(None) => CheckReport::pass(name, anchor, format!("{} samples", ms.len())),
        Ok(Some(w)) | Err(w) => CheckReport::fail(name, anchor, w),
    }
}

/// `sigma_a(h(m1, m2)) = h(sigma_hat_a(m1), tau_hat_iota(a)(m2))` and
/// `tau_a(h(m1, m2)) = h(tau_hat_a(m1), sigma_hat_iota(a)(m2))`.
pub fn invariance_check<A: SigmaTau + 'static>(
    h: &HermitianForm<A>,
    module: &SigmaModule<A>,
    name: &str,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let anchor = "sigma_a(h(m1,m2)) = h(sigma_hat_a(m1), tau_hat_iota(a)(m2))";
    let alg = module.algebra().as_ref();
    let Some(iota) = alg.iota() else {
        return CheckReport::fail(name, anchor, Error::NoStarStructure.to_string());
    };
    let (_, ms) = module.sample_elements(samples, seed);
    let run = || -> std::result::Result<Option<String>, String> {
        for a in 0..module.num_derivations() {
            let b = iota[a];
            for (k, m1) in ms.iter().enumerate() {
                let m2 = &ms[(k * 7 + 3) % ms.len()];
                let hv = eval_or_fail(h, alg, m1, m2)?;
                let lhs = alg.sigma(a, &hv);
                let rhs = eval_or_fail(h, alg, &module.sigma_hat(a, m1), &module.tau_hat(b, m2))?;
                if !alg.approx_eq(&lhs, &rhs) {
                    return Ok(Some(format!(
                        "sigma_{}: m1 = {}, m2 = {}: {} vs {}",
                        a + 1,
                        module.render(m1),
                        module.render(m2),
                        alg.render(&lhs),
                        alg.render(&rhs)
                    )));
                }
                let lhs = alg.tau(a, &hv);
                let rhs = eval_or_fail(h, alg, &module.tau_hat(a, m1), &module.sigma_hat(b, m2))?;
                if !alg.approx_eq(&lhs, &rhs) {
                    return Ok(Some(format!(
                        "tau_{}: m1 = {}, m2 = {}: {} vs {}",
                        a + 1,
                        module.render(m1),
                        module.render(m2),
                        alg.render(&lhs),
                        alg.render(&rhs)
                    )));
                }
            }
        }
        Ok(None)
    };
    match run() {
        Ok(None) => CheckReport::pass(name, anchor, format!("{} samples", ms.len())),
        Ok(Some(w)) | Err(w) => CheckReport::fail(name, anchor, w),
    }
}

/// Solve `H G = 1` for the component matrix `G_jk = h(e_j, sigma_hat_a(e_k))`
/// by left row reduction over the algebra, then verify both `H G = 1` and
/// `G H = 1`.
pub fn form_sigma_inverse<A: SigmaTau + 'static>(
    h: &HermitianForm<A>,
    module: &SigmaModule<A>,
    a: usize,
) -> Result<Vec<Vec<A::Elem>>> {
    let alg = module.algebra().as_ref();
    let n = module.rank();
    let units: Vec<ModElem<A>> = (0..n).map(|i| module.unit(i)).collect();
    let mut g = vec![vec![alg.zero(); n]; n];
    for j in 0..n {
        for k in 0..n {
            g[j][k] = h.eval(alg, &units[j], &module.sigma_hat(a, &units[k]))?;
        }
    }
    let original = g.clone();
    let mut inv: Vec<Vec<A::Elem>> = (0..n).map(|i| module.unit(i)).collect();
    for col in 0..n {
        let pivot = (col..n).find_map(|r| alg.inverse(&g[r][col]).map(|pi| (r, pi)));
        let Some((r, pivot_inv)) = pivot else {
            return Err(Error::NonInvertible(format!(
                "no invertible pivot in column {} of [h(e_j, sigma_hat_{}(e_k))]",
                col + 1,
                a + 1
            )));
        };
        g.swap(r, col);
        inv.swap(r, col);
        g[col] = g[col].iter().map(|x| alg.mul(&pivot_inv, x)).collect();
        inv[col] = inv[col].iter().map(|x| alg.mul(&pivot_inv, x)).collect();
        for row in 0..n {
            if row == col || alg.is_zero(&g[row][col]) {
                continue;
            }
            let factor = g[row][col].clone();
            for k in 0..n {
                g[row][k] = alg.sub(&g[row][k], &alg.mul(&factor, &g[col][k]));
                inv[row][k] = alg.sub(&inv[row][k], &alg.mul(&factor, &inv[col][k]));
            }
        }
    }
    let product = |x: &[Vec<A::Elem>], y: &[Vec<A::Elem>]| -> Vec<Vec<A::Elem>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        (0..n).fold(alg.zero(), |acc, j| alg.add(&acc, &alg.mul(&x[i][j], &y[j][k])))
                    })
                    .collect()
            })
            .collect()
    };
    for (label, prod) in [("H G", product(&inv, &original)), ("G H", product(&original, &inv))] {
        for (i, row) in prod.iter().enumerate() {
            for (k, x) in row.iter().enumerate() {
                let expected = if i == k { alg.one() } else { alg.zero() };
                if !alg.approx_eq(x, &expected) {
                    return Err(Error::NonInvertible(format!(
                        "{label} entry ({}, {}) = {}",
                        i + 1,
                        k + 1,
                        alg.render(x)
                    )));
                }
            }
        }
    }
    Ok(inv)
}
