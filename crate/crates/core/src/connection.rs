//! Twisted connections, Lie structures, curvature, torsion and metric
//! compatibility.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::{seeded, Algebra, SigmaTau};
use crate::error::{Error, Result};
use crate::module::{form_sigma_inverse, invariance_check, HermitianForm, ModElem, ModMap, SigmaModule};
use crate::report::{combine, CheckReport};
use crate::scalar::Field;

/// Exchange operator `R_ab^pq` and structure constants `C_ab^p` on a tangent
/// basis of size `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieStructure<F: Field> {
    n: usize,
    r: Vec<F>,
    c: Vec<F>,
}

impl<F: Field> LieStructure<F> {
    /// `R(X_a ⊗ X_b) = X_b ⊗ X_a`, `C = 0`.
    pub fn flip(n: usize) -> Self {
        let mut r = vec![F::zero(); n.pow(4)];
        for a in 0..n {
            for b in 0..n {
                r[((a * n + b) * n + b) * n + a] = F::one();
            }
        }
        Self { n, r, c: vec![F::zero(); n.pow(3)] }
    }

    /// Dense tables indexed `r[((a n + b) n + p) n + q]`, `c[(a n + b) n + p]`.
    pub fn new(n: usize, r: Vec<F>, c: Vec<F>) -> Result<Self> {
        if r.len() != n.pow(4) || c.len() != n.pow(3) {
            return Err(Error::InvalidLieStructure(format!(
                "expected {} R and {} C components",
                n.pow(4),
                n.pow(3)
            )));
        }
        Ok(Self { n, r, c })
    }

    pub fn with_structure_constant(mut self, a: usize, b: usize, p: usize, value: F) -> Self {
        let n = self.n;
        self.c[(a * n + b) * n + p] = value;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn r(&self, a: usize, b: usize, p: usize, q: usize) -> &F {
        let n = self.n;
        &self.r[((a * n + b) * n + p) * n + q]
    }

    pub fn c(&self, a: usize, b: usize, p: usize) -> &F {
        let n = self.n;
        &self.c[(a * n + b) * n + p]
    }

    /// Nonzero `(p, q, R_ab^pq)`.
    pub fn r_terms(&self, a: usize, b: usize) -> Vec<(usize, usize, F)> {
        let n = self.n;
        let mut out = Vec::new();
        for p in 0..n {
            for q in 0..n {
                let v = self.r(a, b, p, q);
                if !v.is_zero() {
                    out.push((p, q, v.clone()));
                }
            }
        }
        out
    }

    /// Nonzero `(p, C_ab^p)`.
    pub fn c_terms(&self, a: usize, b: usize) -> Vec<(usize, F)> {
        (0..self.n)
            .filter_map(|p| {
                let v = self.c(a, b, p);
                (!v.is_zero()).then(|| (p, v.clone()))
            })
            .collect()
    }
}

/// `(X_a X_b - R_ab^pq X_p X_q)(f)`.
pub fn bracket_apply<A: SigmaTau>(alg: &A, lie: &LieStructure<A::Scalar>, a: usize, b: usize, f: &A::Elem) -> A::Elem {
    let mut acc = alg.derive(a, &alg.derive(b, f));
    for (p, q, r) in lie.r_terms(a, b) {
        acc = alg.sub(&acc, &alg.scale(&r, &alg.derive(p, &alg.derive(q, f))));
    }
    acc
}

/// `R^2 = id`, `R_ab^pq C_pq^r = -C_ab^r` and closure
/// `[X_a, X_b]_R = C_ab^p X_p` on generators and random elements.
pub fn lie_structure_check<A: SigmaTau>(
    alg: &A,
    lie: &LieStructure<A::Scalar>,
    name: &str,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let anchor = "[X_a,X_b]_R = X_a X_b - R_ab^pq X_p X_q = C_ab^p X_p";
    let n = lie.dim();
    if n != alg.num_derivations() {
        return CheckReport::fail(
            name,
            anchor,
            Error::DimensionMismatch { expected: alg.num_derivations(), got: n }.to_string(),
        );
    }
    for a in 0..n {
        for b in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let mut sum = A::Scalar::zero();
                    for (p, q, v) in lie.r_terms(a, b) {
                        sum = sum.add_ref(&v.mul_ref(lie.r(p, q, r, s)));
                    }
                    let expected = if a == r && b == s { A::Scalar::one() } else { A::Scalar::zero() };
                    if !crate::scalar::approx_eq(&sum, &expected, 1e-9) {
                        return CheckReport::fail(
                            name,
                            anchor,
                            format!("(R^2)_{a}{b}^{r}{s} = {sum}, expected {expected}"),
                        );
                    }
                }
                let mut sum = lie.c(a, b, r).clone();
                for (p, q, v) in lie.r_terms(a, b) {
                    sum = sum.add_ref(&v.mul_ref(lie.c(p, q, r)));
                }
                if !crate::scalar::approx_eq(&sum, &A::Scalar::zero(), 1e-9) {
                    return CheckReport::fail(
                        name,
                        anchor,
                        format!("R_ab^pq C_pq^r + C_ab^r = {sum} for a={a}, b={b}, r={r}"),
                    );
                }
            }
        }
    }
    let mut elems = alg.generators();
    let mut rng = seeded(seed);
    elems.extend((0..samples).map(|_| alg.random_element(&mut rng)));
    for a in 0..n {
        for b in 0..n {
            for f in &elems {
                let lhs = bracket_apply(alg, lie, a, b, f);
                let rhs = lie
                    .c_terms(a, b)
                    .iter()
                    .fold(alg.zero(), |acc, (p, c)| alg.add(&acc, &alg.scale(c, &alg.derive(*p, f))));
                if !alg.approx_eq(&lhs, &rhs) {
                    return CheckReport::fail(
                        name,
                        anchor,
                        format!(
                            "[{}, {}]_R({}) = {} but C X = {}",
                            alg.derivation_name(a),
                            alg.derivation_name(b),
                            alg.render(f),
                            alg.render(&lhs),
                            alg.render(&rhs)
                        ),
                    );
                }
            }
        }
    }
    CheckReport::pass(name, anchor, format!("{n} derivations, {} elements", elems.len()))
}

/// Left connection determined by `nabla_a e_i = gamma[a][i]` through
/// `nabla_a(m^i e_i) = sigma_a(m^i) nabla_a e_i + X_a(m^i) tau_hat_a(e_i)`,
/// optionally followed by a module endomorphism (pushforward).
pub struct Connection<A: SigmaTau> {
    module: SigmaModule<A>,
    gamma: Vec<Vec<ModElem<A>>>,
    post: Option<ModMap<A::Elem>>,
}

impl<A: SigmaTau> Clone for Connection<A> {
    fn clone(&self) -> Self {
        Self { module: self.module.clone(), gamma: self.gamma.clone(), post: self.post.clone() }
    }
}

impl<A: SigmaTau> std::fmt::Debug for Connection<A> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Connection({:?}, pushed forward: {})", self.module, self.post.is_some())
    }
}

impl<A: SigmaTau + 'static> Connection<A> {
    pub fn from_gamma(module: &SigmaModule<A>, gamma: Vec<Vec<ModElem<A>>>) -> Result<Self> {
        let (n, rank) = (module.num_derivations(), module.rank());
        if gamma.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: gamma.len() });
        }
        for row in &gamma {
            if row.len() != rank {
                return Err(Error::DimensionMismatch { expected: rank, got: row.len() });
            }
            if let Some(bad) = row.iter().find(|v| v.len() != rank) {
                return Err(Error::DimensionMismatch { expected: rank, got: bad.len() });
            }
        }
        Ok(Self { module: module.clone(), gamma, post: None })
    }

    /// `Gamma = 0`.
    pub fn trivial(module: &SigmaModule<A>) -> Self {
        let gamma = vec![vec![module.zero(); module.rank()]; module.num_derivations()];
        Self { module: module.clone(), gamma, post: None }
    }

    /// `T ∘ nabla` on the image module `T(M)`.
    pub fn pushforward(&self, t: ModMap<A::Elem>, samples: usize, seed: u64) -> Result<Self> {
        let module = self.module.image(t.clone(), samples, seed)?;
        let post: ModMap<A::Elem> = match &self.post {
            Some(prev) => {
                let prev = prev.clone();
                Arc::new(move |m: &[A::Elem]| t(&prev(m)))
            }
            None => t,
        };
        Ok(Self { module, gamma: self.gamma.clone(), post: Some(post) })
    }

    pub fn module(&self) -> &SigmaModule<A> {
        &self.module
    }

    pub fn gamma(&self) -> &[Vec<ModElem<A>>] {
        &self.gamma
    }

    pub fn apply(&self, a: usize, m: &[A::Elem]) -> ModElem<A> {
        let module = &self.module;
        let alg = module.algebra();
        let mut out = module.zero();
        for (i, coef) in m.iter().enumerate() {
            if alg.is_zero(coef) {
                continue;
            }
            let s = alg.sigma(a, coef);
            out = module.add(&out, &module.left_mul(&s, &self.gamma[a][i]));
            let x = alg.derive(a, coef);
            if !alg.is_zero(&x) {
                out = module.add(&out, &module.left_mul(&x, &module.tau_hat(a, &module.unit(i))));
            }
        }
        match &self.post {
            Some(t) => t(&out),
            None => out,
        }
    }

    /// Linear extension over a tangent vector `sum_a coeffs[a] X_a`.
    pub fn apply_combination(&self, coeffs: &[A::Scalar], m: &[A::Elem]) -> ModElem<A> {
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(self.module.zero(), |acc, (a, c)| {
                self.module.add(&acc, &self.module.scale(c, &self.apply(a, m)))
            })
    }
}

/// Which product rules to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Bimodule,
}

/// Left: `nabla_a(f m) = sigma_a(f) nabla_a m + X_a(f) tau_hat_a(m)`.
/// Right: `nabla_a(m f) = sigma_hat_a(m) X_a(f) + nabla_a(m) tau_a(f)`.
pub fn connection_leibniz_check<A: SigmaTau + 'static>(
    conn: &Connection<A>,
    side: Side,
    name: &str,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let module = conn.module();
    let alg = module.algebra();
    let (fs, ms) = module.sample_elements(samples, seed);
    let check_left = matches!(side, Side::Left | Side::Bimodule);
    let check_right = matches!(side, Side::Right | Side::Bimodule);
    let anchor = match side {
        Side::Left => "nabla(f m) = sigma(f) nabla(m) + X(f) tau_hat(m)",
        Side::Right => "nabla(m f) = sigma_hat(m) X(f) + nabla(m) tau(f)",
        Side::Bimodule => "left and right connection product rules",
    };
    if check_right && !module.is_bimodule() {
        return CheckReport::fail(name, anchor, "module has no right action");
    }
    let count = fs.len().max(ms.len());
    for a in 0..module.num_derivations() {
        for k in 0..count {
            let f = &fs[k % fs.len()];
            let m = &ms[k % ms.len()];
            if check_left {
                let lhs = conn.apply(a, &module.left_mul(f, m));
                let rhs = module.add(
                    &module.left_mul(&alg.sigma(a, f), &conn.apply(a, m)),
                    &module.left_mul(&alg.derive(a, f), &module.tau_hat(a, m)),
                );
                if !module.approx_eq(&lhs, &rhs) {
                    return CheckReport::fail(
                        name,
                        anchor,
                        format!(
                            "left rule, a = {}, f = {}, m = {}: {} vs {}",
                            a + 1,
                            alg.render(f),
                            module.render(m),
                            module.render(&lhs),
                            module.render(&rhs)
                        ),
                    );
                }
            }
            if check_right {
                let mf = module.right_mul(m, f).expect("bimodule");
                let lhs = conn.apply(a, &mf);
                let rhs = module.add(
                    &module.right_mul(&module.sigma_hat(a, m), &alg.derive(a, f)).expect("bimodule"),
                    &module.right_mul(&conn.apply(a, m), &alg.tau(a, f)).expect("bimodule"),
                );
                if !module.approx_eq(&lhs, &rhs) {
                    return CheckReport::fail(
                        name,
                        anchor,
                        format!(
                            "right rule, a = {}, f = {}, m = {}: {} vs {}",
                            a + 1,
                            alg.render(f),
                            module.render(m),
                            module.render(&lhs),
                            module.render(&rhs)
                        ),
                    );
                }
            }
        }
    }
    CheckReport::pass(name, anchor, format!("{count} samples per derivation"))
}

/// `(nabla_a m)^* = nabla_iota(a) m^*`; when it holds, the right product rule
/// is verified as well.
pub fn star_connection_check<A: SigmaTau + 'static>(
    conn: &Connection<A>,
    name: &str,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let anchor = "(nabla_a m)^* = nabla_iota(a) m^*";
    let module = conn.module();
    let Some(iota) = module.algebra().iota() else {
        return CheckReport::fail(name, anchor, Error::NoStarStructure.to_string());
    };
    let (_, ms) = module.sample_elements(samples, seed);
    for (a, &b) in iota.iter().enumerate() {
        for m in &ms {
            let attempt = (|| -> Result<Option<String>> {
                let lhs = module.star(&conn.apply(a, m))?;
                let rhs = conn.apply(b, &module.star(m)?);
                Ok((!module.approx_eq(&lhs, &rhs)).then(|| {
                    format!(
                        "a = {}, m = {}: {} vs {}",
                        a + 1,
                        module.render(m),
                        module.render(&lhs),
                        module.render(&rhs)
                    )
                }))
            })();
            match attempt {
                Ok(None) => {}
                Ok(Some(w)) => return CheckReport::fail(name, anchor, w),
                Err(e) => return CheckReport::fail(name, anchor, e.to_string()),
            }
        }
    }
    let right = connection_leibniz_check(conn, Side::Right, name, samples, seed);
    if right.failed() {
        return right;
    }
    CheckReport::pass(name, anchor, format!("{} samples; right product rule follows", ms.len()))
}

/// `nabla_a nabla_b m - R_ab^pq nabla_p nabla_q m - C_ab^p nabla_p m`.
pub fn curvature<A: SigmaTau + 'static>(
    conn: &Connection<A>,
    lie: &LieStructure<A::Scalar>,
    a: usize,
    b: usize,
    m: &[A::Elem],
) -> ModElem<A> {
    let module = conn.module();
    let mut acc = conn.apply(a, &conn.apply(b, m));
    for (p, q, r) in lie.r_terms(a, b) {
        acc = module.sub(&acc, &module.scale(&r, &conn.apply(p, &conn.apply(q, m))));
    }
    for (p, c) in lie.c_terms(a, b) {
        acc = module.sub(&acc, &module.scale(&c, &conn.apply(p, m)));
    }
    acc
}

/// `nabla_a phi(X_b) - R_ab^pq nabla_p phi(X_q) - C_ab^p phi(X_p)`.
pub fn torsion<A: SigmaTau + 'static>(
    conn: &Connection<A>,
    lie: &LieStructure<A::Scalar>,
    anchor: &[ModElem<A>],
    a: usize,
    b: usize,
) -> ModElem<A> {
    let module = conn.module();
    let mut acc = conn.apply(a, &anchor[b]);
    for (p, q, r) in lie.r_terms(a, b) {
        acc = module.sub(&acc, &module.scale(&r, &conn.apply(p, &anchor[q])));
    }
    for (p, c) in lie.c_terms(a, b) {
        acc = module.sub(&acc, &module.scale(&c, &anchor[p]));
    }
    acc
}

/// Torsion on every index pair.
pub fn torsion_check<A: SigmaTau + 'static>(
    conn: &Connection<A>,
    lie: &LieStructure<A::Scalar>,
    anchor: &[ModElem<A>],
    name: &str,
) -> CheckReport {
    let label = "nabla_a phi(X_b) - R nabla_p phi(X_q) - phi([X_a,X_b]_R) = 0";
    let module = conn.module();
    for a in 0..lie.dim() {
        for b in 0..lie.dim() {
            let t = torsion(conn, lie, anchor, a, b);
            if !module.is_zero(&t) {
                return CheckReport::fail(
                    name,
                    label,
                    format!("Tor(X{}, X{}) = {}", a + 1, b + 1, module.render(&t)),
                );
            }
        }
    }
    CheckReport::pass(name, label, format!("{} pairs", lie.dim().pow(2)))
}

/// Sample set used by the compatibility check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompatMode {
    Generators,
    Random,
}

/// `X_a(h(m1, m2)) = h(sigma_hat_a(m1), nabla_iota(a) m2) + h(nabla_a m1, sigma_hat_iota(a)(m2))`.
/// The form must pass the invariance check first.
pub fn metric_compat_check<A: SigmaTau + 'static>(
    conn: &Connection<A>,
    h: &HermitianForm<A>,
    mode: CompatMode,
    name: &str,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let anchor = "X_a(h(m1,m2)) = h(sigma_hat_a(m1), nabla_iota(a) m2) + h(nabla_a m1, sigma_hat_iota(a)(m2))";
    let module = conn.module();
    let alg = module.algebra().as_ref();
    let iota = alg.iota().ok_or(Error::NoStarStructure)?.to_vec();
    let invariance = invariance_check(h, module, name, samples.min(20), seed);
    if invariance.failed() {
        return Err(Error::NonInvariant(invariance.witness.unwrap_or_default()));
    }
    let pairs: Vec<(ModElem<A>, ModElem<A>)> = match mode {
        CompatMode::Generators => {
            let gens = module.generators();
            gens.iter()
                .flat_map(|m1| gens.iter().map(move |m2| (m1.clone(), m2.clone())))
                .collect()
        }
        CompatMode::Random => {
            let mut rng = seeded(seed);
            (0..samples)
                .map(|_| (module.random_element(&mut rng), module.random_element(&mut rng)))
                .collect()
        }
    };
    for (a, &b) in iota.iter().enumerate() {
        for (m1, m2) in &pairs {
            let lhs = alg.derive(a, &h.eval(alg, m1, m2)?);
            let rhs = alg.add(
                &h.eval(alg, &module.sigma_hat(a, m1), &conn.apply(b, m2))?,
                &h.eval(alg, &conn.apply(a, m1), &module.sigma_hat(b, m2))?,
            );
            if !alg.approx_eq(&lhs, &rhs) {
                return Ok(CheckReport::fail(
                    name,
                    anchor,
                    format!(
                        "a = {}, m1 = {}, m2 = {}: {} vs {}",
                        a + 1,
                        module.render(m1),
                        module.render(m2),
                        alg.render(&lhs),
                        alg.render(&rhs)
                    ),
                ));
            }
        }
    }
    Ok(CheckReport::pass(name, anchor, format!("{} pairs per derivation", pairs.len())))
}

/// Metric connection on a free module:
/// `nabla_a e_i = (X_a(h_ij)/2 + i gamma_a,ij) h_{sigma_iota(a)}^jk e_k`,
/// where `gamma[a][i][j]` must satisfy `gamma_a,ij^* = gamma_iota(a),ji`.
pub fn metric_connection_free<A: SigmaTau + 'static>(
    module: &SigmaModule<A>,
    h: &HermitianForm<A>,
    gamma: &[Vec<Vec<A::Elem>>],
) -> Result<Connection<A>> {
    let alg = module.algebra().as_ref();
    let iota = alg.iota().ok_or(Error::NoStarStructure)?.to_vec();
    let (n, rank) = (module.num_derivations(), module.rank());
    if gamma.len() != n || gamma.iter().any(|g| g.len() != rank || g.iter().any(|r| r.len() != rank)) {
        return Err(Error::DimensionMismatch { expected: n, got: gamma.len() });
    }
    for a in 0..n {
        for i in 0..rank {
            for j in 0..rank {
                let gs = alg.star(&gamma[a][i][j])?;
                if !alg.approx_eq(&gs, &gamma[iota[a]][j][i]) {
                    return Err(Error::GammaSymmetry(format!(
                        "gamma_{},{}{}^* = {} but gamma_{},{}{} = {}",
                        a + 1,
                        i + 1,
                        j + 1,
                        alg.render(&gs),
                        iota[a] + 1,
                        j + 1,
                        i + 1,
                        alg.render(&gamma[iota[a]][j][i])
                    )));
                }
            }
        }
    }
    let imag = A::Scalar::imag_unit().ok_or_else(|| Error::Config("scalar field lacks the imaginary unit".into()))?;
    let half = A::Scalar::from_i64(2).inv()?;
    let mut table = Vec::with_capacity(n);
    for a in 0..n {
        let h_sigma = form_sigma_inverse(h, module, iota[a])?;
        let mut row = Vec::with_capacity(rank);
        for i in 0..rank {
            let mut image = module.zero();
            for j in 0..rank {
                let coef = alg.add(
                    &alg.scale(&half, &alg.derive(a, &h.components()[i][j])),
                    &alg.scale(&imag, &gamma[a][i][j]),
                );
                for (k, slot) in image.iter_mut().enumerate() {
                    *slot = alg.add(slot, &alg.mul(&coef, &h_sigma[j][k]));
                }
            }
            row.push(image);
        }
        table.push(row);
    }
    Connection::from_gamma(module, table)
}

/// For a projection `p` that is orthogonal for `h` and commutes with the
/// twisted maps, `p ∘ nabla` is compatible with `h` on `p(M)`. Returns the
/// pushed-forward connection and the compatibility report.
pub fn orthogonal_projection_metric<A: SigmaTau + 'static>(
    conn: &Connection<A>,
    h: &HermitianForm<A>,
    p: &ModMap<A::Elem>,
    name: &str,
    samples: usize,
    seed: u64,
) -> Result<(Connection<A>, CheckReport)> {
    let module = conn.module();
    let alg = module.algebra().as_ref();
    let (_, ms) = module.sample_elements(samples, seed);
    for (k, m1) in ms.iter().enumerate() {
        let m2 = &ms[(k * 7 + 3) % ms.len()];
        let lhs = h.eval(alg, &p(m1), m2)?;
        let rhs = h.eval(alg, m1, &p(m2))?;
        if !alg.approx_eq(&lhs, &rhs) {
            return Err(Error::NonOrthogonal(format!(
                "h(p m1, m2) - h(m1, p m2) = {} for m1 = {}, m2 = {}",
                alg.render(&alg.sub(&lhs, &rhs)),
                module.render(m1),
                module.render(m2)
            )));
        }
    }
    let commutation = crate::module::projective_commutation_check(module, p, name, samples, seed)?;
    if commutation.failed() {
        return Err(Error::ProjectionNotCompatible(commutation.witness.unwrap_or_default()));
    }
    let pushed = conn.pushforward(p.clone(), samples.min(20), seed)?;
    let gens = metric_compat_check(&pushed, h, CompatMode::Generators, name, samples, seed)?;
    let random = metric_compat_check(&pushed, h, CompatMode::Random, name, samples, seed)?;
    let report = combine(name, "p ∘ nabla is compatible with h on p(M)", vec![gens, random]);
    Ok((pushed, report))
}

/// Torsion-free connection with
/// `nabla_a phi(X_b) = (C_ab^c / 2 + gamma_ab^c) phi(X_c)` and
/// `gamma = gamma_tilde + R gamma_tilde`, for the anchor `phi(X_a) = e_a`.
pub fn torsion_free_construct<A: SigmaTau + 'static>(
    module: &SigmaModule<A>,
    lie: &LieStructure<A::Scalar>,
    anchor: &[ModElem<A>],
    gamma_tilde: &[Vec<Vec<A::Elem>>],
) -> Result<Connection<A>> {
    let n = lie.dim();
    let alg = module.algebra().as_ref();
    if module.rank() != n || anchor.len() != n || module.image_map().is_some() {
        return Err(Error::AnchorNotBasis(format!(
            "need a free module of rank {n} with one anchor per derivation"
        )));
    }
    for (a, phi) in anchor.iter().enumerate() {
        if !module.approx_eq(phi, &module.unit(a)) {
            return Err(Error::AnchorNotBasis(format!(
                "phi(X{}) = {} is not e{}",
                a + 1,
                module.render(phi),
                a + 1
            )));
        }
    }
    if gamma_tilde.len() != n || gamma_tilde.iter().any(|g| g.len() != n || g.iter().any(|r| r.len() != n)) {
        return Err(Error::DimensionMismatch { expected: n, got: gamma_tilde.len() });
    }
    let gamma = symmetrize(alg, lie, gamma_tilde);
    let half = A::Scalar::from_i64(2).inv()?;
    let table = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    (0..n)
                        .map(|c| alg.add(&alg.from_scalar(half.mul_ref(lie.c(a, b, c))), &gamma[a][b][c]))
                        .collect()
                })
                .collect()
        })
        .collect();
    Connection::from_gamma(module, table)
}

/// `gamma_ab^c = gamma_tilde_ab^c + R_ab^pq gamma_tilde_pq^c`.
pub fn symmetrize<A: Algebra>(
    alg: &A,
    lie: &LieStructure<A::Scalar>,
    gamma_tilde: &[Vec<Vec<A::Elem>>],
) -> Vec<Vec<Vec<A::Elem>>> {
    let n = lie.dim();
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    (0..n)
                        .map(|c| {
                            lie.r_terms(a, b).iter().fold(gamma_tilde[a][b][c].clone(), |acc, (p, q, r)| {
                                alg.add(&acc, &alg.scale(r, &gamma_tilde[*p][*q][c]))
                            })
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Torsion-free on all pairs and compatible with `h` (generator and random
/// modes). A failing report names the broken condition.
pub fn levi_civita_check<A: SigmaTau + 'static>(
    conn: &Connection<A>,
    lie: &LieStructure<A::Scalar>,
    anchor: &[ModElem<A>],
    h: &HermitianForm<A>,
    name: &str,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let anchor_text = "torsion free and compatible with h";
    let torsion = torsion_check(conn, lie, anchor, &format!("{name}.torsion"));
    let metric = |mode, suffix: &str| {
        let label = format!("{name}.metric.{suffix}");
        metric_compat_check(conn, h, mode, &label, samples, seed)
            .unwrap_or_else(|e| CheckReport::fail(label, anchor_text, e.to_string()))
    };
    combine(
        name,
        anchor_text,
        vec![
            torsion,
            metric(CompatMode::Generators, "generators"),
            metric(CompatMode::Random, "random"),
        ],
    )
}
