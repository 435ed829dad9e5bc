//! Geometry of `Mat_N` with inner derivations: projective modules
//! `Mat_N p`, curvature in closed form, the doubled star structure, the
//! regular uniqueness theorem and Levi-Civita connections.

use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;

use crate::algebra::{seeded, Algebra, SeededRng, SigmaTau};
use crate::connection::{curvature, levi_civita_check, torsion_check, Connection, Side};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::module::{HermitianForm, ModElem, ModMap, SigmaModule};
use crate::presets::MatrixSigma;
use crate::report::{combine, CheckReport};
use crate::scalar::{ComplexFloat, Field, GaussianRational};

pub type MatrixConnection<F> = Connection<MatrixSigma<F>>;

/// Scalars that can supply random unitaries and unit vectors.
pub trait MatrixSampling: Field {
    /// Unit column vector whose first entry is real.
    fn random_unit_vector(n: usize, rng: &mut SeededRng) -> Matrix<Self>;
    /// Element of modulus one.
    fn random_phase(rng: &mut SeededRng) -> Self;
    /// Nonzero element of moderate size.
    fn random_nonzero(rng: &mut SeededRng) -> Self;
}

impl MatrixSampling for GaussianRational {
    /// Inverse stereographic projection of a small rational point, with
    /// powers of `i` on all but the first entry.
    fn random_unit_vector(n: usize, rng: &mut SeededRng) -> Matrix<Self> {
        let alphabet = [(-2, 1), (-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1), (2, 1)];
        let ys: Vec<Self> = (1..n)
            .map(|_| {
                let (num, den) = alphabet[rng.gen_range(0..alphabet.len())];
                Self::from_ints(num, 0).div_ref(&Self::from_ints(den, 0)).expect("nonzero")
            })
            .collect();
        let norm = ys.iter().fold(Self::zero(), |acc, y| acc.add_ref(&y.mul_ref(y)));
        let denom = norm.add_ref(&Self::one()).inv().expect("positive");
        let mut entries = vec![norm.sub_ref(&Self::one()).mul_ref(&denom)];
        for y in &ys {
            let phase = Self::i().pow_i(rng.gen_range(0..4)).expect("i is invertible");
            entries.push(Self::from_ints(2, 0).mul_ref(y).mul_ref(&denom).mul_ref(&phase));
        }
        Matrix::column(entries)
    }

    fn random_phase(rng: &mut SeededRng) -> Self {
        Self::i().pow_i(rng.gen_range(0..4)).expect("i is invertible")
    }

    fn random_nonzero(rng: &mut SeededRng) -> Self {
        let choices = [(1, 0), (-1, 0), (0, 1), (0, -1), (2, 0), (1, 1), (-2, 1), (3, 0)];
        let (re, im) = choices[rng.gen_range(0..choices.len())];
        Self::from_ints(re, im)
    }
}

impl MatrixSampling for ComplexFloat {
    fn random_unit_vector(n: usize, rng: &mut SeededRng) -> Matrix<Self> {
        loop {
            let raw: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-3 {
                continue;
            }
            let phase = if raw[0].norm() > 0.0 { raw[0].conj() / raw[0].norm() } else { Complex64::new(1.0, 0.0) };
            return Matrix::column(raw.iter().map(|z| ComplexFloat(z * phase / norm)).collect());
        }
    }

    fn random_phase(rng: &mut SeededRng) -> Self {
        ComplexFloat::phase(rng.gen_range(0.0..std::f64::consts::TAU))
    }

    fn random_nonzero(rng: &mut SeededRng) -> Self {
        let radius = rng.gen_range(0.5..1.5);
        let z = Self::random_phase(rng).0 * radius;
        ComplexFloat(z)
    }
}

/// Householder reflection mapping `e_1` to the unit vector `v0`, whose first
/// entry must be real. The result is unitary and self-inverse.
pub fn householder_to<F: Field>(v0: &Matrix<F>) -> Matrix<F> {
    let n = v0.rows();
    let mut w = Matrix::<F>::zeros(n, 1);
    w[(0, 0)] = F::one();
    let w = w.sub(v0);
    let norm = w.dagger().mul(&w)[(0, 0)].clone();
    if norm.is_negligible(1e-14, 1.0) {
        return Matrix::identity(n);
    }
    let factor = F::from_i64(2).div_ref(&norm).expect("norm is nonzero");
    Matrix::identity(n).sub(&w.mul(&w.dagger()).scale(&factor))
}

/// `count` commuting unitaries `H D_a H` with random phase diagonals and a
/// random common eigenvector `v0 = H e_1`.
pub fn random_commuting_unitaries<F: MatrixSampling>(
    count: usize,
    n: usize,
    rng: &mut SeededRng,
) -> (Vec<Matrix<F>>, Matrix<F>) {
    let v0 = F::random_unit_vector(n, rng);
    let h = householder_to(&v0);
    let us = (0..count)
        .map(|_| {
            let d: Vec<F> = (0..n).map(|_| F::random_phase(rng)).collect();
            h.mul(&Matrix::diagonal(&d)).mul(&h)
        })
        .collect();
    (us, v0)
}

/// `count` commuting invertible matrices `H D_a H` with random nonzero
/// diagonals, sharing the eigenvector `v0 = H e_1`.
pub fn random_commuting_invertibles<F: MatrixSampling>(
    count: usize,
    n: usize,
    rng: &mut SeededRng,
) -> (Vec<Matrix<F>>, Matrix<F>) {
    let v0 = F::random_unit_vector(n, rng);
    let h = householder_to(&v0);
    let us = (0..count)
        .map(|_| {
            let d: Vec<F> = (0..n).map(|_| F::random_nonzero(rng)).collect();
            h.mul(&Matrix::diagonal(&d)).mul(&h)
        })
        .collect();
    (us, v0)
}

/// An orthogonal projection `p` (`p^2 = p = p^dagger`), optionally of the
/// rank-one form `v0 v0^dagger`.
#[derive(Clone, Debug)]
pub struct Projector<F: Field> {
    p: Matrix<F>,
    v0: Option<Matrix<F>>,
}

impl<F: Field> Projector<F> {
    pub fn identity(n: usize) -> Self {
        Self { p: Matrix::identity(n), v0: None }
    }

    /// `p = v0 v0^dagger` for a unit column vector `v0`.
    pub fn rank_one(v0: Matrix<F>, tol: f64) -> Result<Self> {
        if v0.cols() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: v0.cols() });
        }
        let norm = v0.dagger().mul(&v0);
        if !norm.approx_eq(&Matrix::identity(1), tol) {
            return Err(Error::NotProjection(format!("|v0|^2 = {} is not 1", norm[(0, 0)])));
        }
        let p = v0.mul(&v0.dagger());
        Ok(Self { p, v0: Some(v0) })
    }

    pub fn from_matrix(p: Matrix<F>, tol: f64) -> Result<Self> {
        if !p.mul(&p).approx_eq(&p, tol) {
            return Err(Error::NotProjection(format!("p^2 != p for p = {}", p.render())));
        }
        if !p.dagger().approx_eq(&p, tol) {
            return Err(Error::NotProjection(format!("p^dagger != p for p = {}", p.render())));
        }
        Ok(Self { p, v0: None })
    }

    pub fn matrix(&self) -> &Matrix<F> {
        &self.p
    }

    pub fn v0(&self) -> Option<&Matrix<F>> {
        self.v0.as_ref()
    }

    /// The map `A -> A p` on rank-one module elements.
    pub fn as_module_map(&self) -> ModMap<Matrix<F>> {
        let p = self.p.clone();
        Arc::new(move |m: &[Matrix<F>]| m.iter().map(|a| a.mul(&p)).collect())
    }
}

/// `Mat_N` with inner derivations and an optional projector.
#[derive(Clone, Debug)]
pub struct MatrixGeometry<F: Field> {
    alg: Arc<MatrixSigma<F>>,
    projector: Option<Projector<F>>,
}

impl<F: Field> MatrixGeometry<F> {
    pub fn new(alg: MatrixSigma<F>) -> Self {
        Self { alg: Arc::new(alg), projector: None }
    }

    pub fn with_projector(mut self, projector: Projector<F>) -> Result<Self> {
        if projector.p.rows() != self.alg.size() {
            return Err(Error::DimensionMismatch { expected: self.alg.size(), got: projector.p.rows() });
        }
        self.projector = Some(projector);
        Ok(self)
    }

    pub fn algebra(&self) -> &Arc<MatrixSigma<F>> {
        &self.alg
    }

    pub fn projector(&self) -> Result<&Projector<F>> {
        self.projector.as_ref().ok_or(Error::MissingProjector)
    }

    fn tol(&self) -> f64 {
        self.alg.tolerance()
    }

    fn v0(&self) -> Result<&Matrix<F>> {
        self.projector()?.v0().ok_or(Error::MissingProjector)
    }

    /// Free rank-one module over the algebra, with star when doubled.
    pub fn free_module(&self) -> Result<SigmaModule<MatrixSigma<F>>> {
        let module = SigmaModule::free(&self.alg, 1);
        if self.alg.is_doubled() {
            module.with_star()
        } else {
            Ok(module)
        }
    }

    /// `A -> A p` applied to a matrix.
    pub fn project(&self, a: &Matrix<F>) -> Result<Matrix<F>> {
        Ok(a.mul(self.projector()?.matrix()))
    }

    /// `nabla_a A = A - U_a A U_a^-1 Gamma_a p` on `Mat_N p`, realised as the
    /// pushforward along `A -> A p` of the free connection with
    /// `nabla_a 1 = 1 - Gamma_a`.
    pub fn projective_connection(&self, gammas: &[Matrix<F>]) -> Result<MatrixConnection<F>> {
        let projector = self.projector()?;
        let n = self.alg.num_derivations();
        if gammas.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: gammas.len() });
        }
        let one = Matrix::identity(self.alg.size());
        let table = gammas.iter().map(|g| vec![vec![one.sub(g)]]).collect();
        let free = Connection::from_gamma(&self.free_module()?, table)?;
        free.pushforward(projector.as_module_map(), 4, 0)
    }

    /// `U_a U_b A [U_b^-1 Gamma_b p, U_a^-1 Gamma_a p]`.
    pub fn curvature_closed_form(&self, gammas: &[Matrix<F>], a: usize, b: usize, m: &Matrix<F>) -> Result<Matrix<F>> {
        let p = self.projector()?.matrix();
        let left = self.alg.u_inv_of(b).mul(&gammas[b]).mul(p);
        let right = self.alg.u_inv_of(a).mul(&gammas[a]).mul(p);
        Ok(self.alg.u_of(a).mul(self.alg.u_of(b)).mul(m).mul(&left.commutator(&right)))
    }

    /// Curvature from the definition with the flip Lie structure.
    pub fn curvature_direct(&self, conn: &MatrixConnection<F>, a: usize, b: usize, m: &Matrix<F>) -> Matrix<F> {
        let lie = self.alg.lie_structure();
        curvature(conn, &lie, a, b, std::slice::from_ref(m)).remove(0)
    }

    /// `lambda` with `M v0 = lambda v0`, read off as `v0^dagger M v0` and verified.
    pub fn eigenvalue(&self, m: &Matrix<F>) -> Result<F> {
        let v0 = self.v0()?;
        let lambda = v0.dagger().mul(m).mul(v0)[(0, 0)].clone();
        if !m.mul(v0).approx_eq(&v0.scale(&lambda), self.tol()) {
            return Err(Error::NotEigenvector(format!("v0 = {} under {}", v0.render(), m.render())));
        }
        Ok(lambda)
    }

    /// `mu_a` with `U_a v0 = mu_a v0` for every matrix of the geometry.
    pub fn mus(&self) -> Result<Vec<F>> {
        self.alg.us().iter().map(|u| self.eigenvalue(u)).collect()
    }

    /// `phi(v) = v v0^dagger`.
    pub fn phi(&self, v: &Matrix<F>) -> Result<Matrix<F>> {
        Ok(v.mul(&self.v0()?.dagger()))
    }

    /// `phi^-1(A) = A v0`.
    pub fn phi_inv(&self, m: &Matrix<F>) -> Result<Matrix<F>> {
        Ok(m.mul(self.v0()?))
    }

    /// `gamma_a = v0^dagger U_a^-1 Gamma_a v0`, so that the connection reads
    /// `nabla_a v = (1 - gamma_a U_a) v` on column vectors.
    pub fn vector_gammas(&self, gammas: &[Matrix<F>]) -> Result<Vec<F>> {
        let v0 = self.v0()?;
        Ok((0..gammas.len())
            .map(|a| v0.dagger().mul(self.alg.u_inv_of(a)).mul(&gammas[a]).mul(v0)[(0, 0)].clone())
            .collect())
    }

    /// `(1 - gamma U_a) v`.
    pub fn vector_connection_apply(&self, gamma: &F, a: usize, v: &Matrix<F>) -> Matrix<F> {
        v.sub(&self.alg.u_of(a).mul(v).scale(gamma))
    }

    /// `Gamma_a = 1 - E_a`, torsion free for the anchor `phi(X_a) = E_a p`.
    pub fn torsion_free_gamma_choice(&self, es: &[Matrix<F>], name: &str) -> Result<TorsionFreeChoice<F>> {
        let n = self.alg.num_derivations();
        if es.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: es.len() });
        }
        let tol = self.tol();
        let zero = Matrix::zeros(self.alg.size(), self.alg.size());
        for a in 0..n {
            for b in 0..n {
                if !es[a].commutator(&es[b]).approx_eq(&zero, tol) {
                    return Err(Error::NonCommuting(format!("[E{}, E{}] != 0", a + 1, b + 1)));
                }
                if !es[a].commutator(self.alg.u_of(b)).approx_eq(&zero, tol) {
                    return Err(Error::NonCommuting(format!("[E{}, U{}] != 0", a + 1, b + 1)));
                }
            }
        }
        let projector = self.projector()?;
        let rank_one = projector.v0().is_some();
        let (lambdas, mus) = if rank_one {
            let lambdas = es.iter().map(|e| self.eigenvalue(e)).collect::<Result<Vec<_>>>()?;
            (Some(lambdas), Some(self.mus()?))
        } else {
            (None, None)
        };
        let one = Matrix::identity(self.alg.size());
        let gammas: Vec<Matrix<F>> = es.iter().map(|e| one.sub(e)).collect();
        let connection = self.projective_connection(&gammas)?;
        let anchor: Vec<ModElem<MatrixSigma<F>>> = es.iter().map(|e| vec![e.mul(projector.matrix())]).collect();
        let mut parts = vec![torsion_check(&connection, &self.alg.lie_structure(), &anchor, &format!("{name}.torsion"))];
        let mut vector_gammas = None;
        if let (Some(lambdas), Some(mus)) = (&lambdas, &mus) {
            let expected: Vec<F> = lambdas
                .iter()
                .zip(mus)
                .map(|(l, m)| F::one().sub_ref(l).div_ref(m))
                .collect::<Result<_>>()?;
            let actual = self.vector_gammas(&gammas)?;
            let label = format!("{name}.vector");
            let anchor_text = "gamma_a = mu_a^-1 (1 - lambda_a)";
            parts.push(match expected.iter().zip(&actual).position(|(e, g)| !crate::scalar::approx_eq(e, g, tol)) {
                Some(a) => CheckReport::fail(
                    label,
                    anchor_text,
                    format!("a = {}: {} vs {}", a + 1, actual[a], expected[a]),
                ),
                None => CheckReport::pass(label, anchor_text, format!("{n} derivations")),
            });
            vector_gammas = Some(actual);
        }
        let report = combine(name, "torsion free for phi(X_a) = E_a p with Gamma_a = 1 - E_a", parts);
        Ok(TorsionFreeChoice { gammas, anchor, connection, vector_gammas, report })
    }
}

/// Output of [`MatrixGeometry::torsion_free_gamma_choice`].
pub struct TorsionFreeChoice<F: Field> {
    pub gammas: Vec<Matrix<F>>,
    pub anchor: Vec<ModElem<MatrixSigma<F>>>,
    pub connection: MatrixConnection<F>,
    /// `gamma_a` of the vector-module form, when `p` is rank one.
    pub vector_gammas: Option<Vec<F>>,
    pub report: CheckReport,
}

/// Compare the closed-form curvature with the definition on one instance.
pub fn curvature_difference<F: Field>(
    geometry: &MatrixGeometry<F>,
    gammas: &[Matrix<F>],
    a: usize,
    b: usize,
    m: &Matrix<F>,
) -> Result<(Matrix<F>, Matrix<F>)> {
    let conn = geometry.projective_connection(gammas)?;
    let m = geometry.project(m)?;
    Ok((geometry.curvature_closed_form(gammas, a, b, &m)?, geometry.curvature_direct(&conn, a, b, &m)))
}

/// `Curv(B A) = sigma_a(sigma_b(B)) Curv(A)` on samples.
pub fn curvature_linearity_check<F: Field>(
    geometry: &MatrixGeometry<F>,
    gammas: &[Matrix<F>],
    name: &str,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let anchor = "Curv(X_a,X_b)(B A) = sigma_a(sigma_b(B)) Curv(X_a,X_b) A";
    let alg = geometry.algebra();
    let mut rng = seeded(seed);
    let n = alg.num_derivations();
    for _ in 0..samples {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let bm = alg.random_element(&mut rng);
        let m = geometry.project(&alg.random_element(&mut rng))?;
        let lhs = geometry.curvature_closed_form(gammas, a, b, &bm.mul(&m))?;
        let rhs = alg.sigma(a, &alg.sigma(b, &bm)).mul(&geometry.curvature_closed_form(gammas, a, b, &m)?);
        if !lhs.approx_eq(&rhs, alg.tolerance()) {
            return Ok(CheckReport::fail(
                name,
                anchor,
                format!("a = {}, b = {}, B = {}, A = {}", a + 1, b + 1, bm.render(), m.render()),
            ));
        }
    }
    Ok(CheckReport::pass(name, anchor, format!("{samples} samples")))
}

/// `p [A_1 p, A_2 p] = 0` for rank-one `p`.
pub fn scalar_sandwich_check<F: Field>(
    geometry: &MatrixGeometry<F>,
    name: &str,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let anchor = "p [A_1 p, A_2 p] = 0 for p = v0 v0^dagger";
    let p = geometry.projector()?.matrix().clone();
    let alg = geometry.algebra();
    let mut rng = seeded(seed);
    for _ in 0..samples {
        let a1 = alg.random_element(&mut rng).mul(&p);
        let a2 = alg.random_element(&mut rng).mul(&p);
        let value = p.mul(&a1.commutator(&a2));
        if !value.approx_eq(&alg.zero(), alg.tolerance()) {
            return Ok(CheckReport::fail(name, anchor, format!("A1 p = {}, A2 p = {}: {}", a1.render(), a2.render(), value.render())));
        }
    }
    Ok(CheckReport::pass(name, anchor, format!("{samples} samples")))
}

/// Deterministic candidates for a regularity witness: the elementary matrices,
/// the nontrivial cyclic shifts, then seeded random matrices.
pub fn regularity_candidates<F: Field>(size: usize, random: usize, seed: u64) -> Vec<Matrix<F>> {
    let mut out: Vec<Matrix<F>> = (0..size * size).map(|k| Matrix::elementary(size, k / size, k % size)).collect();
    for shift in 1..size {
        let mut m = Matrix::zeros(size, size);
        for i in 0..size {
            m[(i, (i + shift) % size)] = F::one();
        }
        out.push(m);
    }
    let mut rng = seeded(seed);
    out.extend((0..random).map(|_| Matrix::random(size, size, &mut rng)));
    out
}

/// Number of seeded random candidates tried after the structured ones.
pub const REGULARITY_RANDOM_BUDGET: usize = 100;

/// Search, for each underlying `X_a`, for `B` with `det(X_a(B)) != 0`.
pub fn regularity_check<F: Field>(
    alg: &MatrixSigma<F>,
    name: &str,
    seed: u64,
) -> (CheckReport, Vec<Option<Matrix<F>>>) {
    let anchor = "det(X_a(B)) != 0 for some B";
    let candidates = regularity_candidates::<F>(alg.size(), REGULARITY_RANDOM_BUDGET, seed);
    let tol = alg.tolerance();
    let witnesses: Vec<Option<Matrix<F>>> = (0..alg.us().len())
        .map(|a| {
            candidates
                .iter()
                .find(|b| !alg.derive(a, b).det(tol).is_negligible(tol, 1.0))
                .cloned()
        })
        .collect();
    let report = match witnesses.iter().position(Option::is_none) {
        Some(a) => CheckReport::fail(
            name,
            anchor,
            format!("X{} not regular: not found within budget of {} candidates", a + 1, candidates.len()),
        ),
        None => CheckReport::pass(
            name,
            anchor,
            witnesses
                .iter()
                .enumerate()
                .map(|(a, w)| format!("X{}: B = {}", a + 1, w.as_ref().expect("found").render()))
                .collect::<Vec<_>>()
                .join("; "),
        ),
    };
    (report, witnesses)
}

/// Both product rules for `nabla_{X_a} = sigma_a(.) Gamma_a + X_a(.)`:
/// `nabla(B A) = sigma_a(B) nabla A + X_a(B) A` and
/// `nabla(B A) = B nabla A + X_a(B) sigma_a(A)`. The second rule fails at
/// `A = 1` and a regularity witness `B` whenever `Gamma_a != 0`, with defect
/// `X_a(B) Gamma_a`.
pub fn dual_product_rule_check<F: Field>(
    alg: &MatrixSigma<F>,
    gamma_tilde: &[Matrix<F>],
    witnesses: &[Matrix<F>],
    name: &str,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let anchor = "nabla_{X_a}(BA) = sigma_a(B) nabla A + X_a(B) A = B nabla A + X_a(B) sigma_a(A)";
    let n = alg.us().len();
    let tol = alg.tolerance();
    let nabla = |a: usize, m: &Matrix<F>| alg.sigma(a, m).mul(&gamma_tilde[a]).add(&alg.derive(a, m));
    let mut rng = seeded(seed);
    for a in 0..n {
        let mut pairs: Vec<(Matrix<F>, Matrix<F>)> = witnesses.iter().map(|w| (w.clone(), alg.one())).collect();
        pairs.extend((0..samples).map(|_| (alg.random_element(&mut rng), alg.random_element(&mut rng))));
        for (bm, m) in &pairs {
            let lhs = nabla(a, &bm.mul(m));
            let left_rule = alg.sigma(a, bm).mul(&nabla(a, m)).add(&alg.derive(a, bm).mul(m));
            let right_rule = bm.mul(&nabla(a, m)).add(&alg.derive(a, bm).mul(&alg.sigma(a, m)));
            if !lhs.approx_eq(&left_rule, tol) {
                return CheckReport::fail(name, anchor, format!("left rule, a = {}, B = {}, A = {}", a + 1, bm.render(), m.render()));
            }
            if !lhs.approx_eq(&right_rule, tol) {
                return CheckReport::fail(
                    name,
                    anchor,
                    format!(
                        "right rule, a = {}, B = {}, A = {}: X_a(B) Gamma_a = {}",
                        a + 1,
                        bm.render(),
                        m.render(),
                        alg.derive(a, bm).mul(&gamma_tilde[a]).render()
                    ),
                );
            }
        }
    }
    CheckReport::pass(name, anchor, format!("{n} derivations, {} witnesses, {samples} samples", witnesses.len()))
}

/// Output of [`unique_regular_connection`].
pub struct UniqueConnection<F: Field> {
    pub connection: MatrixConnection<F>,
    pub witnesses: Vec<Matrix<F>>,
    pub report: CheckReport,
}

/// The connection `nabla_{X~_k} A = X~_k(A)` on the free rank-one module over
/// a regular doubled algebra, with both product rules verified.
pub fn unique_regular_connection<F: Field>(
    doubled: &Arc<MatrixSigma<F>>,
    name: &str,
    samples: usize,
    seed: u64,
) -> Result<UniqueConnection<F>> {
    if !doubled.is_doubled() {
        return Err(Error::NoStarStructure);
    }
    let (regular, witnesses) = regularity_check(doubled, &format!("{name}.regular"), seed);
    let witnesses = witnesses
        .into_iter()
        .enumerate()
        .map(|(a, w)| w.ok_or(Error::NotRegular(a)))
        .collect::<Result<Vec<_>>>()?;
    let module = SigmaModule::free(doubled, 1).with_star()?;
    let connection = Connection::trivial(&module);
    let leibniz = crate::connection::connection_leibniz_check(&connection, Side::Bimodule, &format!("{name}.leibniz"), samples, seed);
    let zero = vec![doubled.zero(); doubled.us().len()];
    let dual = dual_product_rule_check(doubled, &zero, &witnesses, &format!("{name}.dual"), samples, seed);
    let report = combine(name, "nabla_{X~_k} A = X~_k(A) is the unique connection", vec![regular, leibniz, dual]);
    Ok(UniqueConnection { connection, witnesses, report })
}

fn require_commuting<F: Field>(alg: &MatrixSigma<F>, m: &Matrix<F>, label: &str) -> Result<()> {
    let zero = alg.zero();
    for (a, u) in alg.us().iter().enumerate() {
        if !u.commutator(m).approx_eq(&zero, alg.tolerance()) {
            return Err(Error::NonCommuting(format!("[U{}, {label}] != 0", a + 1)));
        }
    }
    Ok(())
}

/// `nabla = X~` with `h(A, B) = A h0 B^dagger` and anchor `phi(X~_k) = E_{k mod n}`,
/// checked to be Levi-Civita.
pub fn matrix_levi_civita_full<F: Field>(
    doubled: &Arc<MatrixSigma<F>>,
    h0: &Matrix<F>,
    es: &[Matrix<F>],
    name: &str,
    samples: usize,
    seed: u64,
) -> Result<(MatrixConnection<F>, CheckReport)> {
    if !doubled.is_doubled() {
        return Err(Error::NoStarStructure);
    }
    let tol = doubled.tolerance();
    if !h0.dagger().approx_eq(h0, tol) {
        return Err(Error::NotHermitian(format!("h0 = {}", h0.render())));
    }
    require_commuting(doubled, h0, "h0")?;
    let n = doubled.us().len();
    if es.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: es.len() });
    }
    for (b, e) in es.iter().enumerate() {
        require_commuting(doubled, e, &format!("E{}", b + 1))?;
    }
    let module = SigmaModule::free(doubled, 1).with_star()?;
    let h = HermitianForm::new(doubled.as_ref(), vec![vec![h0.clone()]])?;
    let connection = Connection::trivial(&module);
    let anchor: Vec<ModElem<MatrixSigma<F>>> = (0..2 * n).map(|k| vec![es[k % n].clone()]).collect();
    let report = levi_civita_check(&connection, &doubled.lie_structure(), &anchor, &h, name, samples, seed);
    Ok((connection, report))
}

/// `p ∘ X~` on `Mat_N p` for `p = v0 v0^dagger`, with `h = h0_hat p` and
/// anchor `phi(X~_k) = lambda_{k mod n} p`; on vectors this is
/// `nabla_a v = (1 - conj(mu_a) U_a) v`.
pub fn matrix_levi_civita_vector<F: Field>(
    doubled: &Arc<MatrixSigma<F>>,
    v0: &Matrix<F>,
    h0_hat: &F,
    lambdas: &[F],
    name: &str,
    samples: usize,
    seed: u64,
) -> Result<(MatrixConnection<F>, CheckReport)> {
    if !doubled.is_doubled() {
        return Err(Error::NoStarStructure);
    }
    let tol = doubled.tolerance();
    if !crate::scalar::approx_eq(&h0_hat.conj(), h0_hat, tol) {
        return Err(Error::NotHermitian(format!("h0_hat = {h0_hat} is not real")));
    }
    let n = doubled.us().len();
    if lambdas.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lambdas.len() });
    }
    let projector = Projector::rank_one(v0.clone(), tol)?;
    let geometry = MatrixGeometry { alg: doubled.clone(), projector: Some(projector.clone()) };
    let mus = geometry.mus()?;
    let p = projector.matrix().clone();
    let h0 = p.scale(h0_hat);
    require_commuting(doubled, &h0, "h0")?;
    let module = SigmaModule::free(doubled, 1).with_star()?;
    let h = HermitianForm::new(doubled.as_ref(), vec![vec![h0]])?;
    let (connection, metric) = crate::connection::orthogonal_projection_metric(
        &Connection::trivial(&module),
        &h,
        &projector.as_module_map(),
        &format!("{name}.projection"),
        samples,
        seed,
    )?;
    let anchor: Vec<ModElem<MatrixSigma<F>>> = (0..2 * n).map(|k| vec![p.scale(&lambdas[k % n])]).collect();
    let lc = levi_civita_check(&connection, &doubled.lie_structure(), &anchor, &h, &format!("{name}.levi_civita"), samples, seed);
    let mut rng = seeded(seed);
    let label = format!("{name}.vector_form");
    let vector_anchor = "nabla_a v = (1 - conj(mu_a) U_a) v";
    let mut vector = CheckReport::pass(&label, vector_anchor, format!("{samples} vectors"));
    'outer: for _ in 0..samples {
        let v = Matrix::<F>::random(doubled.size(), 1, &mut rng);
        let image = geometry.phi(&v)?;
        for k in 0..2 * n {
            let lhs = geometry.phi_inv(&connection.apply(k, std::slice::from_ref(&image))[0])?;
            let rhs = v.sub(&doubled.u_of(k).mul(&v).scale(&mus[k % n].conj()));
            if !lhs.approx_eq(&rhs, tol) {
                vector = CheckReport::fail(&label, vector_anchor, format!("k = {}, v = {}: {} vs {}", k + 1, v.render(), lhs.render(), rhs.render()));
                break 'outer;
            }
        }
    }
    let report = combine(name, "Levi-Civita connection on Mat_N p", vec![metric, lc, vector]);
    Ok((connection, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::build_matrix_algebra;

    type G = GaussianRational;

    fn gi(re: i64, im: i64) -> G {
        G::from_ints(re, im)
    }

    fn diag(entries: &[(i64, i64)]) -> Matrix<G> {
        Matrix::diagonal(&entries.iter().map(|&(r, i)| gi(r, i)).collect::<Vec<_>>())
    }

    #[test]
    fn householder_is_unitary_and_maps_e1() {
        let mut rng = seeded(3);
        for n in 2..=4 {
            let v0 = G::random_unit_vector(n, &mut rng);
            let h = householder_to(&v0);
            assert!(h.is_unitary(0.0));
            let mut e1 = Matrix::zeros(n, 1);
            e1[(0, 0)] = G::one();
            assert_eq!(h.mul(&e1), v0);
        }
    }

    #[test]
    fn zero_gamma_gives_identity_connection() {
        let alg = build_matrix_algebra(vec![diag(&[(1, 0), (0, 1)])], 0.0).unwrap();
        let geometry = MatrixGeometry::new(alg).with_projector(Projector::identity(2)).unwrap();
        let conn = geometry.projective_connection(&[Matrix::zeros(2, 2)]).unwrap();
        let m = Matrix::parse(&[vec!["1", "2"], vec!["i", "3"]]).unwrap();
        assert_eq!(conn.apply(0, &[m.clone()])[0], m);
    }

    #[test]
    fn gamma_for_first_basis_vector() {
        let u = diag(&[(0, 1), (-1, 0)]);
        let gamma = diag(&[(3, 0), (5, 0)]);
        let alg = build_matrix_algebra(vec![u.clone()], 0.0).unwrap();
        let v0 = Matrix::column(vec![gi(1, 0), gi(0, 0)]);
        let geometry = MatrixGeometry::new(alg)
            .with_projector(Projector::rank_one(v0, 0.0).unwrap())
            .unwrap();
        let expected = u.inverse(0.0).unwrap().mul(&gamma)[(0, 0)].clone();
        assert_eq!(geometry.vector_gammas(&[gamma]).unwrap(), vec![expected]);
    }

    #[test]
    fn commuting_gammas_give_flat_connection() {
        let us = vec![diag(&[(1, 0), (0, 1), (-1, 0)]), diag(&[(0, 1), (1, 0), (1, 0)])];
        let alg = build_matrix_algebra(us, 0.0).unwrap();
        let geometry = MatrixGeometry::new(alg).with_projector(Projector::identity(3)).unwrap();
        let z = diag(&[(2, 0), (1, 1), (3, 0)]);
        let gammas = vec![z.clone(), z];
        let m = Matrix::random(3, 3, &mut seeded(1));
        let (closed, direct) = curvature_difference(&geometry, &gammas, 0, 1, &m).unwrap();
        assert!(closed.is_zero());
        assert_eq!(closed, direct);
    }

    #[test]
    fn regularity_examples() {
        let alg = build_matrix_algebra(vec![diag(&[(1, 0), (-1, 0)])], 0.0).unwrap();
        let (report, witnesses) = regularity_check(&alg, "reg", 1);
        assert!(report.passed());
        let witness = witnesses[0].clone().unwrap();
        assert_eq!(alg.derive(0, &witness), witness.scale(&gi(2, 0)));
        let trivial = build_matrix_algebra(vec![Matrix::<G>::identity(2)], 0.0).unwrap();
        let (report, witnesses) = regularity_check(&trivial, "reg", 1);
        assert!(report.failed());
        assert!(report.witness.unwrap().contains("not found within budget"));
        assert!(witnesses[0].is_none());
    }

    #[test]
    fn torsion_free_choice_with_e_equal_u() {
        let us = vec![diag(&[(1, 0), (0, 1)]), diag(&[(0, -1), (-1, 0)])];
        let alg = build_matrix_algebra(us.clone(), 0.0).unwrap();
        let geometry = MatrixGeometry::new(alg).with_projector(Projector::identity(2)).unwrap();
        let choice = geometry.torsion_free_gamma_choice(&us, "tf").unwrap();
        assert!(choice.report.passed(), "{:?}", choice.report);
        let bad = vec![us[0].clone(), Matrix::parse(&[vec!["0", "1"], vec!["1", "0"]]).unwrap()];
        assert!(matches!(geometry.torsion_free_gamma_choice(&bad, "tf"), Err(Error::NonCommuting(_))));
    }

    #[test]
    fn torsion_free_choice_on_vectors() {
        let us = vec![diag(&[(0, 1), (1, 0)])];
        let es = vec![diag(&[(3, 0), (-1, 0)])];
        let alg = build_matrix_algebra(us, 0.0).unwrap();
        let v0 = Matrix::column(vec![gi(1, 0), gi(0, 0)]);
        let geometry = MatrixGeometry::new(alg)
            .with_projector(Projector::rank_one(v0, 0.0).unwrap())
            .unwrap();
        let choice = geometry.torsion_free_gamma_choice(&es, "tf").unwrap();
        assert!(choice.report.passed(), "{:?}", choice.report);
        // mu = i, lambda = 3: gamma = (1 - 3) / i = 2i.
        assert_eq!(choice.vector_gammas.unwrap(), vec![gi(0, 2)]);
        let not_eigen = vec![Matrix::parse(&[vec!["1", "1"], vec!["0", "1"]]).unwrap()];
        assert!(geometry.torsion_free_gamma_choice(&not_eigen, "tf").is_err());
    }

    #[test]
    fn phi_round_trip() {
        let mut rng = seeded(9);
        let (us, v0) = random_commuting_unitaries::<G>(2, 3, &mut rng);
        let alg = build_matrix_algebra(us, 0.0).unwrap();
        let geometry = MatrixGeometry::new(alg)
            .with_projector(Projector::rank_one(v0, 0.0).unwrap())
            .unwrap();
        let v = Matrix::random(3, 1, &mut rng);
        assert_eq!(geometry.phi_inv(&geometry.phi(&v).unwrap()).unwrap(), v);
        let m = geometry.project(&Matrix::random(3, 3, &mut rng)).unwrap();
        assert_eq!(geometry.phi(&geometry.phi_inv(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn missing_projector_is_reported() {
        let alg = build_matrix_algebra(vec![diag(&[(1, 0), (0, 1)])], 0.0).unwrap();
        let geometry = MatrixGeometry::new(alg);
        assert!(matches!(geometry.projective_connection(&[Matrix::zeros(2, 2)]), Err(Error::MissingProjector)));
    }

    #[test]
    fn unique_connection_on_small_example() {
        let alg = build_matrix_algebra(vec![diag(&[(1, 0), (0, 1)])], 0.0).unwrap();
        let doubled = Arc::new(alg.doubled().unwrap());
        let unique = unique_regular_connection(&doubled, "unique", 10, 2).unwrap();
        assert!(unique.report.passed(), "{:?}", unique.report);
        let injected = vec![Matrix::identity(2)];
        let report = dual_product_rule_check(&doubled, &injected, &unique.witnesses, "inj", 5, 2);
        assert!(report.failed());
        assert!(report.witness.unwrap().contains("right rule"));
    }

    #[test]
    fn levi_civita_examples() {
        let us = vec![diag(&[(1, 0), (0, 1), (-1, 0)])];
        let doubled = Arc::new(build_matrix_algebra(us.clone(), 0.0).unwrap().doubled().unwrap());
        let (_, report) = matrix_levi_civita_full(&doubled, &Matrix::identity(3), &us, "full", 10, 1).unwrap();
        assert!(report.passed(), "{:?}", report);
        let v0 = Matrix::column(vec![gi(1, 0), gi(0, 0), gi(0, 0)]);
        let (_, report) = matrix_levi_civita_vector(&doubled, &v0, &gi(2, 0), &[gi(1, 1)], "vec", 10, 1).unwrap();
        assert!(report.passed(), "{:?}", report);
        let h0 = Matrix::parse(&[vec!["1", "1", "0"], vec!["1", "1", "0"], vec!["0", "0", "1"]]).unwrap();
        assert!(matches!(
            matrix_levi_civita_full(&doubled, &h0, &us, "full", 10, 1),
            Err(Error::NonCommuting(_))
        ));
    }
}
