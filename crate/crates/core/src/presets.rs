//! Ready-made algebras: the Jackson q-plane, the shift line and matrix
//! algebras with inner derivations.

use std::sync::Arc;

use crate::algebra::{
    pick, AlgebraHom, Algebra, Presentation, PresentationBuilder, PresentedSigma, SeededRng,
    SigmaTau, SigmaTauDerivation,
};
use crate::connection::LieStructure;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Field, RatFunc, Rational};

/// Commutative `C[x, y]` over `Q(i)(s)` with `x^* = x`, `y^* = y`.
pub fn qplane_presentation() -> Result<Arc<Presentation<RatFunc>>> {
    Ok(Arc::new(
        PresentationBuilder::new(&["x", "y"])
            .commutative()
            .star(&["x", "y"])
            .build()?,
    ))
}

/// Jackson derivatives in `x` (index 0) and `y` (index 1) with
/// `sigma_1: x -> q x`, `sigma_2: y -> q y`, `tau = id`.
fn jackson_pair(pres: &Arc<Presentation<RatFunc>>) -> Result<[SigmaTauDerivation<RatFunc>; 2]> {
    let q = RatFunc::q();
    let one = RatFunc::from_i64(1);
    let id = AlgebraHom::identity(pres);
    let s1 = AlgebraHom::diagonal(pres, vec![q.clone(), one.clone()])?;
    let s2 = AlgebraHom::diagonal(pres, vec![one, q])?;
    Ok([
        SigmaTauDerivation::parse("X1", s1, id.clone(), &["1", "0"])?,
        SigmaTauDerivation::parse("X2", s2, id, &["0", "1"])?,
    ])
}

/// The q-plane with `X_1`, `X_2` and the flip Lie structure with `C = 0`.
pub fn build_qplane() -> Result<(PresentedSigma<RatFunc>, LieStructure<RatFunc>)> {
    let pres = qplane_presentation()?;
    let derivations = jackson_pair(&pres)?.to_vec();
    Ok((PresentedSigma::new(&pres, derivations, None)?, LieStructure::flip(2)))
}

/// Star version: `X_1, X_2` of type `(sigma_k, id)` followed by the same maps
/// viewed as `(id, sigma_k)`-derivations, with `iota(k) = k ± 2`.
pub fn build_qplane_star() -> Result<(PresentedSigma<RatFunc>, LieStructure<RatFunc>)> {
    let pres = qplane_presentation()?;
    let [x1, x2] = jackson_pair(&pres)?;
    let x3 = x1.swapped("X1'")?;
    let x4 = x2.swapped("X2'")?;
    let alg = PresentedSigma::new(&pres, vec![x1, x2, x3, x4], Some(vec![2, 3, 0, 1]))?;
    Ok((alg, LieStructure::flip(4)))
}

/// `C[t]` over the rationals with `tau(t) = t + hbar`, `sigma = id` and the
/// difference operator `X = tau - sigma`.
pub fn build_shift_line(hbar: &Rational) -> Result<PresentedSigma<Rational>> {
    let pres: Arc<Presentation<Rational>> = Arc::new(PresentationBuilder::new(&["t"]).commutative().build()?);
    let id = AlgebraHom::identity(&pres);
    let t = crate::algebra::Element::generator(&pres, 0);
    let shifted = &t + &crate::algebra::Element::scalar(&pres, hbar.clone());
    let shift = AlgebraHom::new(&pres, &pres, vec![shifted])?;
    let d = SigmaTauDerivation::inner("D", id, shift)?;
    PresentedSigma::new(&pres, vec![d], None)
}

/// Type of a matrix derivation `X(A) = A - U A U^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerKind {
    /// `(sigma_U, id)`.
    SigmaFirst,
    /// `(id, sigma_U)`.
    TauFirst,
}

#[derive(Clone, Debug)]
struct MatrixDerivation {
    u: usize,
    kind: InnerKind,
}

/// `Mat_N` with derivations `X_a(A) = A - U_a A U_a^-1` for commuting
/// invertible `U_a`, optionally doubled into a star structure.
#[derive(Clone, Debug)]
pub struct MatrixSigma<F: Field> {
    size: usize,
    us: Vec<Matrix<F>>,
    us_inv: Vec<Matrix<F>>,
    derivations: Vec<MatrixDerivation>,
    iota: Option<Vec<usize>>,
    tolerance: f64,
}

impl<F: Field> MatrixSigma<F> {
    /// Checks invertibility and pairwise commutation of the `U_a`.
    pub fn new(us: Vec<Matrix<F>>, tolerance: f64) -> Result<Self> {
        let size = us.first().map_or(0, Matrix::rows);
        let mut us_inv = Vec::with_capacity(us.len());
        for (a, u) in us.iter().enumerate() {
            if !u.is_square() || u.rows() != size {
                return Err(Error::DimensionMismatch { expected: size, got: u.rows() });
            }
            us_inv.push(
                u.inverse(tolerance)
                    .map_err(|_| Error::Singular(format!("U{} = {}", a + 1, u.render())))?,
            );
        }
        for a in 0..us.len() {
            for b in a + 1..us.len() {
                if !us[a].commutator(&us[b]).approx_eq(&Matrix::zeros(size, size), tolerance) {
                    return Err(Error::NonCommuting(format!("[U{}, U{}] != 0", a + 1, b + 1)));
                }
            }
        }
        let derivations = (0..us.len())
            .map(|u| MatrixDerivation { u, kind: InnerKind::SigmaFirst })
            .collect();
        Ok(Self { size, us, us_inv, derivations, iota: None, tolerance })
    }

    /// Star structure with `2n` derivations: `X_k` of type `(sigma_k, id)`
    /// then `(id, sigma_k)`, and `iota(k) = k ± n`. Requires unitary `U_a`.
    pub fn doubled(&self) -> Result<Self> {
        for (a, u) in self.us.iter().enumerate() {
            if !u.is_unitary(self.tolerance) {
                return Err(Error::NonUnitary(format!("U{} = {}", a + 1, u.render())));
            }
        }
        let n = self.us.len();
        let mut derivations: Vec<MatrixDerivation> = (0..n)
            .map(|u| MatrixDerivation { u, kind: InnerKind::SigmaFirst })
            .collect();
        derivations.extend((0..n).map(|u| MatrixDerivation { u, kind: InnerKind::TauFirst }));
        let iota = (0..2 * n).map(|k| if k < n { k + n } else { k - n }).collect();
        Ok(Self { derivations, iota: Some(iota), ..self.clone() })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn us(&self) -> &[Matrix<F>] {
        &self.us
    }

    /// The matrix behind derivation `a`.
    pub fn u_of(&self, a: usize) -> &Matrix<F> {
        &self.us[self.derivations[a].u]
    }

    pub fn u_inv_of(&self, a: usize) -> &Matrix<F> {
        &self.us_inv[self.derivations[a].u]
    }

    pub fn kind(&self, a: usize) -> InnerKind {
        self.derivations[a].kind
    }

    pub fn is_doubled(&self) -> bool {
        self.iota.is_some()
    }

    /// `U_a A U_a^-1`.
    pub fn conjugate(&self, a: usize, m: &Matrix<F>) -> Matrix<F> {
        self.u_of(a).mul(m).mul(self.u_inv_of(a))
    }

    /// Flip Lie structure, `C = 0`.
    pub fn lie_structure(&self) -> LieStructure<F> {
        LieStructure::flip(self.derivations.len())
    }
}

impl<F: Field> Algebra for MatrixSigma<F> {
    type Scalar = F;
    type Elem = Matrix<F>;

    fn zero(&self) -> Matrix<F> {
        Matrix::zeros(self.size, self.size)
    }

    fn one(&self) -> Matrix<F> {
        Matrix::identity(self.size)
    }

    fn from_scalar(&self, c: F) -> Matrix<F> {
        Matrix::identity(self.size).scale(&c)
    }

    fn add(&self, x: &Matrix<F>, y: &Matrix<F>) -> Matrix<F> {
        x.add(y)
    }

    fn neg(&self, x: &Matrix<F>) -> Matrix<F> {
        x.neg()
    }

    fn sub(&self, x: &Matrix<F>, y: &Matrix<F>) -> Matrix<F> {
        x.sub(y)
    }

    fn mul(&self, x: &Matrix<F>, y: &Matrix<F>) -> Matrix<F> {
        x.mul(y)
    }

    fn scale(&self, c: &F, x: &Matrix<F>) -> Matrix<F> {
        x.scale(c)
    }

    fn approx_eq(&self, x: &Matrix<F>, y: &Matrix<F>) -> bool {
        x.approx_eq(y, self.tolerance)
    }

    fn star(&self, x: &Matrix<F>) -> Result<Matrix<F>> {
        Ok(x.dagger())
    }

    fn inverse(&self, x: &Matrix<F>) -> Option<Matrix<F>> {
        x.inverse(self.tolerance).ok()
    }

    fn render(&self, x: &Matrix<F>) -> String {
        x.render()
    }

    /// Elementary matrices `E_ij`.
    fn generators(&self) -> Vec<Matrix<F>> {
        let n = self.size;
        (0..n * n).map(|k| Matrix::elementary(n, k / n, k % n)).collect()
    }

    fn random_element(&self, rng: &mut SeededRng) -> Matrix<F> {
        // Mix dense samples with sparse ones so that rank-deficient inputs occur.
        if pick(rng, 4) == 0 {
            let mut m = self.zero();
            let (i, j) = (pick(rng, self.size), pick(rng, self.size));
            m[(i, j)] = F::sample(rng);
            m
        } else {
            Matrix::random(self.size, self.size, rng)
        }
    }
}

impl<F: Field> SigmaTau for MatrixSigma<F> {
    fn num_derivations(&self) -> usize {
        self.derivations.len()
    }

    fn sigma(&self, a: usize, f: &Matrix<F>) -> Matrix<F> {
        match self.derivations[a].kind {
            InnerKind::SigmaFirst => self.conjugate(a, f),
            InnerKind::TauFirst => f.clone(),
        }
    }

    fn tau(&self, a: usize, f: &Matrix<F>) -> Matrix<F> {
        match self.derivations[a].kind {
            InnerKind::SigmaFirst => f.clone(),
            InnerKind::TauFirst => self.conjugate(a, f),
        }
    }

    fn derive(&self, a: usize, f: &Matrix<F>) -> Matrix<F> {
        f.sub(&self.conjugate(a, f))
    }

    fn iota(&self) -> Option<&[usize]> {
        self.iota.as_deref()
    }

    fn derivation_name(&self, a: usize) -> String {
        match self.derivations[a].kind {
            InnerKind::SigmaFirst => format!("X{}", a + 1),
            InnerKind::TauFirst => format!("X{}'", self.derivations[a].u + 1),
        }
    }
}

/// Build `Mat_N` with the inner derivations of the given matrices.
pub fn build_matrix_algebra<F: Field>(us: Vec<Matrix<F>>, tolerance: f64) -> Result<MatrixSigma<F>> {
    MatrixSigma::new(us, tolerance)
}
