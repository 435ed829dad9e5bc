//! Dense matrices over a [`Field`].

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Field;

#[derive(Clone, PartialEq)]
pub struct Matrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![F::one(); n])
    }

    pub fn diagonal(entries: &[F]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, c) in entries.iter().enumerate() {
            m[(i, i)] = c.clone();
        }
        m
    }

    /// Square matrix with a single unit entry at `(i, j)`.
    pub fn elementary(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = F::one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                got: bad.len(),
            });
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Column vector.
    pub fn column(entries: Vec<F>) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries,
        }
    }

    /// Parse rows of scalar literals, e.g. `[["1", "0"], ["0", "i"]]`.
    pub fn parse<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|t| crate::expr::parse_scalar::<F>(t.as_ref()))
                    .collect::<Result<Vec<F>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(parsed)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&F) -> F) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn check_shape(&self, other: &Self) {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_shape(other);
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x.add_ref(y))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_shape(other);
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x.sub_ref(y))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(F::neg_ref)
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map(|x| c.mul_ref(x))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = &self[(i, k)];
                if x.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let y = &other[(k, j)];
                    if !y.is_zero() {
                        out[(i, j)] = out[(i, j)].add_ref(&x.mul_ref(y));
                    }
                }
            }
        }
        out
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        self.transpose().map(F::conj)
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc.add_ref(&self[(i, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Field::magnitude).fold(0.0, f64::max)
    }

    /// Equality, exact or within `tol` relative to the operands' size.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.rows != other.rows || self.cols != other.cols {
            return false;
        }
        if F::EXACT {
            return self == other;
        }
        let scale = 1f64.max(self.max_abs()).max(other.max_abs());
        self.data
            .iter()
            .zip(&other.data)
            .all(|(x, y)| x.sub_ref(y).is_negligible(tol, scale))
    }

    /// Row reduction with the largest-magnitude pivot. Returns the reduced
    /// matrix, the pivot columns and the determinant of the leading square
    /// block when the matrix is square.
    fn row_reduce(&self, augment: Option<&Self>, tol: f64) -> (Self, Option<Self>, Vec<usize>, F) {
        let mut a = self.clone();
        let mut b = augment.cloned();
        let mut det = F::one();
        let mut pivots = Vec::new();
        let scale = 1f64.max(self.max_abs());
        let mut row = 0;
        for col in 0..a.cols {
            if row == a.rows {
                break;
            }
            let candidate = (row..a.rows)
                .filter(|&r| !a[(r, col)].is_negligible(tol, scale))
                .max_by(|&r1, &r2| {
                    a[(r1, col)]
                        .magnitude()
                        .partial_cmp(&a[(r2, col)].magnitude())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
            let Some(p) = candidate else {
                det = F::zero();
                continue;
            };
            if p != row {
                a.swap_rows(p, row);
                if let Some(b) = b.as_mut() {
                    b.swap_rows(p, row);
                }
                det = det.neg_ref();
            }
            let pivot = a[(row, col)].clone();
            det = det.mul_ref(&pivot);
            let inv = pivot.inv().expect("nonzero pivot");
            a.scale_row(row, &inv);
            if let Some(b) = b.as_mut() {
                b.scale_row(row, &inv);
            }
            for r in 0..a.rows {
                if r != row {
                    let factor = a[(r, col)].clone();
                    if !factor.is_zero() {
                        a.add_row_multiple(r, row, &factor.neg_ref());
                        if let Some(b) = b.as_mut() {
                            b.add_row_multiple(r, row, &factor.neg_ref());
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if pivots.len() < a.cols.min(a.rows) || a.rows != a.cols {
            det = F::zero();
        }
        (a, b, pivots, det)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for j in 0..self.cols {
            self.data.swap(r1 * self.cols + j, r2 * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &F) {
        for j in 0..self.cols {
            self[(r, j)] = c.mul_ref(&self[(r, j)]);
        }
    }

    fn add_row_multiple(&mut self, target: usize, source: usize, c: &F) {
        for j in 0..self.cols {
            let add = c.mul_ref(&self[(source, j)]);
            if !add.is_zero() {
                self[(target, j)] = self[(target, j)].add_ref(&add);
            }
        }
    }

    /// Determinant (zero for non-square input).
    pub fn det(&self, tol: f64) -> F {
        if !self.is_square() {
            return F::zero();
        }
        self.row_reduce(None, tol).3
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.row_reduce(None, tol).2.len()
    }

    pub fn inverse(&self, tol: f64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Singular(format!("{}x{} is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        let (_, inv, pivots, _) = self.row_reduce(Some(&Self::identity(n)), tol);
        if pivots.len() < n {
            return Err(Error::Singular(format!("rank {} < {n}", pivots.len())));
        }
        Ok(inv.expect("augmented"))
    }

    /// Basis of the right null space `{v : self * v = 0}`.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<F>> {
        let (r, _, pivots, _) = self.row_reduce(None, tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![F::zero(); self.cols];
                v[fc] = F::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = r[(row, fc)].neg_ref();
                }
                v
            })
            .collect()
    }

    /// Matrix with entries drawn from the field's sample alphabet.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows * cols).map(|_| F::sample(rng)).collect(),
        }
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, n: i64, tol: f64) -> Result<Self> {
        let base = if n < 0 { self.inverse(tol)? } else { self.clone() };
        let mut acc = Self::identity(self.rows);
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.mul(&self.dagger()).approx_eq(&Self::identity(self.rows), tol)
    }

    /// Render as nested brackets with canonical scalar syntax.
    pub fn render(&self) -> String {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let entries: Vec<String> =
                    (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
                format!("[{}]", entries.join(", "))
            })
            .collect();
        format!("[{}]", rows.join(", "))
    }
}

impl<F: Field> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F: Field> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Field> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ComplexFloat, GaussianRational};

    type G = GaussianRational;

    fn g(re: i64, im: i64) -> G {
        G::from_ints(re, im)
    }

    #[test]
    fn inverse_and_det() {
        let m = Matrix::from_rows(vec![vec![g(1, 0), g(2, 0)], vec![g(3, 0), g(4, 0)]]).unwrap();
        assert_eq!(m.det(0.0), g(-2, 0));
        let inv = m.inverse(0.0).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = Matrix::from_rows(vec![vec![g(1, 1), g(2, 2)], vec![g(1, 0), g(2, 0)]]).unwrap();
        assert!(matches!(m.inverse(0.0), Err(Error::Singular(_))));
        assert_eq!(m.det(0.0), g(0, 0));
    }

    #[test]
    fn nullspace_spans_kernel() {
        let m = Matrix::from_rows(vec![vec![g(1, 0), g(1, 0), g(0, 1)]]).unwrap();
        let ns = m.nullspace(0.0);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.mul(&Matrix::column(v)).is_zero());
        }
    }

    #[test]
    fn float_unitary() {
        let u = Matrix::diagonal(&[ComplexFloat::phase(0.3), ComplexFloat::phase(-1.1)]);
        assert!(u.is_unitary(1e-12));
        let inv = u.inverse(1e-12).unwrap();
        assert!(inv.approx_eq(&u.dagger(), 1e-12));
    }

    #[test]
    fn dagger_conjugates() {
        let m = Matrix::from_rows(vec![vec![g(0, 1), g(2, 0)], vec![g(0, 0), g(1, -1)]]).unwrap();
        let d = m.dagger();
        assert_eq!(d[(0, 0)], g(0, -1));
        assert_eq!(d[(1, 0)], g(2, 0));
        assert_eq!(d.dagger(), m);
    }
}
