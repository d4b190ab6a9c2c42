//! Dense matrices over an exact field, with the elimination routines every
//! geometric algorithm in this crate is built on.
//!
//! Dimension mismatches are programmer errors and panic; fallible outcomes
//! that depend on the data (no solution, singular matrix, rank deficiency)
//! are reported through return types.

use crate::field::Field;
use std::fmt::{self, Display};
use std::ops::Range;
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Reduced row echelon form of a matrix together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    pub matrix: Matrix<F>,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PseudoInverseError {
    #[error("matrix does not have full row rank")]
    NotFullRowRank,
    #[error("Gram matrix is singular over this field")]
    GramSingular,
}

impl<F: Field> Matrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must match dimensions");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![F::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = F::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let nrows = rows.len();
        Matrix::new(nrows, cols, rows.into_iter().flatten().collect())
    }

    /// Test and fixture convenience: build from integer literals.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| F::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &F {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut F {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let want = if r == c { F::one() } else { F::zero() };
                    *self.at(r, c) == want
                })
            })
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| self.at(r, c).add(rhs.at(r, c)))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| self.at(r, c).sub(rhs.at(r, c)))
    }

    pub fn neg(&self) -> Self {
        self.map(|v| v.neg())
    }

    pub fn scale(&self, k: &F) -> Self {
        self.map(|v| v.mul(k))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        Matrix::from_fn(self.rows, rhs.cols, |r, c| {
            let mut acc = F::zero();
            for k in 0..self.cols {
                acc = acc.add(&self.at(r, k).mul(rhs.at(k, c)));
            }
            acc
        })
    }

    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "row counts must agree");
        Matrix::from_fn(self.rows, self.cols + rhs.cols, |r, c| {
            if c < self.cols {
                self.at(r, c).clone()
            } else {
                rhs.at(r, c - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols, "column counts must agree");
        Matrix::from_fn(self.rows + rhs.rows, self.cols, |r, c| {
            if r < self.rows {
                self.at(r, c).clone()
            } else {
                rhs.at(r - self.rows, c).clone()
            }
        })
    }

    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        assert!(rows.end <= self.rows && cols.end <= self.cols);
        Matrix::from_fn(rows.len(), cols.len(), |r, c| {
            self.at(rows.start + r, cols.start + c).clone()
        })
    }

    pub fn column(&self, c: usize) -> Self {
        self.submatrix(0..self.rows, c..c + 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, k: &F) {
        for c in 0..self.cols {
            let v = self.at(r, c).mul(k);
            *self.at_mut(r, c) = v;
        }
    }

    /// row_i -= k * row_src
    fn row_sub_scaled(&mut self, i: usize, src: usize, k: &F) {
        for c in 0..self.cols {
            let v = self.at(i, c).sub(&self.at(src, c).mul(k));
            *self.at_mut(i, c) = v;
        }
    }

    /// Gauss-Jordan elimination restricted to the first `pivot_limit`
    /// columns. Columns past the limit are carried along (augmented part).
    fn echelonize(mut self, pivot_limit: usize) -> Echelon<F> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_limit {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self.at(r, c).inv();
            self.scale_row(r, &inv);
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let k = self.at(i, c).clone();
                    self.row_sub_scaled(i, r, &k);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon {
            matrix: self,
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rref(&self) -> Echelon<F> {
        self.clone().echelonize(self.cols)
    }

    /// Returns the echelon form together with an invertible `U` such that
    /// `U * self == echelon.matrix`.
    pub fn rref_with_transform(&self) -> (Echelon<F>, Matrix<F>) {
        let aug = self.hstack(&Matrix::identity(self.rows));
        let ech = aug.echelonize(self.cols);
        let u = ech
            .matrix
            .submatrix(0..self.rows, self.cols..self.cols + self.rows);
        let reduced = ech.matrix.submatrix(0..self.rows, 0..self.cols);
        (
            Echelon {
                matrix: reduced,
                pivots: ech.pivots,
                rank: ech.rank,
            },
            u,
        )
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the null space, one column per free variable. The returned
    /// matrix has `cols() == nullity`; it is empty for injective maps.
    pub fn kernel(&self) -> Matrix<F> {
        let ech = self.rref();
        let pivot_set: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &ech.pivots {
                v[p] = true;
            }
            v
        };
        let free: Vec<usize> = (0..self.cols).filter(|&c| !pivot_set[c]).collect();
        let mut out = Matrix::zeros(self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            *out.at_mut(fc, j) = F::one();
            for (i, &pc) in ech.pivots.iter().enumerate() {
                *out.at_mut(pc, j) = ech.matrix.at(i, fc).neg();
            }
        }
        out
    }

    /// Particular solution of `self * X = rhs` with all free variables set to
    /// zero, or `None` when any right-hand column is inconsistent.
    pub fn solve(&self, rhs: &Matrix<F>) -> Option<Matrix<F>> {
        assert_eq!(self.rows, rhs.rows, "row counts must agree");
        let ech = self.hstack(rhs).echelonize(self.cols);
        // A nonzero entry below the pivot rows in the augmented part means
        // that column has no solution.
        for r in ech.rank..self.rows {
            for c in 0..rhs.cols {
                if !ech.matrix.at(r, self.cols + c).is_zero() {
                    return None;
                }
            }
        }
        let mut x = Matrix::zeros(self.cols, rhs.cols);
        for (i, &p) in ech.pivots.iter().enumerate() {
            for c in 0..rhs.cols {
                *x.at_mut(p, c) = ech.matrix.at(i, self.cols + c).clone();
            }
        }
        Some(x)
    }

    pub fn determinant(&self) -> F {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.at(i, c).is_zero()) else {
                return F::zero();
            };
            if p != c {
                m.swap_rows(c, p);
                det = det.neg();
            }
            det = det.mul(m.at(c, c));
            let inv = m.at(c, c).inv();
            for i in c + 1..n {
                if !m.at(i, c).is_zero() {
                    let k = m.at(i, c).mul(&inv);
                    m.row_sub_scaled(i, c, &k);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        if self.rows != self.cols {
            return None;
        }
        let (ech, u) = self.rref_with_transform();
        if ech.rank < self.rows {
            return None;
        }
        Some(u)
    }

    /// Moore-Penrose right inverse `self^T (self self^T)^{-1}` for matrices
    /// of full row rank. Over the rationals the Gram matrix of a full-row-rank
    /// matrix is always invertible; over a prime field it can be singular.
    pub fn right_pseudo_inverse(&self) -> Result<Matrix<F>, PseudoInverseError> {
        if self.rank() < self.rows {
            return Err(PseudoInverseError::NotFullRowRank);
        }
        let t = self.transpose();
        let gram = self.mul(&t);
        let gram_inv = gram.inverse().ok_or(PseudoInverseError::GramSingular)?;
        Ok(t.mul(&gram_inv))
    }
}

impl<F: Field> Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "[{}x{}]", self.rows, self.cols);
        }
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
