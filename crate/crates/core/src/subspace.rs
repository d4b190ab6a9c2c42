//! Subspaces in canonical form and the lattice operations on them.
//!
//! A subspace is stored by a canonical basis: the reduced row echelon form of
//! the transposed spanning set, transposed back, zero rows dropped. Two values
//! compare equal exactly when they describe the same subspace, which lets the
//! fixed-point loops detect convergence with `==` and makes emitted
//! certificates reproducible byte for byte.

use crate::field::Field;
use crate::matrix::Matrix;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    /// Canonicalizes the column span of `m`.
    pub fn from_columns(m: &Matrix<F>) -> Self {
        let ech = m.transpose().rref();
        let row_basis = ech.matrix.submatrix(0..ech.rank, 0..m.rows());
        Subspace {
            ambient: m.rows(),
            basis: row_basis.transpose(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(ambient, 0),
        }
    }

    /// Null space of `m`, as a subspace of the domain.
    pub fn kernel_of(m: &Matrix<F>) -> Self {
        Subspace::from_columns(&m.kernel())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn is_zero_space(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions must agree");
        Subspace::from_columns(&self.basis.hstack(&other.basis))
    }

    /// Intersection via the null space of `[U | -V]`: a kernel vector `(a; b)`
    /// has `U a = V b`, so the `U a` span the common subspace.
    pub fn intersect(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions must agree");
        let stacked = self.basis.hstack(&other.basis.neg());
        let kern = stacked.kernel();
        let top = kern.submatrix(0..self.dim(), 0..kern.cols());
        Subspace::from_columns(&self.basis.mul(&top))
    }

    /// Image `{ m x : x in v }`, a subspace of the codomain of `m`.
    pub fn image_of(m: &Matrix<F>, v: &Self) -> Self {
        assert_eq!(m.cols(), v.ambient, "map domain must match ambient space");
        Subspace::from_columns(&m.mul(&v.basis))
    }

    /// Preimage `{ x : m x in w }`, a subspace of the domain of `m`. Computed
    /// from the null space of `[m | -W]`: the x-components of kernel vectors
    /// `(x; c)` with `m x = W c` span the preimage.
    pub fn preimage(m: &Matrix<F>, w: &Self) -> Self {
        assert_eq!(m.rows(), w.ambient, "map codomain must match ambient space");
        let stacked = m.hstack(&w.basis.neg());
        let kern = stacked.kernel();
        let top = kern.submatrix(0..m.cols(), 0..kern.cols());
        Subspace::from_columns(&top)
    }

    pub fn contains(&self, other: &Self) -> bool {
        assert_eq!(self.ambient, other.ambient, "ambient dimensions must agree");
        self.basis.hstack(&other.basis).rank() == self.dim()
    }

    pub fn contains_vector(&self, v: &Matrix<F>) -> bool {
        assert_eq!(v.rows(), self.ambient);
        assert_eq!(v.cols(), 1);
        self.basis.hstack(v).rank() == self.dim()
    }

    /// Block-diagonal embedding into the product space: pairs every vector of
    /// `left` with zero and every vector of `right` with zero, in that order.
    pub fn product_embed(left: &Self, right: &Self) -> Self {
        let top = left.basis.hstack(&Matrix::zeros(left.ambient, right.dim()));
        let bottom = Matrix::zeros(right.ambient, left.dim()).hstack(&right.basis);
        Subspace::from_columns(&top.vstack(&bottom))
    }

    /// Columns extending this subspace's basis to a basis of the ambient
    /// space, drawn from the standard basis.
    pub fn completion(&self) -> Matrix<F> {
        let probe = self.basis.hstack(&Matrix::identity(self.ambient));
        let ech = probe.rref();
        let extra: Vec<usize> = ech
            .pivots
            .iter()
            .filter(|&&p| p >= self.dim())
            .map(|&p| p - self.dim())
            .collect();
        let mut out = Matrix::zeros(self.ambient, extra.len());
        for (j, &e) in extra.iter().enumerate() {
            *out.at_mut(e, j) = F::one();
        }
        out
    }
}
