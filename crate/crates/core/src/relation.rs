//! Linear relations between the state spaces of two systems.
//!
//! A relation is a subspace of the product space `F^{n1} × F^{n2}`, stored
//! with the first system's coordinates on top. All relation algebra
//! (projections, inversion, graphs) reduces to subspace algebra on the
//! product.

use crate::field::Field;
use crate::matrix::Matrix;
use crate::subspace::Subspace;

/// A linear relation `R ⊆ F^{n1} × F^{n2}`, canonically represented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation<F> {
    n1: usize,
    n2: usize,
    space: Subspace<F>,
}

impl<F: Field> Relation<F> {
    /// Wraps a subspace of the product space. Panics if the ambient
    /// dimension does not split as `n1 + n2`.
    pub fn from_subspace(n1: usize, n2: usize, space: Subspace<F>) -> Self {
        assert_eq!(
            space.ambient(),
            n1 + n2,
            "relation subspace must live in the product space"
        );
        Relation { n1, n2, space }
    }

    /// The full relation `F^{n1} × F^{n2}`.
    pub fn full(n1: usize, n2: usize) -> Self {
        Relation {
            n1,
            n2,
            space: Subspace::full(n1 + n2),
        }
    }

    /// The graph `{(x, M x)}` of a linear map `M : F^{n1} → F^{n2}`.
    pub fn graph(m: &Matrix<F>) -> Self {
        let cols = Matrix::identity(m.cols()).vstack(m);
        Relation {
            n1: m.cols(),
            n2: m.rows(),
            space: Subspace::from_columns(&cols),
        }
    }

    /// The diagonal relation on a subspace: `{(v, v) : v ∈ s}`.
    pub fn diagonal(s: &Subspace<F>) -> Self {
        let cols = s.basis().vstack(s.basis());
        Relation {
            n1: s.ambient(),
            n2: s.ambient(),
            space: Subspace::from_columns(&cols),
        }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn space(&self) -> &Subspace<F> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Projection onto the first factor.
    pub fn proj1(&self) -> Subspace<F> {
        Subspace::from_columns(&self.space.basis().submatrix(0..self.n1, 0..self.dim()))
    }

    /// Projection onto the second factor.
    pub fn proj2(&self) -> Subspace<F> {
        Subspace::from_columns(
            &self
                .space
                .basis()
                .submatrix(self.n1..self.n1 + self.n2, 0..self.dim()),
        )
    }

    /// The converse relation, swapping the two factors.
    pub fn inverse(&self) -> Relation<F> {
        let top = self.space.basis().submatrix(0..self.n1, 0..self.dim());
        let bot = self
            .space
            .basis()
            .submatrix(self.n1..self.n1 + self.n2, 0..self.dim());
        Relation {
            n1: self.n2,
            n2: self.n1,
            space: Subspace::from_columns(&bot.vstack(&top)),
        }
    }

    /// Sum of two relations between the same pair of spaces.
    pub fn sum(&self, other: &Relation<F>) -> Relation<F> {
        assert_eq!((self.n1, self.n2), (other.n1, other.n2));
        Relation {
            n1: self.n1,
            n2: self.n2,
            space: self.space.sum(&other.space),
        }
    }
}
