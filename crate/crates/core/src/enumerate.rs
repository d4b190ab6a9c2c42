//! Exhaustive subspace enumeration over small prime fields.
//!
//! The geometric fixed-point routines are subtle enough to deserve an
//! independent referee. Over a finite field the full subspace lattice of a
//! low-dimensional ambient space can be written out explicitly, and the
//! maximal subspace satisfying a predicate found by brute force: collect
//! every satisfying subspace and sum them. That oracle shares no code with
//! the fixed-point iteration, so agreement between the two is meaningful
//! evidence.

use crate::field::{Field, Gf};
use crate::matrix::Matrix;
use crate::subspace::Subspace;
use thiserror::Error;

/// A field with finitely many, enumerable elements.
pub trait FiniteField: Field {
    /// Every element of the field, each exactly once.
    fn all() -> Vec<Self>;
}

impl<const P: u64> FiniteField for Gf<P> {
    fn all() -> Vec<Self> {
        (0..P as i64).map(Gf::new).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError<F: Field> {
    /// Two subspaces satisfy the predicate but their sum does not, so "the
    /// maximal satisfying subspace" is not a well-posed request.
    #[error("predicate holds on two subspaces but not on their sum: {first:?} + {second:?}")]
    PredicateNotSumClosed {
        first: Subspace<F>,
        second: Subspace<F>,
    },
}

/// Every subspace of `F^ambient`, enumerated once each via reduced
/// row-echelon patterns. Restricted to `ambient ≤ 4`, which keeps the
/// lattice small (67 subspaces for `GF(2)⁴`, 212 for `GF(3)⁴`) while still
/// covering the interesting interaction cases.
pub struct EnumeratedLattice<F> {
    ambient: usize,
    subspaces: Vec<Subspace<F>>,
}

impl<F: FiniteField> EnumeratedLattice<F> {
    pub fn new(ambient: usize) -> Self {
        assert!(
            ambient <= 4,
            "exhaustive lattices are limited to ambient dimension 4"
        );
        let mut subspaces = Vec::new();
        for mask in 0u32..1 << ambient {
            let pivots: Vec<usize> = (0..ambient).filter(|c| mask >> c & 1 == 1).collect();
            enumerate_echelon_forms(ambient, &pivots, &mut subspaces);
        }
        EnumeratedLattice { ambient, subspaces }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn subspaces(&self) -> &[Subspace<F>] {
        &self.subspaces
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }
}

/// Appends every subspace whose reduced row-echelon basis has exactly the
/// given pivot columns: free entries live strictly right of their row's
/// pivot, outside all pivot columns, and range over the whole field.
fn enumerate_echelon_forms<F: FiniteField>(
    ambient: usize,
    pivots: &[usize],
    out: &mut Vec<Subspace<F>>,
) {
    let free: Vec<(usize, usize)> = pivots
        .iter()
        .enumerate()
        .flat_map(|(row, &p)| {
            (p + 1..ambient)
                .filter(|c| !pivots.contains(c))
                .map(move |c| (row, c))
        })
        .collect();
    let values = F::all();
    let mut digits = vec![0usize; free.len()];
    loop {
        let mut basis = Matrix::zeros(ambient, pivots.len());
        for (row, &p) in pivots.iter().enumerate() {
            *basis.at_mut(p, row) = F::one();
        }
        for (slot, &(row, col)) in free.iter().enumerate() {
            *basis.at_mut(col, row) = values[digits[slot]].clone();
        }
        out.push(Subspace::from_columns(&basis));
        let mut pos = 0;
        while pos < digits.len() {
            digits[pos] += 1;
            if digits[pos] < values.len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
        if pos == digits.len() {
            return;
        }
    }
}

/// The maximal subspace satisfying `predicate`, found without any fixed
/// point: sum every satisfying member of the lattice. `None` when nothing
/// satisfies the predicate; an error (with a concrete witness pair) when
/// the satisfying family is not closed under sums, in which case no
/// maximum exists.
pub fn oracle_max_subspace<F: FiniteField>(
    lattice: &EnumeratedLattice<F>,
    predicate: impl Fn(&Subspace<F>) -> bool,
) -> Result<Option<Subspace<F>>, OracleError<F>> {
    let satisfying: Vec<&Subspace<F>> = lattice
        .subspaces()
        .iter()
        .filter(|s| predicate(s))
        .collect();
    let Some(first) = satisfying.first() else {
        return Ok(None);
    };
    let total = satisfying[1..]
        .iter()
        .fold((*first).clone(), |acc, s| acc.sum(s));
    if predicate(&total) {
        return Ok(Some(total));
    }
    for (i, u) in satisfying.iter().enumerate() {
        for w in &satisfying[i + 1..] {
            if !predicate(&u.sum(w)) {
                return Err(OracleError::PredicateNotSumClosed {
                    first: (*u).clone(),
                    second: (*w).clone(),
                });
            }
        }
    }
    unreachable!(
        "a satisfying family closed under pairwise sums contains the sum of all its members"
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometric::consistent_subset;
    use crate::sampling;

    type F2 = Gf<2>;
    type F3 = Gf<3>;

    #[test]
    fn gf2_lattice_has_the_gaussian_binomial_counts() {
        let lattice: EnumeratedLattice<F2> = EnumeratedLattice::new(4);
        let mut by_dim = [0usize; 5];
        for s in lattice.subspaces() {
            by_dim[s.dim()] += 1;
        }
        assert_eq!(by_dim, [1, 15, 35, 15, 1]);
        assert_eq!(lattice.len(), 67);
    }

    #[test]
    fn gf3_lattice_is_complete_and_duplicate_free() {
        let lattice: EnumeratedLattice<F3> = EnumeratedLattice::new(4);
        assert_eq!(lattice.len(), 212);
        let subs = lattice.subspaces();
        for i in 0..subs.len() {
            for j in i + 1..subs.len() {
                assert_ne!(subs[i], subs[j], "duplicate at {i}, {j}");
            }
        }
    }

    #[test]
    fn small_ambient_lattices() {
        let lattice: EnumeratedLattice<F2> = EnumeratedLattice::new(0);
        assert_eq!(lattice.len(), 1);
        assert!(lattice.subspaces()[0].is_full());
        let lattice: EnumeratedLattice<F2> = EnumeratedLattice::new(2);
        assert_eq!(lattice.len(), 5); // zero, three lines, the plane
    }

    #[test]
    fn maximal_subspace_inside_a_kernel_is_the_kernel() {
        let lattice: EnumeratedLattice<F3> = EnumeratedLattice::new(3);
        let c = Matrix::<F3>::from_int_rows(&[&[1, 2, 0]]);
        let kernel = Subspace::kernel_of(&c);
        let max = oracle_max_subspace(&lattice, |s| kernel.contains(s))
            .unwrap()
            .unwrap();
        assert_eq!(max, kernel);
    }

    #[test]
    fn dimension_caps_are_not_sum_closed() {
        let lattice: EnumeratedLattice<F2> = EnumeratedLattice::new(2);
        let err = oracle_max_subspace(&lattice, |s| s.dim() <= 1).unwrap_err();
        let OracleError::PredicateNotSumClosed { first, second } = err;
        assert_eq!(first.dim(), 1);
        assert_eq!(second.dim(), 1);
        assert_ne!(first, second);
    }

    #[test]
    fn unsatisfiable_predicates_yield_none() {
        let lattice: EnumeratedLattice<F2> = EnumeratedLattice::new(2);
        assert_eq!(oracle_max_subspace(&lattice, |_| false).unwrap(), None);
    }

    #[test]
    fn oracle_agrees_with_the_fixed_point_on_random_prime_field_systems() {
        let mut rng = sampling::rng(97);
        for case in 0..40 {
            let n = 1 + case % 4;
            let sys = sampling::gf_system::<5>(&mut rng, n, n, 1, 1, 1);
            let result = consistent_subset(&sys);
            let lattice: EnumeratedLattice<Gf<5>> = EnumeratedLattice::new(n);
            let im_g = Subspace::from_columns(&sys.g);
            let reachable = |w: &Subspace<Gf<5>>| Subspace::image_of(&sys.e, w).sum(&im_g);
            let plain = oracle_max_subspace(&lattice, |w| {
                reachable(w).contains(&Subspace::image_of(&sys.a, w))
            })
            .unwrap()
            .expect("the undisturbed variant always admits the zero subspace");
            assert_eq!(plain, result.v0_star, "case {case}");
            let with_inputs = oracle_max_subspace(&lattice, |w| {
                let r = reachable(w);
                r.contains(&Subspace::image_of(&sys.a, w))
                    && r.contains(&Subspace::from_columns(&sys.b))
            })
            .unwrap();
            assert_eq!(with_inputs, result.v_star, "case {case}");
        }
    }
}
