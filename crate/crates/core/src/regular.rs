//! Regular matrix pencils: regularity tests, exact transfer-matrix
//! comparison, and reconstruction of a relation from transfer equality.
//!
//! A square pencil `sE − A` is regular when its determinant polynomial is
//! not identically zero. Regularity is decided twice on every call — once
//! through the determinant polynomial (interpolated exactly from point
//! evaluations) and once geometrically (the undisturbed consistent space
//! must meet `ker E` trivially) — and the two answers are asserted equal.
//! Everything here works over exact rationals; transfer matrices are never
//! formed symbolically but compared at enough exact sample points to pin
//! the rational functions down completely.

use crate::bisim::{product_matrices, BisimError};
use crate::field::{Field, Rat};
use crate::geometric::consistent_subset;
use crate::matrix::Matrix;
use crate::model::DaeSystem;
use crate::relation::Relation;
use crate::subspace::Subspace;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RegularError {
    #[error("pencil must be square: {q} equations over {n} states")]
    NotSquare { q: usize, n: usize },
    #[error("operation requires a disturbance-free system")]
    HasDisturbances,
    #[error("system {0:?} is not regular")]
    NotRegular(String),
    #[error("system {0:?} does not have an invertible E")]
    NotInvertible(String),
    #[error("transfer matrices differ; no relation can be reconstructed")]
    TransferMismatch,
    #[error(transparent)]
    Interface(#[from] BisimError),
}

/// Outcome of the double regularity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PencilReport {
    pub is_square: bool,
    /// `det(sE − A)` is not the zero polynomial (exact coefficients).
    pub det_poly_nonzero: bool,
    /// The undisturbed consistent space meets `ker E` only in zero.
    pub geometric_regular: bool,
    pub regular: bool,
}

/// `p(x) · (x − root)`, coefficients low degree first.
fn poly_mul_linear(p: &[Rat], root: &Rat) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] = out[i + 1].add(c);
        out[i] = out[i].sub(&c.mul(root));
    }
    out
}

fn poly_eval(p: &[Rat], x: &Rat) -> Rat {
    p.iter().rev().fold(Rat::zero(), |acc, c| acc.mul(x).add(c))
}

/// Interpolating polynomial through the given points, low degree first.
fn lagrange(points: &[(Rat, Rat)]) -> Vec<Rat> {
    let mut coeffs = vec![Rat::zero(); points.len()];
    for (k, (xk, yk)) in points.iter().enumerate() {
        let mut basis = vec![Rat::one()];
        let mut denom = Rat::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if j != k {
                basis = poly_mul_linear(&basis, xj);
                denom = denom.mul(&xk.sub(xj));
            }
        }
        let scale = yk.mul(&denom.inv());
        for (c, b) in coeffs.iter_mut().zip(basis.iter()) {
            *c = c.add(&b.mul(&scale));
        }
    }
    coeffs
}

fn pencil_at(e: &Matrix<Rat>, a: &Matrix<Rat>, s: &Rat) -> Matrix<Rat> {
    e.scale(s).sub(a)
}

/// Exact coefficients of `det(sE − A)`, low degree first, reconstructed by
/// interpolation from `n + 1` point evaluations (the degree is at most `n`).
pub fn pencil_polynomial(e: &Matrix<Rat>, a: &Matrix<Rat>) -> Vec<Rat> {
    assert_eq!(
        e.rows(),
        e.cols(),
        "pencil polynomial needs a square pencil"
    );
    let n = e.rows();
    let points: Vec<(Rat, Rat)> = (0..=n as i64)
        .map(|k| {
            let s = Rat::from_int(k);
            let value = pencil_at(e, a, &s).determinant();
            (s, value)
        })
        .collect();
    let coeffs = lagrange(&points);
    debug_assert!(
        points.iter().all(|(x, y)| poly_eval(&coeffs, x) == *y),
        "interpolated determinant polynomial must reproduce its samples"
    );
    coeffs
}

/// Decides regularity of the pencil `sE − A` by both available routes and
/// checks their agreement.
pub fn is_regular(sys: &DaeSystem<Rat>) -> Result<PencilReport, RegularError> {
    if sys.s() > 0 {
        return Err(RegularError::HasDisturbances);
    }
    if sys.q() != sys.n() {
        return Err(RegularError::NotSquare {
            q: sys.q(),
            n: sys.n(),
        });
    }
    let poly = pencil_polynomial(&sys.e, &sys.a);
    let det_poly_nonzero = poly.iter().any(|c| !c.is_zero());
    let v0 = consistent_subset(sys).v0_star;
    let geometric_regular = v0.intersect(&Subspace::kernel_of(&sys.e)).is_zero_space();
    assert_eq!(
        det_poly_nonzero, geometric_regular,
        "the two regularity characterizations disagree"
    );
    Ok(PencilReport {
        is_square: true,
        det_poly_nonzero,
        geometric_regular,
        regular: det_poly_nonzero,
    })
}

/// One concrete disagreement between two transfer matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferWitness {
    pub s: Rat,
    pub row: usize,
    pub col: usize,
    pub left: Rat,
    pub right: Rat,
}

/// Result of an exact multi-point transfer comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferComparison {
    /// The evaluation points actually used: the first `2(n₁+n₂)+1` positive
    /// integers at which both pencils are invertible.
    pub sample_points: Vec<Rat>,
    pub equal: bool,
    pub witness: Option<TransferWitness>,
}

fn transfer_at(sys: &DaeSystem<Rat>, s: &Rat) -> Option<Matrix<Rat>> {
    let inv = pencil_at(&sys.e, &sys.a, s).inverse()?;
    Some(sys.c.mul(&inv).mul(&sys.b))
}

/// Compares `C₁(sE₁−A₁)⁻¹B₁` with `C₂(sE₂−A₂)⁻¹B₂` at enough exact points
/// to determine equality of the underlying rational matrices: after
/// clearing denominators, every entry difference is a polynomial of degree
/// below the sample count, so vanishing at all samples means vanishing
/// identically.
pub fn transfer_equal(
    sys1: &DaeSystem<Rat>,
    sys2: &DaeSystem<Rat>,
) -> Result<TransferComparison, RegularError> {
    transfer_equal_with_samples(sys1, sys2, 2 * (sys1.n() + sys2.n()) + 1)
}

/// [`transfer_equal`] with an explicit sample count, for callers that want
/// more points than the decisive minimum (fewer weakens the guarantee).
pub fn transfer_equal_with_samples(
    sys1: &DaeSystem<Rat>,
    sys2: &DaeSystem<Rat>,
    needed: usize,
) -> Result<TransferComparison, RegularError> {
    for sys in [sys1, sys2] {
        if !is_regular(sys)?.regular {
            return Err(RegularError::NotRegular(sys.name.clone()));
        }
    }
    product_matrices(sys1, sys2)?;
    let mut sample_points = Vec::with_capacity(needed);
    let mut witness = None;
    let mut candidate = 1i64;
    while sample_points.len() < needed {
        let s = Rat::from_int(candidate);
        candidate += 1;
        let (Some(left), Some(right)) = (transfer_at(sys1, &s), transfer_at(sys2, &s)) else {
            continue; // a generalized eigenvalue of one of the pencils
        };
        if witness.is_none() {
            'scan: for row in 0..left.rows() {
                for col in 0..left.cols() {
                    if left.at(row, col) != right.at(row, col) {
                        witness = Some(TransferWitness {
                            s: s.clone(),
                            row,
                            col,
                            left: left.at(row, col).clone(),
                            right: right.at(row, col).clone(),
                        });
                        break 'scan;
                    }
                }
            }
        }
        sample_points.push(s);
    }
    Ok(TransferComparison {
        sample_points,
        equal: witness.is_none(),
        witness,
    })
}

/// Reconstructs a bisimulation relation from transfer equality when both
/// `E` are invertible: the relation is spanned by the paired reachability
/// directions `((E₁⁻¹A₁)^k E₁⁻¹B₁, (E₂⁻¹A₂)^k E₂⁻¹B₂)`. Powers beyond
/// `n₁+n₂−1` add nothing, since the product of the two characteristic
/// polynomials annihilates both pairing maps with shared coefficients.
pub fn relation_from_transfer(
    sys1: &DaeSystem<Rat>,
    sys2: &DaeSystem<Rat>,
) -> Result<Relation<Rat>, RegularError> {
    let mut inverses = Vec::new();
    for sys in [sys1, sys2] {
        if sys.s() > 0 {
            return Err(RegularError::HasDisturbances);
        }
        let inv = (sys.e.rows() == sys.e.cols())
            .then(|| sys.e.inverse())
            .flatten()
            .ok_or_else(|| RegularError::NotInvertible(sys.name.clone()))?;
        inverses.push(inv);
    }
    if !transfer_equal(sys1, sys2)?.equal {
        return Err(RegularError::TransferMismatch);
    }
    let map1 = inverses[0].mul(&sys1.a);
    let map2 = inverses[1].mul(&sys2.a);
    let mut block1 = inverses[0].mul(&sys1.b);
    let mut block2 = inverses[1].mul(&sys2.b);
    let mut columns = Matrix::zeros(sys1.n() + sys2.n(), 0);
    for _ in 0..sys1.n() + sys2.n() {
        columns = columns.hstack(&block1.vstack(&block2));
        block1 = map1.mul(&block1);
        block2 = map2.mul(&block2);
    }
    Ok(Relation::from_subspace(
        sys1.n(),
        sys2.n(),
        Subspace::from_columns(&columns),
    ))
}

/// The certificate conditions in the simplified form they take for regular
/// disturbance-free pairs: `A×R ⊆ E×R`, `im [B₁;B₂] ⊆ E×R`, and
/// `R ⊆ ker C×`. With both pencils regular there is no disturbance freedom
/// to match, so these three inclusions are the whole certificate; the
/// general checker must agree with them.
pub fn disturbance_free_conditions(
    r: &Relation<Rat>,
    sys1: &DaeSystem<Rat>,
    sys2: &DaeSystem<Rat>,
) -> Result<(bool, bool, bool), RegularError> {
    for sys in [sys1, sys2] {
        if !is_regular(sys)?.regular {
            return Err(RegularError::NotRegular(sys.name.clone()));
        }
    }
    let mats = product_matrices(sys1, sys2)?;
    let flow = Subspace::image_of(&mats.e_cross, r.space());
    let invariant = flow.contains(&Subspace::image_of(&mats.a_cross, r.space()));
    let absorbs = flow.contains(&Subspace::from_columns(&mats.b_cross));
    let silent = mats.c_cross.mul(r.space().basis()).is_zero();
    Ok((invariant, absorbs, silent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::is_bisimulation;
    use crate::model::tests_support::sys;
    use crate::sampling;

    type M = Matrix<Rat>;

    fn integrator() -> DaeSystem<Rat> {
        sys(&[&[1]], &[&[0]], &[&[1]], &[], &[&[1]])
    }

    fn unit_gain() -> DaeSystem<Rat> {
        sys(&[&[0]], &[&[-1]], &[&[1]], &[], &[&[1]])
    }

    /// Two regular single-output systems, one with the input on the
    /// differential row, one on the algebraic row; transfer-equivalent but
    /// with empty consistent subsets.
    fn twin_pair() -> (DaeSystem<Rat>, DaeSystem<Rat>) {
        let s1 = sys(
            &[&[1, 0], &[0, 0]],
            &[&[1, 0], &[0, 1]],
            &[&[0], &[1]],
            &[],
            &[&[1, 1]],
        );
        let s2 = sys(
            &[&[0, 0], &[0, 1]],
            &[&[1, 0], &[0, 1]],
            &[&[1], &[0]],
            &[],
            &[&[1, 1]],
        );
        (s1, s2)
    }

    #[test]
    fn identity_descriptor_is_always_regular() {
        let mut rng = sampling::rng(73);
        for _ in 0..10 {
            let s = sampling::explicit_system(&mut rng, 3, 1, 0, 1, 3);
            let report = is_regular(&s).unwrap();
            assert!(report.regular);
            assert!(report.det_poly_nonzero && report.geometric_regular);
        }
    }

    #[test]
    fn twin_pair_is_regular_with_constant_transfer() {
        let (s1, s2) = twin_pair();
        assert!(is_regular(&s1).unwrap().regular);
        assert!(is_regular(&s2).unwrap().regular);
        let cmp = transfer_equal(&s1, &s2).unwrap();
        assert!(cmp.equal);
        assert_eq!(cmp.sample_points.len(), 9);
        // both transfers are identically −1
        for s in &cmp.sample_points {
            let g = transfer_at(&s1, s).unwrap();
            assert_eq!(g, M::from_int_rows(&[&[-1]]));
        }
    }

    #[test]
    fn degenerate_pencil_fails_both_tests() {
        let s = sys(&[&[0]], &[&[0]], &[], &[], &[]);
        let report = is_regular(&s).unwrap();
        assert!(!report.regular);
        assert!(!report.det_poly_nonzero);
        assert!(!report.geometric_regular);
    }

    #[test]
    fn determinant_polynomial_is_reconstructed_exactly() {
        let (s1, _) = twin_pair();
        // det(s·diag(1,0) − I) = −(s − 1) = 1 − s
        assert_eq!(
            pencil_polynomial(&s1.e, &s1.a),
            vec![Rat::from_int(1), Rat::from_int(-1), Rat::from_int(0)]
        );
        let e = M::identity(2);
        let a = M::from_int_rows(&[&[0, 1], &[-1, 0]]);
        // det(sI − A) = s² + 1
        assert_eq!(
            pencil_polynomial(&e, &a),
            vec![Rat::from_int(1), Rat::from_int(0), Rat::from_int(1)]
        );
    }

    #[test]
    fn integrator_and_gain_differ_past_the_first_sample() {
        let cmp = transfer_equal(&integrator(), &unit_gain()).unwrap();
        assert!(!cmp.equal);
        let w = cmp.witness.unwrap();
        // both transfers equal 1 at s = 1; the difference only shows at s = 2
        assert_eq!(w.s, Rat::from_int(2));
        assert_eq!(w.left, Rat::new(1.into(), 2.into()));
        assert_eq!(w.right, Rat::from_int(1));
    }

    #[test]
    fn sample_schedule_skips_generalized_eigenvalues() {
        let s = sys(
            &[&[1, 0], &[0, 1]],
            &[&[1, 0], &[0, 2]],
            &[&[1], &[1]],
            &[],
            &[&[1, 1]],
        );
        let cmp = transfer_equal(&s, &s).unwrap();
        assert!(cmp.equal);
        assert_eq!(cmp.sample_points.len(), 9);
        assert!(!cmp.sample_points.contains(&Rat::from_int(1)));
        assert!(!cmp.sample_points.contains(&Rat::from_int(2)));
    }

    #[test]
    fn shape_and_disturbance_preconditions_are_enforced() {
        let wide = sys(&[&[1, 0]], &[&[0, 1]], &[&[1]], &[], &[&[1, 0]]);
        assert_eq!(
            is_regular(&wide).unwrap_err(),
            RegularError::NotSquare { q: 1, n: 2 }
        );
        let disturbed = sys(&[&[1]], &[&[0]], &[&[1]], &[&[1]], &[&[1]]);
        assert_eq!(
            is_regular(&disturbed).unwrap_err(),
            RegularError::HasDisturbances
        );
        let (s1, s2) = twin_pair();
        assert!(matches!(
            relation_from_transfer(&s1, &s2).unwrap_err(),
            RegularError::NotInvertible(_)
        ));
    }

    #[test]
    fn similarity_transforms_share_their_transfer_and_a_relation() {
        let mut rng = sampling::rng(79);
        for case in 0..10 {
            let n = 1 + case % 3;
            let s1 = DaeSystem::new(
                "orig",
                sampling::invertible(&mut rng, n, 2),
                sampling::int_matrix(&mut rng, n, n, 2),
                sampling::int_matrix(&mut rng, n, 1, 2),
                M::zeros(n, 0),
                sampling::int_matrix(&mut rng, 1, n, 2),
            )
            .unwrap();
            let p = sampling::invertible(&mut rng, n, 2);
            let p_inv = p.inverse().unwrap();
            let s2 = DaeSystem::new(
                "conjugated",
                p_inv.mul(&s1.e).mul(&p),
                p_inv.mul(&s1.a).mul(&p),
                p_inv.mul(&s1.b),
                M::zeros(n, 0),
                s1.c.mul(&p),
            )
            .unwrap();
            assert!(transfer_equal(&s1, &s2).unwrap().equal);
            let r = relation_from_transfer(&s1, &s2).unwrap();
            let verdict = is_bisimulation(&r, &s1, &s2).unwrap();
            assert!(
                verdict.relation.is_some(),
                "case {case}: {:?}",
                verdict.conditions
            );
        }
    }

    #[test]
    fn mismatched_transfers_block_reconstruction() {
        let lag = sys(&[&[1]], &[&[-1]], &[&[1]], &[], &[&[1]]);
        assert_eq!(
            relation_from_transfer(&integrator(), &lag).unwrap_err(),
            RegularError::TransferMismatch
        );
        assert_eq!(
            relation_from_transfer(&integrator(), &unit_gain()).unwrap_err(),
            RegularError::NotInvertible("test".into())
        );
    }

    #[test]
    fn longer_pairing_chains_add_no_new_directions() {
        let mut rng = sampling::rng(83);
        for _ in 0..10 {
            let n = 2;
            let e = sampling::invertible(&mut rng, n, 2);
            let a = sampling::int_matrix(&mut rng, n, n, 2);
            let b = sampling::int_matrix(&mut rng, n, 1, 2);
            let map = e.inverse().unwrap().mul(&a);
            let seed = e.inverse().unwrap().mul(&b);
            let mut block = seed.clone();
            let mut truncated = Matrix::zeros(n, 0);
            for _ in 0..2 * n {
                truncated = truncated.hstack(&block);
                block = map.mul(&block);
            }
            let mut extended = truncated.clone();
            for _ in 0..3 {
                extended = extended.hstack(&block);
                block = map.mul(&block);
            }
            assert_eq!(
                Subspace::from_columns(&truncated),
                Subspace::from_columns(&extended)
            );
        }
    }

    #[test]
    fn reduced_conditions_match_the_general_checker() {
        let mut rng = sampling::rng(89);
        let mut checked = 0;
        while checked < 30 {
            let s1 = sampling::system(&mut rng, 2, 2, 1, 0, 1, 2);
            let s2 = sampling::system(&mut rng, 2, 2, 1, 0, 1, 2);
            if !is_regular(&s1).map(|r| r.regular).unwrap_or(false)
                || !is_regular(&s2).map(|r| r.regular).unwrap_or(false)
            {
                continue;
            }
            checked += 1;
            let r = Relation::from_subspace(2, 2, sampling::subspace(&mut rng, 4, 2, 2));
            let (invariant, absorbs, silent) = disturbance_free_conditions(&r, &s1, &s2).unwrap();
            let verdict = is_bisimulation(&r, &s1, &s2).unwrap();
            assert_eq!(
                invariant && absorbs && silent,
                verdict.relation.is_some(),
                "relation {r:?} against {s1:?} / {s2:?}: reduced ({invariant}, {absorbs}, \
                 {silent}) vs general {:?}",
                verdict.conditions
            );
        }
    }
}
