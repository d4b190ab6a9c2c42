//! Geometric core: the consistent subset of a descriptor system, computed
//! two independent ways.
//!
//! The direct route refines the full state space by the one-step dynamic
//! consistency condition until it stabilizes. The structural route works in
//! split coordinates and assembles the same subspace from a maximal
//! controlled invariant subspace, a friend feedback, and the kernel freedom
//! of the algebraic block. Keeping both routes separate is deliberate: each
//! serves as an oracle for the other in the cross-checking suites.

use crate::field::Field;
use crate::matrix::Matrix;
use crate::model::{DaeSystem, SpecialForm};
use crate::subspace::Subspace;

/// Outcome of the direct fixed-point computation.
///
/// `v0_star` is the largest subspace `V` with `A V ⊆ E V + im G`; it always
/// exists. `v_star` additionally requires `im B ⊆ E V + im G` so that every
/// input can be absorbed; `None` means no consistent subspace handles the
/// input channel. `iterations` counts strict refinements, at most `n`.
#[derive(Clone, Debug)]
pub struct ConsistentResult<F> {
    pub v0_star: Subspace<F>,
    pub v_star: Option<Subspace<F>>,
    pub iterations: usize,
}

pub fn consistent_subset<F: Field>(sys: &DaeSystem<F>) -> ConsistentResult<F> {
    let im_g = Subspace::from_columns(&sys.g);
    let mut v = Subspace::full(sys.n());
    let mut iterations = 0;
    loop {
        let reachable = Subspace::image_of(&sys.e, &v).sum(&im_g);
        let next = v.intersect(&Subspace::preimage(&sys.a, &reachable));
        if next == v {
            break;
        }
        v = next;
        iterations += 1;
    }
    let absorbs_inputs = Subspace::image_of(&sys.e, &v)
        .sum(&im_g)
        .contains(&Subspace::from_columns(&sys.b));
    ConsistentResult {
        v_star: absorbs_inputs.then(|| v.clone()),
        v0_star: v,
        iterations,
    }
}

/// A controlled invariant subspace together with a friend: a feedback `F`
/// whose closed loop keeps the subspace invariant.
#[derive(Clone, Debug)]
pub struct InvariantPair<F> {
    pub w: Subspace<F>,
    pub friend: Matrix<F>,
}

/// Solves for a friend of `w`: for each basis vector `w_j` a `v_j` with
/// `map_x w_j + map_v v_j ∈ w × {0}`, extended by zero on a complement.
/// The per-column solve pins free variables to zero, so the friend is
/// deterministic. Panics if `w` is not controlled invariant for the maps.
fn friend_for<F: Field>(
    w: &Subspace<F>,
    map_x: &Matrix<F>,
    map_v: &Matrix<F>,
    pad_rows: usize,
) -> Matrix<F> {
    let nv = map_v.cols();
    let target = w.basis().vstack(&Matrix::zeros(pad_rows, w.dim()));
    let lhs = map_v.hstack(&target.neg());
    let mut v_cols = Matrix::zeros(nv, 0);
    for j in 0..w.dim() {
        let rhs = map_x.mul(&w.basis().column(j)).neg();
        let sol = lhs
            .solve(&rhs)
            .expect("controlled invariance guarantees a matching input");
        v_cols = v_cols.hstack(&sol.submatrix(0..nv, 0..1));
    }
    let completion = w.completion();
    let change = w.basis().hstack(&completion);
    let v_ext = v_cols.hstack(&Matrix::zeros(nv, completion.cols()));
    v_ext.mul(&change.inverse().expect("basis plus completion spans"))
}

/// Largest `W ⊆ ker out_map` with `dyn_map W ⊆ W + im in_map`, together with
/// a friend `F` satisfying `(dyn_map + in_map F) W ⊆ W`.
pub fn controlled_invariant_w<F: Field>(
    dyn_map: &Matrix<F>,
    in_map: &Matrix<F>,
    out_map: &Matrix<F>,
) -> InvariantPair<F> {
    let im_in = Subspace::from_columns(in_map);
    let mut w = Subspace::kernel_of(out_map);
    loop {
        // each iterate stays inside ker out_map, so no re-intersection needed
        let next = w.intersect(&Subspace::preimage(dyn_map, &w.sum(&im_in)));
        if next == w {
            break;
        }
        w = next;
    }
    let friend = friend_for(&w, dyn_map, in_map, 0);
    InvariantPair { w, friend }
}

/// Variant with a direct feedthrough on the constrained output: largest `W`
/// such that every `x ∈ W` admits a `v` with `dyn_map x + in_map v ∈ W` and
/// `out_map x + thru_map v = 0`. The friend satisfies both closed-loop
/// conditions simultaneously.
pub fn output_nulling_invariant<F: Field>(
    dyn_map: &Matrix<F>,
    in_map: &Matrix<F>,
    out_map: &Matrix<F>,
    thru_map: &Matrix<F>,
) -> InvariantPair<F> {
    let na = dyn_map.cols();
    let nr = out_map.rows();
    let stack_x = dyn_map.vstack(out_map);
    let stack_v = in_map.vstack(thru_map);
    let im_v = Subspace::from_columns(&stack_v);
    let mut w = Subspace::full(na);
    loop {
        let target = Subspace::product_embed(&w, &Subspace::zero(nr)).sum(&im_v);
        let next = w.intersect(&Subspace::preimage(&stack_x, &target));
        if next == w {
            break;
        }
        w = next;
    }
    let friend = friend_for(&w, &stack_x, &stack_v, nr);
    InvariantPair { w, friend }
}

/// Freedom left in the algebraic variables once the differential part is
/// pinned: directions that the algebraic block annihilates and that feed the
/// differential equations back into `w`.
pub(crate) fn algebraic_freedom<F: Field>(sf: &SpecialForm<F>, w: &Subspace<F>) -> Subspace<F> {
    Subspace::kernel_of(&sf.a_bb).intersect(&Subspace::preimage(&sf.a_ab, w))
}

/// Consistent subset assembled from the split form: graph of the friend over
/// the invariant subspace, plus the algebraic freedom, mapped back through
/// `T`. `None` when the input channel hits the algebraic equations (`B_b`
/// nonzero) or escapes the invariant subspace.
pub fn vstar_via_special_form<F: Field>(sf: &SpecialForm<F>) -> Option<Subspace<F>> {
    let pair = output_nulling_invariant(&sf.a_aa, &sf.a_ab, &sf.a_ba, &sf.a_bb);
    let w = &pair.w;
    if !sf.b_b.is_zero() {
        return None;
    }
    if !w.contains(&Subspace::from_columns(&sf.b_a)) {
        return None;
    }
    let z = algebraic_freedom(sf, w);
    let graph = w.basis().vstack(&pair.friend.mul(w.basis()));
    let drift = Matrix::zeros(sf.n_a, z.dim()).vstack(z.basis());
    let in_split_coords = Subspace::from_columns(&graph.hstack(&drift));
    Some(Subspace::image_of(&sf.t_matrix, &in_split_coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rat;
    use crate::model::to_special_form;
    use crate::sampling;

    type M = Matrix<Rat>;
    type S = Subspace<Rat>;

    fn dae(e: &[&[i64]], a: &[&[i64]], b: &[&[i64]], g: &[&[i64]], c: &[&[i64]]) -> DaeSystem<Rat> {
        DaeSystem::new(
            "t",
            M::from_int_rows(e),
            M::from_int_rows(a),
            M::from_int_rows(b),
            M::from_int_rows(g),
            M::from_int_rows(c),
        )
        .unwrap()
    }

    fn free_dae(e: &[&[i64]], a: &[&[i64]]) -> DaeSystem<Rat> {
        let em = M::from_int_rows(e);
        let q = em.rows();
        let n = em.cols();
        DaeSystem::new(
            "t",
            em,
            M::from_int_rows(a),
            M::zeros(q, 0),
            M::zeros(q, 0),
            M::zeros(0, n),
        )
        .unwrap()
    }

    #[test]
    fn ode_systems_have_full_consistent_subset() {
        let sys = dae(
            &[&[1, 0], &[0, 1]],
            &[&[0, 1], &[-1, 0]],
            &[&[1], &[0]],
            &[&[0], &[1]],
            &[&[1, 0]],
        );
        let res = consistent_subset(&sys);
        assert_eq!(res.v0_star, S::full(2));
        assert_eq!(res.v_star, Some(S::full(2)));
        assert_eq!(res.iterations, 0);
    }

    #[test]
    fn input_on_algebraic_row_empties_the_consistent_set() {
        // x1' = x1, 0 = x2 + u: no subspace absorbs the input
        let sys = dae(
            &[&[1, 0], &[0, 0]],
            &[&[1, 0], &[0, 1]],
            &[&[0], &[1]],
            &[&[0], &[0]],
            &[&[1, 1]],
        );
        let res = consistent_subset(&sys);
        let e1 = S::from_columns(&M::from_int_rows(&[&[1], &[0]]));
        assert_eq!(res.v0_star, e1);
        assert_eq!(res.v_star, None);
    }

    #[test]
    fn cascaded_constraints_collapse_to_zero() {
        let sys = free_dae(&[&[1, 0], &[0, 0]], &[&[0, 1], &[1, 0]]);
        let res = consistent_subset(&sys);
        assert!(res.v0_star.is_zero_space());
        // empty input channel is absorbed trivially
        assert_eq!(res.v_star, Some(S::zero(2)));
        assert!(res.iterations <= 2);
    }

    #[test]
    fn iteration_count_is_bounded_by_dimension() {
        let mut rng = sampling::rng(11);
        for _ in 0..40 {
            let sys = sampling::system(&mut rng, 3, 3, 1, 1, 1, 2);
            let res = consistent_subset(&sys);
            assert!(res.iterations <= sys.n());
            // fixed point really is fixed
            let im_g = S::from_columns(&sys.g);
            let reach = S::image_of(&sys.e, &res.v0_star).sum(&im_g);
            let again = res.v0_star.intersect(&S::preimage(&sys.a, &reach));
            assert_eq!(again, res.v0_star);
        }
    }

    #[test]
    fn invariant_subspace_without_output_constraint_is_everything() {
        let pair = controlled_invariant_w(
            &M::from_int_rows(&[&[1, 1], &[0, 1]]),
            &M::zeros(2, 0),
            &M::zeros(0, 2),
        );
        assert_eq!(pair.w, S::full(2));
        assert!(pair.friend.is_zero());
    }

    #[test]
    fn identity_output_constraint_kills_everything() {
        let pair = controlled_invariant_w(
            &M::from_int_rows(&[&[0, 1], &[1, 0]]),
            &M::from_int_rows(&[&[1], &[0]]),
            &M::identity(2),
        );
        assert!(pair.w.is_zero_space());
        assert!(pair.friend.is_zero());
    }

    #[test]
    fn shift_with_unreachable_correction_shrinks_to_zero() {
        // dynamics shift e2 to e1, the input can only stay in span{e2}
        let pair = controlled_invariant_w(
            &M::from_int_rows(&[&[0, 1], &[0, 0]]),
            &M::from_int_rows(&[&[0], &[1]]),
            &M::from_int_rows(&[&[1, 0]]),
        );
        assert!(pair.w.is_zero_space());
    }

    #[test]
    fn friend_keeps_subspace_invariant() {
        let mut rng = sampling::rng(23);
        for _ in 0..40 {
            let a = sampling::int_matrix(&mut rng, 3, 3, 2);
            let b = sampling::int_matrix(&mut rng, 3, 1, 2);
            let c = sampling::int_matrix(&mut rng, 1, 3, 2);
            let pair = controlled_invariant_w(&a, &b, &c);
            let w = &pair.w;
            let closed = a.add(&b.mul(&pair.friend));
            assert!(w.contains(&S::image_of(&closed, w)));
            assert!(c.mul(w.basis()).is_zero());
        }
    }

    #[test]
    fn output_nulling_friend_satisfies_both_closed_loop_conditions() {
        let mut rng = sampling::rng(29);
        for _ in 0..40 {
            let a = sampling::int_matrix(&mut rng, 2, 2, 2);
            let b = sampling::int_matrix(&mut rng, 2, 2, 2);
            let c = sampling::int_matrix(&mut rng, 2, 2, 2);
            let d = sampling::int_matrix(&mut rng, 2, 2, 2);
            let pair = output_nulling_invariant(&a, &b, &c, &d);
            let w = &pair.w;
            let closed_dyn = a.add(&b.mul(&pair.friend));
            let closed_out = c.add(&d.mul(&pair.friend));
            assert!(w.contains(&S::image_of(&closed_dyn, w)));
            assert!(closed_out.mul(w.basis()).is_zero());
        }
    }

    #[test]
    fn feedthrough_matters_for_the_split_route() {
        // Constraint row couples x1 and x3; the route that ignores the
        // algebraic block over the invariant subspace gets this wrong.
        let sys = free_dae(
            &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]],
            &[&[0, 1, 1], &[0, 0, 0], &[1, 0, 1]],
        );
        let direct = consistent_subset(&sys);
        let expected = S::from_columns(&M::from_int_rows(&[&[1, 0], &[0, 1], &[-1, 0]]));
        assert_eq!(direct.v_star.as_ref(), Some(&expected));
        let sf = to_special_form(&sys).unwrap();
        let via_form = vstar_via_special_form(&sf).unwrap();
        assert_eq!(via_form, expected);

        // The plain invariant computation, which nulls A_ba alone, keeps the
        // direction e2 even though no correction input can satisfy the third
        // equation there; only the feedthrough-aware variant rejects it.
        let plain = controlled_invariant_w(&sf.a_aa, &sf.a_ab, &sf.a_ba);
        assert_eq!(plain.w, S::from_columns(&M::from_int_rows(&[&[0], &[1]])));
        let aware = output_nulling_invariant(&sf.a_aa, &sf.a_ab, &sf.a_ba, &sf.a_bb);
        assert_eq!(aware.w, S::full(2));
    }

    #[test]
    fn split_route_detects_input_on_algebraic_rows() {
        let sys = dae(
            &[&[1, 0], &[0, 0]],
            &[&[1, 0], &[0, 1]],
            &[&[0], &[1]],
            &[&[0], &[0]],
            &[&[1, 1]],
        );
        let elim_free = DaeSystem::new(
            "t",
            sys.e.clone(),
            sys.a.clone(),
            sys.b.clone(),
            M::zeros(2, 0),
            sys.c.clone(),
        )
        .unwrap();
        let sf = to_special_form(&elim_free).unwrap();
        assert_eq!(sf.b_b, M::from_int_rows(&[&[1]]));
        assert_eq!(vstar_via_special_form(&sf), None);
    }

    #[test]
    fn ode_split_route_returns_full_space() {
        let sys = dae(
            &[&[1, 0], &[0, 1]],
            &[&[0, 1], &[1, 1]],
            &[&[1], &[1]],
            &[&[0], &[0]],
            &[&[1, 0]],
        );
        let free = DaeSystem::new("t", sys.e, sys.a, sys.b, M::zeros(2, 0), sys.c).unwrap();
        let sf = to_special_form(&free).unwrap();
        assert_eq!(vstar_via_special_form(&sf), Some(S::full(2)));
    }

    #[test]
    fn both_routes_agree_on_random_disturbance_free_systems() {
        let mut rng = sampling::rng(37);
        for case in 0..60 {
            let n = 1 + case % 4;
            let q = 1 + (case / 2) % 4;
            let m = case % 3;
            let sys = sampling::system(&mut rng, q, n, m, 0, 1, 2);
            let direct = consistent_subset(&sys);
            let sf = to_special_form(&sys).unwrap();
            let via_form = vstar_via_special_form(&sf);
            assert_eq!(direct.v_star, via_form, "case {case}: {sys:?}");
        }
    }
}
