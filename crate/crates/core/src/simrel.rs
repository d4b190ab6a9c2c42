//! One-sided relations: simulation certificates, the maximal simulation
//! relation, relation calculus, and abstraction construction.
//!
//! A simulation relation is half a bisimulation: the second system must be
//! able to follow every move of the first, but not conversely. The
//! disturbance-matching condition accordingly weakens to a one-sided
//! inclusion. Two simulations in opposite directions join into a
//! bisimulation by summing one with the inverse of the other. Abstractions
//! arise from a surjective state aggregation `H`: the reduced system keeps
//! the inputs, absorbs the collapsed directions into extra disturbance
//! columns, and is related to the original by the graph of `H`.

use crate::bisim::{invariance_fixed_point, product_matrices, BisimError, ProductMatrices};
use crate::field::Field;
use crate::geometric::{consistent_subset, ConsistentResult};
use crate::matrix::Matrix;
use crate::model::DaeSystem;
use crate::relation::Relation;
use crate::subspace::Subspace;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("joining requires mirror shapes: S relates {0}×{1} but T relates {2}×{3}")]
    JoinShapeMismatch(usize, usize, usize, usize),
    #[error("abstraction map has {cols} columns but the system has {n} states")]
    MapShape { cols: usize, n: usize },
    #[error("abstraction map is not surjective: rank {rank} over {rows} rows")]
    NotSurjective { rank: usize, rows: usize },
    #[error("abstraction map collapses states the output still distinguishes")]
    KernelNotContained,
    #[error("abstraction map has a degenerate gram matrix over this field")]
    DegenerateGram,
}

/// Per-condition outcome of a simulation check. Same shape as the
/// bisimulation flags, but `cond_a` is the one-sided inclusion
/// `𝒢₁× ⊆ S + 𝒢₂×`: the second system must cover the first system's
/// disturbance freedom, not vice versa.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SimConditionFlags {
    /// `𝒢₁× ⊆ S + 𝒢₂×`. False whenever either consistent subset is empty.
    pub cond_a: bool,
    /// Flow invariance `A× S ⊆ E× S + im Ḡ×`.
    pub cond_b: bool,
    /// Input absorption `im [B₁; B₂] ⊆ E× S + im Ḡ×`.
    pub cond_c: bool,
    /// Output agreement `S ⊆ ker [C₁ | −C₂]`.
    pub cond_d: bool,
    pub proj1_in: bool,
    pub proj2_in: bool,
    /// `π₁(S) = V₁*`: everything the first system can do is covered.
    pub proj1_eq: bool,
    pub proj2_eq: bool,
}

impl SimConditionFlags {
    /// All conditions a simulation relation must satisfy.
    pub fn relation_conditions(&self) -> bool {
        self.cond_a && self.cond_b && self.cond_c && self.cond_d && self.proj1_in && self.proj2_in
    }

    /// The first system is simulated by the second: a valid relation that
    /// covers the whole first consistent subset.
    pub fn simulated_by(&self) -> bool {
        self.relation_conditions() && self.proj1_eq
    }
}

/// Outcome of a simulation check or maximal-simulation computation;
/// mirrors the bisimulation verdict.
#[derive(Clone, Debug)]
pub struct SimVerdict<F> {
    pub relation: Option<Relation<F>>,
    pub examined: Relation<F>,
    pub conditions: SimConditionFlags,
    pub v1_star: Option<Subspace<F>>,
    pub v2_star: Option<Subspace<F>>,
    pub iterations: usize,
}

fn disturbance_directions<F: Field>(sys: &DaeSystem<F>, v_star: &Subspace<F>) -> Subspace<F> {
    Subspace::preimage(&sys.e, &Subspace::from_columns(&sys.g)).intersect(v_star)
}

fn evaluate_sim_conditions<F: Field>(
    mats: &ProductMatrices<F>,
    cons1: &ConsistentResult<F>,
    cons2: &ConsistentResult<F>,
    sys1: &DaeSystem<F>,
    sys2: &DaeSystem<F>,
    s: &Relation<F>,
) -> SimConditionFlags {
    let flow_target = Subspace::image_of(&mats.e_cross, s.space())
        .sum(&Subspace::from_columns(&mats.g_bar_cross));
    let cond_b = flow_target.contains(&Subspace::image_of(&mats.a_cross, s.space()));
    let cond_c = flow_target.contains(&Subspace::from_columns(&mats.b_cross));
    let cond_d = mats.c_cross.mul(s.space().basis()).is_zero();

    let proj1 = s.proj1();
    let proj2 = s.proj2();
    let (proj1_in, proj1_eq) = match &cons1.v_star {
        Some(v1) => (v1.contains(&proj1), *v1 == proj1),
        None => (false, false),
    };
    let (proj2_in, proj2_eq) = match &cons2.v_star {
        Some(v2) => (v2.contains(&proj2), *v2 == proj2),
        None => (false, false),
    };
    let cond_a = match (&cons1.v_star, &cons2.v_star) {
        (Some(v1), Some(v2)) => {
            let g1 = Subspace::product_embed(
                &disturbance_directions(sys1, v1),
                &Subspace::zero(mats.n2),
            );
            let g2 = Subspace::product_embed(
                &Subspace::zero(mats.n1),
                &disturbance_directions(sys2, v2),
            );
            s.space().sum(&g2).contains(&g1)
        }
        _ => false,
    };
    SimConditionFlags {
        cond_a,
        cond_b,
        cond_c,
        cond_d,
        proj1_in,
        proj2_in,
        proj1_eq,
        proj2_eq,
    }
}

/// Checks whether `s` is a simulation relation of `sys1` by `sys2`.
pub fn is_simulation<F: Field>(
    s: &Relation<F>,
    sys1: &DaeSystem<F>,
    sys2: &DaeSystem<F>,
) -> Result<SimVerdict<F>, BisimError> {
    let mats = product_matrices(sys1, sys2)?;
    if s.n1() != sys1.n() || s.n2() != sys2.n() {
        return Err(BisimError::DimensionMismatch {
            relation1: s.n1(),
            relation2: s.n2(),
            state1: sys1.n(),
            state2: sys2.n(),
        });
    }
    let cons1 = consistent_subset(sys1);
    let cons2 = consistent_subset(sys2);
    let conditions = evaluate_sim_conditions(&mats, &cons1, &cons2, sys1, sys2, s);
    Ok(SimVerdict {
        relation: conditions.relation_conditions().then(|| s.clone()),
        examined: s.clone(),
        conditions,
        v1_star: cons1.v_star,
        v2_star: cons2.v_star,
        iterations: 0,
    })
}

/// Computes the maximal simulation relation of `sys1` by `sys2`. The
/// refinement is the same one the bisimulation algorithm runs — the
/// one-sided conditions differ only in what is evaluated at the fixed
/// point, and inclusion in a larger relation preserves them.
pub fn maximal_simulation<F: Field>(
    sys1: &DaeSystem<F>,
    sys2: &DaeSystem<F>,
) -> Result<SimVerdict<F>, BisimError> {
    let mats = product_matrices(sys1, sys2)?;
    let cons1 = consistent_subset(sys1);
    let cons2 = consistent_subset(sys2);
    let (fixed_point, iterations) = invariance_fixed_point(&mats);
    let conditions = evaluate_sim_conditions(&mats, &cons1, &cons2, sys1, sys2, &fixed_point);
    Ok(SimVerdict {
        relation: conditions
            .relation_conditions()
            .then(|| fixed_point.clone()),
        examined: fixed_point,
        conditions,
        v1_star: cons1.v_star,
        v2_star: cons2.v_star,
        iterations,
    })
}

/// The converse relation: `{(x, y)} ↦ {(y, x)}`.
pub fn inverse_relation<F: Field>(t: &Relation<F>) -> Relation<F> {
    t.inverse()
}

/// Joins a simulation of `Σ₁` by `Σ₂` with one of `Σ₂` by `Σ₁` into a
/// candidate bisimulation relation `S + T⁻¹`. The result is a genuine
/// bisimulation relation whenever both inputs pass their one-sided checks;
/// that property is established by the certificate checker, not assumed
/// here.
pub fn join_to_bisimulation<F: Field>(
    s: &Relation<F>,
    t: &Relation<F>,
) -> Result<Relation<F>, SimError> {
    if s.n1() != t.n2() || s.n2() != t.n1() {
        return Err(SimError::JoinShapeMismatch(s.n1(), s.n2(), t.n1(), t.n2()));
    }
    Ok(s.sum(&t.inverse()))
}

/// An abstraction of a system by a surjective state aggregation `H`.
#[derive(Clone, Debug)]
pub struct Abstraction<F> {
    /// The aggregation map `X → Z`.
    pub h: Matrix<F>,
    /// Right inverse `H⁺ = Hᵀ(HHᵀ)⁻¹` with `H H⁺ = I`.
    pub h_plus: Matrix<F>,
    /// The unique output map on `Z` with `C = C̄ H`.
    pub c_bar: Matrix<F>,
    /// The reduced system on `Z`: `Ē = E H⁺`, `Ā = A H⁺`, `B̄ = B`, and
    /// `Ḡ = [G | E·K | A·K]` where `K` spans `ker H` — the collapsed
    /// directions reappear as disturbance freedom.
    pub abstract_sys: DaeSystem<F>,
    /// The graph `{(x, Hx)}` relating original to abstract states.
    pub canonical_sim: Relation<F>,
}

/// Builds the abstraction of `sys` induced by `h`. Requires `h` surjective
/// (so every abstract state is realized) and `ker h ⊆ ker C` (so the
/// aggregation does not conflate states the output tells apart).
pub fn abstract_system<F: Field>(
    sys: &DaeSystem<F>,
    h: &Matrix<F>,
) -> Result<Abstraction<F>, SimError> {
    if h.cols() != sys.n() {
        return Err(SimError::MapShape {
            cols: h.cols(),
            n: sys.n(),
        });
    }
    let rank = h.rank();
    if rank != h.rows() {
        return Err(SimError::NotSurjective {
            rank,
            rows: h.rows(),
        });
    }
    let ker_h = Subspace::kernel_of(h);
    if !Subspace::kernel_of(&sys.c).contains(&ker_h) {
        return Err(SimError::KernelNotContained);
    }
    let h_plus = h
        .right_pseudo_inverse()
        .map_err(|_| SimError::DegenerateGram)?;
    let c_bar = h
        .transpose()
        .solve(&sys.c.transpose())
        .expect("output factors through the aggregation")
        .transpose();
    debug_assert_eq!(c_bar.mul(h), sys.c);
    let k = ker_h.basis();
    let g_bar = sys.g.hstack(&sys.e.mul(k)).hstack(&sys.a.mul(k));
    let abstract_sys = DaeSystem::new(
        format!("{}-abstract", sys.name),
        sys.e.mul(&h_plus),
        sys.a.mul(&h_plus),
        sys.b.clone(),
        g_bar,
        c_bar.clone(),
    )
    .expect("abstraction blocks are dimensionally consistent");
    Ok(Abstraction {
        h: h.clone(),
        h_plus,
        c_bar,
        abstract_sys,
        canonical_sim: Relation::graph(h),
    })
}
