//! Bisimulation between descriptor systems.
//!
//! Two systems with a shared input and output interface are compared through
//! a product system whose state space is the direct product of theirs. A
//! bisimulation relation is a subspace of that product on which the two
//! systems can match each other's moves: the flow keeps the relation
//! invariant up to disturbances, every shared input is absorbed, related
//! states emit identical outputs, and each side's disturbance freedom is
//! covered by the other's. The module provides the certificate checker, the
//! fixed-point computation of the maximal relation, and the bisimilarity
//! decision on top of it.

use crate::field::Field;
use crate::geometric::{consistent_subset, ConsistentResult};
use crate::matrix::Matrix;
use crate::model::DaeSystem;
use crate::relation::Relation;
use crate::subspace::Subspace;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error(
        "systems expose different interfaces: {inputs1} vs {inputs2} inputs, \
         {outputs1} vs {outputs2} outputs"
    )]
    InterfaceMismatch {
        inputs1: usize,
        inputs2: usize,
        outputs1: usize,
        outputs2: usize,
    },
    #[error(
        "relation splits the product as {relation1}+{relation2} but the systems \
         have {state1} and {state2} states"
    )]
    DimensionMismatch {
        relation1: usize,
        relation2: usize,
        state1: usize,
        state2: usize,
    },
    #[error("operation requires explicit systems (E = I) on both sides")]
    NotExplicit,
}

/// Block matrices of the product system: `E× = diag(E₁,E₂)`,
/// `A× = diag(A₁,A₂)`, `B× = [B₁; B₂]` (inputs are shared, so the blocks
/// stack), `Ḡ× = diag(G₁,G₂)` (disturbances stay independent), and the
/// output comparator `C× = [C₁ | −C₂]` whose kernel is "outputs agree".
#[derive(Clone, Debug)]
pub struct ProductMatrices<F> {
    pub e_cross: Matrix<F>,
    pub a_cross: Matrix<F>,
    pub b_cross: Matrix<F>,
    pub g_bar_cross: Matrix<F>,
    pub c_cross: Matrix<F>,
    pub n1: usize,
    pub n2: usize,
}

fn block_diag<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let top = a.hstack(&Matrix::zeros(a.rows(), b.cols()));
    let bottom = Matrix::zeros(b.rows(), a.cols()).hstack(b);
    top.vstack(&bottom)
}

fn interface_check<F: Field>(sys1: &DaeSystem<F>, sys2: &DaeSystem<F>) -> Result<(), BisimError> {
    if sys1.m() != sys2.m() || sys1.p() != sys2.p() {
        return Err(BisimError::InterfaceMismatch {
            inputs1: sys1.m(),
            inputs2: sys2.m(),
            outputs1: sys1.p(),
            outputs2: sys2.p(),
        });
    }
    Ok(())
}

/// Assembles the product blocks. Fails when the systems do not share the
/// same number of inputs and outputs.
pub fn product_matrices<F: Field>(
    sys1: &DaeSystem<F>,
    sys2: &DaeSystem<F>,
) -> Result<ProductMatrices<F>, BisimError> {
    interface_check(sys1, sys2)?;
    Ok(ProductMatrices {
        e_cross: block_diag(&sys1.e, &sys2.e),
        a_cross: block_diag(&sys1.a, &sys2.a),
        b_cross: sys1.b.vstack(&sys2.b),
        g_bar_cross: block_diag(&sys1.g, &sys2.g),
        c_cross: sys1.c.hstack(&sys2.c.neg()),
        n1: sys1.n(),
        n2: sys2.n(),
    })
}

/// Product blocks together with the consistency data both sides contribute:
/// the consistent subsets and the embedded disturbance-reachable spaces
/// `𝒢ᵢ× = {(v, 0)} / {(0, v)}` for `v ∈ Eᵢ⁻¹(im Gᵢ) ∩ Vᵢ*`.
#[derive(Clone, Debug)]
pub struct ProductData<F> {
    pub mats: ProductMatrices<F>,
    pub v1_star: Subspace<F>,
    pub v2_star: Subspace<F>,
    pub g1_cross: Subspace<F>,
    pub g2_cross: Subspace<F>,
}

/// Directions a disturbance can push the state in while staying consistent.
fn disturbance_directions<F: Field>(sys: &DaeSystem<F>, v_star: &Subspace<F>) -> Subspace<F> {
    Subspace::preimage(&sys.e, &Subspace::from_columns(&sys.g)).intersect(v_star)
}

fn embed_first<F: Field>(s: &Subspace<F>, n2: usize) -> Subspace<F> {
    Subspace::product_embed(s, &Subspace::zero(n2))
}

fn embed_second<F: Field>(n1: usize, s: &Subspace<F>) -> Subspace<F> {
    Subspace::product_embed(&Subspace::zero(n1), s)
}

/// Builds the full product data. Returns `None` when either consistent
/// subset is empty: no bisimulation relation can exist then, because any
/// relation's projections would have to absorb the inputs on both sides.
pub fn build_product<F: Field>(
    sys1: &DaeSystem<F>,
    sys2: &DaeSystem<F>,
) -> Result<Option<ProductData<F>>, BisimError> {
    let mats = product_matrices(sys1, sys2)?;
    let cons1 = consistent_subset(sys1);
    let cons2 = consistent_subset(sys2);
    let (Some(v1_star), Some(v2_star)) = (cons1.v_star, cons2.v_star) else {
        return Ok(None);
    };
    let g1_cross = embed_first(&disturbance_directions(sys1, &v1_star), mats.n2);
    let g2_cross = embed_second(mats.n1, &disturbance_directions(sys2, &v2_star));
    Ok(Some(ProductData {
        mats,
        v1_star,
        v2_star,
        g1_cross,
        g2_cross,
    }))
}

/// The individual certificate conditions, reported separately so a failed
/// check pinpoints what broke.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConditionFlags {
    /// Disturbance freedom matches across the relation:
    /// `R + 𝒢₁× = R + 𝒢₂×`. False whenever either consistent subset is
    /// empty, since the compared spaces do not exist then.
    pub cond_a: bool,
    /// Flow invariance: `A× R ⊆ E× R + im Ḡ×`.
    pub cond_b: bool,
    /// Shared inputs are absorbed: `im [B₁; B₂] ⊆ E× R + im Ḡ×`.
    pub cond_c: bool,
    /// Related states agree on outputs: `R ⊆ ker [C₁ | −C₂]`.
    pub cond_d: bool,
    /// `π₁(R) ⊆ V₁*` (implied by the flow conditions; reported for
    /// diagnostics and false when `V₁*` is empty).
    pub proj1_in: bool,
    /// `π₂(R) ⊆ V₂*`.
    pub proj2_in: bool,
    /// `π₁(R) = V₁*`: the relation covers everything the first system can
    /// consistently start from.
    pub proj1_eq: bool,
    /// `π₂(R) = V₂*`.
    pub proj2_eq: bool,
}

impl ConditionFlags {
    /// All conditions a bisimulation relation must satisfy.
    pub fn relation_conditions(&self) -> bool {
        self.cond_a && self.cond_b && self.cond_c && self.cond_d && self.proj1_in && self.proj2_in
    }

    /// Bisimilarity additionally needs the relation to project onto both
    /// consistent subsets.
    pub fn bisimilar(&self) -> bool {
        self.relation_conditions() && self.proj1_eq && self.proj2_eq
    }
}

/// Outcome of a certificate check or a maximal-relation computation.
#[derive(Clone, Debug)]
pub struct BisimVerdict<F> {
    /// The accepted bisimulation relation, when all conditions hold.
    pub relation: Option<Relation<F>>,
    /// The subspace that was examined: the candidate handed to the checker,
    /// or the computed fixed point of the refinement.
    pub examined: Relation<F>,
    pub conditions: ConditionFlags,
    /// Consistent subsets of the two systems; `None` means empty.
    pub v1_star: Option<Subspace<F>>,
    pub v2_star: Option<Subspace<F>>,
    /// Strict refinement steps performed (zero for a pure check).
    pub iterations: usize,
}

impl<F: Field> BisimVerdict<F> {
    pub fn consistent_sets_empty(&self) -> bool {
        self.v1_star.is_none() || self.v2_star.is_none()
    }
}

fn evaluate_conditions<F: Field>(
    mats: &ProductMatrices<F>,
    cons1: &ConsistentResult<F>,
    cons2: &ConsistentResult<F>,
    sys1: &DaeSystem<F>,
    sys2: &DaeSystem<F>,
    r: &Relation<F>,
) -> ConditionFlags {
    let flow_target = Subspace::image_of(&mats.e_cross, r.space())
        .sum(&Subspace::from_columns(&mats.g_bar_cross));
    let cond_b = flow_target.contains(&Subspace::image_of(&mats.a_cross, r.space()));
    let cond_c = flow_target.contains(&Subspace::from_columns(&mats.b_cross));
    let cond_d = mats.c_cross.mul(r.space().basis()).is_zero();

    let proj1 = r.proj1();
    let proj2 = r.proj2();
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
            let g1 = embed_first(&disturbance_directions(sys1, v1), mats.n2);
            let g2 = embed_second(mats.n1, &disturbance_directions(sys2, v2));
            r.space().sum(&g2).contains(&g1) && r.space().sum(&g1).contains(&g2)
        }
        _ => false,
    };

    ConditionFlags {
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

/// Checks whether `r` is a bisimulation relation between the systems,
/// reporting every condition individually. `relation` in the verdict is
/// populated exactly when all of them hold.
pub fn is_bisimulation<F: Field>(
    r: &Relation<F>,
    sys1: &DaeSystem<F>,
    sys2: &DaeSystem<F>,
) -> Result<BisimVerdict<F>, BisimError> {
    let mats = product_matrices(sys1, sys2)?;
    if r.n1() != sys1.n() || r.n2() != sys2.n() {
        return Err(BisimError::DimensionMismatch {
            relation1: r.n1(),
            relation2: r.n2(),
            state1: sys1.n(),
            state2: sys2.n(),
        });
    }
    let cons1 = consistent_subset(sys1);
    let cons2 = consistent_subset(sys2);
    let conditions = evaluate_conditions(&mats, &cons1, &cons2, sys1, sys2, r);
    Ok(BisimVerdict {
        relation: conditions.relation_conditions().then(|| r.clone()),
        examined: r.clone(),
        conditions,
        v1_star: cons1.v_star,
        v2_star: cons2.v_star,
        iterations: 0,
    })
}

/// The refinement shared by the maximal bisimulation and maximal simulation
/// computations: start from "outputs agree", then repeatedly remove states
/// whose flow cannot stay inside the current relation. Returns the fixed
/// point and the number of strict refinements.
pub(crate) fn invariance_fixed_point<F: Field>(mats: &ProductMatrices<F>) -> (Relation<F>, usize) {
    let im_g = Subspace::from_columns(&mats.g_bar_cross);
    let mut space = Subspace::kernel_of(&mats.c_cross);
    let mut iterations = usize::from(!space.is_full());
    loop {
        let target = Subspace::image_of(&mats.e_cross, &space).sum(&im_g);
        let next = space.intersect(&Subspace::preimage(&mats.a_cross, &target));
        if next == space {
            break;
        }
        space = next;
        iterations += 1;
    }
    (Relation::from_subspace(mats.n1, mats.n2, space), iterations)
}

/// Computes the largest subspace satisfying the flow-invariance and
/// output-agreement conditions, then evaluates the remaining conditions on
/// it. Sound because the disturbance-matching and input-absorption
/// conditions are inherited upward: if any subspace of the fixed point
/// satisfies them, the fixed point itself does. So the fixed point is a
/// bisimulation relation exactly when some bisimulation relation exists,
/// and it is then the maximal one.
pub fn maximal_bisimulation<F: Field>(
    sys1: &DaeSystem<F>,
    sys2: &DaeSystem<F>,
) -> Result<BisimVerdict<F>, BisimError> {
    let mats = product_matrices(sys1, sys2)?;
    let cons1 = consistent_subset(sys1);
    let cons2 = consistent_subset(sys2);
    let (fixed_point, iterations) = invariance_fixed_point(&mats);
    let conditions = evaluate_conditions(&mats, &cons1, &cons2, sys1, sys2, &fixed_point);
    Ok(BisimVerdict {
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

/// Decides bisimilarity: a maximal relation must exist and project onto
/// both consistent subsets.
pub fn bisimilar<F: Field>(
    sys1: &DaeSystem<F>,
    sys2: &DaeSystem<F>,
) -> Result<(bool, BisimVerdict<F>), BisimError> {
    let verdict = maximal_bisimulation(sys1, sys2)?;
    Ok((verdict.conditions.bisimilar(), verdict))
}

/// Independent certificate check for explicit systems (`E = I` on both
/// sides), written against the simplified characterization that avoids the
/// consistency machinery entirely: every state is consistent, the flow
/// condition loses the `E` factor, and the disturbance spaces are the plain
/// images of `G₁`, `G₂`. Kept deliberately separate from
/// [`is_bisimulation`] so the two can cross-validate each other.
pub fn explicit_conditions<F: Field>(
    r: &Relation<F>,
    sys1: &DaeSystem<F>,
    sys2: &DaeSystem<F>,
) -> Result<ConditionFlags, BisimError> {
    interface_check(sys1, sys2)?;
    if !sys1.e.is_identity() || !sys2.e.is_identity() {
        return Err(BisimError::NotExplicit);
    }
    if r.n1() != sys1.n() || r.n2() != sys2.n() {
        return Err(BisimError::DimensionMismatch {
            relation1: r.n1(),
            relation2: r.n2(),
            state1: sys1.n(),
            state2: sys2.n(),
        });
    }
    let (n1, n2) = (sys1.n(), sys2.n());
    let g1 = embed_first(&Subspace::from_columns(&sys1.g), n2);
    let g2 = embed_second(n1, &Subspace::from_columns(&sys2.g));
    let cond_a = r.space().sum(&g1) == r.space().sum(&g2);

    let a_cross = block_diag(&sys1.a, &sys2.a);
    let reach = r.space().sum(&g1).sum(&g2);
    let cond_b = reach.contains(&Subspace::image_of(&a_cross, r.space()));
    let cond_c = reach.contains(&Subspace::from_columns(&sys1.b.vstack(&sys2.b)));
    let cond_d = sys1
        .c
        .hstack(&sys2.c.neg())
        .mul(r.space().basis())
        .is_zero();
    Ok(ConditionFlags {
        cond_a,
        cond_b,
        cond_c,
        cond_d,
        proj1_in: true,
        proj2_in: true,
        proj1_eq: r.proj1().is_full(),
        proj2_eq: r.proj2().is_full(),
    })
}
