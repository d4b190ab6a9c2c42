//! Exact decision procedures for linear differential-algebraic systems.
//!
//! The crate decides whether two descriptor systems `E ẋ = A x + B u + G d`,
//! `y = C x` are related by (bi)simulation, computes the maximal relation
//! when one exists, and emits the relation as a subspace certificate that a
//! separate checker can re-verify. All decisions run over an exact field —
//! arbitrary-precision rationals by default, prime fields for the
//! enumeration oracles — so verdicts are exact, not numerical. A separate
//! floating-point layer integrates trajectories to cross-validate computed
//! relations against actual system behaviour.

pub mod field;
pub mod matrix;
pub mod model;
pub mod sampling;
pub mod subspace;

pub mod bisim;
pub mod cli;
pub mod enumerate;
pub mod geometric;
pub mod regular;
pub mod relation;
pub mod report;
pub mod simrel;
pub mod trajectory;

pub use field::{Field, Gf, Rat};
pub use matrix::Matrix;
pub use model::DaeSystem;
pub use subspace::Subspace;
