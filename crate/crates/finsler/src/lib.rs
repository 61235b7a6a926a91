//! Numerical toolkit for Minkowski spaces in the Finsler sense.
//!
//! A Minkowski space here is a real vector space carrying a positively
//! 1-homogeneous, possibly indefinite norm `F` whose squared-norm Hessian
//! (the metric tensor) is nonsingular. Everything happens in a single
//! tangent space; there is no manifold base point.
//!
//! The crate computes direction-dependent metric and Cartan tensors from a
//! norm ([`diff`]), verifies the Euler-homogeneity identities those tensors
//! must satisfy, orthogonalizes bases under the noncommutative orthogonality
//! `g(v1)(v1, v2) = 0` ([`ortho`]), and solves the linear constraint system
//! whose nullspace is the Lie algebra of infinitesimal motions and
//! quasimotions of the space ([`motion`]).
//!
//! Two independent derivative paths (exact truncated-polynomial arithmetic in
//! [`hyperdual`], central finite differences) back every numerical claim, so
//! results can always be cross-checked within the toolkit itself.

pub mod diff;
pub mod error;
pub mod hyperdual;
pub mod motion;
pub mod norm;
pub mod ortho;
pub mod sample;

pub use diff::{
    cartan_at, check_euler_identities, metric_at, CartanTensor, DiffOptions, IdentityReport,
    Method, MetricTensor,
};
pub use error::FinslerError;
pub use motion::{
    assemble_motion_constraints, assemble_quasimotion_constraints, bracket, bracket_with_residual,
    compare_algebras, constraint_residual, fit_drift_order, solve_lie_algebra,
    verify_additive_closure, verify_first_order_preservation, BracketReport, ClosureReport,
    ConstraintKind, ConstraintSystem, DriftReport, EquivalenceReport, LieAlgebraBasis,
    MotionGenerator,
};
pub use norm::{AdmissibleDirection, MonomialTerm, NormKind, NormModel, Vector};
pub use ortho::{
    check_linear_independence, is_orthogonal, metric_profile, normalize, orthogonalize,
    orthogonalize_with, Basis, MetricProfile, NormalizeOutcome, OrthogonalizeOutcome, PatternCheck,
    PivotStrategy,
};
