//! Invariant surfaces in simply isotropic and pseudo-isotropic 3-space.
//!
//! The crate builds 1-parameter isometry subgroups, sweeps generating curves
//! into invariant surfaces, computes their curvatures both from fundamental
//! forms and from per-family closed forms, and solves the prescribed
//! curvature problems for the families where a solution formula exists.

// `!(a <= b)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod curve;
pub mod error;
pub mod metric;
pub mod motion;
pub mod prescribed;
pub mod quad;
pub mod surface;
pub mod verify;

pub use curvature::{
    curvatures_closed_form, curvatures_numeric, fundamental_forms, gauss_map, CurvaturePair,
    FundamentalForms,
};
pub use curve::{CurveFn, GeneratingCurve, Plane};
pub use error::{IsoError, Result};
pub use metric::{
    ambient_dot, causal_character, co_dot, codistance, cross, dot, top_view, CausalCharacter,
    IsoVector, Signature,
};
pub use motion::{
    apply, classify, compose, evaluate, is_orthogonal_iso, make_motion, phase_sums, Motion4,
    MotionSubgroup, MotionType, PhaseSums,
};
pub use prescribed::{CurvatureProfile, SolverOutput};
pub use quad::quad;
pub use surface::{
    admissibility, admissibility_on_grid, admissibility_with_tol, evaluate_surface,
    invariant_surface, is_ruled, normal_form_chart, AdmissibilityReport, Domain, Family,
    InvariantSurface, NormalChart,
};
