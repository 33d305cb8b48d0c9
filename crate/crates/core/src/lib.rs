//! Numerical verification of sharp Morrey-Sobolev inequalities on
//! rotationally symmetric model manifolds.
//!
//! The crate computes the sharp constants of the support-bound and
//! L¹-bound inequalities, evaluates both quotients for radial profiles on
//! warped-product models, rearranges profiles into Euclidean space, and
//! minimises the support-bound quotient at fixed support.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod manifolds;
pub mod profiles;
pub mod rearrangement;
pub mod specfun;
pub mod variational;

pub use constants::{c1, c2, make_exponents, omega, Exponents, SharpConstants};
pub use error::{Error, Result};
pub use manifolds::{make_model, CurvatureClass, ModelKind, Monotonicity, VolumeReport, WarpedModel};
pub use profiles::{
    make_profile, norms_report, quotient, NormsReport, ProfileDesignation, QuotientKind,
    RadialProfile,
};
pub use rearrangement::{polya_szego_check, rearrange, PolyaSzegoReport, RearrangementResult};
pub use specfun::QuadratureSpec;
pub use variational::{
    discrete_optimize, exact_radial_minimum, sharpness_scan, volume_bound_diagnostics, Attainment,
    DescentOptions, DiscreteMinimum, RadialMinimum, ScanResult, VolumeBound, VolumeBoundReport,
};
