//! Special functions and singularity-aware quadrature.

mod beta;
mod gamma;
mod quad;

pub use beta::{beta, ln_beta, reg_inc_beta, reg_inc_beta_complement};
pub use gamma::ln_gamma;
pub use quad::{integrate, integrate_detailed, integrate_nodes, Integral, Node, QuadratureSpec};
