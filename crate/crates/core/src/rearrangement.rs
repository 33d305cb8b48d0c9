//! Euclidean decreasing rearrangement of radial profiles and the Pólya-Szegő checks.

use crate::constants::Exponents;
use crate::error::{Error, Result};
use crate::manifolds::WarpedModel;
use crate::profiles::{euclidean_radius, norms_report, NormsReport, RadialProfile};
use crate::specfun::QuadratureSpec;

/// Output of [`rearrange`].
#[derive(Debug, Clone)]
pub struct RearrangementResult {
    /// `phi*` on the Euclidean model of the same dimension.
    pub star_profile: RadialProfile,
    pub source_model: WarpedModel,
    pub euclidean_model: WarpedModel,
    /// Support radius of the rearrangement, `omega_n lambda*^n = Vol(B(lambda))`.
    pub lambda_star: f64,
    pub report_before: NormsReport,
    pub report_after: NormsReport,
}

impl RearrangementResult {
    /// The radius map `s(rho) = (Vol(B(rho)) / omega_n)^(1/n)`.
    pub fn radius_map(&self, rho: f64) -> Result<f64> {
        euclidean_radius(&self.source_model, rho)
    }
}

/// Rearranges `u` on `m` into a radial profile on Euclidean space with
/// equimeasurable super-level sets.
pub fn rearrange(
    u: &RadialProfile,
    m: &WarpedModel,
    e: &Exponents,
    spec: &QuadratureSpec,
) -> Result<RearrangementResult> {
    u.validate_on(m)?;
    if u.value(u.lambda())? != 0.0 {
        return Err(Error::domain(
            "rearrangement needs a profile vanishing at its support radius",
        ));
    }
    let flat = WarpedModel::euclidean(m.n())?;
    let lambda_star = euclidean_radius(m, u.lambda())?;
    let star = RadialProfile::rearranged(u.clone(), m.clone(), lambda_star);
    let report_before = norms_report(u, m, e, spec)?;
    let report_after = norms_report(&star, &flat, e, spec)?;
    Ok(RearrangementResult {
        star_profile: star,
        source_model: m.clone(),
        euclidean_model: flat,
        lambda_star,
        report_before,
        report_after,
    })
}

/// Signed gaps between a profile and its rearrangement.
#[derive(Debug, Clone)]
pub struct PolyaSzegoReport {
    /// `||grad u||_p - ||grad u*||_p`; non-negative on Cartan-Hadamard models.
    pub delta_grad: f64,
    pub delta_sup: f64,
    /// `(||u||_1 - ||u*||_1) / ||u||_1`.
    pub delta_l1: f64,
    pub rearrangement: RearrangementResult,
}

/// Compares gradient, sup and L¹ norms before and after rearrangement.
/// Only models satisfying the Euclidean isoperimetric inequality are accepted.
pub fn polya_szego_check(
    u: &RadialProfile,
    m: &WarpedModel,
    e: &Exponents,
    spec: &QuadratureSpec,
) -> Result<PolyaSzegoReport> {
    if !m.curvature_class().is_cartan_hadamard() {
        return Err(Error::Unsupported(format!(
            "gradient comparison needs a Cartan-Hadamard model, {} is {}",
            m.label(),
            m.curvature_class()
        )));
    }
    let r = rearrange(u, m, e, spec)?;
    let (b, a) = (&r.report_before, &r.report_after);
    let delta_l1 = if b.l1_norm == 0.0 {
        0.0
    } else {
        (b.l1_norm - a.l1_norm) / b.l1_norm
    };
    Ok(PolyaSzegoReport {
        delta_grad: b.grad_lp_norm - a.grad_lp_norm,
        delta_sup: b.sup_norm - a.sup_norm,
        delta_l1,
        rearrangement: r,
    })
}
