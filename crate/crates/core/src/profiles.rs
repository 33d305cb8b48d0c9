//! Radial profiles `u(x) = phi(d(x0, x))` and their norms on a model manifold.

use std::fmt;
use std::str::FromStr;

use crate::constants::Exponents;
use crate::error::{Error, Result};
use crate::manifolds::WarpedModel;
use crate::specfun::{beta, integrate, integrate_nodes, reg_inc_beta, reg_inc_beta_complement};
use crate::specfun::{Node, QuadratureSpec};

/// Which Morrey-Sobolev quotient to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientKind {
    /// Support-bound: `|supp u|^(1/n - 1/p) ||grad u||_p / ||u||_inf`.
    Q1,
    /// L¹-bound: `||u||_1^(1 - eta) ||grad u||_p^eta / ||u||_inf`.
    Q2,
}

impl FromStr for QuotientKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q1" => Ok(QuotientKind::Q1),
            "q2" => Ok(QuotientKind::Q2),
            _ => Err(Error::domain(format!("unknown quotient '{s}', expected q1 or q2"))),
        }
    }
}

impl fmt::Display for QuotientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuotientKind::Q1 => "q1",
            QuotientKind::Q2 => "q2",
        })
    }
}

/// `F_lambda(s) = ∫_0^s r^((1-n)/(p-1)) (lambda^n - r^n)^(1/(p-1)) dr`, evaluated
/// through the regularized incomplete beta function after `t = (r/lambda)^n`.
#[allow(non_snake_case)]
pub fn F_lambda(e: &Exponents, lambda: f64, s: f64) -> Result<f64> {
    check_talenti_arg(lambda, s)?;
    let (a, b) = (e.talenti_a(), e.p_conj());
    Ok(talenti_height(e, lambda)? * reg_inc_beta((s / lambda).powi(e.n() as i32), a, b)?)
}

/// `F_lambda(lambda) - F_lambda(s)`, the L¹-bound extremal, without cancellation near `s = 0`.
pub fn talenti_value(e: &Exponents, lambda: f64, s: f64) -> Result<f64> {
    check_talenti_arg(lambda, s)?;
    let (a, b) = (e.talenti_a(), e.p_conj());
    Ok(talenti_height(e, lambda)? * reg_inc_beta_complement((s / lambda).powi(e.n() as i32), a, b)?)
}

/// `F_lambda(lambda) = (lambda^p' / n) B((1-n)p'/n + 1, p')`.
pub fn talenti_height(e: &Exponents, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::domain(format!("support radius must be positive, got {lambda}")));
    }
    Ok(lambda.powf(e.p_conj()) / e.dim() * beta(e.talenti_a(), e.p_conj())?)
}

fn check_talenti_arg(lambda: f64, s: f64) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(Error::domain(format!("support radius must be positive, got {lambda}")));
    }
    if !(0.0..=lambda).contains(&s) {
        return Err(Error::domain(format!("argument {s} outside [0, {lambda}]")));
    }
    Ok(())
}

/// `f_lambda(r) = r^((1-n)/(p-1)) (lambda^n - r^n)^(1/(p-1))`, with `gap = lambda - r`
/// supplied separately so the factor vanishing at `lambda` keeps full precision.
pub fn f_lambda(e: &Exponents, lambda: f64, r: f64, gap: f64) -> f64 {
    let n = e.n();
    // lambda^n - r^n = (lambda - r) sum_k lambda^(n-1-k) r^k
    let mut sum = 0.0;
    let mut lp = 1.0;
    for k in (0..n).rev() {
        sum += lp * r.powi(k as i32);
        lp *= lambda;
    }
    r.powf((1.0 - e.dim()) / (e.p() - 1.0)) * (gap * sum).powf(1.0 / (e.p() - 1.0))
}

#[derive(Debug, Clone)]
pub enum ProfileKind {
    /// `(lambda^beta - r^beta)_+` with `beta = (p - n)/(p - 1)`.
    PowerExtremal(Exponents),
    /// `F_lambda(lambda) - F_lambda(r)`.
    TalentiExtremal(Exponents),
    PiecewiseLinear { knots: Vec<f64>, values: Vec<f64> },
    /// Constant level on all of a compact model.
    Constant { level: f64 },
    /// `phi(rho(s))` where `rho(s)` is the radius of the source-model ball with
    /// Euclidean volume `omega_n s^n`.
    Rearranged {
        source: Box<RadialProfile>,
        model: WarpedModel,
    },
    /// Normalized minimizer of the radial p-energy with unit height:
    /// `phi(r) = ∫_r^lambda w / ∫_0^lambda w`, `w = psi^(-(n-1)/(p-1))`.
    RadialMinimizer {
        model: WarpedModel,
        exponents: Exponents,
        weight_total: f64,
        spec: QuadratureSpec,
    },
}

/// A nonincreasing radial profile supported on `[0, lambda]`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    lambda: f64,
    kind: ProfileKind,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!(
            "support radius must be positive and finite, got {lambda}"
        )));
    }
    Ok(())
}

impl RadialProfile {
    pub fn power(e: Exponents, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(RadialProfile {
            lambda,
            kind: ProfileKind::PowerExtremal(e),
        })
    }

    pub fn talenti(e: Exponents, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(RadialProfile {
            lambda,
            kind: ProfileKind::TalentiExtremal(e),
        })
    }

    /// Piecewise-linear profile through `(knots[i], values[i])`. The first knot
    /// must be zero; the last knot is the support radius.
    pub fn piecewise_linear(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(Error::domain(
                "piecewise-linear profile needs at least two knots with matching values",
            ));
        }
        if knots[0] != 0.0 {
            return Err(Error::domain("first knot must be at the origin"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("knots must be strictly increasing"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::domain("profile values must be finite and non-negative"));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::domain("profile values must be nonincreasing"));
        }
        let lambda = knots[knots.len() - 1];
        check_lambda(lambda)?;
        Ok(RadialProfile {
            lambda,
            kind: ProfileKind::PiecewiseLinear { knots, values },
        })
    }

    /// Constant profile filling a compact model.
    pub fn constant(level: f64, model: &WarpedModel) -> Result<Self> {
        if !model.is_compact() {
            return Err(Error::domain(format!(
                "constant profiles need a compact model, {} is not",
                model.label()
            )));
        }
        if !(level > 0.0) || !level.is_finite() {
            return Err(Error::domain(format!("constant level must be positive, got {level}")));
        }
        Ok(RadialProfile {
            lambda: model.r_max(),
            kind: ProfileKind::Constant { level },
        })
    }

    /// Minimizer of `∫ |phi'|^p psi^(n-1)` with `phi(0) = 1`, `phi(lambda) = 0`.
    pub fn radial_minimizer(
        model: &WarpedModel,
        e: Exponents,
        lambda: f64,
        spec: QuadratureSpec,
    ) -> Result<Self> {
        check_lambda(lambda)?;
        if !(lambda < model.r_max()) {
            return Err(Error::domain(format!(
                "minimizer needs lambda < r_max = {}",
                model.r_max()
            )));
        }
        let weight_total = radial_weight_integral(model, &e, 0.0, lambda, &spec)?;
        Ok(RadialProfile {
            lambda,
            kind: ProfileKind::RadialMinimizer {
                model: model.clone(),
                exponents: e,
                weight_total,
                spec,
            },
        })
    }

    pub(crate) fn rearranged(source: RadialProfile, model: WarpedModel, lambda: f64) -> Self {
        RadialProfile {
            lambda,
            kind: ProfileKind::Rearranged {
                source: Box::new(source),
                model,
            },
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, ProfileKind::Constant { .. })
    }

    /// Checks that the profile can live on `model`.
    pub fn validate_on(&self, model: &WarpedModel) -> Result<()> {
        let tol = 1e-12 * self.lambda.max(1.0);
        if self.lambda > model.r_max() + tol {
            return Err(Error::domain(format!(
                "support radius {} exceeds r_max = {} of {}",
                self.lambda,
                model.r_max(),
                model.label()
            )));
        }
        match &self.kind {
            ProfileKind::PowerExtremal(e) | ProfileKind::TalentiExtremal(e) => {
                check_dimension(e.n(), model)?;
            }
            ProfileKind::RadialMinimizer { exponents, .. } => check_dimension(exponents.n(), model)?,
            ProfileKind::PiecewiseLinear { values, .. } => {
                let last = values[values.len() - 1];
                let fills_compact = model.is_compact() && (self.lambda - model.r_max()).abs() <= tol;
                if last != 0.0 && !fills_compact {
                    return Err(Error::domain(
                        "piecewise-linear profile must vanish at its last knot",
                    ));
                }
            }
            ProfileKind::Constant { .. } => {
                if !model.is_compact() || (self.lambda - model.r_max()).abs() > tol {
                    return Err(Error::domain("constant profile must fill a compact model"));
                }
            }
            ProfileKind::Rearranged { model: source_model, .. } => {
                if !model.is_euclidean() || model.n() != source_model.n() {
                    return Err(Error::domain(
                        "a rearranged profile lives on the Euclidean model of its source dimension",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Profile value `phi(r)`; zero beyond the support.
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain(format!("radius must be non-negative, got {r}")));
        }
        if let ProfileKind::Constant { level } = self.kind {
            return Ok(if r <= self.lambda { level } else { 0.0 });
        }
        if r >= self.lambda {
            return match &self.kind {
                ProfileKind::PiecewiseLinear { values, .. } if r == self.lambda => {
                    Ok(values[values.len() - 1])
                }
                _ => Ok(0.0),
            };
        }
        match &self.kind {
            ProfileKind::PowerExtremal(e) => {
                let b = e.power_exponent();
                Ok(self.lambda.powf(b) - r.powf(b))
            }
            ProfileKind::TalentiExtremal(e) => talenti_value(e, self.lambda, r),
            ProfileKind::PiecewiseLinear { knots, values } => {
                let i = segment_index(knots, r);
                let t = (r - knots[i]) / (knots[i + 1] - knots[i]);
                Ok(values[i] + t * (values[i + 1] - values[i]))
            }
            ProfileKind::Rearranged { source, model } => {
                let rho = source_radius(model, r)?;
                source.value(rho)
            }
            ProfileKind::RadialMinimizer {
                model,
                exponents,
                weight_total,
                spec,
            } => {
                let partial = if r < 0.5 * self.lambda {
                    weight_total - radial_weight_integral(model, exponents, 0.0, r, spec)?
                } else {
                    radial_weight_integral(model, exponents, r, self.lambda, spec)?
                };
                Ok(partial / weight_total)
            }
            ProfileKind::Constant { .. } => unreachable!("handled above"),
        }
    }

    /// Derivative `phi'(r)`, defined for `0 < r < lambda` (one-sided at knots).
    pub fn derivative(&self, r: f64) -> Result<f64> {
        self.derivative_with_gap(r, self.lambda - r)
    }

    fn derivative_with_gap(&self, r: f64, gap: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain(format!("radius must be non-negative, got {r}")));
        }
        if r >= self.lambda || self.is_constant() {
            return Ok(0.0);
        }
        match &self.kind {
            ProfileKind::PowerExtremal(e) => {
                let b = e.power_exponent();
                Ok(-b * r.powf(b - 1.0))
            }
            ProfileKind::TalentiExtremal(e) => Ok(-f_lambda(e, self.lambda, r, gap)),
            ProfileKind::PiecewiseLinear { knots, values } => {
                let i = segment_index(knots, r);
                Ok((values[i + 1] - values[i]) / (knots[i + 1] - knots[i]))
            }
            ProfileKind::Rearranged { source, model } => {
                let rho = source_radius(model, r)?;
                if rho == 0.0 {
                    return source.derivative(0.0);
                }
                // d rho / d s = s^(n-1) / psi(rho)^(n-1)
                let jac = (r / model.warp(rho)).powi(model.n() as i32 - 1);
                Ok(source.derivative(rho)? * jac)
            }
            ProfileKind::RadialMinimizer {
                model,
                exponents,
                weight_total,
                ..
            } => Ok(-radial_weight(model, exponents, r) / weight_total),
            ProfileKind::Constant { .. } => unreachable!("handled above"),
        }
    }

    /// Radii splitting `[0, lambda]` into pieces on which the profile is smooth.
    fn breakpoints(&self) -> Result<Vec<f64>> {
        Ok(match &self.kind {
            ProfileKind::PiecewiseLinear { knots, .. } => knots.clone(),
            ProfileKind::Rearranged { source, model } => {
                let inner = source.breakpoints()?;
                let mut out = Vec::with_capacity(inner.len());
                for (i, &rho) in inner.iter().enumerate() {
                    out.push(if i + 1 == inner.len() {
                        self.lambda
                    } else {
                        euclidean_radius(model, rho)?
                    });
                }
                out
            }
            _ => vec![0.0, self.lambda],
        })
    }

    /// Endpoint exponent of `|phi'|^p psi^(n-1)` at the origin.
    fn gradient_origin_exponent(&self) -> f64 {
        match &self.kind {
            ProfileKind::PowerExtremal(e) | ProfileKind::TalentiExtremal(e) => {
                -e.radial_weight_exponent()
            }
            ProfileKind::RadialMinimizer { exponents, .. } => -exponents.radial_weight_exponent(),
            ProfileKind::Rearranged { source, .. } => source.gradient_origin_exponent(),
            _ => 0.0,
        }
    }
}

fn check_dimension(n: usize, model: &WarpedModel) -> Result<()> {
    if n != model.n() {
        return Err(Error::domain(format!(
            "profile dimension {n} does not match model dimension {}",
            model.n()
        )));
    }
    Ok(())
}

fn segment_index(knots: &[f64], r: f64) -> usize {
    // largest i with knots[i] <= r, capped so that i + 1 is valid
    let i = knots.partition_point(|&k| k <= r);
    i.saturating_sub(1).min(knots.len() - 2)
}

/// Radius `rho` on `model` whose ball has the Euclidean volume of radius `s`.
fn source_radius(model: &WarpedModel, s: f64) -> Result<f64> {
    let v = model.omega_n() * s.powi(model.n() as i32);
    match model.inverse_ball_volume(v) {
        // s may overshoot the rearranged support by rounding
        Err(Error::Range(_)) => Ok(model.r_max()),
        other => other,
    }
}

/// Euclidean radius `s(rho) = (Vol(B(rho)) / omega_n)^(1/n)`.
pub fn euclidean_radius(model: &WarpedModel, rho: f64) -> Result<f64> {
    Ok((model.ball_volume(rho)? / model.omega_n()).powf(1.0 / model.n() as f64))
}

/// The Euler-Lagrange weight `psi(r)^(-(n-1)/(p-1))`.
pub fn radial_weight(model: &WarpedModel, e: &Exponents, r: f64) -> f64 {
    model.warp(r).powf(-e.radial_weight_exponent())
}

/// `∫_a^b psi^(-(n-1)/(p-1)) dr`.
pub fn radial_weight_integral(
    model: &WarpedModel,
    e: &Exponents,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let left = if a == 0.0 { -e.radial_weight_exponent() } else { 0.0 };
    let spec = spec.with_exponents(left, 0.0);
    integrate(|r| radial_weight(model, e, r), a, b, &spec)
        .map_err(|err| err.context("radial weight integral"))
}

/// Work and error accounting for the integrals behind a [`NormsReport`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuadratureDiagnostics {
    pub evaluations: usize,
    pub refinements: usize,
    pub l1_error_bound: f64,
    pub grad_error_bound: f64,
}

/// Norms of a profile on a model and both Morrey-Sobolev quotients.
#[derive(Debug, Clone, PartialEq)]
pub struct NormsReport {
    pub sup_norm: f64,
    pub l1_norm: f64,
    pub grad_lp_norm: f64,
    pub support_measure: f64,
    pub q1: f64,
    pub q2: f64,
    pub diagnostics: QuadratureDiagnostics,
}

impl NormsReport {
    pub fn quotient(&self, which: QuotientKind) -> f64 {
        match which {
            QuotientKind::Q1 => self.q1,
            QuotientKind::Q2 => self.q2,
        }
    }
}

/// Assembles the two quotients from the four norms.
pub fn quotients_from_norms(
    e: &Exponents,
    sup: f64,
    l1: f64,
    grad: f64,
    support: f64,
) -> (f64, f64) {
    if sup == 0.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let n = e.dim();
    let q1 = support.powf(1.0 / n - 1.0 / e.p()) * grad / sup;
    let q2 = l1.powf(1.0 - e.eta()) * grad.powf(e.eta()) / sup;
    (q1, q2)
}

/// Computes sup, L¹, gradient-L^p norms, support measure and both quotients.
pub fn norms_report(
    u: &RadialProfile,
    m: &WarpedModel,
    e: &Exponents,
    spec: &QuadratureSpec,
) -> Result<NormsReport> {
    u.validate_on(m)?;
    check_dimension(e.n(), m)?;
    let mut diag = QuadratureDiagnostics::default();
    let nw = m.unit_sphere_area();

    let sup_norm = u.value(0.0)?;
    let (support_measure, l1_norm, grad_lp_norm) = if let ProfileKind::Constant { level } = u.kind {
        let total = m.total_volume()?;
        (total, level * total, 0.0)
    } else {
        let support = m.ball_volume(u.lambda.min(m.r_max()))?;
        let pieces = u.breakpoints()?;

        let mut l1 = 0.0;
        for w in pieces.windows(2) {
            let piece = integrate_nodes(
                |node: Node| u.value(node.x).unwrap_or(f64::NAN) * m.density(node.x),
                w[0],
                w[1],
                spec,
            )
            .map_err(|err| err.context("L1 norm"))?;
            l1 += piece.value;
            diag.evaluations += piece.evaluations;
            diag.refinements += piece.refinements;
            diag.l1_error_bound += piece.error_bound;
        }

        let p = e.p();
        let grad_p = match &u.kind {
            ProfileKind::PiecewiseLinear { knots, values } => {
                // slope is constant per segment: exact shell volumes as weights
                let mut acc = 0.0;
                for i in 0..knots.len() - 1 {
                    let slope = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]);
                    let shell = m.ball_volume(knots[i + 1])? - m.ball_volume(knots[i])?;
                    acc += slope.abs().powf(p) * shell;
                }
                acc / nw
            }
            _ => {
                let mut acc = 0.0;
                let origin_exp = u.gradient_origin_exponent();
                for (i, w) in pieces.windows(2).enumerate() {
                    let left = if i == 0 { origin_exp } else { 0.0 };
                    let piece_spec = spec.with_exponents(left, 0.0);
                    let piece = integrate_nodes(
                        |node: Node| {
                            let gap = if i + 2 == pieces.len() {
                                node.from_right
                            } else {
                                u.lambda - node.x
                            };
                            let d = u.derivative_with_gap(node.x, gap).unwrap_or(f64::NAN);
                            d.abs().powf(p) * m.density(node.x)
                        },
                        w[0],
                        w[1],
                        &piece_spec,
                    )
                    .map_err(|err| err.context("gradient norm"))?;
                    acc += piece.value;
                    diag.evaluations += piece.evaluations;
                    diag.refinements += piece.refinements;
                    diag.grad_error_bound += piece.error_bound;
                }
                acc
            }
        };
        (support, nw * l1, (nw * grad_p).powf(1.0 / p))
    };
    diag.l1_error_bound *= nw;
    diag.grad_error_bound *= nw;

    let (q1, q2) = quotients_from_norms(e, sup_norm, l1_norm, grad_lp_norm, support_measure);
    Ok(NormsReport {
        sup_norm,
        l1_norm,
        grad_lp_norm,
        support_measure,
        q1,
        q2,
        diagnostics: diag,
    })
}

/// One Morrey-Sobolev quotient of `u` on `m`.
pub fn quotient(
    u: &RadialProfile,
    m: &WarpedModel,
    e: &Exponents,
    which: QuotientKind,
    spec: &QuadratureSpec,
) -> Result<f64> {
    norms_report(u, m, e, spec).map(|r| r.quotient(which))
}

/// A profile designation: `power`, `talenti`, `linear:<k0>,<v0>;...` or `constant:<level>`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileDesignation {
    Power,
    Talenti,
    Linear { knots: Vec<f64>, values: Vec<f64> },
    Constant { level: f64 },
}

impl FromStr for ProfileDesignation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::domain(format!("unrecognised profile designation '{s}'"));
        match s.split_once(':') {
            None if s == "power" => Ok(ProfileDesignation::Power),
            None if s == "talenti" => Ok(ProfileDesignation::Talenti),
            Some(("constant", level)) => Ok(ProfileDesignation::Constant {
                level: level.trim().parse().map_err(|_| bad())?,
            }),
            Some(("linear", body)) => {
                let mut knots = Vec::new();
                let mut values = Vec::new();
                for pair in body.split(';').filter(|p| !p.trim().is_empty()) {
                    let (k, v) = pair.split_once(',').ok_or_else(bad)?;
                    knots.push(k.trim().parse().map_err(|_| bad())?);
                    values.push(v.trim().parse().map_err(|_| bad())?);
                }
                Ok(ProfileDesignation::Linear { knots, values })
            }
            _ => Err(bad()),
        }
    }
}

/// Builds and validates a profile on `model`.
///
/// `lambda` is required for the extremals; for piecewise-linear profiles it
/// must agree with the last knot when given; constants fill the model.
pub fn make_profile(
    designation: &ProfileDesignation,
    e: &Exponents,
    lambda: Option<f64>,
    model: &WarpedModel,
) -> Result<RadialProfile> {
    let need_lambda =
        || lambda.ok_or_else(|| Error::domain("this profile needs a support radius lambda"));
    let profile = match designation {
        ProfileDesignation::Power => RadialProfile::power(*e, need_lambda()?)?,
        ProfileDesignation::Talenti => RadialProfile::talenti(*e, need_lambda()?)?,
        ProfileDesignation::Linear { knots, values } => {
            let p = RadialProfile::piecewise_linear(knots.clone(), values.clone())?;
            if let Some(l) = lambda {
                if (l - p.lambda).abs() > 1e-12 * l.max(1.0) {
                    return Err(Error::domain(format!(
                        "lambda {l} disagrees with the last knot {}",
                        p.lambda
                    )));
                }
            }
            p
        }
        ProfileDesignation::Constant { level } => RadialProfile::constant(*level, model)?,
    };
    profile.validate_on(model)?;
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{c1, c2, make_exponents, TalentiNorms};
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn euclid(n: usize) -> WarpedModel {
        WarpedModel::euclidean(n).unwrap()
    }

    #[test]
    fn f_lambda_endpoint_values() {
        let e = make_exponents(2, 4.0).unwrap();
        assert_eq!(F_lambda(&e, 1.0, 0.0).unwrap(), 0.0);
        let full = F_lambda(&e, 1.0, 1.0).unwrap();
        let expected = 0.5 * beta(1.0 / 3.0, 4.0 / 3.0).unwrap();
        assert!((full - expected).abs() < 1e-14);
        assert!((full - 1.3250).abs() < 1e-4);
        assert!(F_lambda(&e, 1.0, 1.5).is_err());
        assert!(F_lambda(&e, 0.0, 0.0).is_err());
    }

    #[test]
    fn power_profile_shape() {
        let e = make_exponents(2, 4.0).unwrap();
        let u = make_profile(&ProfileDesignation::Power, &e, Some(1.0), &euclid(2)).unwrap();
        assert_eq!(u.value(0.0).unwrap(), 1.0);
        let r: f64 = 0.3;
        assert!((u.value(r).unwrap() - (1.0 - r.powf(2.0 / 3.0))).abs() < 1e-15);
        assert_eq!(u.value(1.0).unwrap(), 0.0);
        assert_eq!(u.value(2.0).unwrap(), 0.0);
    }

    #[test]
    fn talenti_profile_shape() {
        let e = make_exponents(2, 4.0).unwrap();
        let u = make_profile(&ProfileDesignation::Talenti, &e, Some(1.0), &euclid(2)).unwrap();
        assert!((u.value(0.0).unwrap() - 1.3250).abs() < 1e-4);
        assert_eq!(u.value(1.0).unwrap(), 0.0);
        let mid = u.value(0.5).unwrap();
        let direct = F_lambda(&e, 1.0, 1.0).unwrap() - F_lambda(&e, 1.0, 0.5).unwrap();
        assert!((mid - direct).abs() < 1e-14);
    }

    #[test]
    fn linear_profile_shape() {
        let d: ProfileDesignation = "linear:0,1;1,0".parse().unwrap();
        let e = make_exponents(2, 4.0).unwrap();
        let u = make_profile(&d, &e, None, &euclid(2)).unwrap();
        for &r in &[0.0, 0.25, 0.5, 0.99] {
            assert!((u.value(r).unwrap() - (1.0 - r)).abs() < 1e-15);
            assert_eq!(u.derivative(r).unwrap(), -1.0);
        }
    }

    #[test]
    fn profile_validation() {
        let e = make_exponents(2, 4.0).unwrap();
        let s2 = WarpedModel::sphere(2, 1.0).unwrap();
        assert!(RadialProfile::piecewise_linear(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(RadialProfile::piecewise_linear(vec![0.1, 1.0], vec![1.0, 0.0]).is_err());
        assert!(RadialProfile::piecewise_linear(vec![0.0, 0.0], vec![1.0, 0.0]).is_err());
        assert!(RadialProfile::constant(1.0, &euclid(2)).is_err());
        assert!(make_profile(&ProfileDesignation::Power, &e, Some(4.0), &s2).is_err());
        assert!(make_profile(&ProfileDesignation::Power, &e, None, &s2).is_err());
        let d = ProfileDesignation::Linear {
            knots: vec![0.0, 1.0],
            values: vec![1.0, 0.5],
        };
        assert!(make_profile(&d, &e, None, &euclid(2)).is_err());
        assert!(make_profile(&d, &e, Some(2.0), &euclid(2)).is_err());
        let e3 = make_exponents(3, 4.0).unwrap();
        assert!(make_profile(&ProfileDesignation::Power, &e3, Some(1.0), &euclid(2)).is_err());
    }

    #[test]
    fn designation_grammar() {
        assert_eq!("power".parse::<ProfileDesignation>().unwrap(), ProfileDesignation::Power);
        assert_eq!(
            "constant:2.5".parse::<ProfileDesignation>().unwrap(),
            ProfileDesignation::Constant { level: 2.5 }
        );
        assert_eq!(
            "linear:0,1;0.5,0.25;1,0".parse::<ProfileDesignation>().unwrap(),
            ProfileDesignation::Linear {
                knots: vec![0.0, 0.5, 1.0],
                values: vec![1.0, 0.25, 0.0]
            }
        );
        for bad in ["powers", "linear:0;1", "constant:x", "talenti:1"] {
            assert!(bad.parse::<ProfileDesignation>().is_err(), "{bad}");
        }
    }

    #[test]
    fn power_extremal_energy_closed_form() {
        // ||grad u||_4^4 = (2/3)^3 2 pi for n = 2, p = 4, lambda = 1
        let e = make_exponents(2, 4.0).unwrap();
        let u = RadialProfile::power(e, 1.0).unwrap();
        let r = norms_report(&u, &euclid(2), &e, &spec()).unwrap();
        let expected = 16.0 * PI / 27.0;
        assert!((r.grad_lp_norm.powi(4) - expected).abs() < 1e-9 * expected);
        assert!((r.q1 * c1(&e) - 1.0).abs() < 1e-8);
        assert!((r.support_measure - PI).abs() < 1e-14);
    }

    #[test]
    fn talenti_extremal_norms_closed_form() {
        for (n, p) in [(2, 4.0), (3, 5.0)] {
            let e = make_exponents(n, p).unwrap();
            for &lambda in &[0.5, 1.0, 2.0] {
                let u = RadialProfile::talenti(e, lambda).unwrap();
                let r = norms_report(&u, &euclid(n), &e, &spec()).unwrap();
                let exact = TalentiNorms::at_radius(&e, lambda).unwrap();
                assert!(((r.l1_norm - exact.l1) / exact.l1).abs() < 1e-8);
                assert!(((r.grad_lp_norm - exact.grad_lp) / exact.grad_lp).abs() < 1e-8);
                assert!((r.q2 * c2(&e).unwrap() - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn constant_profile_kills_both_quotients() {
        let s2 = WarpedModel::sphere(2, 1.0).unwrap();
        let e = make_exponents(2, 4.0).unwrap();
        let u = make_profile(&ProfileDesignation::Constant { level: 1.0 }, &e, None, &s2).unwrap();
        let r = norms_report(&u, &s2, &e, &spec()).unwrap();
        assert_eq!(r.grad_lp_norm, 0.0);
        assert_eq!(r.sup_norm, 1.0);
        assert_eq!(r.q1, 0.0);
        assert_eq!(r.q2, 0.0);
        assert!((r.support_measure - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn power_extremal_on_hyperbolic_plane_exceeds_sharp_value() {
        let e = make_exponents(2, 4.0).unwrap();
        let h2 = WarpedModel::hyperbolic(2, 1.0).unwrap();
        let u = RadialProfile::power(e, 1.0).unwrap();
        let q = quotient(&u, &h2, &e, QuotientKind::Q1, &spec()).unwrap();
        assert!(q * c1(&e) - 1.0 > 1e-2, "margin {}", q * c1(&e) - 1.0);
    }

    #[test]
    fn piecewise_linear_refinement_converges_to_power_extremal() {
        let e = make_exponents(2, 4.0).unwrap();
        let h2 = WarpedModel::hyperbolic(2, 1.0).unwrap();
        let exact = quotient(&RadialProfile::power(e, 1.0).unwrap(), &h2, &e, QuotientKind::Q1, &spec())
            .unwrap();
        let mut prev_gap = f64::INFINITY;
        for &segments in &[16usize, 32, 64, 128, 256] {
            // knots graded towards the origin where the extremal is steep
            let knots: Vec<f64> = (0..=segments).map(|i| (i as f64 / segments as f64).powi(3)).collect();
            let values: Vec<f64> = knots.iter().map(|&r| 1.0 - r.powf(2.0 / 3.0)).collect();
            let u = RadialProfile::piecewise_linear(knots, values).unwrap();
            let q = quotient(&u, &h2, &e, QuotientKind::Q1, &spec()).unwrap();
            let gap = (q - exact).abs();
            assert!(gap < prev_gap, "{segments}: {gap} !< {prev_gap}");
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-3);
    }

    #[test]
    fn layer_cake_l1_agrees_with_direct_integral() {
        // ||u||_1 = ∫ Vol(B(rho)) |phi'(rho)| d rho for nonincreasing profiles
        let e = make_exponents(3, 5.0).unwrap();
        let h3 = WarpedModel::hyperbolic(3, 1.0).unwrap();
        let u = RadialProfile::talenti(e, 1.5).unwrap();
        let direct = norms_report(&u, &h3, &e, &spec()).unwrap().l1_norm;
        let cake = integrate(
            |r| h3.ball_volume(r).unwrap() * f_lambda(&e, 1.5, r, 1.5 - r),
            0.0,
            1.5,
            &spec().with_exponents(-0.5 + 3.0, 0.0),
        )
        .unwrap();
        assert!(((direct - cake) / cake).abs() < 1e-8);
    }

    #[test]
    fn talenti_energy_on_sphere_below_euclidean() {
        for (n, p) in [(2, 4.0), (3, 5.0)] {
            let e = make_exponents(n, p).unwrap();
            let s = WarpedModel::sphere(n, 1.0).unwrap();
            for &lambda in &[0.5, 1.5, 3.0] {
                let u = RadialProfile::talenti(e, lambda).unwrap();
                let curved = norms_report(&u, &s, &e, &spec()).unwrap().grad_lp_norm;
                let flat = norms_report(&u, &euclid(n), &e, &spec()).unwrap().grad_lp_norm;
                assert!(curved <= flat + 1e-9);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn linear_profile(lambda: f64, cuts: &[f64], drops: &[f64]) -> RadialProfile {
            let mut knots = vec![0.0];
            let mut sorted = cuts.to_vec();
            sorted.sort_by(f64::total_cmp);
            sorted.dedup();
            knots.extend(sorted.iter().map(|c| c * lambda));
            knots.push(lambda);
            let total: f64 = drops.iter().take(knots.len() - 1).sum();
            let mut values = vec![1.0];
            let mut level = 1.0;
            for d in drops.iter().take(knots.len() - 2) {
                level -= d / total;
                values.push(level.max(0.0));
            }
            values.push(0.0);
            RadialProfile::piecewise_linear(knots, values).unwrap()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn euclidean_quotients_scale_free(k in 0usize..3, which in 0usize..2) {
                let (n, p) = [(2, 4.0), (3, 5.0), (2, 3.0)][k];
                let e = make_exponents(n, p).unwrap();
                let m = euclid(n);
                let q: Vec<f64> = [0.25, 1.0, 4.0]
                    .iter()
                    .map(|&l| {
                        let u = if which == 0 {
                            RadialProfile::power(e, l).unwrap()
                        } else {
                            RadialProfile::talenti(e, l).unwrap()
                        };
                        let r = norms_report(&u, &m, &e, &spec()).unwrap();
                        if which == 0 { r.q1 } else { r.q2 }
                    })
                    .collect();
                for v in &q[1..] {
                    prop_assert!(((v - q[0]) / q[0]).abs() < 1e-8);
                }
            }

            #[test]
            fn cartan_hadamard_quotients_stay_above_sharp_values(
                lambda in 0.2f64..3.0,
                cuts in proptest::collection::vec(0.01f64..0.99, 1..6),
                drops in proptest::collection::vec(0.05f64..1.0, 7),
                kappa in 0.5f64..2.0,
            ) {
                let e = make_exponents(2, 4.0).unwrap();
                let bound1 = 1.0 / c1(&e);
                let bound2 = 1.0 / c2(&e).unwrap();
                let u = linear_profile(lambda, &cuts, &drops);
                for m in [euclid(2), WarpedModel::hyperbolic(2, kappa).unwrap()] {
                    let r = norms_report(&u, &m, &e, &spec()).unwrap();
                    prop_assert!(r.q1 >= bound1 - 1e-7);
                    prop_assert!(r.q2 >= bound2 - 1e-7);
                }
            }

            #[test]
            fn profiles_are_nonincreasing(
                lambda in 0.1f64..3.0,
                cuts in proptest::collection::vec(0.01f64..0.99, 1..6),
                drops in proptest::collection::vec(0.05f64..1.0, 7),
            ) {
                let e = make_exponents(3, 5.0).unwrap();
                let profiles = [
                    RadialProfile::power(e, lambda).unwrap(),
                    RadialProfile::talenti(e, lambda).unwrap(),
                    linear_profile(lambda, &cuts, &drops),
                ];
                for u in &profiles {
                    let mut prev = f64::INFINITY;
                    for i in 0..=64 {
                        let v = u.value(lambda * i as f64 / 64.0).unwrap();
                        prop_assert!(v <= prev && v >= 0.0);
                        prev = v;
                    }
                }
            }
        }
    }
}
