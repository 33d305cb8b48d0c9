//! Fixed-support minimization of the Morrey-Sobolev quotients over radial
//! profiles, sharpness scans, and the large-volume-balls diagnostics.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::constants::{c1, c2, Exponents};
use crate::error::{Error, Result};
use crate::manifolds::WarpedModel;
use crate::profiles::{f_lambda, norms_report, radial_weight_integral, QuotientKind, RadialProfile};
use crate::specfun::{integrate_nodes, Node, QuadratureSpec};

/// Largest deviation from the sharp value still classified as attained.
pub const ATTAINMENT_TOL: f64 = 1e-6;
/// Slack allowed below the sharp value before a point counts as a violation.
pub const LOWER_BOUND_SLACK: f64 = 1e-7;

/// Closed-form minimum of the radial p-energy with `phi(0) = 1`, `phi(lambda) = 0`.
#[derive(Debug, Clone)]
pub struct RadialMinimum {
    pub lambda: f64,
    /// `||grad u||_p` of the minimizer.
    pub energy: f64,
    pub minimizer: RadialProfile,
    pub q1_min: f64,
    /// `I(lambda) = ∫_0^lambda psi^(-(n-1)/(p-1))`.
    pub weight_integral: f64,
}

fn check_radius(m: &WarpedModel, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < m.r_max()) {
        return Err(Error::domain(format!(
            "support radius {lambda} outside (0, {}) for {}",
            m.r_max(),
            m.label()
        )));
    }
    Ok(())
}

fn check_model(m: &WarpedModel, e: &Exponents) -> Result<()> {
    if m.n() != e.n() {
        return Err(Error::domain(format!(
            "model dimension {} does not match n = {}",
            m.n(),
            e.n()
        )));
    }
    Ok(())
}

/// Solves the radial Euler-Lagrange equation `(|phi'|^(p-2) phi' psi^(n-1))' = 0`.
pub fn exact_radial_minimum(
    m: &WarpedModel,
    e: &Exponents,
    lambda: f64,
    spec: &QuadratureSpec,
) -> Result<RadialMinimum> {
    check_model(m, e)?;
    check_radius(m, lambda)?;
    let minimizer = RadialProfile::radial_minimizer(m, *e, lambda, *spec)?;
    let weight = radial_weight_integral(m, e, 0.0, lambda, spec)?;
    let energy = m.unit_sphere_area().powf(1.0 / e.p()) * weight.powf(-1.0 / e.p_conj());
    let q1_min = m.ball_volume(lambda)?.powf(1.0 / e.dim() - 1.0 / e.p()) * energy;
    Ok(RadialMinimum {
        lambda,
        energy,
        minimizer,
        q1_min,
        weight_integral: weight,
    })
}

/// Iteration controls for [`discrete_optimize`].
#[derive(Debug, Clone, Copy)]
pub struct DescentOptions {
    pub max_iterations: usize,
    /// Stop once the Newton decrement drops below this fraction of the objective.
    pub tolerance: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            max_iterations: 500,
            tolerance: 1e-15,
        }
    }
}

/// Output of [`discrete_optimize`].
#[derive(Debug, Clone)]
pub struct DiscreteMinimum {
    pub energy: f64,
    pub profile: RadialProfile,
    pub iterations: usize,
    pub decrement: f64,
}

/// Knots `lambda (i/N)^gamma`, graded so that the `r^(-(n-1)/(p-1))` slope
/// singularity of the minimizer is resolved at second order.
pub fn graded_mesh(e: &Exponents, lambda: f64, segments: usize) -> Vec<f64> {
    let gamma = 2.0 / (1.0 - e.radial_weight_exponent());
    let mut knots: Vec<f64> = (0..=segments)
        .map(|i| lambda * (i as f64 / segments as f64).powf(gamma))
        .collect();
    knots[segments] = lambda;
    knots
}

/// Minimizes `sum |s_i|^p w_i` over the slopes of piecewise-linear profiles with
/// `phi(0) = 1`, `phi(lambda) = 0`, where `w_i` is the exact shell volume of
/// segment `i`. Projected Newton steps with a diagonal Hessian and Armijo
/// backtracking, started from the straight line.
pub fn discrete_optimize(
    m: &WarpedModel,
    e: &Exponents,
    lambda: f64,
    segments: usize,
    options: &DescentOptions,
) -> Result<DiscreteMinimum> {
    check_model(m, e)?;
    check_radius(m, lambda)?;
    if segments < 8 {
        return Err(Error::domain(format!("need at least 8 segments, got {segments}")));
    }
    let p = e.p();
    let knots = graded_mesh(e, lambda, segments);
    let h: Vec<f64> = knots.windows(2).map(|k| k[1] - k[0]).collect();
    let mut w = Vec::with_capacity(segments);
    let mut prev = 0.0;
    for &k in &knots[1..] {
        let v = m.ball_volume(k)?;
        w.push(v - prev);
        prev = v;
    }

    let objective = |s: &[f64]| -> f64 { s.iter().zip(&w).map(|(si, wi)| si.abs().powf(p) * wi).sum() };
    let mut s = vec![-1.0 / lambda; segments];
    let mut value = objective(&s);
    let mut decrement = f64::INFINITY;
    let mut iterations = 0;
    let mut trial = vec![0.0; segments];
    let mut dir = vec![0.0; segments];

    while iterations < options.max_iterations {
        iterations += 1;
        // constrained Newton direction for the constraint sum s_i h_i = -1
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..segments {
            let a = s[i].abs();
            let g = p * a.powf(p - 1.0) * s[i].signum() * w[i];
            let hess = (p * (p - 1.0) * a.powf(p - 2.0) * w[i]).max(f64::MIN_POSITIVE);
            dir[i] = g;
            trial[i] = hess;
            num += h[i] * g / hess;
            den += h[i] * h[i] / hess;
        }
        let mu = num / den;
        decrement = 0.0;
        for i in 0..segments {
            let r = dir[i] - mu * h[i];
            dir[i] = -r / trial[i];
            decrement += r * r / trial[i];
        }
        if decrement <= options.tolerance * value {
            let energy = value.powf(1.0 / p);
            return Ok(DiscreteMinimum {
                energy,
                profile: slopes_to_profile(&knots, &s, &h)?,
                iterations,
                decrement,
            });
        }
        let mut t = 1.0;
        loop {
            for i in 0..segments {
                trial[i] = s[i] + t * dir[i];
            }
            let v = objective(&trial);
            if v <= value - 0.25 * t * decrement {
                value = v;
                s.copy_from_slice(&trial);
                break;
            }
            t *= 0.5;
            if t < 1e-30 {
                // no further progress is representable
                return Err(Error::NonConvergence {
                    context: "discrete optimizer line search stalled".into(),
                    estimate: value.powf(1.0 / p),
                    error_bound: decrement,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        context: format!("discrete optimizer after {iterations} iterations"),
        estimate: value.powf(1.0 / p),
        error_bound: decrement,
    })
}

fn slopes_to_profile(knots: &[f64], s: &[f64], h: &[f64]) -> Result<RadialProfile> {
    let n = s.len();
    let mut values = vec![0.0; n + 1];
    for i in (0..n).rev() {
        values[i] = values[i + 1] - s[i] * h[i];
    }
    // rescale the tiny feasibility drift away so phi(0) = 1 exactly
    let top = values[0];
    for v in values.iter_mut() {
        *v /= top;
    }
    values[0] = 1.0;
    for i in 1..=n {
        values[i] = values[i].min(values[i - 1]).max(0.0);
    }
    RadialProfile::piecewise_linear(knots.to_vec(), values)
}

/// Classification of a sharpness scan against the sharp Euclidean value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attainment {
    AttainedEverywhere,
    NotAttained,
    Indeterminate,
}

impl fmt::Display for Attainment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Attainment::AttainedEverywhere => "attained-everywhere",
            Attainment::NotAttained => "not-attained",
            Attainment::Indeterminate => "indeterminate",
        })
    }
}

/// Per-lambda minimal quotients (q1) or extremal transplants (q2).
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub which: QuotientKind,
    pub lambdas: Vec<f64>,
    /// NaN where the grid point failed; see `errors`.
    pub q_values: Vec<f64>,
    pub errors: Vec<Option<Error>>,
    pub sharp_reference: f64,
    /// Extrapolation to `lambda -> 0` from the three smallest radii.
    pub limit_estimate: Option<f64>,
    pub attainment: Attainment,
    /// Largest `Vol(B(rho)) / (omega_n rho^n)` over the grid; only an estimate
    /// of the lim sup at infinity.
    pub asymptotic_volume_ratio: f64,
    /// True for q2, whose values bound the minimum from above only.
    pub upper_bound_probe: bool,
}

impl ScanResult {
    pub fn margins(&self) -> Vec<f64> {
        self.q_values.iter().map(|q| q - self.sharp_reference).collect()
    }

    pub fn first_error(&self) -> Option<&Error> {
        self.errors.iter().flatten().next()
    }
}

/// Scans the fixed-support minimal quotient over a grid of support radii.
pub fn sharpness_scan(
    m: &WarpedModel,
    e: &Exponents,
    lambdas: &[f64],
    which: QuotientKind,
    spec: &QuadratureSpec,
) -> Result<ScanResult> {
    check_model(m, e)?;
    if lambdas.is_empty() {
        return Err(Error::domain("empty lambda grid"));
    }
    for &l in lambdas {
        check_radius(m, l)?;
    }
    let sharp_reference = match which {
        QuotientKind::Q1 => 1.0 / c1(e),
        QuotientKind::Q2 => 1.0 / c2(e)?,
    };
    let results: Vec<Result<f64>> = lambdas
        .par_iter()
        .map(|&l| match which {
            QuotientKind::Q1 => exact_radial_minimum(m, e, l, spec).map(|r| r.q1_min),
            QuotientKind::Q2 => {
                let u = RadialProfile::talenti(*e, l)?;
                norms_report(&u, m, e, spec).map(|r| r.q2)
            }
        })
        .collect();
    let mut q_values = Vec::with_capacity(results.len());
    let mut errors = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(q) => {
                q_values.push(q);
                errors.push(None);
            }
            Err(err) => {
                q_values.push(f64::NAN);
                errors.push(Some(err));
            }
        }
    }
    let mut asymptotic_volume_ratio: f64 = 0.0;
    for &l in lambdas {
        asymptotic_volume_ratio = asymptotic_volume_ratio.max(m.volume_ratio(l)?);
    }
    Ok(ScanResult {
        which,
        limit_estimate: richardson_limit(lambdas, &q_values),
        attainment: classify_attainment(&q_values, sharp_reference),
        lambdas: lambdas.to_vec(),
        q_values,
        errors,
        sharp_reference,
        asymptotic_volume_ratio,
        upper_bound_probe: which == QuotientKind::Q2,
    })
}

/// Value at `lambda = 0` of the polynomial in `lambda^2` through the (up to)
/// three smallest finite grid points.
pub fn richardson_limit(lambdas: &[f64], values: &[f64]) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = lambdas
        .iter()
        .zip(values)
        .filter(|(_, v)| v.is_finite())
        .map(|(&l, &v)| (l * l, v))
        .collect();
    if pts.is_empty() {
        return None;
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.truncate(3);
    // Lagrange interpolation evaluated at x = 0
    let mut total = 0.0;
    for (i, &(xi, yi)) in pts.iter().enumerate() {
        let mut basis = 1.0;
        for (j, &(xj, _)) in pts.iter().enumerate() {
            if i != j {
                basis *= xj / (xj - xi);
            }
        }
        total += basis * yi;
    }
    Some(total)
}

pub fn classify_attainment(values: &[f64], reference: f64) -> Attainment {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() || finite.len() < values.len() {
        return Attainment::Indeterminate;
    }
    if finite.iter().all(|q| (q - reference).abs() < ATTAINMENT_TOL) {
        Attainment::AttainedEverywhere
    } else if finite.iter().all(|q| q - reference > ATTAINMENT_TOL) {
        Attainment::NotAttained
    } else {
        Attainment::Indeterminate
    }
}

/// Which large-volume-balls estimate to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeBound {
    Ms1,
    Ms2,
}

impl FromStr for VolumeBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ms1" => Ok(VolumeBound::Ms1),
            "ms2" => Ok(VolumeBound::Ms2),
            _ => Err(Error::domain(format!("unknown bound '{s}', expected ms1 or ms2"))),
        }
    }
}

impl fmt::Display for VolumeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VolumeBound::Ms1 => "ms1",
            VolumeBound::Ms2 => "ms2",
        })
    }
}

/// Output of [`volume_bound_diagnostics`].
#[derive(Debug, Clone)]
pub struct VolumeBoundReport {
    pub which: VolumeBound,
    pub c: f64,
    /// `(C1/C)^(pn/(p-n))` or `(C2/C)^(1/(1-eta))`.
    pub factor: f64,
    pub radii: Vec<f64>,
    /// `Vol(B(rho)) - factor * omega_n rho^n`.
    pub margins: Vec<f64>,
    pub worst_margin: f64,
    pub worst_radius: f64,
    /// `(lambda, G(lambda))` pairs, ms2 only.
    pub gap_integrals: Vec<(f64, f64)>,
    pub gap_error_bounds: Vec<f64>,
}

impl VolumeBoundReport {
    pub fn holds(&self) -> bool {
        self.worst_margin >= 0.0 && self.gap_integrals.iter().all(|&(_, g)| g >= 0.0)
    }
}

/// Checks `Vol(B(rho)) >= factor * omega_n rho^n` on a grid and, for ms2, the
/// weighted gap `G(lambda) = ∫_0^lambda (Vol(B(rho)) - factor omega_n rho^n) f_lambda(rho) d rho`.
pub fn volume_bound_diagnostics(
    m: &WarpedModel,
    e: &Exponents,
    c: f64,
    which: VolumeBound,
    radii: &[f64],
    lambdas: &[f64],
    spec: &QuadratureSpec,
) -> Result<VolumeBoundReport> {
    check_model(m, e)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::domain(format!("constant C must be positive, got {c}")));
    }
    let factor = match which {
        VolumeBound::Ms1 => (c1(e) / c).powf(e.volume_power_ms1()),
        VolumeBound::Ms2 => (c2(e)? / c).powf(e.volume_power_ms2()),
    };
    let omega = m.omega_n();
    let n = e.n() as i32;
    let margin = |rho: f64| -> Result<f64> { Ok(m.ball_volume(rho)? - factor * omega * rho.powi(n)) };

    let mut margins = Vec::with_capacity(radii.len());
    let (mut worst_margin, mut worst_radius) = (f64::INFINITY, f64::NAN);
    for &rho in radii {
        if !(rho > 0.0 && rho < m.r_max()) {
            return Err(Error::domain(format!("radius {rho} outside (0, {})", m.r_max())));
        }
        let v = margin(rho)?;
        if v < worst_margin {
            worst_margin = v;
            worst_radius = rho;
        }
        margins.push(v);
    }

    let mut gap_integrals = Vec::new();
    let mut gap_error_bounds = Vec::new();
    if which == VolumeBound::Ms2 {
        let left = (1.0 - e.dim()) / (e.p() - 1.0);
        let gspec = spec.with_exponents(left, 0.0);
        for &l in lambdas {
            if !(l > 0.0 && l <= m.r_max()) {
                return Err(Error::domain(format!("lambda {l} outside (0, {}]", m.r_max())));
            }
            let g = integrate_nodes(
                |node: Node| margin(node.x).unwrap_or(f64::NAN) * f_lambda(e, l, node.x, node.from_right),
                0.0,
                l,
                &gspec,
            )
            .map_err(|err| err.context("gap integral"))?;
            gap_integrals.push((l, g.value));
            gap_error_bounds.push(g.error_bound);
        }
    }

    Ok(VolumeBoundReport {
        which,
        c,
        factor,
        radii: radii.to_vec(),
        margins,
        worst_margin,
        worst_radius,
        gap_integrals,
        gap_error_bounds,
    })
}
