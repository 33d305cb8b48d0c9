//! Rotationally symmetric model manifolds `dr² + psi(r)² g_{S^{n-1}}`.
//!
//! Geodesic spheres about the pole have area `n omega_n psi(r)^(n-1)` and
//! balls have volume equal to the integral of that area. The built-in space
//! forms use closed forms for both; custom warps fall back to quadrature.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::constants::omega;
use crate::error::{Error, Result};
use crate::specfun::{integrate, QuadratureSpec};

/// Tolerance below which a ratio change counts as numerical noise when the
/// monotonicity verdict is formed.
pub const MONOTONICITY_TOL: f64 = 1e-10;

/// Sign class of the curvature, as used by the volume comparison theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureClass {
    CartanHadamard,
    NonnegativeRicci,
    /// Zero curvature; belongs to both other classes.
    Flat,
}

impl CurvatureClass {
    pub fn is_cartan_hadamard(self) -> bool {
        matches!(self, CurvatureClass::CartanHadamard | CurvatureClass::Flat)
    }

    pub fn is_nonnegative_ricci(self) -> bool {
        matches!(self, CurvatureClass::NonnegativeRicci | CurvatureClass::Flat)
    }
}

impl fmt::Display for CurvatureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurvatureClass::CartanHadamard => "cartan-hadamard",
            CurvatureClass::NonnegativeRicci => "nonnegative-ricci",
            CurvatureClass::Flat => "flat",
        })
    }
}

pub type WarpFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Warp {
    Euclidean,
    Hyperbolic { kappa: f64 },
    Sphere { kappa: f64 },
    Custom { psi: WarpFn, dpsi: WarpFn },
}

impl fmt::Debug for Warp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warp::Euclidean => f.write_str("Euclidean"),
            Warp::Hyperbolic { kappa } => write!(f, "Hyperbolic {{ kappa: {kappa} }}"),
            Warp::Sphere { kappa } => write!(f, "Sphere {{ kappa: {kappa} }}"),
            Warp::Custom { .. } => f.write_str("Custom"),
        }
    }
}

/// Which built-in space form to construct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Euclidean,
    Hyperbolic { kappa: f64 },
    Sphere { kappa: f64 },
}

#[derive(Debug, Clone)]
pub struct WarpedModel {
    n: usize,
    warp: Warp,
    curvature_class: CurvatureClass,
    r_max: f64,
    label: String,
    omega_n: f64,
}

/// Builds a built-in model of dimension `n`.
pub fn make_model(kind: ModelKind, n: usize) -> Result<WarpedModel> {
    match kind {
        ModelKind::Euclidean => WarpedModel::euclidean(n),
        ModelKind::Hyperbolic { kappa } => WarpedModel::hyperbolic(n, kappa),
        ModelKind::Sphere { kappa } => WarpedModel::sphere(n, kappa),
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("model dimension must be at least 2, got {n}")));
    }
    Ok(())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain(format!("curvature scale must be positive, got {kappa}")));
    }
    Ok(())
}

impl WarpedModel {
    pub fn euclidean(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(WarpedModel {
            n,
            warp: Warp::Euclidean,
            curvature_class: CurvatureClass::Flat,
            r_max: f64::INFINITY,
            label: format!("euclidean:{n}"),
            omega_n: omega(n)?,
        })
    }

    /// Space form of constant curvature `-kappa`.
    pub fn hyperbolic(n: usize, kappa: f64) -> Result<Self> {
        check_dimension(n)?;
        check_kappa(kappa)?;
        Ok(WarpedModel {
            n,
            warp: Warp::Hyperbolic { kappa },
            curvature_class: CurvatureClass::CartanHadamard,
            r_max: f64::INFINITY,
            label: format!("hyperbolic:{n}:{kappa}"),
            omega_n: omega(n)?,
        })
    }

    /// Round sphere of curvature `kappa`, valid up to the antipode `pi / sqrt(kappa)`.
    pub fn sphere(n: usize, kappa: f64) -> Result<Self> {
        check_dimension(n)?;
        check_kappa(kappa)?;
        Ok(WarpedModel {
            n,
            warp: Warp::Sphere { kappa },
            curvature_class: CurvatureClass::NonnegativeRicci,
            r_max: std::f64::consts::PI / kappa.sqrt(),
            label: format!("sphere:{n}:{kappa}"),
            omega_n: omega(n)?,
        })
    }

    /// A model with a user-supplied warp and its derivative.
    ///
    /// The warp must be positive on `(0, r_max)` and satisfy `psi(r)/r -> 1`
    /// at the pole; both are checked numerically.
    pub fn custom(
        n: usize,
        psi: WarpFn,
        dpsi: WarpFn,
        curvature_class: CurvatureClass,
        r_max: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        check_dimension(n)?;
        if !(r_max > 0.0) {
            return Err(Error::domain(format!("r_max must be positive, got {r_max}")));
        }
        let r0 = 1e-6;
        if r0 >= r_max || ((psi(r0) / r0) - 1.0).abs() > 1e-3 || (dpsi(r0) - 1.0).abs() > 1e-3 {
            return Err(Error::domain(
                "custom warp must satisfy psi(r)/r -> 1 and psi'(0) = 1 at the pole",
            ));
        }
        let span = r_max.min(10.0);
        for i in 1..100 {
            let r = span * i as f64 / 100.0;
            if r < r_max && !(psi(r) > 0.0) {
                return Err(Error::domain(format!("custom warp is not positive at r = {r}")));
            }
        }
        Ok(WarpedModel {
            n,
            warp: Warp::Custom { psi, dpsi },
            curvature_class,
            r_max,
            label: label.into(),
            omega_n: omega(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn curvature_class(&self) -> CurvatureClass {
        self.curvature_class
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn is_compact(&self) -> bool {
        self.r_max.is_finite()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn warp_kind(&self) -> &Warp {
        &self.warp
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.warp, Warp::Euclidean)
    }

    pub fn omega_n(&self) -> f64 {
        self.omega_n
    }

    /// Area of the unit (n-1)-sphere, `n omega_n`.
    pub fn unit_sphere_area(&self) -> f64 {
        self.n as f64 * self.omega_n
    }

    /// The warping function `psi(r)`.
    pub fn warp(&self, r: f64) -> f64 {
        match &self.warp {
            Warp::Euclidean => r,
            Warp::Hyperbolic { kappa } => {
                let s = kappa.sqrt();
                (s * r).sinh() / s
            }
            Warp::Sphere { kappa } => {
                let s = kappa.sqrt();
                (s * r).sin() / s
            }
            Warp::Custom { psi, .. } => psi(r),
        }
    }

    /// The derivative `psi'(r)`.
    pub fn warp_derivative(&self, r: f64) -> f64 {
        match &self.warp {
            Warp::Euclidean => 1.0,
            Warp::Hyperbolic { kappa } => (kappa.sqrt() * r).cosh(),
            Warp::Sphere { kappa } => (kappa.sqrt() * r).cos(),
            Warp::Custom { dpsi, .. } => dpsi(r),
        }
    }

    /// `psi(r)^(n-1)`, the radial density of the volume form.
    pub fn density(&self, r: f64) -> f64 {
        self.warp(r).powi(self.n as i32 - 1)
    }

    pub(crate) fn area_unchecked(&self, r: f64) -> f64 {
        self.unit_sphere_area() * self.density(r)
    }

    /// Area of the geodesic sphere of radius `r`.
    pub fn sphere_area(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < self.r_max) {
            return Err(Error::domain(format!(
                "sphere radius {r} outside (0, {}) for {}",
                self.r_max, self.label
            )));
        }
        Ok(self.area_unchecked(r))
    }

    /// Volume of the geodesic ball of radius `rho`.
    pub fn ball_volume(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0 && rho <= self.r_max) || rho.is_infinite() {
            return Err(Error::domain(format!(
                "ball radius {rho} outside [0, {}] for {}",
                self.r_max, self.label
            )));
        }
        self.volume_unchecked(rho)
    }

    pub(crate) fn volume_unchecked(&self, rho: f64) -> Result<f64> {
        if rho == 0.0 {
            return Ok(0.0);
        }
        let n = self.n;
        let m = n - 1;
        let nw = self.unit_sphere_area();
        Ok(match &self.warp {
            Warp::Euclidean => self.omega_n * rho.powi(n as i32),
            Warp::Hyperbolic { kappa } => {
                let s = kappa.sqrt();
                nw * power_integral(m, s * rho, Trig::Hyperbolic) / s.powi(n as i32)
            }
            Warp::Sphere { kappa } => {
                let s = kappa.sqrt();
                nw * power_integral(m, s * rho, Trig::Circular) / s.powi(n as i32)
            }
            Warp::Custom { .. } => {
                // density ~ r^(n-1) at the pole: smooth, no substitution needed
                nw * integrate(|r| self.density(r), 0.0, rho, &QuadratureSpec::default())
                    .map_err(|e| e.context("custom ball volume"))?
            }
        })
    }

    /// Total volume: finite for compact models, infinite otherwise.
    pub fn total_volume(&self) -> Result<f64> {
        if self.is_compact() {
            self.volume_unchecked(self.r_max)
        } else {
            Ok(f64::INFINITY)
        }
    }

    /// `Vol(B(rho)) / (omega_n rho^n)`.
    pub fn volume_ratio(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::domain("volume ratio needs a positive radius"));
        }
        Ok(self.ball_volume(rho)? / (self.omega_n * rho.powi(self.n as i32)))
    }

    /// Radius whose geodesic ball has volume `v`.
    pub fn inverse_ball_volume(&self, v: f64) -> Result<f64> {
        if !(v >= 0.0) {
            return Err(Error::domain(format!("volume must be non-negative, got {v}")));
        }
        if v == 0.0 {
            return Ok(0.0);
        }
        if self.is_euclidean() {
            return Ok((v / self.omega_n).powf(1.0 / self.n as f64));
        }
        let total = self.total_volume()?;
        if v == total {
            return Ok(self.r_max);
        }
        if v > total {
            return Err(Error::Range(format!(
                "volume {v} exceeds total volume {total} of {}",
                self.label
            )));
        }
        let mut lo = 0.0;
        let mut hi = if self.is_compact() {
            self.r_max
        } else {
            let mut h = 1.0;
            while self.volume_unchecked(h)? < v {
                h *= 2.0;
            }
            h
        };
        // bisect to machine resolution; well within the 1e-12 radius target
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo < 1e-14 {
                break;
            }
            if self.volume_unchecked(mid)? < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `Area(dB) - n omega_n^(1/n) Vol(B)^((n-1)/n)` for the ball of radius `rho`.
    pub fn isoperimetric_gap(&self, rho: f64) -> Result<f64> {
        let area = self.sphere_area(rho)?;
        let vol = self.ball_volume(rho)?;
        let n = self.n as f64;
        Ok(area - n * self.omega_n.powf(1.0 / n) * vol.powf((n - 1.0) / n))
    }

    /// Volume ratios on a grid together with a monotonicity verdict.
    pub fn volume_monotonicity_report(&self, grid: &[f64]) -> Result<VolumeReport> {
        if grid.is_empty() {
            return Err(Error::domain("radius grid is empty"));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("radius grid must be strictly increasing"));
        }
        if !(grid[0] > 0.0) || !(grid[grid.len() - 1] < self.r_max) {
            return Err(Error::domain(format!(
                "radius grid must lie in (0, {})",
                self.r_max
            )));
        }
        let volumes = grid
            .iter()
            .map(|&r| self.ball_volume(r))
            .collect::<Result<Vec<_>>>()?;
        let ratios: Vec<f64> = grid
            .iter()
            .zip(&volumes)
            .map(|(&r, &v)| v / (self.omega_n * r.powi(self.n as i32)))
            .collect();
        Ok(VolumeReport::from_ratios(
            grid.to_vec(),
            volumes,
            ratios,
            self.curvature_class,
        ))
    }
}

impl FromStr for WarpedModel {
    type Err = Error;

    /// Parses `euclidean:<n>`, `hyperbolic:<n>:<kappa>` or `sphere:<n>:<kappa>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::domain(format!("unrecognised model designation '{s}'"));
        let n: usize = parts.get(1).ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let kappa = || -> Result<f64> {
            match parts.get(2) {
                Some(k) if parts.len() == 3 => k.parse().map_err(|_| bad()),
                _ => Err(bad()),
            }
        };
        match parts[0] {
            "euclidean" if parts.len() == 2 => WarpedModel::euclidean(n),
            "hyperbolic" => WarpedModel::hyperbolic(n, kappa()?),
            "sphere" => WarpedModel::sphere(n, kappa()?),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy)]
enum Trig {
    Hyperbolic,
    Circular,
}

const SERIES_TERMS: usize = 24;

/// `∫_0^s sinh^m(t) dt` or `∫_0^s sin^m(t) dt`.
fn power_integral(m: usize, s: f64, trig: Trig) -> f64 {
    if s <= 1.0 {
        power_integral_series(m, s, trig)
    } else {
        power_integral_reduction(m, s, trig)
    }
}

/// Power series of `(sinh t / t)^m` (or `sin`) integrated against `t^m`.
fn power_integral_series(m: usize, s: f64, trig: Trig) -> f64 {
    // coefficients of sinh(t)/t in powers of t²
    let mut base = [0.0; SERIES_TERMS];
    let mut fact = 1.0;
    for (j, c) in base.iter_mut().enumerate() {
        if j > 0 {
            fact *= ((2 * j) * (2 * j + 1)) as f64;
        }
        let sign = match trig {
            Trig::Circular if j % 2 == 1 => -1.0,
            _ => 1.0,
        };
        *c = sign / fact;
    }
    let mut poly = [0.0; SERIES_TERMS];
    poly[0] = 1.0;
    for _ in 0..m {
        let mut next = [0.0; SERIES_TERMS];
        for (i, &a) in poly.iter().enumerate() {
            for (j, &b) in base.iter().enumerate().take(SERIES_TERMS - i) {
                next[i + j] += a * b;
            }
        }
        poly = next;
    }
    let s2 = s * s;
    let mut power = s.powi(m as i32 + 1);
    let mut sum = 0.0;
    for (j, c) in poly.iter().enumerate() {
        sum += c * power / (m + 2 * j + 1) as f64;
        power *= s2;
    }
    sum
}

fn power_integral_reduction(m: usize, s: f64, trig: Trig) -> f64 {
    let (sn, cs) = match trig {
        Trig::Hyperbolic => (s.sinh(), s.cosh()),
        Trig::Circular => (s.sin(), s.cos()),
    };
    let half = match trig {
        Trig::Hyperbolic => (0.5 * s).sinh(),
        Trig::Circular => (0.5 * s).sin(),
    };
    // J_0 = s, J_1 = cosh s - 1 (resp. 1 - cos s), both as 2 sinh²(s/2) / 2 sin²(s/2)
    let mut j_even = s;
    let mut j_odd = 2.0 * half * half;
    let start = if m.is_multiple_of(2) { 2 } else { 3 };
    let mut k = start;
    while k <= m {
        let kf = k as f64;
        let prev = if k % 2 == 0 { j_even } else { j_odd };
        let next = match trig {
            // J_k = sinh^{k-1} cosh / k - (k-1)/k J_{k-2}
            Trig::Hyperbolic => sn.powi(k as i32 - 1) * cs / kf - (kf - 1.0) / kf * prev,
            // J_k = -sin^{k-1} cos / k + (k-1)/k J_{k-2}
            Trig::Circular => -sn.powi(k as i32 - 1) * cs / kf + (kf - 1.0) / kf * prev,
        };
        if k % 2 == 0 {
            j_even = next;
        } else {
            j_odd = next;
        }
        k += 2;
    }
    if m.is_multiple_of(2) {
        j_even
    } else {
        j_odd
    }
}

/// Direction in which the volume ratio moves along a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Constant,
    Nondecreasing,
    Nonincreasing,
    Neither,
}

impl fmt::Display for Monotonicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monotonicity::Constant => "constant",
            Monotonicity::Nondecreasing => "nondecreasing",
            Monotonicity::Nonincreasing => "nonincreasing",
            Monotonicity::Neither => "neither",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeReport {
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
    /// `Vol(B(rho)) / (omega_n rho^n)` per radius.
    pub ratios: Vec<f64>,
    pub verdict: Monotonicity,
    /// Largest drop of the ratio between consecutive radii.
    pub max_decrease: f64,
    /// Largest rise of the ratio between consecutive radii.
    pub max_increase: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Ratio at the smallest radius, which should approach one.
    pub small_radius_ratio: f64,
    /// Largest violation of the comparison expected for the curvature class:
    /// monotone direction plus the bound against one.
    pub max_violation: f64,
}

impl VolumeReport {
    fn from_ratios(
        radii: Vec<f64>,
        volumes: Vec<f64>,
        ratios: Vec<f64>,
        class: CurvatureClass,
    ) -> Self {
        let mut max_decrease: f64 = 0.0;
        let mut max_increase: f64 = 0.0;
        for w in ratios.windows(2) {
            let d = w[1] - w[0];
            max_increase = max_increase.max(d);
            max_decrease = max_decrease.max(-d);
        }
        let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let verdict = match (
            max_decrease <= MONOTONICITY_TOL,
            max_increase <= MONOTONICITY_TOL,
        ) {
            (true, true) => Monotonicity::Constant,
            (true, false) => Monotonicity::Nondecreasing,
            (false, true) => Monotonicity::Nonincreasing,
            (false, false) => Monotonicity::Neither,
        };
        let max_violation = match class {
            CurvatureClass::CartanHadamard => max_decrease.max(1.0 - min_ratio).max(0.0),
            CurvatureClass::NonnegativeRicci => max_increase.max(max_ratio - 1.0).max(0.0),
            CurvatureClass::Flat => (1.0 - min_ratio).abs().max((max_ratio - 1.0).abs()),
        };
        VolumeReport {
            small_radius_ratio: ratios[0],
            radii,
            volumes,
            ratios,
            verdict,
            max_decrease,
            max_increase,
            min_ratio,
            max_ratio,
            max_violation,
        }
    }
}
