//! Sharp Morrey-Sobolev constants and the exponent bundle they depend on.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{beta, ln_gamma};

/// Relative agreement required between the printed and operational forms of `c2`.
pub const C2_CONSISTENCY_TOL: f64 = 1e-6;

/// Dimension `n` and integrability exponent `p > n` with derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    n: usize,
    p: f64,
    p_conj: f64,
    eta: f64,
}

impl Exponents {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("dimension must be at least 2, got {n}")));
        }
        let nf = n as f64;
        if !p.is_finite() || !(p > nf) {
            return Err(Error::domain(format!(
                "exponent p must be finite and exceed the dimension {n}, got {p}"
            )));
        }
        let p_conj = p / (p - 1.0);
        let eta = nf * p / (nf * p + p - nf);
        Ok(Exponents { n, p, p_conj, eta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Conjugate exponent `p / (p - 1)`.
    pub fn p_conj(&self) -> f64 {
        self.p_conj
    }

    /// Interpolation exponent `np / (np + p - n)` of the L¹-bound inequality.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `(p - n) / (p - 1)`, the power in the support-bound extremal.
    pub fn power_exponent(&self) -> f64 {
        (self.p - self.dim()) / (self.p - 1.0)
    }

    /// `(n - 1) / (p - 1)`: the weight `psi^(-(n-1)/(p-1))` of the radial
    /// Euler-Lagrange equation and, negated, the endpoint exponent of every
    /// extremal's gradient integrand at the origin.
    pub fn radial_weight_exponent(&self) -> f64 {
        (self.dim() - 1.0) / (self.p - 1.0)
    }

    /// First beta parameter `(1 - n) p' / n + 1` of the L¹-bound extremal.
    pub fn talenti_a(&self) -> f64 {
        (1.0 - self.dim()) * self.p_conj / self.dim() + 1.0
    }

    /// `pn / (p - n)`, the power of `C1/C` in the large-volume-balls bound.
    pub fn volume_power_ms1(&self) -> f64 {
        self.p * self.dim() / (self.p - self.dim())
    }

    /// `1 / (1 - eta)`, the power of `C2/C` in the L¹-bound volume estimates.
    pub fn volume_power_ms2(&self) -> f64 {
        1.0 / (1.0 - self.eta)
    }
}

/// Shorthand for [`Exponents::new`].
pub fn make_exponents(n: usize, p: f64) -> Result<Exponents> {
    Exponents::new(n, p)
}

/// Volume of the Euclidean unit ball in dimension `n`.
pub fn omega(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("omega requires n >= 1"));
    }
    let half = n as f64 / 2.0;
    Ok((half * PI.ln() - ln_gamma(half + 1.0)?).exp())
}

pub(crate) fn omega_unchecked(n: usize) -> f64 {
    omega(n).expect("dimension validated by caller")
}

/// Sharp constant of the support-bound inequality.
pub fn c1(e: &Exponents) -> f64 {
    let n = e.dim();
    let p = e.p();
    n.powf(-1.0 / p)
        * omega_unchecked(e.n()).powf(-1.0 / n)
        * ((p - 1.0) / (p - n)).powf(1.0 / e.p_conj())
}

/// Closed-form norms of the Euclidean L¹-bound extremal with support radius one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TalentiNorms {
    pub sup: f64,
    pub l1: f64,
    pub grad_lp: f64,
}

impl TalentiNorms {
    /// Norms at support radius `lambda`, from the unit-radius values by scaling.
    pub fn at_radius(e: &Exponents, lambda: f64) -> Result<Self> {
        let n = e.dim();
        let pc = e.p_conj();
        let a = e.talenti_a();
        let omega_n = omega_unchecked(e.n());
        Ok(TalentiNorms {
            sup: lambda.powf(pc) / n * beta(a, pc)?,
            l1: lambda.powf(n + pc) * omega_n / n * beta(a + 1.0, pc)?,
            grad_lp: (lambda.powf(n + pc) * omega_n * beta(a, pc + 1.0)?).powf(1.0 / e.p()),
        })
    }

    pub fn quotient(&self, e: &Exponents) -> f64 {
        self.l1.powf(1.0 - e.eta()) * self.grad_lp.powf(e.eta()) / self.sup
    }
}

/// `C2` as the reciprocal quotient of the exact Euclidean extremal.
pub fn c2_operational(e: &Exponents) -> Result<f64> {
    Ok(1.0 / TalentiNorms::at_radius(e, 1.0)?.quotient(e))
}

/// `C2` from the printed closed form. The exponent `((n-1)p' - n)/(n + p')`
/// applies to `(1/n - 1/p)` alone; `(1/n + 1/p')` enters linearly.
pub fn c2_printed(e: &Exponents) -> Result<f64> {
    let n = e.dim();
    let p = e.p();
    let pc = e.p_conj();
    let omega_n = omega_unchecked(e.n());
    let prefactor = (n * omega_n.powf(1.0 / n)).powf(-n * pc / (n + pc));
    let middle = (1.0 / n + 1.0 / pc) * (1.0 / n - 1.0 / p).powf(((n - 1.0) * pc - n) / (n + pc));
    let tail = beta(e.talenti_a(), pc + 1.0)?.powf(n / (n + pc));
    Ok(prefactor * middle * tail)
}

/// Sharp constant of the L¹-bound inequality, validated against the printed form.
pub fn c2(e: &Exponents) -> Result<f64> {
    let operational = c2_operational(e)?;
    let printed = c2_printed(e)?;
    let rel = ((operational - printed) / operational).abs();
    if rel > C2_CONSISTENCY_TOL {
        return Err(Error::Consistency(format!(
            "C2 closed form {printed} disagrees with extremal quotient {operational} (relative {rel:e})"
        )));
    }
    Ok(operational)
}

/// The sharp constants for one exponent bundle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpConstants {
    pub c1: f64,
    pub c2: f64,
    pub omega_n: f64,
}

impl SharpConstants {
    pub fn new(e: &Exponents) -> Result<Self> {
        Ok(SharpConstants {
            c1: c1(e),
            c2: c2(e)?,
            omega_n: omega(e.n())?,
        })
    }
}
