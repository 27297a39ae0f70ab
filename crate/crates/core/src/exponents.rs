//! Exponent bookkeeping for the Hamiltonian system.
//!
//! The admissible region is `p, q > 2N/(N-1)` together with the strict band
//! `(N-2)/N < 1/p + 1/q < (N-1)/(N+1)`. Only finite exponents are supported.

use serde::Serialize;

use crate::error::{Error, RegionReason, Result};

/// A validated exponent pair together with every derived exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibleExponents {
    pub dim: usize,
    pub p: f64,
    pub q: f64,
    pub p_dual: f64,
    pub q_dual: f64,
    /// Decay rate of the nonlocal interaction between separated supports.
    pub lambda: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl AdmissibleExponents {
    /// Amplitude power of `u` in the frequency frame, `-beta1 > 0`.
    pub fn amplitude_power_u(&self) -> f64 {
        -self.beta1
    }

    pub fn amplitude_power_v(&self) -> f64 {
        -self.beta2
    }
}

/// Validates `(N, p, q)`; boundary points are rejected.
pub fn check_admissible(dim: usize, p: f64, q: f64) -> Result<AdmissibleExponents> {
    if dim < 3 || !p.is_finite() || !q.is_finite() || p <= 1.0 || q <= 1.0 {
        return Err(Error::RegionViolation(RegionReason::BadInput));
    }
    let n = dim as f64;
    let lower = 2.0 * n / (n - 1.0);
    if !(p > lower) {
        return Err(Error::RegionViolation(RegionReason::BelowLowerP));
    }
    if !(q > lower) {
        return Err(Error::RegionViolation(RegionReason::BelowLowerQ));
    }
    let s = 1.0 / p + 1.0 / q;
    if !(s > (n - 2.0) / n) {
        return Err(Error::RegionViolation(RegionReason::HyperbolaLow));
    }
    if !(s < (n - 1.0) / (n + 1.0)) {
        return Err(Error::RegionViolation(RegionReason::HyperbolaHigh));
    }
    let (beta1, beta2) = rescaling_exponents(p, q)?;
    Ok(AdmissibleExponents {
        dim,
        p,
        q,
        p_dual: dual_exponent(p),
        q_dual: dual_exponent(q),
        lambda: lambda_unchecked(n, p, q),
        beta1,
        beta2,
    })
}

fn lambda_unchecked(n: f64, p: f64, q: f64) -> f64 {
    let half = (1.0 - n) / 2.0;
    let a = n / p + half;
    let b = n / q + half;
    let c = half + (n + 1.0) / 2.0 * (1.0 / p + 1.0 / q);
    -a.max(b).max(c)
}

/// Decay exponent `lambda(p, q)` of the separated-support interaction bound.
pub fn decay_exponent(dim: usize, p: f64, q: f64) -> Result<f64> {
    check_admissible(dim, p, q).map(|e| e.lambda)
}

/// Rescaling powers `(beta1, beta2) = (2p, 2q) / (1 - (q-1)(p-1))`.
pub fn rescaling_exponents(p: f64, q: f64) -> Result<(f64, f64)> {
    let denom = 1.0 - (q - 1.0) * (p - 1.0);
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateScaling);
    }
    Ok((2.0 * p / denom, 2.0 * q / denom))
}

/// Hölder conjugate `r / (r - 1)`.
pub fn dual_exponent(r: f64) -> f64 {
    r / (r - 1.0)
}
