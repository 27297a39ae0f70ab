//! Real part of the outgoing Helmholtz fundamental solution.
//!
//! `Phi(x) = (i/4) (2 pi |x|)^{(2-N)/2} H^(1)_{(N-2)/2}(|x|)` and
//! `Psi = Re Phi`. Orders 1/2 and 3/2 have closed forms; order 1 uses the
//! ascending series up to `x = 12` and the Hankel asymptotic expansion above.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField};
use crate::resolvent::ResolventPlan;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 12.0;

/// `H^(1)_nu(x) = J_nu(x) + i Y_nu(x)` for `nu` in {1/2, 1, 3/2}.
pub fn hankel_first_kind(nu: f64, x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainError(format!("Hankel argument {x} must be positive")));
    }
    let pref = (2.0 / (PI * x)).sqrt();
    let e = Complex64::from_polar(1.0, x);
    if nu == 0.5 {
        Ok(Complex64::new(0.0, -pref) * e)
    } else if nu == 1.5 {
        Ok(-pref * e * Complex64::new(1.0, 1.0 / x))
    } else if nu == 1.0 {
        Ok(if x <= SERIES_LIMIT { bessel1_series(x) } else { hankel_asymptotic(1.0, x) })
    } else {
        Err(Error::UnsupportedOrder(nu))
    }
}

/// Ascending series for `(J_1, Y_1)`.
fn bessel1_series(x: f64) -> Complex64 {
    let h = x / 2.0;
    let h2 = h * h;
    // term_k = (-1)^k h^{2k+1} / (k! (k+1)!)
    let mut term = h;
    let mut digamma_k1 = -EULER_GAMMA; // psi(k + 1)
    let mut digamma_k2 = 1.0 - EULER_GAMMA; // psi(k + 2)
    let mut j = 0.0;
    let mut s = 0.0;
    for k in 0..200 {
        j += term;
        s += (digamma_k1 + digamma_k2) * term;
        let kf = k as f64;
        term *= -h2 / ((kf + 1.0) * (kf + 2.0));
        digamma_k1 += 1.0 / (kf + 1.0);
        digamma_k2 += 1.0 / (kf + 2.0);
        if term.abs() < 1e-18 * j.abs().max(1e-300) && k > 2 {
            break;
        }
    }
    let y = 2.0 / PI * j * h.ln() - 2.0 / (PI * x) - s / PI;
    Complex64::new(j, y)
}

/// `sqrt(2/(pi x)) e^{i(x - nu pi/2 - pi/4)} sum_k i^k a_k(nu) / x^k`,
/// truncated at the smallest term.
fn hankel_asymptotic(nu: f64, x: f64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut sum = Complex64::new(1.0, 0.0);
    let mut a = 1.0;
    let mut ik = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        a *= (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if a.abs() >= prev || a == 0.0 {
            break;
        }
        prev = a.abs();
        ik *= Complex64::new(0.0, 1.0);
        sum += ik * a;
    }
    (2.0 / (PI * x)).sqrt() * Complex64::from_polar(1.0, x - nu * FRAC_PI_2 - FRAC_PI_4) * sum
}

/// `Psi(r) = Re Phi` for `|x| = r`, `N` in {3, 4, 5}.
pub fn psi_value(dim: usize, r: f64) -> Result<f64> {
    if !(3..=5).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !(r > 0.0) {
        return Err(Error::DomainError(format!("radius {r} must be positive")));
    }
    if dim == 3 {
        return Ok(r.cos() / (4.0 * PI * r));
    }
    let nu = (dim as f64 - 2.0) / 2.0;
    let h = hankel_first_kind(nu, r)?;
    Ok(-0.25 * (2.0 * PI * r).powf(-nu) * h.im)
}

/// Radial frequency profile used to split the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralCutoff {
    Zero,
    /// Smooth, non-increasing in `||xi| - 1|`; 1 up to 1/6, 0 from 1/4.
    Annulus,
}

impl SpectralCutoff {
    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            SpectralCutoff::Zero => 0.0,
            SpectralCutoff::Annulus => {
                let s = (xi - 1.0).abs();
                let t = (s - 1.0 / 6.0) * 12.0;
                if t <= 0.0 {
                    1.0
                } else if t >= 1.0 {
                    0.0
                } else {
                    let f = |u: f64| (-1.0 / u).exp();
                    f(1.0 - t) / (f(1.0 - t) + f(t))
                }
            }
        }
    }
}

/// Empirical constants of the near-shell / far-shell kernel split.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub dim: usize,
    pub half_width: f64,
    pub samples_per_axis: usize,
    pub delta: f64,
    pub cutoff: SpectralCutoff,
    /// Grid frequencies with `||xi| - 1| <= 1/4`.
    pub annulus_frequencies: usize,
    /// Smallest `C` with `|Phi_1(x)| <= C (1 + |x|)^{(1-N)/2}`.
    pub c_near_shell: f64,
    /// Smallest `C` with `|Phi_2(x)| <= C min(|x|^{2-N}, |x|^{-N})`.
    pub c_far_shell: f64,
}

/// Samples of the discrete kernel `R delta_0` on the grid, in storage order.
pub fn kernel_samples(plan: &ResolventPlan) -> Result<ScalarField> {
    apply_symbol_to_spike(plan, plan.multiplier())
}

fn apply_symbol_to_spike(plan: &ResolventPlan, sym: &[f64]) -> Result<ScalarField> {
    let grid = *plan.grid();
    let mut spike = vec![0.0; grid.len()];
    spike[origin_index(&grid)] = 1.0 / grid.cell_volume();
    let (out, _) = plan.apply_symbol(sym, &spike);
    ScalarField::new(grid, out)
}

/// Flat index of the grid point at the origin.
pub fn origin_index(grid: &Grid) -> usize {
    grid.flat_index(&vec![grid.samples_per_axis() / 2; grid.dim()])
}

/// Splits the discrete kernel into `Phi_1` (multiplier times the cutoff)
/// and `Phi_2 = Psi - Phi_1` and reports the empirical constants, origin
/// excluded.
pub fn verify_band_split_bounds(plan: &ResolventPlan, cutoff: SpectralCutoff) -> Result<BoundReport> {
    let grid = *plan.grid();
    let dim = grid.dim();
    if dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let radii: Vec<f64> = grid.frequency_squares().into_iter().map(f64::sqrt).collect();
    let annulus = radii.iter().filter(|&&r| (r - 1.0).abs() <= 0.25).count();
    if annulus < 8 {
        return Err(Error::ResolutionError(annulus));
    }
    let sym1: Vec<f64> = plan.multiplier().iter().zip(&radii).map(|(&m, &r)| m * cutoff.eval(r)).collect();
    let psi = kernel_samples(plan)?;
    let phi1 = apply_symbol_to_spike(plan, &sym1)?;
    let phi2 = psi.sub(&phi1)?;
    let origin = origin_index(&grid);
    let nf = dim as f64;
    let mut c1: f64 = 0.0;
    let mut c2: f64 = 0.0;
    for i in 0..grid.len() {
        if i == origin {
            continue;
        }
        let r = grid.point(i).iter().map(|x| x * x).sum::<f64>().sqrt();
        c1 = c1.max(phi1.values()[i].abs() * (1.0 + r).powf((nf - 1.0) / 2.0));
        let env = r.powf(2.0 - nf).min(r.powf(-nf));
        c2 = c2.max(phi2.values()[i].abs() / env);
    }
    Ok(BoundReport {
        dim,
        half_width: grid.half_width(),
        samples_per_axis: grid.samples_per_axis(),
        delta: plan.delta(),
        cutoff,
        annulus_frequencies: annulus,
        c_near_shell: c1,
        c_far_shell: c2,
    })
}
