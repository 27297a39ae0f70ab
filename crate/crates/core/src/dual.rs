//! Dual energy `J(psi, phi) = A/q' + B/p' - C/2` on `L^{q'} x L^{p'}`.
//!
//! `A = ||psi||_{q'}^{q'}`, `B = ||phi||_{p'}^{p'}` and
//! `C = 2 <psi, K_{q,p} phi>` with `K_{q,p} phi = Q^{1/q} R(P^{1/p} phi)`.
//! Each state evaluation costs one paired transform, which also yields both
//! Birman-Schwinger images needed by the gradient. Scaling a state rescales
//! every cached quantity exactly, so Nehari projection is free.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::AdmissibleExponents;
use crate::field::{dot, signed_pow, CoefficientField, Grid, ScalarField};
use crate::resolvent::ResolventPlan;

/// One instance of the dual problem with dilated coefficients.
#[derive(Debug, Clone)]
pub struct DualProblem {
    pub exponents: AdmissibleExponents,
    pub p_coef: CoefficientField,
    pub q_coef: CoefficientField,
    plan: Arc<ResolventPlan>,
    /// `P^{1/p}` samples.
    wp: Vec<f64>,
    /// `Q^{1/q}` samples.
    wq: Vec<f64>,
}

/// A dual state with its cached energy ingredients.
#[derive(Debug, Clone)]
pub struct DualPair {
    psi: ScalarField,
    phi: ScalarField,
    a: f64,
    b: f64,
    c: f64,
    /// `K_{q,p} phi`, pairs with `psi`.
    k_phi: Vec<f64>,
    /// `K_{p,q} psi`, pairs with `phi`.
    k_psi: Vec<f64>,
}

impl DualPair {
    pub fn psi(&self) -> &ScalarField {
        &self.psi
    }

    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }

    /// `||psi||_{q'}^{q'}`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// `||phi||_{p'}^{p'}`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Interaction `2 <psi, K_{q,p} phi>`.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn grid(&self) -> &Grid {
        self.psi.grid()
    }

    pub fn is_zero(&self) -> bool {
        self.psi.values().iter().all(|&v| v == 0.0) && self.phi.values().iter().all(|&v| v == 0.0)
    }
}

impl DualProblem {
    pub fn new(
        exponents: AdmissibleExponents,
        p_coef: CoefficientField,
        q_coef: CoefficientField,
        plan: Arc<ResolventPlan>,
    ) -> Result<Self> {
        if p_coef.grid() != plan.grid() || q_coef.grid() != plan.grid() {
            return Err(Error::GridMismatch);
        }
        for c in [&p_coef, &q_coef] {
            if !(c.floor > 0.0) {
                return Err(Error::FloorViolation { value: c.floor, floor: c.floor });
            }
        }
        let wp = p_coef.power(1.0 / exponents.p).into_values();
        let wq = q_coef.power(1.0 / exponents.q).into_values();
        Ok(DualProblem { exponents, p_coef, q_coef, plan, wp, wq })
    }

    pub fn plan(&self) -> &Arc<ResolventPlan> {
        &self.plan
    }

    pub fn grid(&self) -> &Grid {
        self.plan.grid()
    }

    /// `(q', p')`.
    pub fn duals(&self) -> (f64, f64) {
        (self.exponents.q_dual, self.exponents.p_dual)
    }

    /// Evaluates all cached quantities of `(psi, phi)`.
    pub fn state(&self, psi: ScalarField, phi: ScalarField) -> Result<DualPair> {
        if psi.grid() != self.grid() || phi.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        let (qd, pd) = self.duals();
        let in_phi: Vec<f64> = phi.values().par_iter().zip(&self.wp).map(|(v, w)| v * w).collect();
        let in_psi: Vec<f64> = psi.values().par_iter().zip(&self.wq).map(|(v, w)| v * w).collect();
        let (r_phi, r_psi) = self.plan.apply_symbol_pair(self.plan.multiplier(), &in_phi, &in_psi);
        let k_phi: Vec<f64> = r_phi.par_iter().zip(&self.wq).map(|(v, w)| v * w).collect();
        let k_psi: Vec<f64> = r_psi.par_iter().zip(&self.wp).map(|(v, w)| v * w).collect();
        let hn = self.grid().cell_volume();
        let c = 2.0 * dot(psi.values(), &k_phi) * hn;
        let a = psi.lp_norm_pow_fast(qd);
        let b = phi.lp_norm_pow_fast(pd);
        if !c.is_finite() || !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite(0));
        }
        Ok(DualPair { psi, phi, a, b, c, k_phi, k_psi })
    }

    /// `(alpha psi, beta phi)` with caches rescaled, no transform.
    pub fn scaled(&self, z: &DualPair, alpha: f64, beta: f64) -> DualPair {
        let (qd, pd) = self.duals();
        DualPair {
            psi: z.psi.scale(alpha),
            phi: z.phi.scale(beta),
            a: alpha.abs().powf(qd) * z.a,
            b: beta.abs().powf(pd) * z.b,
            c: alpha * beta * z.c,
            k_phi: z.k_phi.iter().map(|v| beta * v).collect(),
            k_psi: z.k_psi.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn energy(&self, z: &DualPair) -> f64 {
        let (qd, pd) = self.duals();
        z.a / qd + z.b / pd - 0.5 * z.c
    }

    /// Gradient field `(|psi|^{q'-2} psi - K_{q,p} phi, |phi|^{p'-2} phi - K_{p,q} psi)`;
    /// the derivative of `J` in direction `w` is its quadrature pairing with `w`.
    pub fn gradient(&self, z: &DualPair) -> (ScalarField, ScalarField) {
        let (qd, pd) = self.duals();
        let g = |f: &ScalarField, k: &[f64], s: f64| {
            let v = f.values().par_iter().zip(k).map(|(&x, &kx)| signed_pow(x, s) - kx).collect();
            ScalarField::from_values_unchecked(*f.grid(), v)
        };
        (g(&z.psi, &z.k_phi, qd - 1.0), g(&z.phi, &z.k_psi, pd - 1.0))
    }

    /// `K_{q,p} phi` and `K_{p,q} psi` as cached on the state.
    pub fn birman_schwinger_images(&self, z: &DualPair) -> (ScalarField, ScalarField) {
        (
            ScalarField::from_values_unchecked(*self.grid(), z.k_phi.clone()),
            ScalarField::from_values_unchecked(*self.grid(), z.k_psi.clone()),
        )
    }

    /// Mirror coordinates `(|psi|^{q'-2} psi, |phi|^{p'-2} phi)`.
    pub fn mirror(&self, z: &DualPair) -> (ScalarField, ScalarField) {
        let (qd, pd) = self.duals();
        (z.psi.signed_power(qd - 1.0), z.phi.signed_power(pd - 1.0))
    }

    /// `||G||_2 / ||mirror(z)||_2`, the scale-free stationarity defect.
    pub fn residual(&self, z: &DualPair) -> f64 {
        let (g1, g2) = self.gradient(z);
        let (m1, m2) = self.mirror(z);
        let num = g1.lp_norm_pow_fast(2.0) + g2.lp_norm_pow_fast(2.0);
        let den = m1.lp_norm_pow_fast(2.0) + m2.lp_norm_pow_fast(2.0);
        if den > 0.0 {
            (num / den).sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// `<J'(z), z> = A + B - C`.
    pub fn nehari_gap(&self, z: &DualPair) -> Result<f64> {
        if z.is_zero() {
            return Err(Error::ZeroState);
        }
        Ok(z.a + z.b - z.c)
    }

    /// Unique `t > 0` with `t z` on the Nehari set.
    pub fn nehari_scale(&self, a: f64, b: f64, c: f64) -> Result<f64> {
        if !(c > 0.0) {
            return Err(Error::NotInPositiveCone(c));
        }
        if a + b == 0.0 {
            return Err(Error::ZeroState);
        }
        let (qd, pd) = self.duals();
        let ratio = c / (a + b);
        let t1 = ratio.powf(1.0 / (qd - 2.0));
        let t2 = ratio.powf(1.0 / (pd - 2.0));
        // f is strictly decreasing in t
        let f = |t: f64| t.powf(qd - 2.0) * a + t.powf(pd - 2.0) * b - c;
        let (mut lo, mut hi) = (t1.min(t2).ln(), t1.max(t2).ln());
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid.exp()) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = (0.5 * (lo + hi)).exp();
        let df = (qd - 2.0) * t.powf(qd - 3.0) * a + (pd - 2.0) * t.powf(pd - 3.0) * b;
        let polished = t - f(t) / df;
        Ok(if polished > 0.0 && f(polished).abs() <= f(t).abs() { polished } else { t })
    }

    /// `t > 0` with `t^{q'} a + t^{p'} b = 1`.
    pub fn unit_scale(&self, a: f64, b: f64) -> f64 {
        let (qd, pd) = self.duals();
        let g = |lt: f64| (qd * lt).exp() * a + (pd * lt).exp() * b - 1.0;
        let (mut lo, mut hi) = (-1.0, 1.0);
        while g(lo) > 0.0 {
            lo *= 2.0;
        }
        while g(hi) < 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (0.5 * (lo + hi)).exp()
    }

    /// `(t, t z)` with `t z` on the Nehari set.
    pub fn nehari_project(&self, z: &DualPair) -> Result<(f64, DualPair)> {
        if z.is_zero() {
            return Err(Error::ZeroState);
        }
        let t = self.nehari_scale(z.a, z.b, z.c)?;
        Ok((t, self.scaled(z, t, t)))
    }

    /// Independent scalings `(alpha psi, beta phi)` with `A = B = C/2`
    /// afterwards; the result lies on the Nehari set.
    pub fn balanced_rescale(&self, z: &DualPair) -> Result<DualPair> {
        if !(z.c > 0.0) {
            return Err(Error::NotInPositiveCone(z.c));
        }
        if z.a == 0.0 || z.b == 0.0 {
            return Err(Error::ZeroState);
        }
        let (qd, pd) = self.duals();
        let e = 1.0 - (qd - 1.0) * (pd - 1.0);
        let alpha = ((2.0 * z.a / z.c).powf(pd - 1.0) * (2.0 * z.b / z.c)).powf(1.0 / e);
        let beta = 2.0 * alpha.powf(qd - 1.0) * z.a / z.c;
        Ok(self.scaled(z, alpha, beta))
    }

    /// Energy of a Nehari state through the identity
    /// `J = (1/q' - 1/2) A + (1/p' - 1/2) B`.
    pub fn nehari_energy(&self, z: &DualPair) -> f64 {
        let (qd, pd) = self.duals();
        (1.0 / qd - 0.5) * z.a + (1.0 / pd - 0.5) * z.b
    }
}
