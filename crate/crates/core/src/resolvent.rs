//! Real Helmholtz resolvent as a limiting-absorption Fourier multiplier.
//!
//! `m(xi) = (|xi|^2 - 1) / ((|xi|^2 - 1)^2 + delta^2)`, the real part of
//! `1 / (|xi|^2 - 1 - i delta)`. Grid frequencies lying exactly on the unit
//! sphere get multiplier 0, the principal-value convention.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{CoefficientField, Grid, ScalarField};
use crate::spectral::SpectralPlan;

/// Below this, `||xi|^2 - 1|` counts as an exact hit of the unit sphere.
const ON_SHELL: f64 = 1e-12;

/// How close the frequency lattice comes to the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellGap {
    /// Smallest nonzero `||xi|^2 - 1|` over the grid.
    pub min_gap: f64,
    /// Number of grid frequencies exactly on the unit sphere.
    pub on_shell: usize,
}

#[derive(Debug, Clone)]
pub struct ResolventPlan {
    grid: Grid,
    delta: f64,
    symbol: Vec<f64>,
    multiplier: Vec<f64>,
    gap: ShellGap,
    fft: SpectralPlan,
}

/// `max(1e-3, (pi/L)^2)`.
pub fn default_delta(grid: &Grid) -> f64 {
    grid.frequency_spacing().powi(2).max(1e-3)
}

impl ResolventPlan {
    /// Builds the plan; `delta = None` selects [`default_delta`].
    pub fn new(grid: Grid, delta: Option<f64>) -> Result<Self> {
        let delta = delta.unwrap_or_else(|| default_delta(&grid));
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Config(format!("delta {delta} must be positive")));
        }
        let symbol: Vec<f64> = grid.frequency_squares().into_iter().map(|k2| k2 - 1.0).collect();
        let mut gap = ShellGap { min_gap: f64::INFINITY, on_shell: 0 };
        for &e in &symbol {
            if e.abs() < ON_SHELL {
                gap.on_shell += 1;
            } else {
                gap.min_gap = gap.min_gap.min(e.abs());
            }
        }
        if gap.min_gap < delta / 10.0 {
            return Err(Error::SingularGrid { gap: gap.min_gap, delta });
        }
        let multiplier =
            symbol.iter().map(|&e| if e.abs() < ON_SHELL { 0.0 } else { e / (e * e + delta * delta) }).collect();
        Ok(ResolventPlan {
            grid,
            delta,
            symbol,
            multiplier,
            gap,
            fft: SpectralPlan::new(grid.dim(), grid.samples_per_axis()),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn shell_gap(&self) -> ShellGap {
        self.gap
    }

    /// Multiplier values in FFT storage order.
    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    /// Helmholtz symbol `|xi|^2 - 1` in FFT storage order.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    pub fn fft(&self) -> &SpectralPlan {
        &self.fft
    }

    /// Applies a real even symbol to two real arrays with one complex
    /// transform pair: `a + i b` in, real and imaginary parts out.
    pub fn apply_symbol_pair(&self, sym: &[f64], a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut buf: Vec<Complex64> = a.par_iter().zip(b.par_iter()).map(|(&x, &y)| Complex64::new(x, y)).collect();
        self.fft.forward(&mut buf);
        buf.par_iter_mut().zip(sym.par_iter()).for_each(|(c, &m)| *c *= m);
        self.fft.inverse(&mut buf);
        buf.into_par_iter().map(|c| (c.re, c.im)).unzip()
    }

    /// Applies a real even symbol to one real array, returning the output
    /// and the relative size of the discarded imaginary part.
    pub fn apply_symbol(&self, sym: &[f64], a: &[f64]) -> (Vec<f64>, f64) {
        let mut buf: Vec<Complex64> = a.par_iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fft.forward(&mut buf);
        buf.par_iter_mut().zip(sym.par_iter()).for_each(|(c, &m)| *c *= m);
        self.fft.inverse(&mut buf);
        let (re2, im2) = buf.iter().fold((0.0, 0.0), |(r, i), c| (r + c.re * c.re, i + c.im * c.im));
        let residue = if re2 > 0.0 { (im2 / re2).sqrt() } else { im2.sqrt() };
        (buf.into_iter().map(|c| c.re).collect(), residue)
    }

    fn check(&self, f: &ScalarField) -> Result<()> {
        if *f.grid() == self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Resolvent of two fields at once.
    pub fn apply_pair(&self, f: &ScalarField, g: &ScalarField) -> Result<(ScalarField, ScalarField)> {
        self.check(f)?;
        self.check(g)?;
        let (a, b) = self.apply_symbol_pair(&self.multiplier, f.values(), g.values());
        Ok((ScalarField::from_values_unchecked(self.grid, a), ScalarField::from_values_unchecked(self.grid, b)))
    }
}

/// `R f`: inverse transform of `m * F f`; the imaginary residue is checked
/// and discarded.
pub fn apply_resolvent(plan: &ResolventPlan, f: &ScalarField) -> Result<ScalarField> {
    plan.check(f)?;
    let (out, residue) = plan.apply_symbol(&plan.multiplier, f.values());
    if residue > 1e-12 {
        log::warn!("resolvent output has imaginary residue {residue:e}");
    }
    Ok(ScalarField::from_values_unchecked(plan.grid, out))
}

/// Spectral `(-Delta - 1) u`.
pub fn apply_helmholtz(plan: &ResolventPlan, u: &ScalarField) -> Result<ScalarField> {
    plan.check(u)?;
    let (out, _) = plan.apply_symbol(&plan.symbol, u.values());
    Ok(ScalarField::from_values_unchecked(plan.grid, out))
}

/// `K v = P^{1/p} R(Q^{1/q} v)`.
pub fn birman_schwinger(
    plan: &ResolventPlan,
    p_coef: &CoefficientField,
    p: f64,
    q_coef: &CoefficientField,
    q: f64,
    v: &ScalarField,
) -> Result<ScalarField> {
    for c in [p_coef, q_coef] {
        if c.grid() != plan.grid() {
            return Err(Error::GridMismatch);
        }
        if let Some(&bad) = c.base.values().iter().find(|&&x| !(x > 0.0)) {
            return Err(Error::FloorViolation { value: bad, floor: c.floor });
        }
    }
    let inner = q_coef.power(1.0 / q).mul(v)?;
    apply_resolvent(plan, &inner)?.mul(&p_coef.power(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn plan(l: f64, n: usize, delta: Option<f64>) -> ResolventPlan {
        ResolventPlan::new(make_grid(3, l, n).unwrap(), delta).unwrap()
    }

    #[test]
    fn default_delta_values() {
        let p = plan(8.0 * PI, 32, None);
        assert!((p.delta() - 1.0 / 64.0).abs() < 1e-15);
        let p = plan(64.0 * PI, 16, None);
        assert_eq!(p.delta(), 1e-3);
    }

    #[test]
    fn eigenmode_coefficient() {
        let p = plan(PI, 16, Some(1e-3));
        let f = ScalarField::from_fn(*p.grid(), |x| (2.0 * x[0]).cos()).unwrap();
        let r = apply_resolvent(&p, &f).unwrap();
        let c: f64 = 3.0 / (9.0 + 1e-6);
        assert!((c - 0.333333296).abs() < 1e-9);
        let want = f.scale(c);
        let err = r.sub(&want).unwrap().lp_norm(2.0) / want.lp_norm(2.0);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn helmholtz_symbol() {
        let p = plan(PI, 16, None);
        let f = ScalarField::from_fn(*p.grid(), |x| (2.0 * x[0]).cos()).unwrap();
        let h = apply_helmholtz(&p, &f).unwrap();
        assert!(h.sub(&f.scale(3.0)).unwrap().max_abs() < 1e-12);
        let c = ScalarField::constant(*p.grid(), 2.5);
        assert!(apply_helmholtz(&p, &c).unwrap().sub(&c.scale(-1.0)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn multiplier_bounded_and_on_shell_zero() {
        let p = plan(8.0 * PI, 64, None);
        let bound = 1.0 / (2.0 * p.delta());
        assert!(p.multiplier().iter().all(|m| m.abs() <= bound * (1.0 + 1e-15)));
        assert_eq!(p.shell_gap().on_shell, 6);
        let g = p.grid();
        let idx = g.flat_index(&[8, 0, 0]);
        assert_eq!(p.multiplier()[idx], 0.0);
    }

    #[test]
    fn near_shell_grid_refused() {
        // xi = 0.995 m/1 puts a frequency at |xi|^2 - 1 ~ -1e-2 ... choose L so
        // one lattice point sits just off the sphere
        let l = PI / 1.0002;
        let g = make_grid(3, l, 16).unwrap();
        let err = ResolventPlan::new(g, Some(1e-2)).unwrap_err();
        assert!(matches!(err, Error::SingularGrid { .. }));
    }

    #[test]
    fn resolvent_is_self_adjoint() {
        let p = plan(4.0 * PI, 32, None);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = ScalarField::new(*p.grid(), (0..p.grid().len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let v = ScalarField::new(*p.grid(), (0..p.grid().len()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let (ru, rv) = p.apply_pair(&u, &v).unwrap();
        let a = u.inner(&rv).unwrap();
        let b = v.inner(&ru).unwrap();
        let scale = u.lp_norm(2.0) * rv.lp_norm(2.0);
        assert!((a - b).abs() <= 1e-11 * scale);
        // pair application equals two single applications
        let ru1 = apply_resolvent(&p, &u).unwrap();
        assert!(ru.sub(&ru1).unwrap().max_abs() <= 1e-12 * ru1.max_abs());
    }

    #[test]
    fn zero_maps_to_zero() {
        let p = plan(PI, 16, None);
        let z = ScalarField::zeros(*p.grid());
        assert_eq!(apply_resolvent(&p, &z).unwrap(), z);
    }

    #[test]
    fn grid_mismatch() {
        let p = plan(PI, 16, None);
        let other = ScalarField::zeros(make_grid(3, 2.0 * PI, 16).unwrap());
        assert!(matches!(apply_resolvent(&p, &other), Err(Error::GridMismatch)));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn multiplier_bounded_and_algebraic(delta in 1e-3f64..0.5) {
            let p = plan(4.0 * PI, 16, Some(delta));
            for (&s, &m) in p.symbol().iter().zip(p.multiplier()) {
                proptest::prop_assert!(m.abs() <= 0.5 / delta * (1.0 + 1e-15));
                let id = s * m + delta * delta / (s * s + delta * delta);
                proptest::prop_assert!((id - 1.0).abs() <= 1e-15);
            }
        }
    }
}
