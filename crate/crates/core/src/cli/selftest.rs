//! Fast invariant checks with pinned tolerances.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dual::DualProblem;
use crate::error::Result;
use crate::exponents::{check_admissible, decay_exponent, rescaling_exponents};
use crate::field::{make_coefficient, make_grid, Bump, CoefficientSpec, Grid, ScalarField};
use crate::groundstate::{limit_ground_energy, Algorithm, SolverConfig};
use crate::kernel::hankel_first_kind;
use crate::resolvent::{apply_resolvent, birman_schwinger, ResolventPlan};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

fn check(name: &'static str, value: f64, tolerance: f64) -> Check {
    Check { name, passed: value <= tolerance, value, tolerance }
}

/// Fourth-order central difference.
fn derivative(f: impl Fn(f64) -> Result<f64>, x: f64, d: f64) -> Result<f64> {
    Ok((8.0 * (f(x + d)? - f(x - d)?) - (f(x + 2.0 * d)? - f(x - 2.0 * d)?)) / (12.0 * d))
}

fn smooth(grid: Grid, rng: &mut ChaCha8Rng) -> Result<ScalarField> {
    let k: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let c: Vec<f64> = (0..grid.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
    ScalarField::from_fn(grid, |x| {
        let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
        (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + k[3]).cos() * (-r2 / 8.0).exp()
    })
}

/// Runs every check; `quick` uses smaller grids and skips the solver.
pub fn run_selftest(quick: bool) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let n = if quick { 16 } else { 32 };
    let grid = make_grid(3, 4.0 * PI, n)?;
    let plan = Arc::new(ResolventPlan::new(grid, None)?);
    let delta = plan.delta();

    let e = check_admissible(3, 5.0, 5.0)?;
    out.push(check("decay exponent (3,5,5)", (decay_exponent(3, 5.0, 5.0)? - 0.2).abs(), 1e-12));
    let (b1, b2) = rescaling_exponents(5.0, 5.0)?;
    out.push(check("rescaling exponents (5,5)", (b1 + 2.0 / 3.0).abs().max((b2 + 2.0 / 3.0).abs()), 1e-12));
    out.push(check(
        "boundary rejection",
        if check_admissible(3, 6.0, 6.0).is_err() && check_admissible(3, 3.0, 8.0).is_err() { 0.0 } else { 1.0 },
        0.0,
    ));

    let mut w: f64 = 0.0;
    for x in [0.5, 2.0, 9.0, 20.0] {
        let h = hankel_first_kind(1.0, x)?;
        let re = derivative(|t| Ok(hankel_first_kind(1.0, t)?.re), x, 1e-3)?;
        let im = derivative(|t| Ok(hankel_first_kind(1.0, t)?.im), x, 1e-3)?;
        let dh = num_complex::Complex64::new(re, im);
        let want = 2.0 / (PI * x);
        w = w.max(((h.re * dh.im - dh.re * h.im - want) / want).abs());
    }
    out.push(check("Hankel Wronskian", w, 1e-9));

    let algebra = plan
        .symbol()
        .iter()
        .zip(plan.multiplier())
        .map(|(&s, &m)| (s * m + delta * delta / (s * s + delta * delta) - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(check("multiplier algebra", algebra, 1e-15));

    let mode = ScalarField::from_fn(grid, |x| (1.5 * x[0]).cos() * (0.5 * x[1]).sin())?;
    let eta: f64 = 1.5 * 1.5 + 0.25 - 1.0;
    let want_c = eta / (eta * eta + delta * delta);
    let r = apply_resolvent(&plan, &mode)?;
    out.push(check("resolvent eigenmode", r.sub(&mode.scale(want_c))?.lp_norm(2.0) / mode.lp_norm(2.0), 1e-12));

    let spec = CoefficientSpec::Gaussians {
        floor: 0.5,
        bumps: vec![Bump { amplitude: 1.0, center: vec![0.0; 3], width: 2.0 }],
    };
    let pc = make_coefficient(&spec, grid)?;
    let qc = make_coefficient(&CoefficientSpec::Constant { value: 1.2 }, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sym: f64 = 0.0;
    for _ in 0..if quick { 10 } else { 100 } {
        let u = smooth(grid, &mut rng)?;
        let v = smooth(grid, &mut rng)?;
        let a = u.inner(&birman_schwinger(&plan, &pc, 5.0, &qc, 4.5, &v)?)?;
        let b = v.inner(&birman_schwinger(&plan, &qc, 4.5, &pc, 5.0, &u)?)?;
        sym = sym.max((a - b).abs() / a.abs().max(b.abs()).max(1e-300));
    }
    out.push(check("Birman-Schwinger symmetry", sym, 1e-10));

    let prob = DualProblem::new(check_admissible(3, 5.0, 4.5)?, pc, qc, plan.clone())?;
    let positive = |rng: &mut ChaCha8Rng| smooth(grid, rng).map(|f| f.map(|v| 0.5 + v * v));
    let z = prob.state(positive(&mut rng)?, positive(&mut rng)?)?;
    let z = if z.c() > 0.0 { z } else { prob.scaled(&z, 1.0, -1.0) };
    let (g1, g2) = prob.gradient(&z);
    let mut fd_err: f64 = 0.0;
    for _ in 0..if quick { 3 } else { 20 } {
        let w1 = smooth(grid, &mut rng)?;
        let w2 = smooth(grid, &mut rng)?;
        let d = g1.inner(&w1)? + g2.inner(&w2)?;
        let at = |t: f64| -> Result<f64> {
            let zt = prob.state(z.psi().add(&w1.scale(t))?, z.phi().add(&w2.scale(t))?)?;
            Ok(prob.energy(&zt))
        };
        let fd = derivative(at, 0.0, 1e-3)?;
        fd_err = fd_err.max((fd - d).abs() / d.abs());
    }
    out.push(check("gradient vs central difference", fd_err, 1e-6));

    let (t, zp) = prob.nehari_project(&z)?;
    let gap = prob.nehari_gap(&zp)?.abs() / (zp.a() + zp.b());
    out.push(check("Nehari projection residual", gap, 1e-12));
    let (t1, _) = prob.nehari_project(&zp)?;
    out.push(check("Nehari idempotence", (t1 - 1.0).abs(), 1e-10));
    let (t2, _) = prob.nehari_project(&prob.scaled(&z, 2.0, 2.0))?;
    out.push(check("Nehari scaling law", (2.0 * t2 - t).abs() / t, 1e-10));
    let j = prob.energy(&zp);
    out.push(check("Nehari energy identity", (j - prob.nehari_energy(&zp)).abs() / j, 1e-10));

    if !quick {
        let bench = Arc::new(ResolventPlan::new(make_grid(3, 4.0 * PI, 32)?, None)?);
        let a = limit_ground_energy(
            1.0,
            1.0,
            e,
            bench.clone(),
            &SolverConfig::with_algorithm(Algorithm::ProjectedGradient),
        )?;
        let b = limit_ground_energy(1.0, 1.0, e, bench, &SolverConfig::with_algorithm(Algorithm::FixedPoint))?;
        let agree = if a.converged && b.converged { (a.energy - b.energy).abs() / a.energy } else { f64::INFINITY };
        out.push(check("cross-algorithm ground energy", agree, 1e-6));
    }
    Ok(out)
}
