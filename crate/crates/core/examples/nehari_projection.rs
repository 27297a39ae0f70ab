// Dual functional, gradient and the Nehari projection.

use std::f64::consts::PI;
use std::sync::Arc;

use hdual::dual::DualProblem;
use hdual::field::{Bump, CoefficientSpec};
use hdual::{check_admissible, make_coefficient, make_grid, ResolventPlan, ScalarField};

pub fn main() -> hdual::Result<()> {
    let grid = make_grid(3, 4.0 * PI, 32)?;
    let plan = Arc::new(ResolventPlan::new(grid, None)?);
    let spec = CoefficientSpec::Gaussians {
        floor: 0.5,
        bumps: vec![Bump { amplitude: 1.0, center: vec![0.0; 3], width: 2.0 }],
    };
    let prob = DualProblem::new(
        check_admissible(3, 5.0, 4.5)?,
        make_coefficient(&spec, grid)?,
        make_coefficient(&CoefficientSpec::Constant { value: 1.0 }, grid)?,
        plan,
    )?;
    let bump = |s: f64| {
        ScalarField::from_fn(grid, move |x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let sinc = if r < 1e-12 { 1.0 } else { r.sin() / r };
            sinc * (-r * r / (2.0 * s * s)).exp()
        })
    };
    let z = prob.state(bump(4.0)?, bump(5.0)?.scale(0.3))?;
    println!("A = {:.6e}, B = {:.6e}, C = {:.6e}, J = {:.6e}", z.a(), z.b(), z.c(), prob.energy(&z));
    let (t, zp) = prob.nehari_project(&z)?;
    println!("t = {t:.12}, gap after projection = {:.2e}", prob.nehari_gap(&zp)?);
    println!("J on the Nehari set = {:.12} (closed form {:.12})", prob.energy(&zp), prob.nehari_energy(&zp));
    let zb = prob.balanced_rescale(&zp)?;
    println!("balanced: A = {:.6e}, B = {:.6e}, C/2 = {:.6e}", zb.a(), zb.b(), zb.c() / 2.0);
    println!("stationarity residual = {:.3e}", prob.residual(&zp));
    Ok(())
}
