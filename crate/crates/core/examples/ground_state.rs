// Constant-coefficient ground state with both algorithms.

use std::f64::consts::PI;
use std::sync::Arc;

use hdual::groundstate::{limit_ground_energy, Algorithm, SolverConfig};
use hdual::{check_admissible, make_grid, ResolventPlan};

pub fn main() -> hdual::Result<()> {
    let plan = Arc::new(ResolventPlan::new(make_grid(3, 4.0 * PI, 32)?, None)?);
    let e = check_admissible(3, 5.0, 5.0)?;
    for alg in [Algorithm::ProjectedGradient, Algorithm::FixedPoint] {
        let s = limit_ground_energy(1.0, 1.0, e, plan.clone(), &SolverConfig::with_algorithm(alg))?;
        println!(
            "{:<18} c = {:.12} iterations = {:>4} residual = {:.2e} converged = {} primal residual = {:.2e}",
            alg.tag(),
            s.energy,
            s.iterations,
            s.residual,
            s.converged,
            s.primal.relative_u
        );
    }
    Ok(())
}
