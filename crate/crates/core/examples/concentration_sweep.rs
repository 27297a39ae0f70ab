// Energies, barycenters and profile distances as eps decreases.

use std::f64::consts::PI;

use hdual::concentration::{run_sweep, GridConfig, SweepConfig};
use hdual::field::{Bump, CoefficientSpec};
use hdual::groundstate::{Algorithm, SolverConfig};

pub fn main() -> hdual::Result<()> {
    let spec = CoefficientSpec::Gaussians {
        floor: 0.5,
        bumps: vec![Bump { amplitude: 1.0, center: vec![0.0; 3], width: 1.0 }],
    };
    let cfg = SweepConfig {
        dimension: 3,
        p: 5.0,
        q: 5.0,
        eps_list: vec![1.0, 0.5, 0.25],
        p_coefficient: spec.clone(),
        q_coefficient: spec,
        rho: None,
        grid: GridConfig { half_width: 4.0 * PI, samples: 32 },
        delta: None,
        solver: SolverConfig::with_algorithm(Algorithm::FixedPoint),
        multistart_count: 1,
        seed: 0,
        transplant_check: true,
    };
    let report = run_sweep(&cfg)?;
    println!("c_M = {:.8}", report.c_m);
    for e in &report.entries {
        println!(
            "eps = {:<5} c_eps = {:.8} |barycenter| = {:.2e} distance u = {:.4} transplant = {:?}",
            e.eps,
            e.c_eps,
            e.barycenter_psi.iter().map(|v| v * v).sum::<f64>().sqrt(),
            e.profile_distance_u,
            e.transplant_energy
        );
    }
    Ok(())
}
