//! The small-`eps` sweep: energies, barycenters and rescaled-profile
//! convergence toward the constant-coefficient ground state at the common
//! maximum of the coefficients.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::{DualPair, DualProblem};
use crate::error::{Error, Result};
use crate::exponents::{check_admissible, AdmissibleExponents};
use crate::field::{make_dilated_coefficient, make_grid, CoefficientSpec, Grid, ScalarField};
use crate::groundstate::{
    dedup_solutions, limit_ground_energy, solve_ground_state, InitialSeed, Solution, SolverConfig,
};
use crate::resolvent::ResolventPlan;

/// `chi(y) = y` inside `B_rho`, `rho y / |y|` outside.
fn chi(y: &mut [f64], rho: f64) {
    let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r > rho {
        y.iter_mut().for_each(|v| *v *= rho / r);
    }
}

fn weighted_center(f: &ScalarField, power: f64, eps: f64, rho: f64) -> Result<Vec<f64>> {
    let grid = f.grid();
    let mut num = vec![0.0; grid.dim()];
    let mut den = 0.0;
    let mut y = vec![0.0; grid.dim()];
    for (i, &v) in f.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let w = v.abs().powf(power);
        for (yk, xk) in y.iter_mut().zip(grid.point(i)) {
            *yk = eps * xk;
        }
        chi(&mut y, rho);
        for (n, yk) in num.iter_mut().zip(&y) {
            *n += w * yk;
        }
        den += w;
    }
    if den == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(num.into_iter().map(|n| n / den).collect())
}

/// Truncated centers of mass of `|psi|^{q'}` and `|phi|^{p'}` in the
/// dilated variable `eps x`.
pub fn barycenter(
    state: &DualPair,
    exponents: &AdmissibleExponents,
    eps: f64,
    rho: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((
        weighted_center(state.psi(), exponents.q_dual, eps, rho)?,
        weighted_center(state.phi(), exponents.p_dual, eps, rho)?,
    ))
}

/// `k^{-beta1} u` on the grid of half width `L / k`: the solved frame
/// mapped to the frequency-`k` frame.
pub fn theorem_scaling_map(u: &ScalarField, k: f64, exponents: &AdmissibleExponents) -> Result<ScalarField> {
    if !(k > 0.0) {
        return Err(Error::DomainError(format!("frequency {k} must be positive")));
    }
    let grid = u.grid().with_half_width(u.grid().half_width() / k)?;
    ScalarField::new(grid, u.scale(k.powf(-exponents.beta1)).into_values())
}

/// Inverse of [`theorem_scaling_map`].
pub fn inverse_scaling_map(u: &ScalarField, k: f64, exponents: &AdmissibleExponents) -> Result<ScalarField> {
    if !(k > 0.0) {
        return Err(Error::DomainError(format!("frequency {k} must be positive")));
    }
    let grid = u.grid().with_half_width(u.grid().half_width() * k)?;
    ScalarField::new(grid, u.scale(k.powf(exponents.beta1)).into_values())
}

/// Box geometry shared by every `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub dimension: usize,
    pub p: f64,
    pub q: f64,
    /// Strictly decreasing.
    pub eps_list: Vec<f64>,
    pub p_coefficient: CoefficientSpec,
    pub q_coefficient: CoefficientSpec,
    /// Defaults to twice the largest argmax radius, at least 1.
    #[serde(default)]
    pub rho: Option<f64>,
    pub grid: GridConfig,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "one")]
    pub multistart_count: usize,
    /// Seed of the extra multistart runs.
    #[serde(default)]
    pub seed: u64,
    /// Evaluate the energy of the cut-off limit profile transplanted to
    /// the common maximum.
    #[serde(default)]
    pub transplant_check: bool,
}

fn one() -> usize {
    1
}

impl SweepConfig {
    pub fn validate(&self) -> Result<AdmissibleExponents> {
        let e = check_admissible(self.dimension, self.p, self.q)?;
        if self.eps_list.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::Config("eps values must be positive".into()));
        }
        if self.eps_list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("eps_list must be strictly decreasing".into()));
        }
        if self.multistart_count == 0 {
            return Err(Error::Config("multistart_count must be at least 1".into()));
        }
        if let Some(r) = self.rho {
            if !(r > 0.0) {
                return Err(Error::Config("rho must be positive".into()));
            }
        }
        self.p_coefficient.validate(self.dimension)?;
        self.q_coefficient.validate(self.dimension)?;
        self.solver.validate()?;
        Ok(e)
    }

    pub fn rho(&self) -> f64 {
        self.rho.unwrap_or_else(|| {
            let radius = |s: &CoefficientSpec| {
                s.argmax_centers().iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max)
            };
            (2.0 * radius(&self.p_coefficient).max(radius(&self.q_coefficient))).max(1.0)
        })
    }

    /// Whether the coefficient maxima share a point.
    pub fn common_maximum(&self) -> bool {
        let (a, b) = (self.p_coefficient.argmax_centers(), self.q_coefficient.argmax_centers());
        if a.is_empty() || b.is_empty() {
            return true;
        }
        a.iter().any(|x| b.iter().any(|y| x.iter().zip(y).all(|(u, v)| (u - v).abs() < 1e-9)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub eps: f64,
    pub c_eps: f64,
    pub barycenter_psi: Vec<f64>,
    pub barycenter_phi: Vec<f64>,
    pub profile_distance_u: f64,
    pub profile_distance_v: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub distinct_solutions: usize,
    pub transplant_energy: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationReport {
    pub dimension: usize,
    pub entries: Vec<SweepEntry>,
    pub c_m: f64,
    pub limit_converged: bool,
    pub limit_iterations: usize,
    pub rho: f64,
    pub spacing: f64,
    pub common_maximum: bool,
    #[serde(skip)]
    pub limit: Option<Solution>,
    /// Best solution per entry, aligned with `entries`.
    #[serde(skip)]
    pub solutions: Vec<Option<Solution>>,
}

impl ConcentrationReport {
    pub fn all_converged(&self) -> bool {
        self.limit_converged && self.entries.iter().all(|e| e.converged)
    }
}

/// Unweighted center of mass of `|f|^power`, no truncation.
pub fn center_of_mass(f: &ScalarField, power: f64) -> Result<Vec<f64>> {
    weighted_center(f, power, 1.0, f64::INFINITY)
}

/// Aligns `solution` to `limit` by the lattice shift between their
/// `psi` centers and returns the relative distances
/// `(||u - U(. - a)||_q / ||U||_q, ||v - V(. - a)||_p / ||V||_p)`,
/// minimized over the global sign.
pub fn align_and_compare(solution: &Solution, limit: &Solution, exponents: &AdmissibleExponents) -> Result<(f64, f64)> {
    if !solution.converged || !limit.converged {
        return Err(Error::NotConverged);
    }
    let grid = *solution.state.grid();
    if *limit.state.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let a = center_of_mass(solution.state.psi(), exponents.q_dual)?;
    let b = center_of_mass(limit.state.psi(), exponents.q_dual)?;
    let h = grid.spacing();
    let shift: Vec<i64> = a.iter().zip(&b).map(|(x, y)| ((x - y) / h).round() as i64).collect();
    let uu = limit.primal.u.shift(&shift)?;
    let vv = limit.primal.v.shift(&shift)?;
    let dist = |f: &ScalarField, g: &ScalarField, r: f64, sign: f64| -> Result<f64> {
        Ok(f.sub(&g.scale(sign))?.lp_norm(r) / g.lp_norm(r))
    };
    let (q, p) = (exponents.q, exponents.p);
    let plus = (dist(&solution.primal.u, &uu, q, 1.0)?, dist(&solution.primal.v, &vv, p, 1.0)?);
    let minus = (dist(&solution.primal.u, &uu, q, -1.0)?, dist(&solution.primal.v, &vv, p, -1.0)?);
    Ok(if plus.0 + plus.1 <= minus.0 + minus.1 { plus } else { minus })
}

/// Smooth non-increasing cutoff on `[0, inf)`: 1 up to `rho/2`, 0 from `rho`.
fn cutoff(r: f64, rho: f64) -> f64 {
    let t = (2.0 * r / rho - 1.0).clamp(0.0, 1.0);
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let f = |u: f64| (-1.0 / u).exp();
    f(1.0 - t) / (f(1.0 - t) + f(t))
}

/// Nehari-projected energy under `prob` of the limit state moved to
/// `x0 / eps` and cut off at `|eps x - x0| = rho`.
pub fn transplant_energy(prob: &DualProblem, limit: &DualPair, eps: f64, x0: &[f64], rho: f64) -> Result<f64> {
    let grid = *prob.grid();
    let h = grid.spacing();
    let shift: Vec<i64> = x0.iter().map(|c| (c / (eps * h)).round() as i64).collect();
    let cut = ScalarField::from_fn(grid, |x| {
        let r = x.iter().zip(x0).map(|(a, c)| (eps * a - c).powi(2)).sum::<f64>().sqrt();
        cutoff(r, rho)
    })?;
    let psi = limit.psi().shift(&shift)?.mul(&cut)?;
    let phi = limit.phi().shift(&shift)?.mul(&cut)?;
    let z = prob.state(psi, phi)?;
    let (_, zp) = prob.nehari_project(&z)?;
    Ok(prob.energy(&zp))
}

fn solve_multistart(prob: &DualProblem, cfg: &SweepConfig, eps_index: usize) -> Result<(Solution, usize)> {
    let mut runs = Vec::new();
    let mut last_err = None;
    for k in 0..cfg.multistart_count {
        let mut solver = cfg.solver.clone();
        if k > 0 {
            solver.initial = InitialSeed::Random { seed: cfg.seed.wrapping_add((eps_index * 1000 + k) as u64) };
        }
        match solve_ground_state(prob, &solver) {
            Ok(s) => runs.push(s),
            Err(e) => last_err = Some(e),
        }
    }
    if runs.is_empty() {
        return Err(last_err.unwrap_or(Error::NotConverged));
    }
    // lowest energy first, converged preferred
    runs.sort_by(|a, b| b.converged.cmp(&a.converged).then(a.energy.total_cmp(&b.energy)));
    let distinct = dedup_solutions(runs.clone(), 1e-6, true)?.len();
    Ok((runs.swap_remove(0), distinct))
}

/// Runs the whole sweep; per-`eps` failures become non-converged entries.
pub fn run_sweep(cfg: &SweepConfig) -> Result<ConcentrationReport> {
    let exps = cfg.validate()?;
    let grid: Grid = make_grid(cfg.dimension, cfg.grid.half_width, cfg.grid.samples)?;
    let plan = Arc::new(ResolventPlan::new(grid, cfg.delta)?);
    let rho = cfg.rho();
    let pbar = cfg.p_coefficient.sup();
    let qbar = cfg.q_coefficient.sup();
    let mut limit_cfg = cfg.solver.clone();
    limit_cfg.initial = InitialSeed::Bump { center: Some(vec![0.0; cfg.dimension]) };
    let limit = limit_ground_energy(pbar, qbar, exps, plan.clone(), &limit_cfg)?;
    let x0 = cfg
        .p_coefficient
        .argmax_centers()
        .into_iter()
        .find(|c| {
            let q = cfg.q_coefficient.argmax_centers();
            q.is_empty() || q.iter().any(|d| d.iter().zip(c).all(|(a, b)| (a - b).abs() < 1e-9))
        })
        .unwrap_or_else(|| vec![0.0; cfg.dimension]);

    let results: Vec<(SweepEntry, Option<Solution>)> = cfg
        .eps_list
        .par_iter()
        .enumerate()
        .map(|(i, &eps)| {
            let run = || -> Result<(SweepEntry, Solution)> {
                let pc = make_dilated_coefficient(&cfg.p_coefficient, grid, eps)?;
                let qc = make_dilated_coefficient(&cfg.q_coefficient, grid, eps)?;
                let prob = DualProblem::new(exps, pc, qc, plan.clone())?;
                let (sol, distinct) = solve_multistart(&prob, cfg, i)?;
                let (bpsi, bphi) = barycenter(&sol.state, &exps, eps, rho)?;
                let (du, dv) = align_and_compare(&sol, &limit, &exps).unwrap_or((f64::NAN, f64::NAN));
                let transplant = if cfg.transplant_check {
                    transplant_energy(&prob, &limit.state, eps, &x0, rho).ok()
                } else {
                    None
                };
                Ok((
                    SweepEntry {
                        eps,
                        c_eps: sol.energy,
                        barycenter_psi: bpsi,
                        barycenter_phi: bphi,
                        profile_distance_u: du,
                        profile_distance_v: dv,
                        iterations: sol.iterations,
                        residual: sol.residual,
                        converged: sol.converged,
                        distinct_solutions: distinct,
                        transplant_energy: transplant,
                        error: None,
                    },
                    sol,
                ))
            };
            match run() {
                Ok((entry, sol)) => (entry, Some(sol)),
                Err(e) => {
                    log::warn!("eps = {eps}: {e}");
                    (
                        SweepEntry {
                            eps,
                            c_eps: f64::NAN,
                            barycenter_psi: vec![f64::NAN; cfg.dimension],
                            barycenter_phi: vec![f64::NAN; cfg.dimension],
                            profile_distance_u: f64::NAN,
                            profile_distance_v: f64::NAN,
                            iterations: 0,
                            residual: f64::NAN,
                            converged: false,
                            distinct_solutions: 0,
                            transplant_energy: None,
                            error: Some(e.to_string()),
                        },
                        None,
                    )
                }
            }
        })
        .collect();
    let (entries, solutions) = results.into_iter().unzip();
    Ok(ConcentrationReport {
        dimension: cfg.dimension,
        entries,
        c_m: limit.energy,
        limit_converged: limit.converged,
        limit_iterations: limit.iterations,
        rho,
        spacing: grid.spacing(),
        common_maximum: cfg.common_maximum(),
        limit: Some(limit),
        solutions,
    })
}

/// Shell averages of `|f|` about `center` in bins of width `h`.
pub fn radial_profile(f: &ScalarField, center: &[f64]) -> Vec<(f64, f64)> {
    let grid = f.grid();
    let h = grid.spacing();
    let bins = grid.samples_per_axis() / 2;
    let mut sum = vec![0.0; bins];
    let mut count = vec![0usize; bins];
    let l = grid.half_width();
    for (i, &v) in f.values().iter().enumerate() {
        // minimum-image distance on the periodic box
        let r = grid
            .point(i)
            .iter()
            .zip(center)
            .map(|(x, c)| {
                let d = (x - c).rem_euclid(2.0 * l);
                d.min(2.0 * l - d).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        let k = (r / h + 0.5).floor() as usize;
        if k < bins {
            sum[k] += v.abs();
            count[k] += 1;
        }
    }
    (0..bins).filter(|&k| count[k] > 0).map(|k| (k as f64 * h, sum[k] / count[k] as f64)).collect()
}
