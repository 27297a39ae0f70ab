//! Dual ground states by two independent iterations, primal recovery and
//! solution deduplication.
//!
//! `ProjectedGradient` steps in the mirror coordinates
//! `w = |psi|^{q'-2} psi`, maps back with `|w|^{q-2} w` (the exact inverse),
//! projects onto the Nehari set and backtracks until the Armijo condition
//! holds. `FixedPoint` is a Gauss-Seidel sweep of the Euler-Lagrange system
//! followed by a two-scalar rescaling that balances `A = B = C/2`.

use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual::{DualPair, DualProblem};
use crate::error::{Error, Result};
use crate::exponents::AdmissibleExponents;
use crate::field::{signed_pow, CoefficientField, Grid, ScalarField};
use crate::resolvent::{apply_helmholtz, ResolventPlan};
use crate::spectral::SpectralPlan;

const MAX_SEED_ATTEMPTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    ProjectedGradient,
    FixedPoint,
}

impl Algorithm {
    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::ProjectedGradient => "projected_gradient",
            Algorithm::FixedPoint => "fixed_point",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOrder {
    PsiFirst,
    PhiFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Armijo {
    pub shrink: f64,
    pub slope: f64,
}

impl Default for Armijo {
    fn default() -> Self {
        Armijo { shrink: 0.5, slope: 1e-4 }
    }
}

/// Where the iteration starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSeed {
    /// Windowed `sin(r)/r` bump of width `8h` at the common coefficient
    /// maximum nearest the origin, or at `center` when given.
    Bump {
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// Bump at a random coefficient maximum with multiplicative noise.
    Random { seed: u64 },
    /// Field dumps written by [`ScalarField::write_dump`].
    Dump { psi: PathBuf, phi: PathBuf },
}

impl Default for InitialSeed {
    fn default() -> Self {
        InitialSeed::Bump { center: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub max_iters: usize,
    /// Stop when `||G||_2 / ||mirror(z)||_2` falls to this value.
    pub tol_residual: f64,
    pub armijo: Armijo,
    /// Smallest admissible Armijo step.
    pub min_step: f64,
    pub initial: InitialSeed,
    pub sweep_order: SweepOrder,
    /// Fixed-point relaxation in mirror coordinates, `0 < damping <= 1`.
    pub damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            algorithm: Algorithm::ProjectedGradient,
            max_iters: 2000,
            tol_residual: 1e-9,
            armijo: Armijo::default(),
            min_step: 1e-14,
            initial: InitialSeed::default(),
            sweep_order: SweepOrder::PsiFirst,
            damping: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn with_algorithm(algorithm: Algorithm) -> Self {
        SolverConfig { algorithm, ..SolverConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.tol_residual > 0.0) {
            return bad("tol_residual must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if !(self.armijo.shrink > 0.0 && self.armijo.shrink < 1.0) {
            return bad("armijo.shrink must lie in (0, 1)");
        }
        if !(self.armijo.slope > 0.0 && self.armijo.slope < 1.0) {
            return bad("armijo.slope must lie in (0, 1)");
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad("damping must lie in (0, 1]");
        }
        if !(self.min_step > 0.0) {
            return bad("min_step must be positive");
        }
        Ok(())
    }
}

/// Primal solution `u = R(P^{1/p} phi)`, `v = R(Q^{1/q} psi)` and the
/// `L^2` residuals of the differential system.
#[derive(Debug, Clone)]
pub struct PrimalPair {
    pub u: ScalarField,
    pub v: ScalarField,
    /// `||(-Delta - 1) u - P |v|^{p-2} v||_2`.
    pub residual_u: f64,
    /// `||(-Delta - 1) v - Q |u|^{q-2} u||_2`.
    pub residual_v: f64,
    /// `residual_u / ||P |v|^{p-2} v||_2`.
    pub relative_u: f64,
    pub relative_v: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub state: DualPair,
    pub energy: f64,
    pub primal: PrimalPair,
    /// Stationarity defect `||G||_2 / ||mirror(z)||_2` of the returned state.
    pub residual: f64,
    pub iterations: usize,
    pub algorithm: Algorithm,
    pub converged: bool,
    /// Energy after every iteration, starting with the projected seed.
    pub history: Vec<f64>,
}

/// Smooth localized profile with spectral weight on the unit sphere.
fn seed_profile(grid: &Grid, center: &[f64]) -> Result<ScalarField> {
    let w = 8.0 * grid.spacing();
    ScalarField::from_fn(*grid, |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum();
        let r = r2.sqrt();
        let sinc = if r < 1e-12 { 1.0 } else { r.sin() / r };
        sinc * (-r2 / (2.0 * w * w)).exp()
    })
}

/// Common argmax points of `P` and `Q`, or those of `P` when disjoint.
fn seed_centers(p: &CoefficientField, q: &CoefficientField) -> Vec<Vec<f64>> {
    let qi: std::collections::HashSet<usize> = q.argmax_indices().iter().copied().collect();
    let common: Vec<usize> = p.argmax_indices().iter().copied().filter(|i| qi.contains(i)).collect();
    let idx = if common.is_empty() { p.argmax_indices().to_vec() } else { common };
    let mut pts: Vec<Vec<f64>> = idx.iter().map(|&i| p.grid().point(i)).collect();
    let norm = |x: &Vec<f64>| x.iter().map(|v| v * v).sum::<f64>();
    pts.sort_by(|a, b| norm(a).total_cmp(&norm(b)));
    pts
}

fn nearest_center(p: &CoefficientField, q: &CoefficientField) -> Vec<f64> {
    seed_centers(p, q).into_iter().next().unwrap_or_else(|| vec![0.0; p.grid().dim()])
}

/// Candidate seed number `attempt` for the configured initial state.
fn make_seed(prob: &DualProblem, initial: &InitialSeed, attempt: usize) -> Result<(ScalarField, ScalarField)> {
    let grid = *prob.grid();
    match initial {
        InitialSeed::Bump { center } => {
            let c = match center {
                Some(c) if attempt == 0 => c.clone(),
                None if attempt == 0 => nearest_center(&prob.p_coef, &prob.q_coef),
                _ => {
                    let mut rng = ChaCha8Rng::seed_from_u64(attempt as u64);
                    return random_seed(prob, &mut rng);
                }
            };
            let f = seed_profile(&grid, &c)?;
            Ok((f.clone(), f))
        }
        InitialSeed::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64 * 0x9e37_79b9));
            random_seed(prob, &mut rng)
        }
        InitialSeed::Dump { psi, phi } => {
            let (a, _) = ScalarField::read_dump(psi)?;
            let (b, _) = ScalarField::read_dump(phi)?;
            a.same_grid(&b)?;
            if *a.grid() != grid {
                return Err(Error::GridMismatch);
            }
            Ok((a, b))
        }
    }
}

fn random_seed(prob: &DualProblem, rng: &mut ChaCha8Rng) -> Result<(ScalarField, ScalarField)> {
    let grid = *prob.grid();
    let centers = seed_centers(&prob.p_coef, &prob.q_coef);
    let c = if centers.is_empty() { vec![0.0; grid.dim()] } else { centers[rng.gen_range(0..centers.len())].clone() };
    let base = seed_profile(&grid, &c)?;
    let ratio = rng.gen_range(0.5..2.0);
    let noise: Vec<f64> = (0..2 * grid.len()).map(|_| 1.0 + 0.1 * rng.gen_range(-1.0..1.0)).collect();
    let psi = ScalarField::new(grid, base.values().iter().zip(&noise).map(|(v, e)| v * e).collect())?;
    let phi =
        ScalarField::new(grid, base.values().iter().zip(&noise[grid.len()..]).map(|(v, e)| ratio * v * e).collect())?;
    Ok((psi, phi))
}

/// First seed in the positive cone, normalized to `A + B = 1`.
fn initial_state(prob: &DualProblem, cfg: &SolverConfig) -> Result<DualPair> {
    let attempts = if matches!(cfg.initial, InitialSeed::Dump { .. }) { 1 } else { MAX_SEED_ATTEMPTS };
    for attempt in 0..attempts {
        let (psi, phi) = make_seed(prob, &cfg.initial, attempt)?;
        if let Ok(z) = admit_seed(prob, psi, phi) {
            return Ok(z);
        }
        log::debug!("seed attempt {attempt} outside the positive cone");
    }
    Err(Error::SeedOutsideCone(attempts))
}

fn admit_seed(prob: &DualProblem, psi: ScalarField, phi: ScalarField) -> Result<DualPair> {
    let z = prob.state(psi, phi)?;
    if z.is_zero() || !(z.c() > 0.0) {
        return Err(Error::NotInPositiveCone(z.c()));
    }
    let t = prob.unit_scale(z.a(), z.b());
    Ok(prob.scaled(&z, t, t))
}

/// Solves from the configured seed.
pub fn solve_ground_state(prob: &DualProblem, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let z0 = initial_state(prob, cfg)?;
    iterate(prob, cfg, z0)
}

/// Solves from a caller-supplied seed; a seed outside the positive cone
/// is rejected since there is nothing to reseed.
pub fn solve_from(prob: &DualProblem, cfg: &SolverConfig, psi: ScalarField, phi: ScalarField) -> Result<Solution> {
    cfg.validate()?;
    let z0 = admit_seed(prob, psi, phi).map_err(|_| Error::SeedOutsideCone(1))?;
    iterate(prob, cfg, z0)
}

fn iterate(prob: &DualProblem, cfg: &SolverConfig, z0: DualPair) -> Result<Solution> {
    let (state, iterations, converged, history) = match cfg.algorithm {
        Algorithm::ProjectedGradient => projected_gradient(prob, cfg, z0)?,
        Algorithm::FixedPoint => fixed_point(prob, cfg, z0)?,
    };
    let residual = prob.residual(&state);
    let primal = recover_primal(prob, &state)?;
    Ok(Solution {
        energy: prob.energy(&state),
        state,
        primal,
        residual,
        iterations,
        algorithm: cfg.algorithm,
        converged,
        history,
    })
}

type Outcome = (DualPair, usize, bool, Vec<f64>);

fn projected_gradient(prob: &DualProblem, cfg: &SolverConfig, z0: DualPair) -> Result<Outcome> {
    let (q, p) = (prob.exponents.q, prob.exponents.p);
    let (_, mut z) = prob.nehari_project(&z0)?;
    let mut e = prob.energy(&z);
    let mut history = vec![e];
    let mut step: f64 = 1.0;
    let hn = prob.grid().cell_volume();
    for it in 0..cfg.max_iters {
        if prob.residual(&z) <= cfg.tol_residual {
            return Ok((z, it, true, history));
        }
        let (g1, g2) = prob.gradient(&z);
        let (w1, w2) = prob.mirror(&z);
        let (next, e_next) = loop {
            if step < cfg.min_step {
                return Err(Error::NoDescentDirection);
            }
            let a: Vec<f64> =
                w1.values().iter().zip(g1.values()).map(|(w, g)| signed_pow(w - step * g, q - 1.0)).collect();
            let b: Vec<f64> =
                w2.values().iter().zip(g2.values()).map(|(w, g)| signed_pow(w - step * g, p - 1.0)).collect();
            let slope = hn
                * (g1.values().iter().zip(&a).zip(z.psi().values()).map(|((g, x), y)| g * (x - y)).sum::<f64>()
                    + g2.values().iter().zip(&b).zip(z.phi().values()).map(|((g, x), y)| g * (x - y)).sum::<f64>());
            let trial = match (ScalarField::new(*prob.grid(), a), ScalarField::new(*prob.grid(), b)) {
                (Ok(a), Ok(b)) => prob.state(a, b),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
            let projected = trial.and_then(|t| prob.nehari_project(&t));
            match projected {
                Ok((_, zt)) => {
                    let et = prob.energy(&zt);
                    if et <= e + cfg.armijo.slope * slope + 1e-13 * e.abs() {
                        break (zt, et);
                    }
                }
                Err(Error::NotInPositiveCone(_)) | Err(Error::NonFinite(_)) | Err(Error::ZeroState) => {}
                Err(other) => return Err(other),
            }
            step *= cfg.armijo.shrink;
        };
        debug_assert!(e_next <= e + 1e-12 * e.abs(), "accepted step increased the energy");
        z = next;
        e = e_next;
        history.push(e);
        step = (2.0 * step).min(1.0);
    }
    let converged = prob.residual(&z) <= cfg.tol_residual;
    Ok((z, cfg.max_iters, converged, history))
}

fn fixed_point(prob: &DualProblem, cfg: &SolverConfig, z0: DualPair) -> Result<Outcome> {
    let (q, p) = (prob.exponents.q, prob.exponents.p);
    let (_, z) = prob.nehari_project(&z0)?;
    let mut z = prob.balanced_rescale(&z)?;
    let mut history = vec![prob.energy(&z)];
    let mut theta = cfg.damping;
    let grid = *prob.grid();
    // relaxed update sp((1 - theta) sp(f, 1/(r-1)) + theta k, r - 1)
    let relax = |f: &ScalarField, k: &ScalarField, r: f64, theta: f64| {
        let v = f
            .values()
            .iter()
            .zip(k.values())
            .map(|(&x, &kx)| signed_pow((1.0 - theta) * signed_pow(x, 1.0 / (r - 1.0)) + theta * kx, r - 1.0))
            .collect();
        ScalarField::new(grid, v)
    };
    let mut it = 0;
    while it < cfg.max_iters {
        if prob.residual(&z) <= cfg.tol_residual {
            return Ok((z, it, true, history));
        }
        let sweep = || -> Result<DualPair> {
            let (k_phi, k_psi) = prob.birman_schwinger_images(&z);
            let next = match cfg.sweep_order {
                SweepOrder::PsiFirst => {
                    let a = relax(z.psi(), &k_phi, q, theta)?;
                    let half = prob.state(a, z.phi().clone())?;
                    let (_, k_psi) = prob.birman_schwinger_images(&half);
                    let b = relax(z.phi(), &k_psi, p, theta)?;
                    prob.state(half.psi().clone(), b)?
                }
                SweepOrder::PhiFirst => {
                    let b = relax(z.phi(), &k_psi, p, theta)?;
                    let half = prob.state(z.psi().clone(), b)?;
                    let (k_phi, _) = prob.birman_schwinger_images(&half);
                    let a = relax(z.psi(), &k_phi, q, theta)?;
                    prob.state(a, half.phi().clone())?
                }
            };
            prob.balanced_rescale(&next)
        };
        match sweep() {
            Ok(next) => {
                z = next;
                history.push(prob.energy(&z));
                it += 1;
            }
            Err(Error::NotInPositiveCone(_)) | Err(Error::NonFinite(_)) | Err(Error::ZeroState) => {
                theta *= 0.5;
                if theta < 1e-6 {
                    break;
                }
            }
            Err(other) => return Err(other),
        }
    }
    let converged = prob.residual(&z) <= cfg.tol_residual;
    Ok((z, it, converged, history))
}

/// `u = R(P^{1/p} phi)`, `v = R(Q^{1/q} psi)` with spectral residuals.
pub fn recover_primal(prob: &DualProblem, state: &DualPair) -> Result<PrimalPair> {
    let e = prob.exponents;
    let plan = prob.plan();
    let f = state.phi().mul(&prob.p_coef.power(1.0 / e.p))?;
    let g = state.psi().mul(&prob.q_coef.power(1.0 / e.q))?;
    let (u, v) = plan.apply_pair(&f, &g)?;
    let rhs_u = v.signed_power(e.p - 1.0).mul(&prob.p_coef.base)?;
    let rhs_v = u.signed_power(e.q - 1.0).mul(&prob.q_coef.base)?;
    let res_u = apply_helmholtz(plan, &u)?.sub(&rhs_u)?.lp_norm(2.0);
    let res_v = apply_helmholtz(plan, &v)?.sub(&rhs_v)?.lp_norm(2.0);
    let rel = |r: f64, d: f64| if d > 0.0 { r / d } else { r };
    Ok(PrimalPair {
        relative_u: rel(res_u, rhs_u.lp_norm(2.0)),
        relative_v: rel(res_v, rhs_v.lp_norm(2.0)),
        u,
        v,
        residual_u: res_u,
        residual_v: res_v,
    })
}

/// The constant-coefficient problem with `P = pbar`, `Q = qbar`.
pub fn limit_problem(
    pbar: f64,
    qbar: f64,
    exponents: AdmissibleExponents,
    plan: Arc<ResolventPlan>,
) -> Result<DualProblem> {
    let grid = *plan.grid();
    let p = CoefficientField::constant(grid, pbar)?;
    let q = CoefficientField::constant(grid, qbar)?;
    DualProblem::new(exponents, p, q, plan)
}

/// Ground state of the constant-coefficient problem; its energy is `c_M`.
pub fn limit_ground_energy(
    pbar: f64,
    qbar: f64,
    exponents: AdmissibleExponents,
    plan: Arc<ResolventPlan>,
    cfg: &SolverConfig,
) -> Result<Solution> {
    if !(pbar > 0.0 && qbar > 0.0) {
        return Err(Error::Config(format!("limit coefficients ({pbar}, {qbar}) must be positive")));
    }
    solve_ground_state(&limit_problem(pbar, qbar, exponents, plan)?, cfg)
}

/// Lattice shift `a` and sign `s` maximizing `<f, s g(. - a h)>`.
pub fn best_alignment(fft: &SpectralPlan, f: &ScalarField, g: &ScalarField) -> Result<(Vec<i64>, f64)> {
    f.same_grid(g)?;
    let grid = *f.grid();
    let to_c = |x: &ScalarField| x.values().iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>();
    let mut a = to_c(f);
    let mut b = to_c(g);
    fft.forward(&mut a);
    fft.forward(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y.conj();
    }
    fft.inverse(&mut a);
    let (best, val) = a
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, c)| if c.re.abs() > bv.abs() { (i, c.re) } else { (bi, bv) });
    let mut idx = vec![0; grid.dim()];
    grid.multi_index(best, &mut idx);
    let n = grid.samples_per_axis() as i64;
    let shift = idx.iter().map(|&k| if (k as i64) < n / 2 { k as i64 } else { k as i64 - n }).collect();
    Ok((shift, if val < 0.0 { -1.0 } else { 1.0 }))
}

/// Relative `L^r` distance of `g` to `f` after optimal shift and sign.
fn aligned_distance(fft: &SpectralPlan, f: &ScalarField, g: &ScalarField, r: f64) -> Result<f64> {
    let (shift, sign) = best_alignment(fft, f, g)?;
    let gs = g.shift(&shift)?.scale(sign);
    Ok(f.sub(&gs)?.lp_norm(r) / f.lp_norm(r))
}

/// Groups solutions that agree in energy (within `energy_tol`, relative)
/// and, after optional lattice alignment and sign flip, in both components
/// to `1e-3` relative in `L^2`. Returns one representative per group, in input order.
pub fn dedup_solutions(solutions: Vec<Solution>, energy_tol: f64, shift_search: bool) -> Result<Vec<Solution>> {
    let mut reps: Vec<Solution> = Vec::new();
    let mut fft: Option<SpectralPlan> = None;
    'outer: for s in solutions {
        for r in &reps {
            if (s.energy - r.energy).abs() > energy_tol * r.energy.abs().max(s.energy.abs()) {
                continue;
            }
            let grid = *r.state.grid();
            let plan = fft.get_or_insert_with(|| SpectralPlan::new(grid.dim(), grid.samples_per_axis()));
            let same = if shift_search {
                aligned_distance(plan, r.state.psi(), s.state.psi(), 2.0)? <= 1e-3
                    && aligned_distance(plan, r.state.phi(), s.state.phi(), 2.0)? <= 1e-3
            } else {
                let d =
                    |a: &ScalarField, b: &ScalarField| -> Result<f64> { Ok(a.sub(b)?.lp_norm(2.0) / a.lp_norm(2.0)) };
                d(r.state.psi(), s.state.psi())? <= 1e-3 && d(r.state.phi(), s.state.phi())? <= 1e-3
            };
            if same {
                continue 'outer;
            }
        }
        reps.push(s);
    }
    Ok(reps)
}
