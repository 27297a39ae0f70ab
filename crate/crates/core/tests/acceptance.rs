//! One PASS/FAIL line per acceptance criterion, tolerances pinned.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use hdual::cli::main_with_args;
use hdual::concentration::{run_sweep, ConcentrationReport, GridConfig, SweepConfig};
use hdual::dual::DualProblem;
use hdual::field::{Bump, CoefficientSpec, Grid};
use hdual::groundstate::{limit_problem, solve_from, solve_ground_state, Algorithm, SolverConfig};
use hdual::kernel::kernel_samples;
use hdual::resolvent::default_delta;
use hdual::{
    apply_resolvent, birman_schwinger, check_admissible, decay_exponent, make_coefficient, make_grid,
    rescaling_exponents, RegionReason, ResolventPlan, ScalarField,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: u32, passed: bool, detail: String) {
    println!("{} criterion {criterion:>2}: {detail}", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {criterion}: {detail}");
}

fn benchmark_grid() -> Grid {
    make_grid(3, 8.0 * PI, 64).unwrap()
}

fn benchmark_plan() -> Arc<ResolventPlan> {
    Arc::new(ResolventPlan::new(benchmark_grid(), None).unwrap())
}

fn smooth(grid: Grid, rng: &mut ChaCha8Rng) -> ScalarField {
    let k: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let c: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.0..4.0)).collect();
    let s = rng.gen_range(1.5..4.0);
    ScalarField::from_fn(grid, |x| {
        let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
        (k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + k[3]).cos() * (-r2 / (2.0 * s * s)).exp()
    })
    .unwrap()
}

fn derivative(f: impl Fn(f64) -> f64, d: f64) -> f64 {
    (8.0 * (f(d) - f(-d)) - (f(2.0 * d) - f(-2.0 * d))) / (12.0 * d)
}

fn bump_spec() -> CoefficientSpec {
    CoefficientSpec::Gaussians { floor: 0.5, bumps: vec![Bump { amplitude: 1.0, center: vec![0.0; 3], width: 1.0 }] }
}

fn sweep_config() -> SweepConfig {
    SweepConfig {
        dimension: 3,
        p: 5.0,
        q: 5.0,
        eps_list: vec![1.0, 0.5, 0.25],
        p_coefficient: bump_spec(),
        q_coefficient: bump_spec(),
        rho: None,
        grid: GridConfig { half_width: 8.0 * PI, samples: 64 },
        delta: None,
        solver: SolverConfig::with_algorithm(Algorithm::FixedPoint),
        multistart_count: 1,
        seed: 7,
        transplant_check: true,
    }
}

fn sweep() -> &'static ConcentrationReport {
    static REPORT: OnceLock<ConcentrationReport> = OnceLock::new();
    REPORT.get_or_init(|| run_sweep(&sweep_config()).unwrap())
}

#[test]
fn criterion_01_operator_symmetry() {
    let grid = benchmark_grid();
    let plan = benchmark_plan();
    let spec = CoefficientSpec::Gaussians {
        floor: 0.4,
        bumps: vec![Bump { amplitude: 1.2, center: vec![1.0, 0.0, -2.0], width: 3.0 }],
    };
    let pc = make_coefficient(&spec, grid).unwrap();
    let qc = make_coefficient(&bump_spec(), grid).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u = smooth(grid, &mut rng);
        let v = smooth(grid, &mut rng);
        let a = u.inner(&birman_schwinger(&plan, &pc, 5.0, &qc, 4.5, &v).unwrap()).unwrap();
        let b = v.inner(&birman_schwinger(&plan, &qc, 4.5, &pc, 5.0, &u).unwrap()).unwrap();
        worst = worst.max((a - b).abs() / a.abs().max(b.abs()));
    }
    report(1, worst <= 1e-10, format!("operator symmetry, worst relative defect {worst:.2e} (tol 1e-10)"));
}

#[test]
fn criterion_02_resolvent_correctness() {
    let grid = benchmark_grid();
    let plan = benchmark_plan();
    let delta = plan.delta();

    let f = ScalarField::from_fn(grid, |x| (2.0 * x[0]).cos()).unwrap();
    let want = 3.0 / (9.0 + delta * delta);
    let eig = apply_resolvent(&plan, &f).unwrap().sub(&f.scale(want)).unwrap().lp_norm(2.0) / f.lp_norm(2.0);

    let algebra = plan
        .symbol()
        .iter()
        .zip(plan.multiplier())
        .map(|(&s, &m)| (s * m + delta * delta / (s * s + delta * delta) - 1.0).abs())
        .fold(0.0, f64::max);

    let k = kernel_samples(&plan).unwrap();
    let h = grid.spacing();
    let (lo, hi) = (2.0 * h, grid.half_width() / 4.0);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..grid.len() {
        let r = grid.point(i).iter().map(|x| x * x).sum::<f64>().sqrt();
        if r >= lo && r <= hi {
            let exact = r.cos() / (4.0 * PI * r);
            num += (k.values()[i] - exact).powi(2);
            den += exact * exact;
        }
    }
    let point = (num / den).sqrt();
    let passed = eig <= 1e-12 && algebra <= 1e-15 && point <= 0.02;
    report(
        2,
        passed,
        format!(
            "eigenmode {eig:.2e} (tol 1e-12), multiplier algebra {algebra:.2e} (tol 1e-15), \
             point source {:.1}% on r in [2h, L/4] (tol 2%)",
            100.0 * point
        ),
    );
}

#[test]
fn criterion_03_gradient_consistency() {
    let grid = benchmark_grid();
    let plan = benchmark_plan();
    let pc = make_coefficient(&bump_spec(), grid).unwrap();
    let qc = make_coefficient(&CoefficientSpec::Constant { value: 1.2 }, grid).unwrap();
    let prob = DualProblem::new(check_admissible(3, 5.0, 4.5).unwrap(), pc, qc, plan).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // localized and strictly positive, so |.|^{q'} is smooth along every probe
    let envelope = ScalarField::from_fn(grid, |x| (-x.iter().map(|v| v * v).sum::<f64>() / 72.0).exp()).unwrap();
    let positive = |rng: &mut ChaCha8Rng| smooth(grid, rng).map(|v| 0.5 + v * v).mul(&envelope).unwrap();
    let z = prob.state(positive(&mut rng), positive(&mut rng)).unwrap();
    let (g1, g2) = prob.gradient(&z);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let w1 = smooth(grid, &mut rng);
        let w2 = smooth(grid, &mut rng);
        let d = g1.inner(&w1).unwrap() + g2.inner(&w2).unwrap();
        let fd = derivative(
            |t| {
                let zt = prob.state(z.psi().add(&w1.scale(t)).unwrap(), z.phi().add(&w2.scale(t)).unwrap()).unwrap();
                prob.energy(&zt)
            },
            1e-3,
        );
        worst = worst.max((fd - d).abs() / d.abs());
    }
    report(3, worst <= 1e-6, format!("20 directional derivatives, worst relative error {worst:.2e} (tol 1e-6)"));
}

#[test]
fn criterion_04_nehari_suite() {
    let grid = benchmark_grid();
    let plan = benchmark_plan();
    let pc = make_coefficient(&bump_spec(), grid).unwrap();
    let qc = make_coefficient(&CoefficientSpec::Constant { value: 0.8 }, grid).unwrap();
    let prob = DualProblem::new(check_admissible(3, 5.0, 4.5).unwrap(), pc, qc, plan).unwrap();
    let (qd, pd) = prob.duals();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut res, mut idem, mut scale, mut ident): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut tangent = true;
    let mut states = 0;
    while states < 10 {
        let z = prob.state(smooth(grid, &mut rng), smooth(grid, &mut rng)).unwrap();
        let z = if z.c() > 0.0 { z } else { prob.scaled(&z, 1.0, -1.0) };
        let (t, zp) = prob.nehari_project(&z).unwrap();
        res = res.max(prob.nehari_gap(&zp).unwrap().abs() / (zp.a() + zp.b()));
        idem = idem.max((prob.nehari_project(&zp).unwrap().0 - 1.0).abs());
        for lambda in [0.3, 2.0, 7.5] {
            let (tl, _) = prob.nehari_project(&prob.scaled(&z, lambda, lambda)).unwrap();
            scale = scale.max((tl * lambda - t).abs() / t);
        }
        let j = prob.energy(&zp);
        ident = ident.max((j - prob.nehari_energy(&zp)).abs() / j);
        tangent &= (qd - 2.0) * zp.a() + (pd - 2.0) * zp.b() < 0.0;
        states += 1;
    }
    let passed = res <= 1e-12 && idem <= 1e-10 && scale <= 1e-10 && ident <= 1e-10 && tangent;
    report(
        4,
        passed,
        format!(
            "residual {res:.2e} (tol 1e-12), idempotence {idem:.2e} (tol 1e-10), scaling {scale:.2e} (tol 1e-10), \
             energy identity {ident:.2e} (tol 1e-10), tangency negative on all: {tangent}"
        ),
    );
}

#[test]
fn criterion_05_ground_state_cross_validation() {
    let plan = benchmark_plan();
    let prob = limit_problem(1.0, 1.0, check_admissible(3, 5.0, 5.0).unwrap(), plan).unwrap();
    let pg = solve_ground_state(&prob, &SolverConfig::with_algorithm(Algorithm::ProjectedGradient)).unwrap();
    let fp = solve_ground_state(&prob, &SolverConfig::with_algorithm(Algorithm::FixedPoint)).unwrap();
    let agree = (pg.energy - fp.energy).abs() / fp.energy;
    let defect = pg.residual.max(fp.residual);
    let primal = [pg.primal.relative_u, pg.primal.relative_v, fp.primal.relative_u, fp.primal.relative_v]
        .into_iter()
        .fold(0.0, f64::max);
    let shift = [5, -3, 7];
    let moved = solve_from(
        &prob,
        &SolverConfig::with_algorithm(Algorithm::FixedPoint),
        fp.state.psi().shift(&shift).unwrap(),
        fp.state.phi().shift(&shift).unwrap(),
    )
    .unwrap();
    let translated = (moved.energy - fp.energy).abs() / fp.energy;
    let passed =
        pg.converged && fp.converged && agree <= 1e-6 && defect <= 1e-9 && primal <= 1e-6 && translated <= 1e-10;
    report(
        5,
        passed,
        format!(
            "c = {:.10} (projected gradient) vs {:.10} (fixed point): agreement {agree:.2e} (tol 1e-6), \
             defect {defect:.2e} (tol 1e-9), primal residual {primal:.2e} (tol 1e-6), shifted seed {translated:.2e} (tol 1e-10)",
            pg.energy, fp.energy
        ),
    );
}

#[test]
fn criterion_06_decay_estimate() {
    // separations up to 32 need a larger box; absorption stays at its desk-scale value
    let grid = make_grid(3, 24.0 * PI, 128).unwrap();
    let plan = ResolventPlan::new(grid, Some(default_delta(&benchmark_grid()))).unwrap();
    let (p, q) = (5.0, 5.0);
    let qd = q / (q - 1.0);
    let radius = 2.0;
    let u = ScalarField::from_fn(grid, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r < radius {
            (PI * r / (2.0 * radius)).cos().powi(2)
        } else {
            0.0
        }
    })
    .unwrap();
    let ru = apply_resolvent(&plan, &u).unwrap();
    let outer = grid.half_width();
    let mut points = Vec::new();
    for m in [8.0, 12.0, 16.0, 24.0, 32.0] {
        let tail = ScalarField::from_fn(grid, |x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r >= radius + m && r < outer {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        // v = 1_{M_{R+m}} |Ru|^{p-2} Ru attains the supremum over v of the pairing
        let v = ru.signed_power(p - 1.0).mul(&tail).unwrap();
        let pairing = u.inner(&apply_resolvent(&plan, &v).unwrap()).unwrap().abs();
        let ratio = pairing / (u.lp_norm(qd) * v.lp_norm(p / (p - 1.0)));
        points.push((m.ln(), ratio.ln()));
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let slope = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / points.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    let lambda = decay_exponent(3, p, q).unwrap();
    report(
        6,
        slope <= -(lambda - 0.1),
        format!("log-log slope {slope:.3} over m in {{8,12,16,24,32}} (need <= {:.1})", -(lambda - 0.1)),
    );
}

#[test]
fn criterion_07_energy_comparison() {
    let r = sweep();
    let c_m = r.c_m;
    let conv: Vec<_> = r.entries.iter().filter(|e| e.converged).collect();
    let above = conv.iter().all(|e| c_m <= e.c_eps + 1e-6 * c_m);
    let monotone = r.entries.windows(2).all(|w| w[1].c_eps <= w[0].c_eps + 1e-6 * w[0].c_eps);
    let levels: Vec<String> = r.entries.iter().map(|e| format!("c({}) = {:.6}", e.eps, e.c_eps)).collect();
    report(
        7,
        r.limit_converged && conv.len() == r.entries.len() && above && monotone,
        format!("c_M = {c_m:.6} <= {}; decreasing: {monotone}", levels.join(", ")),
    );
}

#[test]
fn criterion_08_concentration() {
    let r = sweep();
    let e = r.entries.iter().find(|e| e.eps == 0.25).unwrap();
    let norm = |b: &[f64]| b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (bp, bf) = (norm(&e.barycenter_psi), norm(&e.barycenter_phi));
    let h = r.spacing;
    let passed =
        e.converged && bp <= 2.0 * h && bf <= 2.0 * h && e.profile_distance_u <= 0.05 && e.profile_distance_v <= 0.05;
    report(
        8,
        passed,
        format!(
            "eps = 0.25: |barycenters| {bp:.2e}, {bf:.2e} (tol 2h = {:.3}), profile distances {:.4} (L^q), {:.4} (L^p) (tol 0.05)",
            2.0 * h,
            e.profile_distance_u,
            e.profile_distance_v
        ),
    );
}

#[test]
fn criterion_09_exponent_spot_checks() {
    let lambda = decay_exponent(3, 5.0, 5.0).unwrap();
    let (b1, b2) = rescaling_exponents(5.0, 5.0).unwrap();
    let lambda2 = decay_exponent(3, 4.5, 6.0).unwrap();
    let (c1, c2) = rescaling_exponents(4.0, 6.0).unwrap();
    let rejected = [(6.0, 6.0, RegionReason::HyperbolaLow), (3.0, 8.0, RegionReason::BelowLowerP)]
        .into_iter()
        .all(|(p, q, r)| matches!(check_admissible(3, p, q), Err(hdual::Error::RegionViolation(x)) if x == r));
    let passed = (lambda - 0.2).abs() <= 1e-12
        && (lambda2 - 2.0 / 9.0).abs() <= 1e-12
        && (b1 + 2.0 / 3.0).abs() <= 1e-12
        && (b2 + 2.0 / 3.0).abs() <= 1e-12
        && (c1 + 4.0 / 7.0).abs() <= 1e-12
        && (c2 + 6.0 / 7.0).abs() <= 1e-12
        && rejected
        && check_admissible(3, 5.0, 5.0).is_ok();
    report(
        9,
        passed,
        format!("lambda(3,5,5) = {lambda:.15}, beta = ({b1:.15}, {b2:.15}), boundary rejections: {rejected}"),
    );
}

fn write_sweep_config(path: &Path) {
    let cfg = serde_json::json!({
        "schema_version": 1,
        "mode": "sweep",
        "dimension": 3, "p": 5, "q": 5,
        "grid": {"half_width_pi": 8, "samples": 64},
        "coefficients": {"p": bump_spec(), "q": bump_spec()},
        "solver": {"algorithm": "fixed_point"},
        "sweep": {"eps_list": [1.0, 0.5, 0.25], "multistart_count": 2, "transplant_check": true},
        "seed": 11
    });
    std::fs::write(path, serde_json::to_vec_pretty(&cfg).unwrap()).unwrap();
}

#[test]
fn criterion_10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    write_sweep_config(&cfg);
    let mut blocks = Vec::new();
    let mut codes = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let args =
            ["hdual", "sweep", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap(), "--threads", "2"];
        codes.push(main_with_args(args));
        let manifest: serde_json::Value =
            serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
        blocks.push(serde_json::to_string(&manifest["scalars"]).unwrap());
    }
    let same = blocks[0] == blocks[1];
    report(
        10,
        same && codes == [0, 0],
        format!(
            "two sweep runs, exit codes {codes:?}, scalar blocks bitwise identical: {same} ({} bytes)",
            blocks[0].len()
        ),
    );
}
