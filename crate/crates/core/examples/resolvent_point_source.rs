// The real resolvent on a periodic box: an eigenmode and a point source.

use std::f64::consts::PI;

use hdual::kernel::kernel_samples;
use hdual::{apply_helmholtz, apply_resolvent, make_grid, ResolventPlan, ScalarField};

pub fn main() -> hdual::Result<()> {
    let grid = make_grid(3, 8.0 * PI, 64)?;
    let plan = ResolventPlan::new(grid, None)?;
    let gap = plan.shell_gap();
    println!("delta = {}, min shell gap = {}, on-shell modes = {}", plan.delta(), gap.min_gap, gap.on_shell);

    let f = ScalarField::from_fn(grid, |x| (2.0 * x[0]).cos())?;
    let r = apply_resolvent(&plan, &f)?;
    let back = apply_helmholtz(&plan, &r)?;
    println!(
        "cos(2 x1): R f / f = {:.9}, (-Delta - 1) R f - f = {:.2e}",
        r.inner(&f)? / f.inner(&f)?,
        back.sub(&f)?.lp_norm(2.0) / f.lp_norm(2.0)
    );

    let k = kernel_samples(&plan)?;
    let n = grid.samples_per_axis();
    println!("{:>8} {:>14} {:>14}", "r", "grid", "cos r/(4 pi r)");
    for j in [2, 4, 6, 8, 12, 16] {
        let mut idx = vec![n / 2; 3];
        idx[0] += j;
        let r = j as f64 * grid.spacing();
        println!("{r:>8.4} {:>14.6e} {:>14.6e}", k.values()[grid.flat_index(&idx)], r.cos() / (4.0 * PI * r));
    }
    Ok(())
}
