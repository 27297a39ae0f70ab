use std::f64::consts::PI;

use hdual::kernel::{verify_band_split_bounds, SpectralCutoff};
use hdual::{make_grid, ResolventPlan};

#[test]
fn box_doubling_keeps_near_shell_constant() {
    let small = ResolventPlan::new(make_grid(3, 8.0 * PI, 64).unwrap(), None).unwrap();
    let large = ResolventPlan::new(make_grid(3, 16.0 * PI, 128).unwrap(), Some(small.delta())).unwrap();
    let a = verify_band_split_bounds(&small, SpectralCutoff::Annulus).unwrap();
    let b = verify_band_split_bounds(&large, SpectralCutoff::Annulus).unwrap();
    println!(
        "near-shell constant {:.4} -> {:.4}, far-shell {:.4} -> {:.4}",
        a.c_near_shell, b.c_near_shell, a.c_far_shell, b.c_far_shell
    );
    assert!(b.c_near_shell <= 1.1 * a.c_near_shell, "{} -> {}", a.c_near_shell, b.c_near_shell);
}
