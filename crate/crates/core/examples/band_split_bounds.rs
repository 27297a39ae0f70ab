// Empirical constants of the near-shell and far-shell kernel pieces.

use std::f64::consts::PI;

use hdual::kernel::{verify_band_split_bounds, SpectralCutoff};
use hdual::{make_grid, ResolventPlan};

pub fn main() -> hdual::Result<()> {
    let plan = ResolventPlan::new(make_grid(3, 8.0 * PI, 64)?, None)?;
    for cutoff in [SpectralCutoff::Annulus, SpectralCutoff::Zero] {
        let r = verify_band_split_bounds(&plan, cutoff)?;
        println!("{}", serde_json::to_string(&r)?);
    }
    Ok(())
}
