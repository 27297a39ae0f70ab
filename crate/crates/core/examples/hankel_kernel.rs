// Hankel functions and the real kernel Psi in dimensions 3, 4 and 5.

use std::f64::consts::PI;

use hdual::kernel::{hankel_first_kind, psi_value};

pub fn main() -> hdual::Result<()> {
    for x in [0.5, 1.0, 5.0, 12.0, 30.0] {
        let h = hankel_first_kind(1.0, x)?;
        println!("H1(1, {x:>4}) = {:+.12} {:+.12}i", h.re, h.im);
    }
    println!("{:>6} {:>14} {:>14} {:>14} {:>14}", "r", "cos r/(4 pi r)", "Psi N=3", "Psi N=4", "Psi N=5");
    for r in [0.1, 1.0, PI, 10.0, 25.0] {
        println!(
            "{r:>6.3} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
            r.cos() / (4.0 * PI * r),
            psi_value(3, r)?,
            psi_value(4, r)?,
            psi_value(5, r)?
        );
    }
    Ok(())
}
