// Lattice shifts, norms and the binary field dump round trip.

use std::f64::consts::PI;

use hdual::{make_grid, ScalarField};

pub fn main() -> hdual::Result<()> {
    let grid = make_grid(3, 2.0 * PI, 16)?;
    let f = ScalarField::from_fn(grid, |x| (-x.iter().map(|v| v * v).sum::<f64>()).exp())?;
    let g = f.shift(&[2, -1, 3])?;
    println!("||f||_2 = {:.15}, ||shifted f||_2 = {:.15}", f.lp_norm(2.0), g.lp_norm(2.0));
    println!("||f||_1.25 = {:.6}, ||f||_5 = {:.6}, max = {}", f.lp_norm(1.25), f.lp_norm(5.0), f.max_abs());
    let dir = std::env::temp_dir().join("hdual-field-dump");
    std::fs::create_dir_all(&dir)?;
    let (data, meta) = g.write_dump(&dir.join("g"), "psi")?;
    let (back, role) = ScalarField::read_dump(&dir.join("g"))?;
    println!("{} + {} -> role {role}, identical: {}", data.display(), meta.display(), back.values() == g.values());
    Ok(())
}
