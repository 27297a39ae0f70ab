//! Periodic-box discretization.
//!
//! The box is `[-L, L)^N` sampled at `n` points per axis. Storage is
//! row-major with axis 1 varying fastest: the flat index of the multi-index
//! `(j_1, .., j_N)` is `j_1 + n j_2 + n^2 j_3 + ...`. Integrals use the
//! rectangle rule with weight `h^N`, which is the trapezoid rule on a
//! periodic grid.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    n: usize,
}

/// Builds a grid for `N` in {3, 4, 5} with `n` a power of two, at least 16.
pub fn make_grid(dim: usize, half_width: f64, n: usize) -> Result<Grid> {
    if !(3..=5).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    Grid::new(dim, half_width, n)
}

impl Grid {
    /// Like [`make_grid`] but without the dimension restriction; used for
    /// dilated copies and small test grids.
    pub fn new(dim: usize, half_width: f64, n: usize) -> Result<Grid> {
        if dim == 0 {
            return Err(Error::BadResolution("dimension must be positive".into()));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::BadResolution(format!("half width {half_width} must be positive")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::BadResolution(format!("{n} samples per axis; need a power of two >= 16")));
        }
        Ok(Grid { dim, half_width, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn samples_per_axis(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Quadrature weight `h^N`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing of the frequency lattice, `pi / L`.
    pub fn frequency_spacing(&self) -> f64 {
        PI / self.half_width
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Frequency of FFT bin `k` along one axis; the Nyquist bin is `-n/2`.
    pub fn frequency(&self, k: usize) -> f64 {
        let m = if k < self.n / 2 { k as i64 } else { k as i64 - self.n as i64 };
        m as f64 * self.frequency_spacing()
    }

    /// Per-axis multi-index of a flat index.
    pub fn multi_index(&self, mut flat: usize, out: &mut [usize]) {
        for slot in out.iter_mut().take(self.dim) {
            *slot = flat % self.n;
            flat /= self.n;
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().rev().fold(0, |acc, &j| acc * self.n + j)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dim];
        self.multi_index(flat, &mut idx);
        idx.iter().map(|&j| self.coordinate(j)).collect()
    }

    /// Squared frequency magnitude `|xi|^2` for every bin, in storage order.
    pub fn frequency_squares(&self) -> Vec<f64> {
        let axis: Vec<f64> = (0..self.n).map(|k| self.frequency(k).powi(2)).collect();
        let mut idx = vec![0; self.dim];
        (0..self.len())
            .map(|flat| {
                self.multi_index(flat, &mut idx);
                idx.iter().map(|&k| axis[k]).sum()
            })
            .collect()
    }

    /// Same box and dimension, different half width.
    pub fn with_half_width(&self, half_width: f64) -> Result<Grid> {
        Grid::new(self.dim, half_width, self.n)
    }
}

/// A real function sampled on a [`Grid`]; all samples are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        ScalarField { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        ScalarField { grid, values: vec![c; grid.len()] }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut idx = vec![0; grid.dim()];
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|flat| {
                grid.multi_index(flat, &mut idx);
                for (xi, &j) in x.iter_mut().zip(&idx) {
                    *xi = grid.coordinate(j);
                }
                f(&x)
            })
            .collect();
        ScalarField::new(grid, values)
    }

    pub(crate) fn from_values_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `sum |f_j|^r h^N`, summed in ascending order of the terms so the
    /// result does not depend on the sample order.
    pub fn lp_norm_pow(&self, r: f64) -> f64 {
        let mut terms: Vec<f64> = self.values.par_iter().map(|v| abs_pow(*v, r)).collect();
        terms.par_sort_unstable_by(f64::total_cmp);
        terms.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Like [`Self::lp_norm_pow`] in storage order; cheaper, not permutation invariant.
    pub fn lp_norm_pow_fast(&self, r: f64) -> f64 {
        self.values.iter().map(|v| abs_pow(*v, r)).sum::<f64>() * self.grid.cell_volume()
    }

    /// Rectangle-rule `L^r` norm, `r >= 1`.
    pub fn lp_norm(&self, r: f64) -> f64 {
        self.lp_norm_pow(r).powf(1.0 / r)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Quadrature inner product `sum f_j g_j h^N`.
    pub fn inner(&self, other: &ScalarField) -> Result<f64> {
        self.same_grid(other)?;
        Ok(dot(&self.values, &other.values) * self.grid.cell_volume())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        self.same_grid(other)?;
        Ok(ScalarField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        self.map(|v| c * v)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_map(other, |a, b| a * b)
    }

    /// Pointwise `sign(f) |f|^s`, with `0 -> 0`.
    pub fn signed_power(&self, s: f64) -> ScalarField {
        self.map(|v| signed_pow(v, s))
    }

    /// Cyclic shift: the result satisfies `g(x) = f(x - a h)`.
    pub fn shift(&self, a: &[i64]) -> Result<ScalarField> {
        if a.len() != self.grid.dim {
            return Err(Error::NonLatticeShift(format!(
                "shift has {} components, grid has dimension {}",
                a.len(),
                self.grid.dim
            )));
        }
        let n = self.grid.n as i64;
        let offs: Vec<usize> = a.iter().map(|&s| s.rem_euclid(n) as usize).collect();
        let mut idx = vec![0; self.grid.dim];
        let mut src = vec![0; self.grid.dim];
        let values = (0..self.grid.len())
            .map(|flat| {
                self.grid.multi_index(flat, &mut idx);
                for ((s, &j), &o) in src.iter_mut().zip(&idx).zip(&offs) {
                    *s = (j + self.grid.n - o) % self.grid.n;
                }
                self.values[self.grid.flat_index(&src)]
            })
            .collect();
        Ok(ScalarField { grid: self.grid, values })
    }

    /// Shift by a physical displacement, which must be a lattice vector.
    pub fn shift_by(&self, displacement: &[f64]) -> Result<ScalarField> {
        let h = self.grid.spacing();
        let steps = displacement
            .iter()
            .map(|&d| {
                let k = (d / h).round();
                if (d / h - k).abs() > 1e-9 * (1.0 + k.abs()) {
                    Err(Error::NonLatticeShift(format!("{d} is not a multiple of h = {h}")))
                } else {
                    Ok(k as i64)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        self.shift(&steps)
    }

    /// Writes the headerless little-endian dump `<base>.f64` and its
    /// sidecar `<base>.json`. Returns both paths.
    pub fn write_dump(&self, base: &Path, role: &str) -> Result<(PathBuf, PathBuf)> {
        let data_path = base.with_extension("f64");
        let meta_path = base.with_extension("json");
        let mut bytes = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        fs::write(&data_path, bytes)?;
        let meta = DumpMeta {
            dimension: self.grid.dim,
            half_width: self.grid.half_width,
            samples_per_axis: self.grid.n,
            role: role.to_string(),
        };
        fs::write(&meta_path, serde_json::to_vec_pretty(&meta)?)?;
        Ok((data_path, meta_path))
    }

    pub fn read_dump(base: &Path) -> Result<(ScalarField, String)> {
        let meta: DumpMeta = serde_json::from_slice(&fs::read(base.with_extension("json"))?)?;
        let grid = Grid::new(meta.dimension, meta.half_width, meta.samples_per_axis)?;
        let bytes = fs::read(base.with_extension("f64"))?;
        if bytes.len() != grid.len() * 8 {
            return Err(Error::GridMismatch);
        }
        let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
        Ok((ScalarField::new(grid, values)?, meta.role))
    }
}

/// Sidecar metadata of a field dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpMeta {
    pub dimension: usize,
    pub half_width: f64,
    pub samples_per_axis: usize,
    pub role: String,
}

fn abs_pow(v: f64, r: f64) -> f64 {
    if r == 2.0 {
        v * v
    } else {
        v.abs().powf(r)
    }
}

pub(crate) fn signed_pow(v: f64, s: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum() * v.abs().powf(s)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One Gaussian bump `A exp(-|x - c|^2 / sigma^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub amplitude: f64,
    pub center: Vec<f64>,
    pub width: f64,
}

/// Analytic description of a coefficient function `P` or `Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant {
        value: f64,
    },
    /// `floor + sum_i A_i exp(-|x - c_i|^2 / sigma_i^2)`; the far field is the floor.
    Gaussians {
        floor: f64,
        bumps: Vec<Bump>,
    },
}

impl CoefficientSpec {
    pub fn floor(&self) -> f64 {
        match self {
            CoefficientSpec::Constant { value } => *value,
            CoefficientSpec::Gaussians { floor, .. } => *floor,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            CoefficientSpec::Constant { value } => *value,
            CoefficientSpec::Gaussians { floor, bumps } => {
                floor
                    + bumps
                        .iter()
                        .map(|b| {
                            let d2: f64 = x.iter().zip(&b.center).map(|(xi, ci)| (xi - ci).powi(2)).sum();
                            b.amplitude * (-d2 / (b.width * b.width)).exp()
                        })
                        .sum::<f64>()
            }
        }
    }

    /// Supremum over the whole space (not just the grid).
    pub fn sup(&self) -> f64 {
        match self {
            CoefficientSpec::Constant { value } => *value,
            CoefficientSpec::Gaussians { bumps, .. } => {
                // the max sits near a center; search centers and refine
                bumps.iter().map(|b| self.eval(&b.center)).fold(self.floor(), f64::max)
            }
        }
    }

    /// Centers where the sup is attained, original coordinates. Empty for
    /// a constant, whose maximum set is the whole space.
    pub fn argmax_centers(&self) -> Vec<Vec<f64>> {
        match self {
            CoefficientSpec::Constant { .. } => Vec::new(),
            CoefficientSpec::Gaussians { bumps, .. } => {
                let sup = self.sup();
                bumps.iter().filter(|b| self.eval(&b.center) >= sup * (1.0 - 1e-12)).map(|b| b.center.clone()).collect()
            }
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            CoefficientSpec::Constant { value } if !(*value > 0.0 && value.is_finite()) => {
                Err(Error::Config(format!("constant coefficient {value} must be positive")))
            }
            CoefficientSpec::Gaussians { floor, bumps } => {
                if !(*floor > 0.0 && floor.is_finite()) {
                    return Err(Error::Config(format!("floor {floor} must be positive")));
                }
                for b in bumps {
                    if !(b.amplitude > 0.0) || !(b.width > 0.0) || b.center.len() != dim {
                        return Err(Error::Config(format!("bad bump {b:?}")));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// A sampled coefficient with its floor, maximum and discrete argmax set.
#[derive(Debug, Clone)]
pub struct CoefficientField {
    pub base: ScalarField,
    pub floor: f64,
    pub sup_value: f64,
    pub argmax_points: Vec<Vec<f64>>,
    argmax_indices: Vec<usize>,
}

impl CoefficientField {
    pub fn from_field(base: ScalarField, floor: f64) -> Result<Self> {
        if !(floor > 0.0) {
            return Err(Error::FloorViolation { value: floor, floor });
        }
        if let Some(&v) = base.values().iter().find(|&&v| v < floor) {
            return Err(Error::FloorViolation { value: v, floor });
        }
        let sup_value = base.values().iter().copied().fold(f64::MIN, f64::max);
        let argmax_indices: Vec<usize> =
            (0..base.grid().len()).filter(|&i| base.values()[i] >= sup_value * (1.0 - 1e-12)).collect();
        let argmax_points = argmax_indices.iter().map(|&i| base.grid().point(i)).collect();
        Ok(CoefficientField { base, floor, sup_value, argmax_points, argmax_indices })
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        CoefficientField::from_field(ScalarField::constant(grid, value), value)
    }

    pub fn grid(&self) -> &Grid {
        self.base.grid()
    }

    pub fn argmax_indices(&self) -> &[usize] {
        &self.argmax_indices
    }

    /// Pointwise power `P^s`.
    pub fn power(&self, s: f64) -> ScalarField {
        self.base.map(|v| v.powf(s))
    }
}

/// Samples `spec` on `grid`.
pub fn make_coefficient(spec: &CoefficientSpec, grid: Grid) -> Result<CoefficientField> {
    make_dilated_coefficient(spec, grid, 1.0)
}

/// Samples `x -> spec(eps x)` on `grid`.
pub fn make_dilated_coefficient(spec: &CoefficientSpec, grid: Grid, eps: f64) -> Result<CoefficientField> {
    let base = ScalarField::from_fn(grid, |x| {
        let y: Vec<f64> = x.iter().map(|v| eps * v).collect();
        spec.eval(&y)
    })?;
    CoefficientField::from_field(base, spec.floor())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3(l: f64, n: usize) -> Grid {
        make_grid(3, l, n).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = grid3(8.0 * PI, 64);
        assert!((g.spacing() - PI / 4.0).abs() < 1e-15);
        assert!((g.frequency_spacing() - 0.125).abs() < 1e-15);
        assert_eq!(g.frequency(32), -4.0);
        assert_eq!(g.frequency(8), 1.0);
        assert!(matches!(make_grid(3, 8.0 * PI, 10), Err(Error::BadResolution(_))));
        assert!(matches!(make_grid(3, 8.0 * PI, 8), Err(Error::BadResolution(_))));
        assert!(matches!(make_grid(6, 1.0, 16), Err(Error::UnsupportedDimension(6))));
        let g4 = make_grid(4, 4.0 * PI, 32).unwrap();
        assert_eq!(g4.len(), 32usize.pow(4));
        assert!((g4.frequency_spacing() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn constant_norm_is_exact() {
        let g = grid3(PI, 16);
        let f = ScalarField::constant(g, 1.0);
        let vol = (2.0 * PI).powi(3);
        for r in [1.0, 1.25, 2.0, 5.0] {
            assert!((f.lp_norm(r) - vol.powf(1.0 / r)).abs() < 1e-12 * vol);
        }
    }

    #[test]
    fn indicator_norm_counts_points() {
        let g = grid3(2.0, 16);
        let f = ScalarField::from_fn(g, |x| if x[2] < 0.0 { 1.0 } else { 0.0 }).unwrap();
        let want = (0.5 * 4.0f64.powi(3)).powf(1.0 / 3.0);
        assert!((f.lp_norm(3.0) - want).abs() < 1e-12);
    }

    #[test]
    fn cosine_l2_norm() {
        let g = grid3(PI, 32);
        let f = ScalarField::from_fn(g, |x| x[0].cos()).unwrap();
        assert!((f.lp_norm(2.0) - (4.0 * PI.powi(3)).sqrt()).abs() < 1e-12 * 11.0);
        assert!((f.lp_norm(2.0) - 11.1366).abs() < 1e-4);
    }

    #[test]
    fn trig_polynomial_l2_exact() {
        let g = grid3(PI, 16);
        let f = ScalarField::from_fn(g, |x| 1.5 + (2.0 * x[0] + x[1]).sin() - 0.5 * (3.0 * x[2]).cos()).unwrap();
        // Parseval: 1.5^2 + 1/2 + 0.25/2 times the box volume
        let want = ((2.25 + 0.5 + 0.125) * (2.0 * PI).powi(3)).sqrt();
        assert!((f.lp_norm(2.0) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn shift_identities() {
        let g = grid3(3.0, 16);
        let f = ScalarField::from_fn(g, |x| (x[0] * 0.7).sin() + x[1] * x[2]).unwrap();
        assert_eq!(f.shift(&[0, 0, 0]).unwrap(), f);
        assert_eq!(f.shift(&[16, -16, 32]).unwrap(), f);
        let s = f.shift(&[3, -5, 7]).unwrap();
        for r in [1.0, 1.25, 2.0, 5.0] {
            assert_eq!(s.lp_norm(r).to_bits(), f.lp_norm(r).to_bits());
        }
        // g(x) = f(x - a h)
        let h = g.spacing();
        let idx = g.flat_index(&[5, 2, 9]);
        let src = g.flat_index(&[2, 7, 2]);
        assert_eq!(s.values()[idx], f.values()[src]);
        assert!(s.shift_by(&[-3.0 * h, 5.0 * h, -7.0 * h]).unwrap() == f);
        assert!(matches!(f.shift_by(&[0.5 * h, 0.0, 0.0]), Err(Error::NonLatticeShift(_))));
    }

    #[test]
    fn signed_power_identities() {
        let g = grid3(1.0, 16);
        let f = ScalarField::from_fn(g, |x| x[0] * 3.0 - x[1]).unwrap();
        assert_eq!(f.signed_power(1.0), f);
        let pos = f.map(f64::abs);
        let sq = pos.signed_power(2.0);
        for (a, b) in sq.values().iter().zip(pos.values()) {
            assert!((a - b * b).abs() <= 1e-15 * a.abs());
        }
        assert_eq!(f.scale(-1.0).signed_power(1.7), f.signed_power(1.7).scale(-1.0));
        assert_eq!(ScalarField::zeros(g).signed_power(0.25), ScalarField::zeros(g));
    }

    #[test]
    fn non_finite_rejected() {
        let g = grid3(1.0, 16);
        let mut v = vec![0.0; g.len()];
        v[7] = f64::NAN;
        assert!(matches!(ScalarField::new(g, v), Err(Error::NonFinite(7))));
    }

    #[test]
    fn coefficient_argmax() {
        let g = grid3(4.0, 16);
        let c = make_coefficient(&CoefficientSpec::Constant { value: 1.0 }, g).unwrap();
        assert_eq!(c.sup_value, 1.0);
        assert_eq!(c.argmax_points.len(), g.len());

        let spec = CoefficientSpec::Gaussians {
            floor: 0.5,
            bumps: vec![Bump { amplitude: 1.0, center: vec![0.0; 3], width: 1.0 }],
        };
        let c = make_coefficient(&spec, g).unwrap();
        assert!((c.sup_value - 1.5).abs() < 1e-15);
        assert_eq!(c.argmax_points, vec![vec![0.0; 3]]);

        let h = g.spacing();
        let spec = CoefficientSpec::Gaussians {
            floor: 0.5,
            bumps: vec![
                Bump { amplitude: 1.0, center: vec![2.0 * h, 0.0, 0.0], width: 0.8 },
                Bump { amplitude: 1.0, center: vec![-2.0 * h, 0.0, 0.0], width: 0.8 },
            ],
        };
        let c = make_coefficient(&spec, g).unwrap();
        let mut pts = c.argmax_points.clone();
        pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
        assert_eq!(pts, vec![vec![-2.0 * h, 0.0, 0.0], vec![2.0 * h, 0.0, 0.0]]);
        assert!(c.floor <= c.base.values().iter().copied().fold(f64::MAX, f64::min));
    }

    #[test]
    fn floor_violation_detected() {
        let g = grid3(1.0, 16);
        let f = ScalarField::constant(g, 0.3);
        assert!(matches!(CoefficientField::from_field(f, 0.5), Err(Error::FloorViolation { .. })));
    }

    #[test]
    fn dump_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = grid3(2.0, 16);
        let f = ScalarField::from_fn(g, |x| x[0] - 2.0 * x[2]).unwrap();
        let (data, _) = f.write_dump(&dir.path().join("psi"), "psi").unwrap();
        let bytes = std::fs::read(&data).unwrap();
        assert_eq!(bytes.len(), g.len() * 8);
        assert_eq!(&bytes[..8], &f.values()[0].to_le_bytes());
        let (back, role) = ScalarField::read_dump(&dir.path().join("psi")).unwrap();
        assert_eq!(back, f);
        assert_eq!(role, "psi");
    }

    proptest::proptest! {
        #[test]
        fn signed_power_round_trip(v in 1e-6f64..1e6, neg in proptest::bool::ANY, s in 0.2f64..5.0) {
            let v = if neg { -v } else { v };
            let back = signed_pow(signed_pow(v, s), 1.0 / s);
            proptest::prop_assert!(((back - v) / v).abs() < 1e-12);
        }
    }
}
