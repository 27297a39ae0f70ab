//! N-dimensional complex FFT over row-major grids with axis 1 fastest.
//!
//! Lines along one axis are independent, so parallel execution produces the
//! same bits as serial execution.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

const LINES_PER_TASK: usize = 64;

#[derive(Clone)]
pub struct SpectralPlan {
    n: usize,
    dim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("n", &self.n).field("dim", &self.dim).finish()
    }
}

impl SpectralPlan {
    pub fn new(dim: usize, n: usize) -> Self {
        let mut planner = FftPlanner::new();
        SpectralPlan { n, dim, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform in place, normalized by `1 / n^N`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        data.par_iter_mut().for_each(|c| *c *= scale);
    }

    fn run(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.len(), "buffer does not match the grid");
        let n = self.n;
        for axis in 0..self.dim {
            let stride = n.pow(axis as u32);
            if stride == 1 {
                data.par_chunks_mut(n * LINES_PER_TASK).for_each(|chunk| fft.process(chunk));
                continue;
            }
            let block = stride * n;
            data.par_chunks_mut(block).for_each(|blk| {
                let mut lines = vec![Complex64::new(0.0, 0.0); block];
                // (row r along the axis, column c) -> line c, position r
                for r in 0..n {
                    let row = &blk[r * stride..(r + 1) * stride];
                    for (c, v) in row.iter().enumerate() {
                        lines[c * n + r] = *v;
                    }
                }
                lines.par_chunks_mut(n * LINES_PER_TASK).for_each(|chunk| fft.process(chunk));
                for r in 0..n {
                    let row = &mut blk[r * stride..(r + 1) * stride];
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = lines[c * n + r];
                    }
                }
            });
        }
    }
}
