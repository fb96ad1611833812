//! Multi-threaded rasterisation.

use qfractal_core::basin::{ConvergenceLabel, Rasterizer, RegionMap, RegionParams};
use rayon::prelude::*;

/// Rasteriser that classifies rows in parallel on the current rayon pool.
///
/// Rows are disjoint slices of the output grid, so the result is identical to
/// [`qfractal_core::Sequential`] for any thread count.
#[derive(Clone, Copy, Debug, Default)]
pub struct Parallel;

impl Rasterizer for Parallel {
    fn render(&self, params: &RegionParams) -> RegionMap {
        let w = params.width;
        let n = w * params.height;
        let mut labels = vec![ConvergenceLabel::OutsideDomain; n];
        let mut iterations_used = vec![0u32; n];
        labels
            .par_chunks_mut(w)
            .zip(iterations_used.par_chunks_mut(w))
            .enumerate()
            .for_each(|(row, (l, it))| params.render_rows(row, l, it));
        RegionMap { params: *params, labels, iterations_used }
    }
}
