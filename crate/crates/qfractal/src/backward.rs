//! Backward-orbit ensembles.

use num_complex::Complex64;
use qfractal_core::bloch::BlochVector;
use qfractal_core::inverse::{backward_orbit, julia_sample, shrink_to_purity, BackwardTrace, BranchStrategy, Z_C2};
use qfractal_core::Result;
use rayon::prelude::*;

use crate::config::StrategyArg;

/// All depth-`depth` pre-images of `C2` under the pure-state map, shrunk
/// radially to `start_purity`.
pub fn ensemble(depth: usize, start_purity: f64) -> Result<Vec<BlochVector>> {
    julia_sample(Complex64::new(Z_C2, 0.0), depth)?
        .points
        .into_iter()
        .map(|p| shrink_to_purity(p, start_purity))
        .collect()
}

/// The branch strategy of orbit `index`. Random orbits each get their own
/// stream of the master seed.
pub fn strategy_for(kind: StrategyArg, seed: u64, index: usize) -> BranchStrategy {
    match kind {
        StrategyArg::Plus => BranchStrategy::AllPlus,
        StrategyArg::Minus => BranchStrategy::AllMinus,
        StrategyArg::Random => BranchStrategy::random_for_orbit(seed, index as u64),
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct OrbitRun {
    pub strategy: StrategyArg,
    pub orbit: usize,
    pub trace: BackwardTrace,
}

/// One orbit per start and strategy, computed in parallel, returned grouped by
/// strategy then start.
pub fn run_ensemble(starts: &[BlochVector], kinds: &[StrategyArg], steps: usize, seed: u64) -> Result<Vec<OrbitRun>> {
    let jobs: Vec<(StrategyArg, usize)> =
        kinds.iter().flat_map(|k| (0..starts.len()).map(move |i| (*k, i))).collect();
    jobs.par_iter()
        .map(|&(kind, i)| {
            let trace = backward_orbit(starts[i], &strategy_for(kind, seed, i), steps)?;
            Ok(OrbitRun { strategy: kind, orbit: i, trace })
        })
        .collect()
}

/// Per-strategy aggregates over an ensemble.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Summary {
    pub strategy: StrategyArg,
    pub orbits: usize,
    pub min_purity: f64,
    pub min_final_purity: f64,
    pub max_final_purity: f64,
    /// Orbits stopped before the requested length.
    pub truncated: usize,
}

pub fn summarize(runs: &[OrbitRun], kind: StrategyArg) -> Summary {
    let mut s = Summary {
        strategy: kind,
        orbits: 0,
        min_purity: f64::INFINITY,
        min_final_purity: f64::INFINITY,
        max_final_purity: f64::NEG_INFINITY,
        truncated: 0,
    };
    for r in runs.iter().filter(|r| r.strategy == kind) {
        s.orbits += 1;
        s.min_purity = s.min_purity.min(r.trace.min_purity());
        let last = r.trace.last().purity;
        s.min_final_purity = s.min_final_purity.min(last);
        s.max_final_purity = s.max_final_purity.max(last);
        if r.trace.termination != qfractal_core::inverse::Termination::Completed {
            s.truncated += 1;
        }
    }
    s
}
