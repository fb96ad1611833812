//! Deterministic simulation of the iterated CNOT-postselection-Hadamard qubit
//! protocol.
//!
//! * [`bloch`]: states, the forward map, purity, the pure-state rational map
//!   and the stereographic chart of constant-purity spheres.
//! * [`inverse`]: the two pre-image branches, backward orbits and Julia-set
//!   sampling.
//! * [`cycles`]: fixed points and 2-cycles with their stability.
//! * [`basin`]: orbit classification and region maps.
//! * [`fractal`]: box-counting dimension and purity sweeps.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]
// Range checks are written `!(x <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod basin;
pub mod bloch;
pub mod cycles;
pub mod error;
pub mod fractal;
pub mod inverse;

pub use basin::{
    classify_orbit, extract_border, render_plane_map, render_region_map, BorderFilter, BorderMask,
    ConvergenceLabel, Rasterizer, RegionMap, RegionParams, Sequential, Surface, Window,
};
pub use bloch::{
    bloch_to_density, density_to_bloch, inverse_project, purity, rational_step, step_bloch, step_density,
    stereographic_project, BlochVector, DensityMatrix, ExtComplex, ProjectedPoint,
};
pub use cycles::{classify_stability, find_cycles, jacobian, CycleRecord, Stability};
pub use error::{Error, Result};
pub use fractal::{box_count, dimension_at_purity, fit_dimension, purity_sweep, DimensionEstimate, SweepResult};
pub use inverse::{
    backward_orbit, invert_bloch_step, invert_rational, julia_sample, preimage_cloud, shrink_to_purity,
    BackwardTrace, BranchChoice, BranchStrategy, JuliaSample,
};
