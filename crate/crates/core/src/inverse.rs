//! Pre-images of the Bloch map and of the pure-state rational map.
//!
//! Every target has (up to) two pre-images. The `Plus` branch picks the one
//! with `u > 0` and has `C1` as a fixed point; the `Minus` branch picks
//! `u < 0` and fixes `C5` and `C6`. Iterating inverse branches contracts onto
//! the Julia set, which makes backward orbits the numerically stable way to
//! reach it.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bloch::{complex_to_pure, purity, sphere_radius, step_bloch, BlochVector, ExtComplex};
use crate::error::{Error, Result};

/// Name of the generator behind [`BranchStrategy::RandomSeeded`].
pub const RNG_NAME: &str = "ChaCha8";

/// Slack for pre-images that land just outside the ball.
pub const PREIMAGE_BALL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BranchChoice {
    Plus,
    Minus,
}

impl BranchChoice {
    pub fn sign(self) -> f64 {
        match self {
            BranchChoice::Plus => 1.0,
            BranchChoice::Minus => -1.0,
        }
    }
}

/// How the branch is picked at each backward step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BranchStrategy {
    AllPlus,
    AllMinus,
    /// Fair coin per step drawn from ChaCha8 seeded with `seed`.
    RandomSeeded(u64),
    /// Fixed branch sequence; the orbit stops when it runs out.
    Explicit(Vec<BranchChoice>),
}

impl BranchStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            BranchStrategy::AllPlus => "plus",
            BranchStrategy::AllMinus => "minus",
            BranchStrategy::RandomSeeded(_) => "random",
            BranchStrategy::Explicit(_) => "explicit",
        }
    }

    /// Random strategy for orbit `index` of a batch seeded by `master_seed`.
    ///
    /// Each orbit gets its own ChaCha stream, so batches can be run in any
    /// order or in parallel with identical results.
    pub fn random_for_orbit(master_seed: u64, index: u64) -> BranchStrategy {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(index);
        BranchStrategy::RandomSeeded(rng.next_u64())
    }

    fn chooser(&self) -> BranchChooser<'_> {
        match self {
            BranchStrategy::AllPlus => BranchChooser::Constant(BranchChoice::Plus),
            BranchStrategy::AllMinus => BranchChooser::Constant(BranchChoice::Minus),
            BranchStrategy::RandomSeeded(seed) => BranchChooser::Random(Box::new(ChaCha8Rng::seed_from_u64(*seed))),
            BranchStrategy::Explicit(seq) => BranchChooser::Sequence(seq.iter()),
        }
    }
}

enum BranchChooser<'a> {
    Constant(BranchChoice),
    Random(Box<ChaCha8Rng>),
    Sequence(core::slice::Iter<'a, BranchChoice>),
}

impl BranchChooser<'_> {
    fn next(&mut self) -> Option<BranchChoice> {
        match self {
            BranchChooser::Constant(b) => Some(*b),
            BranchChooser::Random(rng) => Some(if rng.next_u32() & 1 == 0 { BranchChoice::Plus } else { BranchChoice::Minus }),
            BranchChooser::Sequence(it) => it.next().copied(),
        }
    }
}

/// Pre-image of `target` under [`step_bloch`] on the requested branch.
///
/// `w` is the root of `u' w^2 - 2w + u' = 0` inside `[-1, 1]`; with
/// `D = 1 + w^2`, `u^2 = D (w' + sqrt(w'^2 + v'^2)) / 2` and
/// `v = -v' D / (2u)`. When that `u^2` vanishes (`v' = 0`, `w' < 0`) the
/// pre-images are `(0, ±sqrt(-w' D), w)` and the branch sign goes to `v`.
pub fn invert_bloch_step(target: BlochVector, branch: BranchChoice) -> Result<BlochVector> {
    let BlochVector { u: up, v: vp, w: wp } = target;
    if !(libm::fabs(up) <= 1.0 + PREIMAGE_BALL_TOL) {
        return Err(Error::NoPreimage);
    }
    let up = up.clamp(-1.0, 1.0);
    let w = up / (1.0 + libm::sqrt(1.0 - up * up));
    let d = 1.0 + w * w;
    let hyp = libm::hypot(wp, vp);
    // w' + hypot without cancellation when w' < 0.
    let half_sum = if wp >= 0.0 { wp + hyp } else if hyp > 0.0 { vp * vp / (hyp - wp) } else { 0.0 };
    let s = 0.5 * d * half_sum;
    let pre = if s > 0.0 {
        let u = branch.sign() * libm::sqrt(s);
        BlochVector::new(u, -vp * d / (2.0 * u), w)
    } else if wp < 0.0 {
        BlochVector::new(0.0, branch.sign() * libm::sqrt(-wp * d), w)
    } else {
        return Err(Error::DegenerateBranch { preimage: BlochVector::new(0.0, 0.0, w) });
    };
    if pre.norm_sq() > 1.0 + PREIMAGE_BALL_TOL {
        return Err(Error::NoPreimage);
    }
    Ok(pre)
}

/// The two pre-images `±sqrt((1 - z) / (1 + z))` of the rational map.
pub fn invert_rational(z: Complex64) -> Result<(Complex64, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let den = one + z;
    if den.norm() == 0.0 {
        return Err(Error::InfinitePreimage);
    }
    let r = ((one - z) / den).sqrt();
    Ok((r, -r))
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct TraceStep {
    pub index: usize,
    pub point: BlochVector,
    pub purity: f64,
}

/// Why a backward orbit stopped.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Termination {
    Completed,
    /// The chosen branch left the ball at this step.
    NoPreimage { step: usize },
    /// The target had a unique pre-image on the `w` axis at this step.
    Degenerate { step: usize },
    /// An explicit branch sequence ran out.
    SequenceExhausted { step: usize },
}

#[derive(Clone, PartialEq, Debug)]
pub struct BackwardTrace {
    /// Entry 0 is the start; entry `k + 1` maps forward onto entry `k`.
    pub steps: Vec<TraceStep>,
    pub termination: Termination,
}

impl BackwardTrace {
    pub fn last(&self) -> &TraceStep {
        self.steps.last().expect("a trace always holds its start")
    }

    pub fn min_purity(&self) -> f64 {
        self.steps.iter().map(|s| s.purity).fold(f64::INFINITY, f64::min)
    }
}

/// Iterates inverse branches `n` times from `start`.
pub fn backward_orbit(start: BlochVector, strategy: &BranchStrategy, n: usize) -> Result<BackwardTrace> {
    start.validate()?;
    if n < 1 {
        return Err(Error::InvalidArgument("backward orbit needs at least one step"));
    }
    let mut chooser = strategy.chooser();
    let mut steps = Vec::with_capacity(n + 1);
    steps.push(TraceStep { index: 0, point: start, purity: purity(start) });
    let mut termination = Termination::Completed;
    let mut x = start;
    for k in 1..=n {
        let Some(branch) = chooser.next() else {
            termination = Termination::SequenceExhausted { step: k };
            break;
        };
        x = match invert_bloch_step(x, branch) {
            Ok(p) => p,
            Err(Error::NoPreimage) => {
                termination = Termination::NoPreimage { step: k };
                break;
            }
            Err(Error::DegenerateBranch { .. }) => {
                termination = Termination::Degenerate { step: k };
                break;
            }
            Err(e) => return Err(e),
        };
        steps.push(TraceStep { index: k, point: x, purity: purity(x) });
    }
    Ok(BackwardTrace { steps, termination })
}

/// Pure states sampled from the Julia set by inverse iteration.
#[derive(Clone, PartialEq, Debug)]
pub struct JuliaSample {
    pub points: Vec<BlochVector>,
    pub depth: usize,
}

/// Image of `C2` in the complex chart: the real root of `z^3 + z^2 + z - 1`.
pub const Z_C2: f64 = 0.543_689_012_692_076_4;

/// All `2^depth` level-`depth` pre-images of `seed` under the rational map.
///
/// Pre-images at infinity are pruned; the shortfall is filled by expanding
/// the surviving frontier further.
pub fn julia_sample(seed: Complex64, depth: usize) -> Result<JuliaSample> {
    if depth > 20 {
        return Err(Error::InvalidArgument("julia sample depth is limited to 20"));
    }
    let target = 1usize << depth;
    let mut frontier = vec![seed];
    let mut level = 0;
    while level < depth || frontier.len() < target {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for z in &frontier {
            if let Ok((a, b)) = invert_rational(*z) {
                next.push(a);
                next.push(b);
            }
        }
        if next.is_empty() {
            return Err(Error::InfinitePreimage);
        }
        frontier = next;
        level += 1;
    }
    frontier.truncate(target);
    let points = frontier.into_iter().map(|z| complex_to_pure(ExtComplex::Finite(z))).collect();
    Ok(JuliaSample { points, depth })
}

/// Rescales `x` radially onto the purity-`P` sphere.
pub fn shrink_to_purity(x: BlochVector, purity_level: f64) -> Result<BlochVector> {
    if !(purity_level > 0.5 && purity_level <= 1.0) {
        return Err(Error::InvalidArgument("purity must lie in (0.5, 1]"));
    }
    let n = x.norm();
    if n == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(x * (sphere_radius(purity_level) / n))
}

/// A backward pre-image found by [`preimage_cloud`].
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct CloudPoint {
    pub point: BlochVector,
    /// Index into the seed list.
    pub seed: usize,
    /// Number of forward steps from `point` to its seed.
    pub depth: usize,
}

/// Every pre-image of every seed up to `depth` levels (the seeds themselves
/// included) whose purity lies in the closed band, over all branch sequences.
/// Branches leaving the ball are pruned with their subtrees.
pub fn preimage_cloud(seeds: &[BlochVector], depth: usize, band: (f64, f64)) -> Result<Vec<CloudPoint>> {
    if depth > 16 {
        return Err(Error::InvalidArgument("pre-image depth is limited to 16"));
    }
    let mut out = Vec::new();
    let mut stack: Vec<(BlochVector, usize)> = Vec::new();
    for (seed_idx, seed) in seeds.iter().enumerate() {
        stack.push((*seed, 0));
        while let Some((x, d)) = stack.pop() {
            let p = purity(x);
            if p >= band.0 && p <= band.1 {
                out.push(CloudPoint { point: x, seed: seed_idx, depth: d });
            }
            if d == depth {
                continue;
            }
            for branch in [BranchChoice::Minus, BranchChoice::Plus] {
                if let Ok(pre) = invert_bloch_step(x, branch) {
                    stack.push((pre, d + 1));
                }
            }
        }
    }
    Ok(out)
}

/// Forward image of `x` after `n` steps.
pub fn forward(x: BlochVector, n: usize) -> BlochVector {
    (0..n).fold(x, |p, _| step_bloch(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::rational_step;
    use crate::cycles::{C1, C2, C5, C6};

    #[test]
    fn plus_branch_examples() {
        let pre = invert_bloch_step(BlochVector::new(0.0, 0.0, 1.0), BranchChoice::Plus).unwrap();
        assert!(pre.max_abs_diff(&BlochVector::new(1.0, 0.0, 0.0)) < 1e-15);
        let pre = invert_bloch_step(C1, BranchChoice::Plus).unwrap();
        assert!(pre.distance(&C1) < 1e-9);
    }

    #[test]
    fn minus_branch_fixes_pure_points() {
        for c in [C5, C6] {
            assert!(invert_bloch_step(c, BranchChoice::Minus).unwrap().distance(&c) < 1e-9);
        }
        assert!(invert_bloch_step(C2, BranchChoice::Plus).unwrap().distance(&C2) < 1e-9);
    }

    #[test]
    fn outside_ball_preimage_is_reported() {
        // Targets outside the ball can have algebraic pre-images outside it too:
        // here (±0.834, 0, 0.627) with |r|^2 ≈ 1.09.
        let t = BlochVector::new(0.9, 0.0, 0.5);
        assert_eq!(invert_bloch_step(t, BranchChoice::Plus), Err(Error::NoPreimage));
        assert_eq!(invert_bloch_step(BlochVector::new(1.5, 0.0, 0.0), BranchChoice::Plus), Err(Error::NoPreimage));
    }

    #[test]
    fn degenerate_axis_case() {
        let t = BlochVector::new(0.8, 0.0, 0.0);
        match invert_bloch_step(t, BranchChoice::Plus) {
            Err(Error::DegenerateBranch { preimage }) => {
                assert!(step_bloch(preimage).distance(&t) < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_u_case_puts_sign_on_v() {
        let src = BlochVector::new(0.0, 0.5, 0.2);
        let t = step_bloch(src);
        let plus = invert_bloch_step(t, BranchChoice::Plus).unwrap();
        let minus = invert_bloch_step(t, BranchChoice::Minus).unwrap();
        assert!(plus.distance(&src) < 1e-12);
        assert!((minus.v + 0.5).abs() < 1e-12);
    }

    #[test]
    fn rational_inverse_examples() {
        let (a, b) = invert_rational(Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!((a, b), (Complex64::new(0.0, 0.0), Complex64::new(-0.0, -0.0)));
        let (a, b) = invert_rational(Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!((a, b), (Complex64::new(1.0, 0.0), Complex64::new(-1.0, -0.0)));
        assert_eq!(invert_rational(Complex64::new(-1.0, 0.0)), Err(Error::InfinitePreimage));
        let z = Complex64::new(0.3, -0.7);
        let (a, _) = invert_rational(z).unwrap();
        let fz = rational_step(a.into()).unwrap().finite().unwrap();
        assert!((fz - z).norm() < 1e-12);
    }

    #[test]
    fn backward_orbit_records_truncation() {
        let tr = backward_orbit(BlochVector::new(0.8, 0.0, 0.0), &BranchStrategy::AllPlus, 5).unwrap();
        assert_eq!(tr.steps.len(), 1);
        assert_eq!(tr.termination, Termination::Degenerate { step: 1 });
        assert!(backward_orbit(BlochVector::new(0.9, 0.0, 0.5), &BranchStrategy::AllPlus, 5).is_err());

        let tr = backward_orbit(C1, &BranchStrategy::Explicit(vec![BranchChoice::Plus; 3]), 10).unwrap();
        assert_eq!(tr.steps.len(), 4);
        assert_eq!(tr.termination, Termination::SequenceExhausted { step: 4 });
        assert!(backward_orbit(C1, &BranchStrategy::AllPlus, 0).is_err());
    }

    #[test]
    fn random_strategy_is_reproducible() {
        let start = shrink_to_purity(C2, 0.95).unwrap();
        let s = BranchStrategy::random_for_orbit(7, 3);
        let a = backward_orbit(start, &s, 50).unwrap();
        let b = backward_orbit(start, &s, 50).unwrap();
        assert_eq!(a, b);
        assert_ne!(BranchStrategy::random_for_orbit(7, 3), BranchStrategy::random_for_orbit(7, 4));
    }

    #[test]
    fn julia_sample_sizes() {
        let s = julia_sample(Complex64::new(Z_C2, 0.0), 10).unwrap();
        assert_eq!(s.points.len(), 1024);
        assert!(s.points.iter().all(|p| (purity(*p) - 1.0).abs() < 1e-10));
        assert!(julia_sample(Complex64::new(Z_C2, 0.0), 21).is_err());
    }

    #[test]
    fn julia_sample_prunes_infinity() {
        // 0 -> {1, -1}; the pre-image of -1 is infinity, so level 2 holds only
        // {0, -0} and one more level is expanded to reach four points.
        let s = julia_sample(Complex64::new(0.0, 0.0), 2).unwrap();
        assert_eq!(s.points.len(), 4);
        assert!(s.points.iter().all(|p| p.w > -1.0));
    }

    #[test]
    fn shrink_examples() {
        let x = shrink_to_purity(BlochVector::new(0.0, 0.0, 1.0), 0.99).unwrap();
        assert!(x.max_abs_diff(&BlochVector::new(0.0, 0.0, libm::sqrt(0.98))) < 1e-15);
        assert_eq!(shrink_to_purity(BlochVector::ORIGIN, 0.9), Err(Error::ZeroVector));
    }

    #[test]
    fn cloud_contains_c1() {
        let cloud = preimage_cloud(&[C1], 6, (0.769, 0.770)).unwrap();
        assert!(cloud.iter().any(|c| c.point.distance(&C1) < 1e-9));
        for c in &cloud {
            assert!(forward(c.point, c.depth).distance(&C1) < 1e-6);
        }
        assert!(preimage_cloud(&[C1], 17, (0.0, 1.0)).is_err());
    }
}
