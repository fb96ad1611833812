//! Fixed points and 2-cycles of the Bloch map and their stability.
//!
//! The constants below are the seven cycle points at full double precision.
//! [`find_cycles`] recovers them from scratch by damped Newton iteration.

use alloc::vec::Vec;

use nalgebra::{Matrix3, Vector3};

use crate::bloch::{purity, step_bloch, BlochVector, BALL_TOL};
use crate::error::{Error, Result};

/// Maximally mixed state; superattracting fixed point.
pub const C0: BlochVector = BlochVector::new(0.0, 0.0, 0.0);
/// Mixed fixed point on the invariant plane, repelling in every direction.
pub const C1: BlochVector = BlochVector::new(0.638_896_919_471_352_6, 0.0, 0.361_103_080_528_647_4);
/// Pure fixed point on the invariant plane.
pub const C2: BlochVector = BlochVector::new(0.839_286_755_214_161_1, 0.0, 0.543_689_012_692_076_4);
/// Pure attracting 2-cycle `(1,0,0) <-> (0,0,1)`.
pub const C3: [BlochVector; 2] = [BlochVector::new(1.0, 0.0, 0.0), BlochVector::new(0.0, 0.0, 1.0)];
/// Mixed 2-cycle on the plane axes.
pub const C4: [BlochVector; 2] = [
    BlochVector::new(0.543_689_012_692_076_4, 0.0, 0.0),
    BlochVector::new(0.0, 0.0, 0.295_597_742_522_084_8),
];
/// Pure fixed point with `v > 0`.
pub const C5: BlochVector = BlochVector::new(-0.543_689_012_692_076_4, 0.785_508_900_072_916_1, -0.295_597_742_522_084_8);
/// Pure fixed point with `v < 0`.
pub const C6: BlochVector = BlochVector::new(-0.543_689_012_692_076_4, -0.785_508_900_072_916_1, -0.295_597_742_522_084_8);

/// Purity of `C1`, the critical purity of the fractal/regular transition.
pub fn critical_purity() -> f64 {
    purity(C1)
}

/// Analytic Jacobian of [`step_bloch`], rows `(u', v', w')`, columns `(u, v, w)`.
pub fn jacobian(x: BlochVector) -> Matrix3<f64> {
    let BlochVector { u, v, w } = x;
    let d = 1.0 + w * w;
    let d2 = d * d;
    Matrix3::new(
        0.0,
        0.0,
        2.0 * (1.0 - w * w) / d2,
        -2.0 * v / d,
        -2.0 * u / d,
        4.0 * u * v * w / d2,
        2.0 * u / d,
        -2.0 * v / d,
        -2.0 * w * (u * u - v * v) / d2,
    )
}

/// Product of Jacobians along a cycle, last point leftmost.
pub fn cycle_jacobian(points: &[BlochVector]) -> Matrix3<f64> {
    points.iter().fold(Matrix3::identity(), |acc, p| jacobian(*p) * acc)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Stability {
    Attractive,
    Repelling,
    Saddle,
}

impl Stability {
    pub fn name(self) -> &'static str {
        match self {
            Stability::Attractive => "attractive",
            Stability::Repelling => "repelling",
            Stability::Saddle => "saddle",
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct CycleRecord {
    /// One or two points; for 2-cycles the point with larger `u` comes first.
    pub points: Vec<BlochVector>,
    pub purities: Vec<f64>,
    /// Eigenvalue moduli of the cycle Jacobian, sorted ascending.
    pub multipliers: [f64; 3],
    pub stability: Option<Stability>,
    /// Largest `|M(p_k) - p_{k+1}|` around the cycle.
    pub residual: f64,
}

impl CycleRecord {
    pub fn new(points: Vec<BlochVector>) -> Self {
        let purities = points.iter().map(|p| purity(*p)).collect();
        let residual = cycle_residual(&points);
        CycleRecord { points, purities, multipliers: [f64::NAN; 3], stability: None, residual }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn cycle_residual(points: &[BlochVector]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|k| step_bloch(points[k]).distance(&points[(k + 1) % n]))
        .fold(0.0, f64::max)
}

/// Half-width of the band around 1 in which a multiplier counts as marginal.
pub const MARGINAL_BAND: f64 = 1e-6;

/// Fills in multipliers and stability class of a cycle.
pub fn classify_stability(mut c: CycleRecord) -> Result<CycleRecord> {
    if !(c.residual < 1e-10) {
        return Err(Error::InvalidArgument("cycle residual exceeds 1e-10"));
    }
    let jac = cycle_jacobian(&c.points);
    // The QR iteration does not terminate on an exactly zero matrix (C3).
    let mut m = if jac.iter().all(|x| *x == 0.0) {
        [0.0; 3]
    } else {
        let eig = nalgebra::Schur::try_new(jac, f64::EPSILON, 10_000)
            .ok_or(Error::InvalidArgument("eigenvalue iteration did not converge"))?
            .complex_eigenvalues();
        [eig[0].norm(), eig[1].norm(), eig[2].norm()]
    };
    m.sort_by(f64::total_cmp);
    // Nilpotent products come back as roundoff-sized values.
    for x in m.iter_mut() {
        if *x < 1e-12 {
            *x = 0.0;
        }
    }
    c.multipliers = m;
    if let Some(&multiplier) = m.iter().find(|x| libm::fabs(**x - 1.0) <= MARGINAL_BAND) {
        return Err(Error::MarginalCycle { multiplier });
    }
    c.stability = Some(if m.iter().all(|x| *x < 1.0) {
        Stability::Attractive
    } else if m.iter().all(|x| *x > 1.0) {
        Stability::Repelling
    } else {
        Stability::Saddle
    });
    Ok(c)
}

pub const NEWTON_DAMPING: f64 = 0.5;
pub const NEWTON_MAX_STEPS: usize = 200;
pub const NEWTON_RESIDUAL: f64 = 1e-12;
pub const DEDUP_RADIUS: f64 = 1e-6;
pub const DEFAULT_GRID: usize = 21;

fn iterate(x: BlochVector, length: usize) -> (BlochVector, Matrix3<f64>) {
    let mut p = x;
    let mut jac = Matrix3::identity();
    for _ in 0..length {
        jac = jacobian(p) * jac;
        p = step_bloch(p);
    }
    (p, jac)
}

/// Damped Newton iteration on `M^length(x) - x = 0`.
fn newton(seed: BlochVector, length: usize) -> Option<BlochVector> {
    let mut x = Vector3::new(seed.u, seed.v, seed.w);
    for _ in 0..NEWTON_MAX_STEPS {
        let (img, jac) = iterate(BlochVector::new(x[0], x[1], x[2]), length);
        let g = Vector3::new(img.u, img.v, img.w) - x;
        if g.norm() < NEWTON_RESIDUAL {
            return Some(BlochVector::new(x[0], x[1], x[2]));
        }
        let dg = jac - Matrix3::identity();
        let delta = dg.lu().solve(&g)?;
        x -= delta * NEWTON_DAMPING;
        if !x.iter().all(|c| c.is_finite()) || x.norm() > 10.0 {
            return None;
        }
    }
    None
}

/// Seed grid statistics of a cycle search.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct SeedStats {
    pub seeds: usize,
    pub converged: usize,
    /// Seeds whose Newton iteration failed (singular or non-convergent).
    pub dropped: usize,
    /// Converged roots rejected for lying outside the ball or having lower period.
    pub rejected: usize,
}

#[derive(Clone, PartialEq, Debug)]
pub struct CycleSearch {
    pub records: Vec<CycleRecord>,
    pub stats: SeedStats,
}

fn grid_seeds(grid: usize) -> Vec<BlochVector> {
    let mut seeds = Vec::new();
    let step = if grid > 1 { 2.0 / (grid - 1) as f64 } else { 0.0 };
    for a in 0..grid {
        for b in 0..grid {
            for c in 0..grid {
                let p = BlochVector::new(-1.0 + a as f64 * step, -1.0 + b as f64 * step, -1.0 + c as f64 * step);
                if p.norm_sq() <= 1.0 {
                    seeds.push(p);
                }
            }
        }
    }
    seeds
}

fn canonical_order(mut points: Vec<BlochVector>) -> Vec<BlochVector> {
    if points.len() == 2 && points[1].u > points[0].u {
        points.swap(0, 1);
    }
    points
}

/// Finds all cycles of exact period `length` (1 or 2) inside the ball from a
/// `grid`³ seed lattice, deduplicated and with stability filled in.
pub fn find_cycles(length: usize, grid: usize) -> Result<CycleSearch> {
    if !(length == 1 || length == 2) {
        return Err(Error::InvalidArgument("cycle length must be 1 or 2"));
    }
    let mut stats = SeedStats::default();
    let mut found: Vec<Vec<BlochVector>> = Vec::new();
    for seed in grid_seeds(grid) {
        stats.seeds += 1;
        let Some(root) = newton(seed, length) else {
            stats.dropped += 1;
            continue;
        };
        stats.converged += 1;
        if root.norm_sq() > 1.0 + 1e-9 {
            stats.rejected += 1;
            continue;
        }
        let mut orbit = alloc::vec![root];
        for _ in 1..length {
            orbit.push(step_bloch(*orbit.last().unwrap()));
        }
        if length == 2 && orbit[0].distance(&orbit[1]) < DEDUP_RADIUS {
            stats.rejected += 1;
            continue;
        }
        let duplicate = found
            .iter()
            .any(|known| orbit.iter().any(|p| known.iter().any(|q| p.distance(q) < DEDUP_RADIUS)));
        if !duplicate {
            found.push(canonical_order(orbit));
        }
    }
    let mut records = Vec::with_capacity(found.len());
    for mut points in found {
        // Points on the sphere are clamped back onto it.
        for p in points.iter_mut() {
            let n2 = p.norm_sq();
            if n2 > 1.0 && n2 <= 1.0 + BALL_TOL {
                *p = *p * (1.0 / libm::sqrt(n2));
            }
        }
        records.push(classify_stability(CycleRecord::new(points))?);
    }
    records.sort_by(|a, b| {
        let ka = (a.points[0].norm_sq(), a.points[0].u, a.points[0].v);
        let kb = (b.points[0].norm_sq(), b.points[0].u, b.points[0].v);
        ka.partial_cmp(&kb).unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(CycleSearch { records, stats })
}

/// Table names of the seven cycles, assigned by proximity to the constants.
pub fn cycle_name(record: &CycleRecord) -> Option<&'static str> {
    let named: [(&str, &[BlochVector]); 7] = [
        ("C0", &[C0]),
        ("C1", &[C1]),
        ("C2", &[C2]),
        ("C3", &C3),
        ("C4", &C4),
        ("C5", &[C5]),
        ("C6", &[C6]),
    ];
    named.iter().find_map(|(name, pts)| {
        let matches = pts.len() == record.points.len()
            && record.points.iter().all(|p| pts.iter().any(|q| p.distance(q) < 1e-6));
        matches.then_some(*name)
    })
}

/// Fixed points and 2-cycles together, ordered `C0` to `C6` when all are found.
pub fn find_all_cycles(grid: usize) -> Result<(Vec<CycleRecord>, SeedStats)> {
    let fixed = find_cycles(1, grid)?;
    let two = find_cycles(2, grid)?;
    let mut all: Vec<CycleRecord> = fixed.records.into_iter().chain(two.records).collect();
    all.sort_by_key(|r| cycle_name(r).unwrap_or("C~"));
    let stats = SeedStats {
        seeds: fixed.stats.seeds + two.stats.seeds,
        converged: fixed.stats.converged + two.stats.converged,
        dropped: fixed.stats.dropped + two.stats.dropped,
        rejected: fixed.stats.rejected + two.stats.rejected,
    };
    Ok((all, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_difference(x: BlochVector, h: f64) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for col in 0..3 {
            let mut a = x.to_array();
            let mut b = x.to_array();
            a[col] += h;
            b[col] -= h;
            let fa = step_bloch(BlochVector::from_array(a)).to_array();
            let fb = step_bloch(BlochVector::from_array(b)).to_array();
            for row in 0..3 {
                m[(row, col)] = (fa[row] - fb[row]) / (2.0 * h);
            }
        }
        m
    }

    #[test]
    fn constants_are_cycles() {
        for p in [C0, C1, C2, C5, C6] {
            assert!(cycle_residual(&[p]) < 1e-15, "{p:?}");
        }
        assert!(cycle_residual(&C3) < 1e-15);
        assert!(cycle_residual(&C4) < 1e-15);
        assert!((critical_purity() - 0.76929).abs() < 1e-5);
    }

    #[test]
    fn jacobian_examples() {
        let j0 = jacobian(C0);
        let mut expected = Matrix3::zeros();
        expected[(0, 2)] = 2.0;
        assert_eq!(j0, expected);
        assert!((finite_difference(C0, 1e-6) - expected).abs().max() < 1e-6);

        let j = jacobian(BlochVector::new(1.0, 0.0, 0.0));
        assert_eq!(j[(2, 0)], 2.0);
        assert!((finite_difference(BlochVector::new(1.0, 0.0, 0.0), 1e-6) - j).abs().max() < 1e-6);
    }

    #[test]
    fn jacobian_matches_differences_off_plane() {
        let x = BlochVector::new(-0.3, 0.5, 0.4);
        assert!((finite_difference(x, 1e-6) - jacobian(x)).abs().max() < 1e-6);
    }

    #[test]
    fn stability_of_known_cycles() {
        let c0 = classify_stability(CycleRecord::new(alloc::vec![C0])).unwrap();
        assert_eq!(c0.stability, Some(Stability::Attractive));
        assert_eq!(c0.multipliers, [0.0; 3]);
        let c1 = classify_stability(CycleRecord::new(alloc::vec![C1])).unwrap();
        assert_eq!(c1.stability, Some(Stability::Repelling));
        let c3 = classify_stability(CycleRecord::new(C3.to_vec())).unwrap();
        assert_eq!(c3.stability, Some(Stability::Attractive));
        for pts in [alloc::vec![C2], C4.to_vec()] {
            assert_eq!(classify_stability(CycleRecord::new(pts)).unwrap().stability, Some(Stability::Saddle));
        }
    }

    #[test]
    fn stability_rejects_non_cycles() {
        let r = CycleRecord::new(alloc::vec![BlochVector::new(0.1, 0.0, 0.0)]);
        assert!(classify_stability(r).is_err());
    }

    #[test]
    fn newton_recovers_c1() {
        let root = newton(BlochVector::new(0.6, 0.0, 0.4), 1).unwrap();
        assert!(root.distance(&C1) < 1e-11);
    }
}
