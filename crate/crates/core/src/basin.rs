//! Orbit classification and rasterised convergence regions.

use alloc::vec;
use alloc::vec::Vec;

use crate::bloch::{inverse_project, step_bloch, BlochVector, ProjectedPoint};

/// Asymptotic class of a forward orbit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
#[repr(u8)]
pub enum ConvergenceLabel {
    /// Converges to the maximally mixed state `C0`.
    MixedC0 = 0,
    /// Even iterates converge to `(1, 0, 0)`.
    PureC3A = 1,
    /// Even iterates converge to `(0, 0, 1)`.
    PureC3B = 2,
    NonConvergent = 3,
    OutsideDomain = 4,
}

impl ConvergenceLabel {
    pub const ALL: [ConvergenceLabel; 5] = [
        ConvergenceLabel::MixedC0,
        ConvergenceLabel::PureC3A,
        ConvergenceLabel::PureC3B,
        ConvergenceLabel::NonConvergent,
        ConvergenceLabel::OutsideDomain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConvergenceLabel::MixedC0 => "MixedC0",
            ConvergenceLabel::PureC3A => "PureC3A",
            ConvergenceLabel::PureC3B => "PureC3B",
            ConvergenceLabel::NonConvergent => "NonConvergent",
            ConvergenceLabel::OutsideDomain => "OutsideDomain",
        }
    }

    /// Converges to one of the two attractors.
    pub fn is_attracted(self) -> bool {
        matches!(
            self,
            ConvergenceLabel::MixedC0 | ConvergenceLabel::PureC3A | ConvergenceLabel::PureC3B
        )
    }

    pub fn is_pure(self) -> bool {
        matches!(self, ConvergenceLabel::PureC3A | ConvergenceLabel::PureC3B)
    }
}

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: u32 = 2000;
/// Consecutive in-tolerance checks needed to accept convergence.
pub const CONFIRMATIONS: u32 = 3;

const C3_A: BlochVector = BlochVector::new(1.0, 0.0, 0.0);
const C3_B: BlochVector = BlochVector::new(0.0, 0.0, 1.0);

/// Iterates the map from `x0` until one attractor is confirmed.
///
/// Returns the label and the orbit index at which the confirming run of
/// in-tolerance points started, or `max_iter` for non-convergent orbits.
/// `C0` is tested at every index, the `C3` phases on even indices only.
pub fn classify_orbit(x0: BlochVector, tol: f64, max_iter: u32) -> (ConvergenceLabel, u32) {
    if !x0.in_ball() {
        return (ConvergenceLabel::OutsideDomain, 0);
    }
    let tol_sq = tol * tol;
    let mut x = x0;
    let (mut c0_run, mut a_run, mut b_run) = (0u32, 0u32, 0u32);
    for n in 0..=max_iter {
        if x.norm_sq() < tol_sq {
            c0_run += 1;
            if c0_run >= CONFIRMATIONS {
                return (ConvergenceLabel::MixedC0, n + 1 - CONFIRMATIONS);
            }
        } else {
            c0_run = 0;
        }
        if n % 2 == 0 {
            if (x - C3_A).norm_sq() < tol_sq {
                a_run += 1;
                if a_run >= CONFIRMATIONS {
                    return (ConvergenceLabel::PureC3A, n - 2 * (CONFIRMATIONS - 1));
                }
            } else {
                a_run = 0;
            }
            if (x - C3_B).norm_sq() < tol_sq {
                b_run += 1;
                if b_run >= CONFIRMATIONS {
                    return (ConvergenceLabel::PureC3B, n - 2 * (CONFIRMATIONS - 1));
                }
            } else {
                b_run = 0;
            }
        }
        x = step_bloch(x);
    }
    (ConvergenceLabel::NonConvergent, max_iter)
}

/// Rectangle of the projection plane (or of the `(u, w)` plane).
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Window { x_min, x_max, y_min, y_max }
    }

    pub const fn square(half_width: f64) -> Self {
        Window::new(-half_width, half_width, -half_width, half_width)
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::square(3.0)
    }
}

/// Which surface a region map samples.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Surface {
    /// The constant-purity sphere, seen through the south-pole projection.
    Sphere { purity: f64 },
    /// The invariant `(u, 0, w)` plane, pixel coordinates `(u, w)`.
    Plane,
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct RegionParams {
    pub surface: Surface,
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub tol: f64,
    pub max_iter: u32,
}

impl RegionParams {
    pub fn sphere(purity: f64, window: Window, width: usize, height: usize) -> Self {
        RegionParams {
            surface: Surface::Sphere { purity },
            window,
            width,
            height,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    pub fn plane(window: Window, width: usize, height: usize) -> Self {
        RegionParams { surface: Surface::Plane, ..RegionParams::sphere(1.0, window, width, height) }
    }

    /// Purity of the sampled sphere; `None` for the plane.
    pub fn purity(&self) -> Option<f64> {
        match self.surface {
            Surface::Sphere { purity } => Some(purity),
            Surface::Plane => None,
        }
    }

    /// Window coordinates of the centre of pixel `(i, j)`; row 0 is the top edge.
    pub fn pixel_center(&self, i: usize, j: usize) -> (f64, f64) {
        let w = &self.window;
        let dx = (w.x_max - w.x_min) / self.width as f64;
        let dy = (w.y_max - w.y_min) / self.height as f64;
        (w.x_min + (i as f64 + 0.5) * dx, w.y_max - (j as f64 + 0.5) * dy)
    }

    /// Fractional pixel coordinates `(i, j)` of a window point (inverse of
    /// [`RegionParams::pixel_center`] up to the half-pixel offset).
    pub fn to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        let w = &self.window;
        let i = (x - w.x_min) / (w.x_max - w.x_min) * self.width as f64 - 0.5;
        let j = (w.y_max - y) / (w.y_max - w.y_min) * self.height as f64 - 0.5;
        (i, j)
    }

    /// The pixel whose cell contains the window point, if any.
    pub fn pixel_at(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let (fi, fj) = self.to_pixel(x, y);
        let (i, j) = (libm::round(fi), libm::round(fj));
        if i >= 0.0 && j >= 0.0 && i < self.width as f64 && j < self.height as f64 {
            Some((i as usize, j as usize))
        } else {
            None
        }
    }

    /// The Bloch vector sampled by pixel `(i, j)`, or `None` outside the domain.
    pub fn pixel_state(&self, i: usize, j: usize) -> Option<BlochVector> {
        let (x, y) = self.pixel_center(i, j);
        match self.surface {
            Surface::Sphere { purity } => {
                let s = inverse_project(ProjectedPoint::new(x, y), purity);
                if s.u.is_finite() && s.v.is_finite() && s.w.is_finite() && s.in_ball() {
                    Some(s)
                } else {
                    None
                }
            }
            Surface::Plane => {
                let s = BlochVector::new(x, 0.0, y);
                if s.in_ball() {
                    Some(s)
                } else {
                    None
                }
            }
        }
    }

    pub fn classify_pixel(&self, i: usize, j: usize) -> (ConvergenceLabel, u32) {
        match self.pixel_state(i, j) {
            Some(s) => classify_orbit(s, self.tol, self.max_iter),
            None => (ConvergenceLabel::OutsideDomain, 0),
        }
    }

    /// Classifies rows `first_row..` into the given slices, which must hold a
    /// whole number of rows.
    pub fn render_rows(&self, first_row: usize, labels: &mut [ConvergenceLabel], iterations: &mut [u32]) {
        debug_assert_eq!(labels.len(), iterations.len());
        debug_assert_eq!(labels.len() % self.width, 0);
        for (k, (label, iters)) in labels.iter_mut().zip(iterations.iter_mut()).enumerate() {
            let j = first_row + k / self.width;
            let i = k % self.width;
            let (l, n) = self.classify_pixel(i, j);
            *label = l;
            *iters = n;
        }
    }
}

/// Rasterised classification of a sphere or of the invariant plane.
#[derive(Clone, PartialEq, Debug)]
pub struct RegionMap {
    pub params: RegionParams,
    /// Row-major, `width * height` entries.
    pub labels: Vec<ConvergenceLabel>,
    pub iterations_used: Vec<u32>,
}

impl RegionMap {
    pub fn width(&self) -> usize {
        self.params.width
    }

    pub fn height(&self) -> usize {
        self.params.height
    }

    pub fn label(&self, i: usize, j: usize) -> ConvergenceLabel {
        self.labels[j * self.params.width + i]
    }

    /// Number of pixels carrying each label, indexed by `label as usize`.
    pub fn histogram(&self) -> [usize; 5] {
        let mut h = [0usize; 5];
        for l in &self.labels {
            h[*l as usize] += 1;
        }
        h
    }
}

/// Strategy for turning [`RegionParams`] into a [`RegionMap`].
///
/// Implementations must return exactly what [`Sequential`] returns.
pub trait Rasterizer {
    fn render(&self, params: &RegionParams) -> RegionMap;
}

/// Single-threaded reference rasteriser.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Rasterizer for Sequential {
    fn render(&self, params: &RegionParams) -> RegionMap {
        let n = params.width * params.height;
        let mut labels = vec![ConvergenceLabel::OutsideDomain; n];
        let mut iterations_used = vec![0u32; n];
        params.render_rows(0, &mut labels, &mut iterations_used);
        RegionMap { params: *params, labels, iterations_used }
    }
}

/// Region map of the purity-`P` sphere over `window`.
pub fn render_region_map(purity: f64, window: Window, width: usize, height: usize, tol: f64, max_iter: u32) -> RegionMap {
    let params = RegionParams { tol, max_iter, ..RegionParams::sphere(purity, window, width, height) };
    Sequential.render(&params)
}

/// Region map of the invariant `(u, 0, w)` plane.
pub fn render_plane_map(window: Window, width: usize, height: usize, tol: f64, max_iter: u32) -> RegionMap {
    let params = RegionParams { tol, max_iter, ..RegionParams::plane(window, width, height) };
    Sequential.render(&params)
}

/// Which label pairs count as a border.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum BorderFilter {
    /// Any two distinct attracted labels.
    #[default]
    Any,
    /// Between the two pure phases only.
    BlueBlue,
    /// Between `C0` and either pure phase.
    RedBlue,
}

impl BorderFilter {
    pub fn accepts(self, a: ConvergenceLabel, b: ConvergenceLabel) -> bool {
        if a == b || !a.is_attracted() || !b.is_attracted() {
            return false;
        }
        match self {
            BorderFilter::Any => true,
            BorderFilter::BlueBlue => a.is_pure() && b.is_pure(),
            BorderFilter::RedBlue => a.is_pure() != b.is_pure(),
        }
    }
}

/// Binary grid aligned with a [`RegionMap`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BorderMask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl BorderMask {
    pub fn new(width: usize, height: usize) -> Self {
        BorderMask { width, height, bits: vec![false; width * height] }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[j * self.width + i]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.bits[j * self.width + i] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    /// Grows the mask by `radius` pixels in the Chebyshev metric.
    pub fn dilate(&self, radius: usize) -> BorderMask {
        let (w, h) = (self.width, self.height);
        // Separable max filter: rows then columns.
        let mut tmp = BorderMask::new(w, h);
        for j in 0..h {
            for i in 0..w {
                let lo = i.saturating_sub(radius);
                let hi = (i + radius).min(w - 1);
                tmp.bits[j * w + i] = (lo..=hi).any(|k| self.bits[j * w + k]);
            }
        }
        let mut out = BorderMask::new(w, h);
        for j in 0..h {
            let lo = j.saturating_sub(radius);
            let hi = (j + radius).min(h - 1);
            for i in 0..w {
                out.bits[j * w + i] = (lo..=hi).any(|k| tmp.bits[k * w + i]);
            }
        }
        out
    }
}

/// Marks the pixels where an accepted label change happens.
///
/// A pixel is set when it and its right or lower neighbour carry two distinct
/// attractor labels accepted by `filter`, so a straight label edge yields a
/// line one pixel wide. `NonConvergent` and `OutsideDomain` never contribute.
pub fn extract_border(map: &RegionMap, filter: BorderFilter) -> BorderMask {
    let (w, h) = (map.width(), map.height());
    let mut mask = BorderMask::new(w, h);
    for j in 0..h {
        for i in 0..w {
            let here = map.label(i, j);
            if !here.is_attracted() {
                continue;
            }
            let right = i + 1 < w && filter.accepts(here, map.label(i + 1, j));
            let below = j + 1 < h && filter.accepts(here, map.label(i, j + 1));
            if right || below {
                mask.set(i, j, true);
            }
        }
    }
    mask
}

/// Points of the red/blue border on the invariant plane.
///
/// Along `count` rays from the origin, at angles `2 pi (k + 1/2) / count` in
/// the `(u, w)` plane, the radius where orbits stop converging to `C0` is
/// bisected to machine precision. Rays that reach the sphere without leaving
/// the red region contribute nothing.
pub fn plane_border_points(count: usize, tol: f64, max_iter: u32) -> Vec<BlochVector> {
    let mut out = Vec::new();
    for k in 0..count {
        let angle = core::f64::consts::TAU * (k as f64 + 0.5) / count as f64;
        let (s, c) = (libm::sin(angle), libm::cos(angle));
        let red = |r: f64| classify_orbit(BlochVector::new(r * c, 0.0, r * s), tol, max_iter).0 == ConvergenceLabel::MixedC0;
        if red(1.0) {
            continue;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if red(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = 0.5 * (lo + hi);
        out.push(BlochVector::new(r * c, 0.0, r * s));
    }
    out
}
