//! Box-counting dimension of border masks and its dependence on purity.

use alloc::vec;
use alloc::vec::Vec;

use crate::basin::{classify_orbit, extract_border, BorderFilter, BorderMask, Rasterizer, RegionMap, RegionParams, Surface, Window};
use crate::bloch::{inverse_project, ProjectedPoint};
use crate::error::{Error, Result};

/// Occupied-box counts of a mask at a sequence of box sizes.
#[derive(Clone, PartialEq, Debug)]
pub struct BoxCounts {
    pub scales: Vec<usize>,
    pub counts: Vec<f64>,
}

/// Result of the log-log regression.
#[derive(Clone, PartialEq, Debug)]
pub struct DimensionEstimate {
    pub scales: Vec<usize>,
    pub counts: Vec<f64>,
    /// The box-counting dimension `D_bc`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub border_pixels: usize,
}

/// Powers of two from 2 up to `min(width, height) / 8`.
pub fn default_scales(width: usize, height: usize) -> Vec<usize> {
    let limit = width.min(height) / 8;
    let mut scales = Vec::new();
    let mut s = 2;
    while s <= limit {
        scales.push(s);
        s *= 2;
    }
    scales
}

fn check_scales(mask: &BorderMask, scales: &[usize]) -> Result<()> {
    if scales.is_empty() {
        return Err(Error::InvalidArgument("no box sizes given"));
    }
    if scales[0] < 1 {
        return Err(Error::InvalidArgument("box sizes must be at least 1"));
    }
    if scales.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidArgument("box sizes must be strictly increasing"));
    }
    if *scales.last().unwrap() > mask.width.min(mask.height) / 4 {
        return Err(Error::InvalidArgument("largest box exceeds a quarter of the mask"));
    }
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(())
}

fn count_at(mask: &BorderMask, s: usize, offset_x: usize, offset_y: usize, seen: &mut Vec<bool>) -> usize {
    // Boxes start at -offset so a shifted grid still covers the whole mask.
    let nx = (mask.width + offset_x).div_ceil(s);
    let ny = (mask.height + offset_y).div_ceil(s);
    seen.clear();
    seen.resize(nx * ny, false);
    let mut occupied = 0;
    for j in 0..mask.height {
        let row = &mask.bits[j * mask.width..(j + 1) * mask.width];
        let by = (j + offset_y) / s;
        for (i, bit) in row.iter().enumerate() {
            if *bit {
                let idx = by * nx + (i + offset_x) / s;
                if !seen[idx] {
                    seen[idx] = true;
                    occupied += 1;
                }
            }
        }
    }
    occupied
}

/// Counts the boxes of side `s` (grid anchored at the origin) that contain at
/// least one set pixel, for every `s` in `scales`.
pub fn box_count(mask: &BorderMask, scales: &[usize]) -> Result<BoxCounts> {
    check_scales(mask, scales)?;
    let mut seen = Vec::new();
    let counts = scales.iter().map(|&s| count_at(mask, s, 0, 0, &mut seen) as f64).collect();
    Ok(BoxCounts { scales: scales.to_vec(), counts })
}

/// Like [`box_count`], averaging over the four grid anchors shifted by
/// `0` or `s / 2` along each axis.
pub fn box_count_offset_averaged(mask: &BorderMask, scales: &[usize]) -> Result<BoxCounts> {
    check_scales(mask, scales)?;
    let mut seen = Vec::new();
    let counts = scales
        .iter()
        .map(|&s| {
            let h = s / 2;
            let total: usize = [(0, 0), (h, 0), (0, h), (h, h)]
                .iter()
                .map(|&(ox, oy)| count_at(mask, s, ox, oy, &mut seen))
                .sum();
            total as f64 / 4.0
        })
        .collect();
    Ok(BoxCounts { scales: scales.to_vec(), counts })
}

/// Least-squares line through `(ln(1/s), ln N(s))`.
pub fn fit_dimension(scales: &[usize], counts: &[f64]) -> Result<DimensionEstimate> {
    if scales.len() != counts.len() {
        return Err(Error::InvalidArgument("scales and counts differ in length"));
    }
    if scales.len() < 4 {
        return Err(Error::InvalidArgument("at least four box sizes are needed"));
    }
    if counts.iter().any(|c| !(*c >= 1.0)) {
        return Err(Error::InvalidArgument("every count must be at least 1"));
    }
    if counts.iter().all(|c| *c == counts[0]) {
        return Err(Error::DegenerateFit);
    }
    let n = scales.len() as f64;
    let xs: Vec<f64> = scales.iter().map(|s| -libm::log(*s as f64)).collect();
    let ys: Vec<f64> = counts.iter().map(|c| libm::log(*c)).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| {
        let r = y - (intercept + slope * x);
        r * r
    }).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 0.0 };
    Ok(DimensionEstimate {
        scales: scales.to_vec(),
        counts: counts.to_vec(),
        slope,
        intercept,
        r_squared,
        border_pixels: 0,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct CountOptions {
    pub filter: BorderFilter,
    pub offset_average: bool,
}

/// Border extraction, box counting and fit for an already rendered map.
pub fn dimension_of_map(map: &RegionMap, scales: &[usize], options: CountOptions) -> Result<DimensionEstimate> {
    let mask = extract_border(map, options.filter);
    dimension_of_mask(&mask, scales, options.offset_average)
}

pub fn dimension_of_mask(mask: &BorderMask, scales: &[usize], offset_average: bool) -> Result<DimensionEstimate> {
    let boxes = if offset_average {
        box_count_offset_averaged(mask, scales)?
    } else {
        box_count(mask, scales)?
    };
    let mut est = fit_dimension(&boxes.scales, &boxes.counts)?;
    est.border_pixels = mask.count();
    Ok(est)
}

/// Renders the purity-`P` sphere and estimates the dimension of its border.
pub fn dimension_at_purity<R: Rasterizer + ?Sized>(
    rasterizer: &R,
    params: &RegionParams,
    scales: &[usize],
    options: CountOptions,
) -> Result<DimensionEstimate> {
    if !matches!(params.purity(), Some(p) if p > 0.5 && p <= 1.0) {
        return Err(Error::InvalidArgument("purity must lie in (0.5, 1]"));
    }
    let map = rasterizer.render(params);
    dimension_of_map(&map, scales, options)
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct SweepRow {
    pub purity: f64,
    /// `NaN` when the border was empty or the fit degenerate.
    pub dimension: f64,
    pub border_pixels: usize,
    pub r_squared: f64,
}

#[derive(Clone, PartialEq, Debug)]
pub struct SweepResult {
    /// Sorted by purity.
    pub rows: Vec<SweepRow>,
    /// Midpoint of [`SweepResult::transition_interval`].
    pub transition_estimate: f64,
    /// The adjacent purity pair with the largest drop in dimension.
    pub transition_interval: (f64, f64),
}

impl SweepResult {
    /// Sorts `rows` by purity and locates the largest adjacent drop in `D_bc`
    /// (going from higher to lower purity). Rows without a dimension are skipped.
    pub fn from_rows(mut rows: Vec<SweepRow>) -> Self {
        rows.sort_by(|a, b| a.purity.total_cmp(&b.purity));
        let valid: Vec<&SweepRow> = rows.iter().filter(|r| r.dimension.is_finite()).collect();
        let mut best: Option<(f64, f64, f64)> = None;
        for pair in valid.windows(2) {
            let drop = pair[1].dimension - pair[0].dimension;
            if best.is_none_or(|(d, _, _)| drop > d) {
                best = Some((drop, pair[0].purity, pair[1].purity));
            }
        }
        let (transition_estimate, transition_interval) = match best {
            Some((_, lo, hi)) => (0.5 * (lo + hi), (lo, hi)),
            None => (f64::NAN, (f64::NAN, f64::NAN)),
        };
        SweepResult { rows, transition_estimate, transition_interval }
    }

    /// Mean dimension over rows with purity in `[lo, hi]`.
    pub fn mean_dimension(&self, lo: f64, hi: f64) -> f64 {
        let sel: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.purity >= lo && r.purity <= hi && r.dimension.is_finite())
            .map(|r| r.dimension)
            .collect();
        if sel.is_empty() {
            f64::NAN
        } else {
            sel.iter().sum::<f64>() / sel.len() as f64
        }
    }
}

/// Step of the coarse scan in [`axis_border_point`].
const AXIS_SCAN_STEP: f64 = 1e-3;
const AXIS_SCAN_END: f64 = 3.0;

/// First point on the positive `x` axis of the purity-`P` projection where
/// the label differs from the label at the origin.
///
/// The axis is the image of the invariant plane. Above the critical purity
/// this is where the dark and light blue regions pinch together and the
/// fractal part of the border survives; below it the point sits on a smooth
/// red/blue border. Located by a coarse scan refined by bisection to machine
/// precision.
pub fn axis_border_point(purity: f64, tol: f64, max_iter: u32) -> Option<f64> {
    let label = |x: f64| classify_orbit(inverse_project(ProjectedPoint::new(x, 0.0), purity), tol, max_iter).0;
    let origin = label(0.0);
    let steps = libm::round(AXIS_SCAN_END / AXIS_SCAN_STEP) as usize;
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=steps {
        let x = k as f64 * AXIS_SCAN_STEP;
        if label(x) != origin {
            hi = Some(x);
            break;
        }
        lo = x;
    }
    let mut hi = hi?;
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if label(mid) == origin {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// How the window of each sweep row is chosen.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum WindowPolicy {
    /// The same window at every purity.
    Fixed(Window),
    /// A square of the given half-width centred on [`axis_border_point`].
    AxisBorder { half_width: f64 },
}

impl WindowPolicy {
    pub fn window_for(&self, purity: f64, tol: f64, max_iter: u32) -> Result<Window> {
        match *self {
            WindowPolicy::Fixed(w) => Ok(w),
            WindowPolicy::AxisBorder { half_width } => {
                let c = axis_border_point(purity, tol, max_iter)
                    .ok_or(Error::InvalidArgument("no label change on the projection axis"))?;
                Ok(Window::new(c - half_width, c + half_width, -half_width, half_width))
            }
        }
    }
}

/// Purity values `start, start + step, ..., end` computed from integer
/// multiples so the grid has no accumulated drift.
pub fn purity_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = libm::round((end - start) / step) as usize;
    (0..=n).map(|k| libm::round((start + k as f64 * step) * 1e9) / 1e9).collect()
}

/// Dimension of the border at each purity, plus the transition estimate.
///
/// `base` supplies resolution and iteration settings; its surface is replaced
/// by each purity in turn and its window by the one `policy` picks.
pub fn purity_sweep<R: Rasterizer + ?Sized>(
    rasterizer: &R,
    purities: &[f64],
    base: &RegionParams,
    policy: WindowPolicy,
    scales: &[usize],
    options: CountOptions,
) -> Result<SweepResult> {
    if purities.len() < 2 {
        return Err(Error::InvalidArgument("a sweep needs at least two purities"));
    }
    let mut rows = vec![];
    for &p in purities {
        let window = policy.window_for(p, base.tol, base.max_iter)?;
        let params = RegionParams { surface: Surface::Sphere { purity: p }, window, ..*base };
        let row = match dimension_at_purity(rasterizer, &params, scales, options) {
            Ok(est) => SweepRow { purity: p, dimension: est.slope, border_pixels: est.border_pixels, r_squared: est.r_squared },
            Err(Error::EmptyMask) | Err(Error::DegenerateFit) | Err(Error::InvalidArgument(_)) => {
                SweepRow { purity: p, dimension: f64::NAN, border_pixels: 0, r_squared: f64::NAN }
            }
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(SweepResult::from_rows(rows))
}
