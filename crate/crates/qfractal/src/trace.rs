//! Pre-image clouds of two seed families overlaid on a region map.

use num_complex::Complex64;
use qfractal_core::basin::{plane_border_points, BorderFilter, Rasterizer, RegionMap, RegionParams, Window};
use qfractal_core::bloch::{purity, stereographic_project, BlochVector};
use qfractal_core::inverse::{julia_sample, preimage_cloud, shrink_to_purity, Z_C2};
use qfractal_core::{extract_border, Result};

use crate::output::ColorTable;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    /// Mixed states close to points of the pure-state Julia set.
    Julia,
    /// Off-plane neighbours of the red/blue border of the invariant plane.
    Plane,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Julia => "julia",
            Family::Plane => "plane",
        }
    }

    /// The border type this family's pre-images are expected to follow.
    pub fn border(self) -> BorderFilter {
        match self {
            Family::Julia => BorderFilter::BlueBlue,
            Family::Plane => BorderFilter::RedBlue,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct TraceSettings {
    /// Purity of the rendered surface.
    pub purity: f64,
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub tol: f64,
    pub max_iter: u32,
    /// Inverse-iteration depth of the Julia sample.
    pub julia_depth: usize,
    /// Purity the Julia points are shrunk to before tracing back.
    pub seed_purity: f64,
    /// Backward depth of the pre-image clouds.
    pub depth: usize,
    /// Purity band of the kept pre-images.
    pub band: (f64, f64),
    /// Number of rays searched for plane-border seeds.
    pub plane_rays: usize,
    /// Distance of the plane seeds from the plane, along `v`.
    pub offset: f64,
}

impl Default for TraceSettings {
    fn default() -> Self {
        TraceSettings {
            purity: 0.9,
            window: Window::new(0.0, 3.0, 0.0, 3.0),
            width: 1024,
            height: 1024,
            tol: qfractal_core::basin::DEFAULT_TOL,
            max_iter: qfractal_core::basin::DEFAULT_MAX_ITER,
            julia_depth: 10,
            seed_purity: 0.96,
            depth: 12,
            band: (0.895, 0.905),
            plane_rays: 256,
            offset: 0.01,
        }
    }
}

impl TraceSettings {
    pub fn params(&self) -> RegionParams {
        RegionParams {
            tol: self.tol,
            max_iter: self.max_iter,
            ..RegionParams::sphere(self.purity, self.window, self.width, self.height)
        }
    }
}

/// Julia sample points shrunk radially to `seed_purity`.
pub fn julia_seeds(depth: usize, seed_purity: f64) -> Result<Vec<BlochVector>> {
    julia_sample(Complex64::new(Z_C2, 0.0), depth)?
        .points
        .into_iter()
        .map(|p| shrink_to_purity(p, seed_purity))
        .collect()
}

/// Plane-border points pushed to `v = +offset` and `v = -offset`.
pub fn plane_seeds(rays: usize, offset: f64, tol: f64, max_iter: u32) -> Vec<BlochVector> {
    let mut out = Vec::new();
    for p in plane_border_points(rays, tol, max_iter) {
        for v in [-offset, offset] {
            let q = BlochVector::new(p.u, v, p.w);
            if q.in_ball() {
                out.push(q);
            }
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct OverlayPoint {
    pub family: Family,
    pub point: BlochVector,
    pub seed: usize,
    pub depth: usize,
    /// Projection through the point's own purity sphere, which equals the
    /// projection of its radial rescaling onto the rendered surface.
    pub x: f64,
    pub y: f64,
    pub pixel: Option<(usize, usize)>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct TraceResult {
    pub map: RegionMap,
    pub points: Vec<OverlayPoint>,
}

/// Pre-images of `seeds` in the purity band, located on the raster of `params`.
pub fn overlay(params: &RegionParams, family: Family, seeds: &[BlochVector], depth: usize, band: (f64, f64)) -> Result<Vec<OverlayPoint>> {
    let mut out = Vec::new();
    for c in preimage_cloud(seeds, depth, band)? {
        let Ok(proj) = stereographic_project(c.point, purity(c.point)) else {
            continue;
        };
        out.push(OverlayPoint {
            family,
            point: c.point,
            seed: c.seed,
            depth: c.depth,
            x: proj.x,
            y: proj.y,
            pixel: params.pixel_at(proj.x, proj.y),
        });
    }
    Ok(out)
}

pub fn run_trace<R: Rasterizer + ?Sized>(rasterizer: &R, s: &TraceSettings) -> Result<TraceResult> {
    let params = s.params();
    let map = rasterizer.render(&params);
    let julia = julia_seeds(s.julia_depth, s.seed_purity)?;
    let plane = plane_seeds(s.plane_rays, s.offset, s.tol, s.max_iter);
    let mut points = overlay(&params, Family::Julia, &julia, s.depth, s.band)?;
    points.extend(overlay(&params, Family::Plane, &plane, s.depth, s.band)?);
    Ok(TraceResult { map, points })
}

/// How many in-window points of a family lie within `radius` pixels
/// (Chebyshev) of the family's border type.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Alignment {
    pub family: Family,
    pub in_window: usize,
    pub aligned: usize,
}

impl Alignment {
    /// `NaN` when no point landed in the window.
    pub fn fraction(&self) -> f64 {
        self.aligned as f64 / self.in_window as f64
    }
}

pub fn alignment(result: &TraceResult, family: Family, radius: usize) -> Alignment {
    let mask = extract_border(&result.map, family.border()).dilate(radius);
    let mut a = Alignment { family, in_window: 0, aligned: 0 };
    for p in result.points.iter().filter(|p| p.family == family) {
        if let Some((i, j)) = p.pixel {
            a.in_window += 1;
            if mask.get(i, j) {
                a.aligned += 1;
            }
        }
    }
    a
}

/// Region colours with the overlay points painted on top, plane family last.
pub fn overlay_image(result: &TraceResult, colors: &ColorTable) -> Vec<u8> {
    let w = result.map.width();
    let mut rgb = region_image(&result.map, colors);
    for family in [Family::Julia, Family::Plane] {
        let c = match family {
            Family::Julia => colors.overlay_julia,
            Family::Plane => colors.overlay_plane,
        };
        for p in result.points.iter().filter(|p| p.family == family) {
            if let Some((i, j)) = p.pixel {
                let k = 3 * (j * w + i);
                rgb[k..k + 3].copy_from_slice(&c);
            }
        }
    }
    rgb
}

pub fn region_image(map: &RegionMap, colors: &ColorTable) -> Vec<u8> {
    map.labels.iter().flat_map(|l| colors.color(*l)).collect()
}
