//! Single-qubit states, the protocol step and the pure-state rational map.
//!
//! A state is either a 2×2 density matrix in the computational basis or its
//! Bloch vector `(u, v, w)`, related by
//!
//! ```text
//! rho = 1/2 * [[1 + w, u - i v], [u + i v, 1 - w]]
//! ```
//!
//! One protocol step squares every matrix element (postselected CNOT),
//! renormalises, and conjugates by the Hadamard gate. In Bloch coordinates this
//! is the rational map [`step_bloch`]. On the pure-state sphere the dynamics is
//! conjugate to `f(z) = (1 - z^2) / (1 + z^2)` through the stereographic chart
//! `z = (u - i v) / (1 + w)`.

use core::fmt;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Slack allowed on `|r| <= 1` to absorb rounding.
pub const BALL_TOL: f64 = 1e-12;

/// Tolerance on the Hermitian, trace and positivity checks of a density matrix.
pub const MATRIX_TOL: f64 = 1e-12;

/// A point of the closed Bloch ball.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl fmt::Debug for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.u, self.v, self.w)
    }
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector::new(0.0, 0.0, 0.0);

    /// Builds a vector without checking ball membership.
    pub const fn new(u: f64, v: f64, w: f64) -> Self {
        BlochVector { u, v, w }
    }

    /// Builds a vector, rejecting points outside the ball beyond [`BALL_TOL`].
    pub fn checked(u: f64, v: f64, w: f64) -> Result<Self> {
        let x = BlochVector { u, v, w };
        x.validate()?;
        Ok(x)
    }

    pub fn validate(&self) -> Result<()> {
        let norm_sq = self.norm_sq();
        if norm_sq.is_finite() && norm_sq <= 1.0 + BALL_TOL {
            Ok(())
        } else {
            Err(Error::OutsideBall { norm_sq })
        }
    }

    pub fn in_ball(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn norm_sq(&self) -> f64 {
        self.u * self.u + self.v * self.v + self.w * self.w
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn purity(&self) -> f64 {
        purity(*self)
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        (*self - *other).norm()
    }

    pub fn max_abs_diff(&self, other: &BlochVector) -> f64 {
        libm::fabs(self.u - other.u)
            .max(libm::fabs(self.v - other.v))
            .max(libm::fabs(self.w - other.w))
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        BlochVector::new(a[0], a[1], a[2])
    }
}

impl Add for BlochVector {
    type Output = BlochVector;
    fn add(self, rhs: BlochVector) -> BlochVector {
        BlochVector::new(self.u + rhs.u, self.v + rhs.v, self.w + rhs.w)
    }
}

impl Sub for BlochVector {
    type Output = BlochVector;
    fn sub(self, rhs: BlochVector) -> BlochVector {
        BlochVector::new(self.u - rhs.u, self.v - rhs.v, self.w - rhs.w)
    }
}

impl Mul<f64> for BlochVector {
    type Output = BlochVector;
    fn mul(self, k: f64) -> BlochVector {
        BlochVector::new(self.u * k, self.v * k, self.w * k)
    }
}

/// `Tr(rho^2) = (1 + u^2 + v^2 + w^2) / 2`.
pub fn purity(x: BlochVector) -> f64 {
    0.5 * (1.0 + x.norm_sq())
}

/// Radius of the constant-purity sphere, `sqrt(2P - 1)`.
pub fn sphere_radius(purity: f64) -> f64 {
    libm::sqrt((2.0 * purity - 1.0).max(0.0))
}

/// A 2×2 density matrix in the computational basis, row-major.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct DensityMatrix {
    pub entries: [[Complex64; 2]; 2],
}

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// The Hadamard gate `1/sqrt(2) [[1, 1], [1, -1]]`.
pub const HADAMARD: [[f64; 2]; 2] = [[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2]];

impl DensityMatrix {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Self {
        DensityMatrix { entries }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Largest entrywise deviation from `rho = rho^dagger`.
    pub fn hermitian_deviation(&self) -> f64 {
        let e = &self.entries;
        let d00 = libm::fabs(e[0][0].im);
        let d11 = libm::fabs(e[1][1].im);
        let d01 = (e[0][1] - e[1][0].conj()).norm();
        d00.max(d11).max(d01)
    }

    /// Checks Hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if !(deviation <= MATRIX_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = self.trace();
        if !(libm::fabs(tr.re - 1.0) <= MATRIX_TOL) || !(libm::fabs(tr.im) <= MATRIX_TOL) {
            return Err(Error::TraceNotOne { trace: tr.re });
        }
        // Eigenvalues of a unit-trace Hermitian 2x2 are (1 ± |r|)/2.
        let x = bloch_unchecked(self);
        let eigenvalue = 0.5 * (1.0 - x.norm());
        if eigenvalue < -MATRIX_TOL {
            return Err(Error::NotPositive { eigenvalue });
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        let mut m = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                m = m.max((self.entries[r][c] - other.entries[r][c]).norm());
            }
        }
        m
    }
}

fn bloch_unchecked(rho: &DensityMatrix) -> BlochVector {
    let e = &rho.entries;
    // Average the two off-diagonal estimates so tiny anti-Hermitian noise cancels.
    let off = (e[1][0] + e[0][1].conj()) * 0.5;
    BlochVector::new(2.0 * off.re, 2.0 * off.im, e[0][0].re - e[1][1].re)
}

pub fn bloch_to_density(x: BlochVector) -> Result<DensityMatrix> {
    x.validate()?;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    Ok(DensityMatrix::new([
        [c(0.5 * (1.0 + x.w), 0.0), c(0.5 * x.u, -0.5 * x.v)],
        [c(0.5 * x.u, 0.5 * x.v), c(0.5 * (1.0 - x.w), 0.0)],
    ]))
}

pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    rho.validate()?;
    Ok(bloch_unchecked(rho))
}

/// One protocol step on the density matrix: `H (rho ⊙ rho) H / Tr(rho ⊙ rho)`.
pub fn step_density(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let e = &rho.entries;
    let mut sq = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            sq[r][c] = e[r][c] * e[r][c];
        }
    }
    let norm = (sq[0][0] + sq[1][1]).re;
    if !(norm > 1e-300) {
        return Err(Error::NormalizationUnderflow);
    }
    let h = HADAMARD;
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                for l in 0..2 {
                    // H is real and symmetric, so H^dagger = H.
                    acc += sq[k][l] * (h[r][k] * h[l][c]);
                }
            }
            out[r][c] = acc / norm;
        }
    }
    Ok(DensityMatrix::new(out))
}

/// One protocol step in Bloch coordinates.
///
/// `u' = 2w / (1 + w^2)`, `v' = -2uv / (1 + w^2)`, `w' = (u^2 - v^2) / (1 + w^2)`.
/// `v = 0` maps to `v' = 0` exactly.
#[inline]
pub fn step_bloch(x: BlochVector) -> BlochVector {
    let d = 1.0 + x.w * x.w;
    BlochVector::new(
        2.0 * x.w / d,
        -2.0 * x.u * x.v / d,
        (x.u * x.u - x.v * x.v) / d,
    )
}

/// A point of the Riemann sphere: finite complex number or infinity.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

/// `f(z) = (1 - z^2) / (1 + z^2)` with `f(∞) = -1`.
pub fn rational_step(z: ExtComplex) -> Result<ExtComplex> {
    match z {
        ExtComplex::Infinity => Ok(ExtComplex::Finite(Complex64::new(-1.0, 0.0))),
        ExtComplex::Finite(z) => {
            let z2 = z * z;
            let den = Complex64::new(1.0, 0.0) + z2;
            if den.norm() == 0.0 {
                return Err(Error::PoleInput);
            }
            Ok(ExtComplex::Finite((Complex64::new(1.0, 0.0) - z2) / den))
        }
    }
}

/// Pure state to its complex coordinate `z = (u - i v) / (1 + w)`.
///
/// The south pole `(0, 0, -1)`, i.e. the state `|1>`, is the point at infinity.
pub fn pure_to_complex(x: BlochVector) -> ExtComplex {
    let den = 1.0 + x.w;
    if den <= 1e-300 {
        ExtComplex::Infinity
    } else {
        ExtComplex::Finite(Complex64::new(x.u / den, -x.v / den))
    }
}

/// Inverse of [`pure_to_complex`].
pub fn complex_to_pure(z: ExtComplex) -> BlochVector {
    match z {
        ExtComplex::Infinity => BlochVector::new(0.0, 0.0, -1.0),
        ExtComplex::Finite(z) => inverse_project(ProjectedPoint::new(z.re, -z.im), 1.0),
    }
}

/// Equatorial-plane coordinates of a constant-purity sphere.
#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub struct ProjectedPoint {
    pub x: f64,
    pub y: f64,
}

impl ProjectedPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        ProjectedPoint { x, y }
    }
}

/// Projects a point of the purity-`P` sphere from its south pole:
/// `x = u / (sqrt(2P - 1) + w)`, `y = v / (sqrt(2P - 1) + w)`.
pub fn stereographic_project(x: BlochVector, purity_level: f64) -> Result<ProjectedPoint> {
    let actual = purity(x);
    if !(libm::fabs(actual - purity_level) <= 1e-9) {
        return Err(Error::PurityMismatch { expected: purity_level, actual });
    }
    let den = sphere_radius(purity_level) + x.w;
    if den <= 1e-12 {
        return Err(Error::PoleProjection);
    }
    Ok(ProjectedPoint::new(x.u / den, x.v / den))
}

/// Lifts a plane point back to the purity-`P` sphere.
///
/// At `P = 0.5` the sphere degenerates to the origin, which is returned for
/// every input.
pub fn inverse_project(p: ProjectedPoint, purity_level: f64) -> BlochVector {
    let r = sphere_radius(purity_level);
    let rho2 = p.x * p.x + p.y * p.y;
    let den = 1.0 + rho2;
    BlochVector::new(
        r * 2.0 * p.x / den,
        r * 2.0 * p.y / den,
        r * (1.0 - rho2) / den,
    )
}
