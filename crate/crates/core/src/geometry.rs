//! Norms, target regions and their volumes, and the group elements
//! (diagonal flow, horospherical shear, rotation) that move between
//! Diophantine and lattice coordinates.
//!
//! Two region families are supported. The hyperbolic wedge collects points
//! `(x, y)` with `c1 <= |y| <= c2` and `|x| * |y|^kappa <= A`; the box
//! collects points with `|x| <= A` and `c1 <= |y| <= c2`. Here `|.|` stands
//! for the configured norms on the two blocks and `kappa = n/m` in the
//! dynamically consistent exponent convention (`kappa = 1` in the literal
//! one, kept for comparison runs).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the unit-determinant invariant.
pub const DET_TOL: f64 = 1e-10;

/// Norm choice on a coordinate block. In dimension 1 both evaluate to the
/// absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Supremum,
    Euclidean,
}

impl NormKind {
    pub fn norm(&self, v: &[f64]) -> f64 {
        match self {
            NormKind::Supremum => v.iter().fold(0.0, |acc, x| acc.max(x.abs())),
            NormKind::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    /// Volume of the unit ball of this norm in the given dimension.
    pub fn unit_ball_volume(&self, dim: usize) -> f64 {
        match self {
            NormKind::Supremum => 2f64.powi(dim as i32),
            // V_0 = 1, V_1 = 2, V_d = V_{d-2} * 2 pi / d.
            NormKind::Euclidean => {
                let mut v = if dim.is_multiple_of(2) { 1.0 } else { 2.0 };
                let mut d = if dim.is_multiple_of(2) { 2 } else { 3 };
                while d <= dim {
                    v *= 2.0 * std::f64::consts::PI / d as f64;
                    d += 2;
                }
                v
            }
        }
    }
}

/// Exponent convention for the wedge inequality and the solution counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentMode {
    /// `kappa = n/m`; the convention under which finite-scale counts are
    /// asymptotically scale-free.
    Consistent,
    /// `kappa = 1` (and counter exponent `-1/d`); drifts with scale when
    /// `m != n`, retained for comparison runs.
    PaperLiteral,
}

/// Whether the y block is restricted to its first-octant representative.
///
/// For `n = 1`, `PositiveCone` means `y > 0`; for `n >= 2` it keeps vectors
/// whose first nonzero coordinate is positive, so that each +-pair of
/// solutions is counted once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YSign {
    PositiveCone,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionFamily {
    HyperbolicWedge,
    Box,
}

/// How a volume was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    ClosedForm,
    Numeric,
}

/// A target set in R^m x R^n from one of the two supported families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionJson", into = "RegionJson")]
pub struct Region {
    family: RegionFamily,
    m: usize,
    n: usize,
    a: f64,
    window: (f64, f64),
    norm_x: NormKind,
    norm_y: NormKind,
    exponent_mode: ExponentMode,
    y_sign: YSign,
}

/// Wire format: `{family, m, n, A, c1, c2, norm_x, norm_y, exponent_mode, y_sign}`.
#[derive(Serialize, Deserialize)]
struct RegionJson {
    family: RegionFamily,
    m: usize,
    n: usize,
    #[serde(rename = "A")]
    a: f64,
    c1: f64,
    c2: f64,
    norm_x: NormKind,
    norm_y: NormKind,
    exponent_mode: ExponentMode,
    y_sign: YSign,
}

impl TryFrom<RegionJson> for Region {
    type Error = Error;
    fn try_from(j: RegionJson) -> Result<Region> {
        Region::new(
            j.family,
            j.m,
            j.n,
            j.a,
            (j.c1, j.c2),
            j.norm_x,
            j.norm_y,
            j.exponent_mode,
            j.y_sign,
        )
    }
}

impl From<Region> for RegionJson {
    fn from(r: Region) -> RegionJson {
        RegionJson {
            family: r.family,
            m: r.m,
            n: r.n,
            a: r.a,
            c1: r.window.0,
            c2: r.window.1,
            norm_x: r.norm_x,
            norm_y: r.norm_y,
            exponent_mode: r.exponent_mode,
            y_sign: r.y_sign,
        }
    }
}

impl Region {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        family: RegionFamily,
        m: usize,
        n: usize,
        a: f64,
        window: (f64, f64),
        norm_x: NormKind,
        norm_y: NormKind,
        exponent_mode: ExponentMode,
        y_sign: YSign,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("region dimensions m, n must be positive"));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::invalid(format!("A must be positive and finite, got {a}")));
        }
        let (c1, c2) = window;
        if !c1.is_finite() || !c2.is_finite() {
            return Err(Error::invalid("window bounds must be finite"));
        }
        match family {
            RegionFamily::HyperbolicWedge => {
                if !(0.0 < c1 && c1 < c2) {
                    return Err(Error::invalid(format!(
                        "hyperbolic wedge needs 0 < c1 < c2, got ({c1}, {c2})"
                    )));
                }
            }
            RegionFamily::Box => {
                if !(0.0 <= c1 && c1 < c2) {
                    return Err(Error::invalid(format!(
                        "box needs 0 <= c1 < c2, got ({c1}, {c2})"
                    )));
                }
            }
        }
        Ok(Region { family, m, n, a, window, norm_x, norm_y, exponent_mode, y_sign })
    }

    /// The 1-D wedge `{c1 <= y <= c2, |x| y <= A}`, the limit region of the
    /// Erdos-Szusz-Turan count with denominator window `[c1 N, c2 N]`.
    pub fn est_wedge_1d(a: f64, c1: f64, c2: f64) -> Result<Self> {
        Region::new(
            RegionFamily::HyperbolicWedge,
            1,
            1,
            a,
            (c1, c2),
            NormKind::Supremum,
            NormKind::Supremum,
            ExponentMode::Consistent,
            YSign::PositiveCone,
        )
    }

    /// The 1-D box `{|x| <= A, 0 < y <= 1}`, the limit region of the Kesten
    /// count.
    pub fn kesten_box_1d(a: f64) -> Result<Self> {
        Region::new(
            RegionFamily::Box,
            1,
            1,
            a,
            (0.0, 1.0),
            NormKind::Supremum,
            NormKind::Supremum,
            ExponentMode::Consistent,
            YSign::PositiveCone,
        )
    }

    pub fn family(&self) -> RegionFamily {
        self.family
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        self.m + self.n
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn window(&self) -> (f64, f64) {
        self.window
    }
    pub fn norm_x(&self) -> NormKind {
        self.norm_x
    }
    pub fn norm_y(&self) -> NormKind {
        self.norm_y
    }
    pub fn exponent_mode(&self) -> ExponentMode {
        self.exponent_mode
    }
    pub fn y_sign(&self) -> YSign {
        self.y_sign
    }

    /// Exponent `kappa` in the wedge inequality `|x| |y|^kappa <= A`.
    pub fn kappa(&self) -> f64 {
        match self.exponent_mode {
            ExponentMode::Consistent => self.n as f64 / self.m as f64,
            ExponentMode::PaperLiteral => 1.0,
        }
    }

    fn y_sign_ok(&self, y: &[f64]) -> bool {
        match self.y_sign {
            YSign::Full => true,
            YSign::PositiveCone => match y.iter().find(|c| **c != 0.0) {
                Some(first) => *first > 0.0,
                None => false,
            },
        }
    }

    /// Membership test; boundaries are inclusive.
    pub fn contains(&self, v: &[f64]) -> Result<bool> {
        if v.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: v.len() });
        }
        let (x, y) = v.split_at(self.m);
        if !self.y_sign_ok(y) {
            return Ok(false);
        }
        let ny = self.norm_y.norm(y);
        let (c1, c2) = self.window;
        if !(c1 <= ny && ny <= c2) {
            return Ok(false);
        }
        let nx = self.norm_x.norm(x);
        Ok(match self.family {
            RegionFamily::HyperbolicWedge => nx * ny.powf(self.kappa()) <= self.a,
            RegionFamily::Box => nx <= self.a,
        })
    }

    /// Lebesgue volume of the membership set (with y restricted per
    /// `y_sign`), and how it was computed. Closed forms cover the box family
    /// and the consistent-exponent wedge; the literal-exponent wedge with
    /// `m != n` falls back to adaptive quadrature over y-shells.
    pub fn volume_detailed(&self) -> (f64, VolumeMethod) {
        let (c1, c2) = self.window;
        let ux = self.norm_x.unit_ball_volume(self.m);
        let uy = self.norm_y.unit_ball_volume(self.n);
        let half = match self.y_sign {
            YSign::PositiveCone => 0.5,
            YSign::Full => 1.0,
        };
        let n = self.n as f64;
        match self.family {
            RegionFamily::Box => {
                let shell = uy * (c2.powi(self.n as i32) - c1.powi(self.n as i32));
                (ux * self.a.powi(self.m as i32) * shell * half, VolumeMethod::ClosedForm)
            }
            RegionFamily::HyperbolicWedge => {
                // x-section at |y| = r is a ball of radius A r^-kappa, so the
                // shell integrand is ux A^m r^-(m kappa) * n uy r^(n-1).
                let xs = ux * self.a.powi(self.m as i32);
                if self.kappa() == n / self.m as f64 {
                    (xs * n * uy * (c2 / c1).ln() * half, VolumeMethod::ClosedForm)
                } else {
                    let m = self.m as f64;
                    let f = |r: f64| xs * r.powf(-m) * n * uy * r.powf(n - 1.0);
                    let v = adaptive_simpson(&f, c1, c2, 1e-8);
                    (v * half, VolumeMethod::Numeric)
                }
            }
        }
    }

    pub fn volume(&self) -> f64 {
        self.volume_detailed().0
    }

    /// The preimage `g^-1 R` of this region under `g = diag(a Id_m, b Id_n)`
    /// with `a, b > 0`, which is again a region of the same family.
    pub fn preimage_under_diag(&self, a: f64, b: f64) -> Result<Region> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::invalid("diagonal scales must be positive"));
        }
        let scale_a = match self.family {
            RegionFamily::HyperbolicWedge => a * b.powf(self.kappa()),
            RegionFamily::Box => a,
        };
        Region::new(
            self.family,
            self.m,
            self.n,
            self.a / scale_a,
            (self.window.0 / b, self.window.1 / b),
            self.norm_x,
            self.norm_y,
            self.exponent_mode,
            self.y_sign,
        )
    }

    /// Axis-aligned bounding box `[x_lo, x_hi] x [y_lo, y_hi]`, only for 2-D
    /// regions (m = n = 1).
    pub(crate) fn bounding_box_2d(&self) -> Result<[(f64, f64); 2]> {
        if self.dim() != 2 {
            return Err(Error::Dimension { expected: 2, got: self.dim() });
        }
        let (c1, c2) = self.window;
        let xb = match self.family {
            RegionFamily::Box => self.a,
            RegionFamily::HyperbolicWedge => self.a * c1.powf(-self.kappa()),
        };
        if !xb.is_finite() || !c2.is_finite() {
            return Err(Error::Unbounded);
        }
        let yr = match self.y_sign {
            YSign::PositiveCone => (c1, c2),
            YSign::Full => (-c2, c2),
        };
        Ok([(-xb, xb), yr])
    }
}

/// An element of SL(d, R): the invariant `|det - 1| <= 1e-10` is checked at
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: DMatrix<f64>,
}

impl GroupElement {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("group element must be a square matrix"));
        }
        let det = matrix.determinant();
        if !((det - 1.0).abs() <= DET_TOL) {
            return Err(Error::invalid(format!("determinant {det} is not 1 within {DET_TOL:e}")));
        }
        Ok(GroupElement { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        if v.len() != d {
            return Err(Error::Dimension { expected: d, got: v.len() });
        }
        let mut out = vec![0.0; d];
        for i in 0..d {
            let mut acc = 0.0;
            for j in 0..d {
                acc += self.matrix[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Matrix product `self * other`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(GroupElement { matrix: &self.matrix * &other.matrix })
    }
}

/// Diagonal flow `diag(e^{t/m} Id_m, e^{-t/n} Id_n)`: the last n coordinates
/// contract for t > 0, so that `diag_flow(log N, 1, 1) = diag(N, 1/N)`.
pub fn diag_flow(t: f64, m: usize, n: usize) -> GroupElement {
    let d = m + n;
    let mut mat = DMatrix::zeros(d, d);
    let e_x = (t / m as f64).exp();
    let e_y = (-t / n as f64).exp();
    for i in 0..m {
        mat[(i, i)] = e_x;
    }
    for i in m..d {
        mat[(i, i)] = e_y;
    }
    GroupElement { matrix: mat }
}

/// Block-unipotent shear `[[Id_m, -X], [0, Id_n]]` for an m x n matrix X.
///
/// The sign puts `shear(alpha) . (p, q) = (p - alpha q, q)` in the 1-D case,
/// so `x = p - alpha q` carries the approximation error.
pub fn shear(x: &DMatrix<f64>) -> GroupElement {
    let (m, n) = (x.nrows(), x.ncols());
    let d = m + n;
    let mut mat = DMatrix::identity(d, d);
    for i in 0..m {
        for j in 0..n {
            mat[(i, m + j)] = -x[(i, j)];
        }
    }
    GroupElement { matrix: mat }
}

/// 1-D convenience: `shear` of the 1 x 1 matrix `[alpha]`.
pub fn shear_1d(alpha: f64) -> GroupElement {
    shear(&DMatrix::from_element(1, 1, alpha))
}

/// Standard rotation of the plane by `theta`.
pub fn rotation(theta: f64) -> GroupElement {
    let (s, c) = theta.sin_cos();
    GroupElement { matrix: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]) }
}

/// Adaptive Simpson quadrature with a relative tolerance.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, eps / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, eps / 2.0, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    let eps = rel_tol * whole.abs().max(f64::MIN_POSITIVE);
    recurse(f, a, fa, b, fb, whole, m, fm, eps, 48)
}
