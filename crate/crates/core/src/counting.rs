//! Exact integer counters for the finite-scale solution-count random
//! variables: 1-D approximation, simultaneous approximation, m x n systems
//! of linear forms, Veronese curves, and circle averages over the torus
//! lattice.
//!
//! All counters are pure functions of their arguments and are safe to call
//! concurrently from Monte Carlo workers. Enumeration iterates the integer
//! denominator shell directly; for each denominator the admissible
//! numerators form a short product of intervals, so the work per sample is
//! linear in the window length.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{ExponentMode, NormKind, RegionFamily};

/// Default cap on enumerated candidates per counting call.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Which finite-scale variable a `CountSpec` describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountVariant {
    /// Denominator window `[c1 N, c2 N]`, threshold decaying in `|q|`.
    Est,
    /// Denominator window `[1, N]`, threshold decaying in `N`.
    Kesten,
}

/// Full parameterization of one counting experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSpec {
    pub m: usize,
    pub n: usize,
    pub a: f64,
    /// Range of `|q|` (the y-block norm).
    pub window: (f64, f64),
    pub variant: CountVariant,
    /// Scale parameter N.
    pub n_scale: u64,
    pub norm_x: NormKind,
    pub norm_y: NormKind,
    pub exponent_mode: ExponentMode,
    pub budget: u64,
}

impl CountSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn est(
        m: usize,
        n: usize,
        a: f64,
        c1: f64,
        c2: f64,
        n_scale: u64,
        norm_x: NormKind,
        norm_y: NormKind,
        exponent_mode: ExponentMode,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("m, n must be positive"));
        }
        if !(a > 0.0) {
            return Err(Error::invalid(format!("A must be positive, got {a}")));
        }
        if !(0.0 < c1 && c1 < c2) || n_scale == 0 {
            return Err(Error::invalid(format!(
                "window needs 0 < c1 < c2 and N >= 1, got ({c1}, {c2}), N = {n_scale}"
            )));
        }
        let nf = n_scale as f64;
        Ok(CountSpec {
            m,
            n,
            a,
            window: (c1 * nf, c2 * nf),
            variant: CountVariant::Est,
            n_scale,
            norm_x,
            norm_y,
            exponent_mode,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn kesten(
        m: usize,
        n: usize,
        a: f64,
        n_scale: u64,
        norm_x: NormKind,
        norm_y: NormKind,
        exponent_mode: ExponentMode,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("m, n must be positive"));
        }
        if !(a > 0.0) {
            return Err(Error::invalid(format!("A must be positive, got {a}")));
        }
        if n_scale == 0 {
            return Err(Error::invalid("N must be >= 1"));
        }
        Ok(CountSpec {
            m,
            n,
            a,
            window: (1.0, n_scale as f64),
            variant: CountVariant::Kesten,
            n_scale,
            norm_x,
            norm_y,
            exponent_mode,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Numerator threshold for a denominator of norm `q_norm`.
    fn threshold(&self, q_norm: f64) -> f64 {
        let expo = match self.exponent_mode {
            ExponentMode::Consistent => -(self.n as f64) / self.m as f64,
            ExponentMode::PaperLiteral => -1.0 / (self.m + self.n) as f64,
        };
        match self.variant {
            CountVariant::Est => self.a * q_norm.powf(expo),
            CountVariant::Kesten => self.a * (self.n_scale as f64).powf(expo),
        }
    }
}

/// A nondegenerate analytic curve to approximate on; `Veronese` is the
/// moment curve `s -> (s, s^2, ..., s^n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Veronese,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub curve_dimension: usize,
    pub interval: (f64, f64),
    pub kind: CurveKind,
}

impl CurveSpec {
    pub fn veronese(curve_dimension: usize, interval: (f64, f64)) -> Result<Self> {
        if curve_dimension == 0 {
            return Err(Error::invalid("curve dimension must be positive"));
        }
        if !(interval.0 < interval.1) {
            return Err(Error::invalid("curve interval needs a < b"));
        }
        Ok(CurveSpec { curve_dimension, interval, kind: CurveKind::Veronese })
    }

    /// Evaluate the curve at `s` as a column vector.
    pub fn point(&self, s: f64) -> DMatrix<f64> {
        match self.kind {
            CurveKind::Veronese => {
                let mut col = DMatrix::zeros(self.curve_dimension, 1);
                let mut pw = 1.0;
                for i in 0..self.curve_dimension {
                    pw *= s;
                    col[(i, 0)] = pw;
                }
                col
            }
        }
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// True iff the gcd of the absolute entries is 1.
pub fn is_primitive(w: &[i64]) -> Result<bool> {
    if w.iter().all(|c| *c == 0) {
        return Err(Error::ZeroVector);
    }
    let g = w.iter().fold(0u64, |acc, c| gcd_u64(acc, c.unsigned_abs()));
    Ok(g == 1)
}

/// Number of reduced fractions p/q with `q in [c1 N, c2 N]` and
/// `|alpha - p/q| <= A / q^2`, evaluated as `q |q alpha - p| <= A`.
pub fn count_est_1d(alpha: f64, a: f64, c1: f64, c2: f64, n_scale: u64) -> u64 {
    let nf = n_scale as f64;
    let q_lo = (c1 * nf).ceil().max(1.0) as i64;
    let q_hi = (c2 * nf).floor() as i64;
    let mut count = 0u64;
    for q in q_lo..=q_hi {
        let qf = q as f64;
        let center = alpha * qf;
        let rho = a / qf;
        let p_lo = (center - rho).ceil() as i64;
        let p_hi = (center + rho).floor() as i64;
        for p in p_lo..=p_hi {
            if gcd_u64(p.unsigned_abs(), q as u64) == 1 {
                count += 1;
            }
        }
    }
    count
}

/// Number of primitive pairs (p, q), `1 <= q <= N`, with
/// `|alpha q - p| <= A / N`.
pub fn count_kesten_1d(alpha: f64, a: f64, n_scale: u64) -> u64 {
    let rho = a / n_scale as f64;
    let mut count = 0u64;
    for q in 1..=n_scale as i64 {
        let center = alpha * q as f64;
        let p_lo = (center - rho).ceil() as i64;
        let p_hi = (center + rho).floor() as i64;
        for p in p_lo..=p_hi {
            if gcd_u64(p.unsigned_abs(), q as u64) == 1 {
                count += 1;
            }
        }
    }
    count
}

/// Advances a multi-index lexicographically within `[lo, hi]`; false once
/// exhausted.
fn advance_odometer(p: &mut [i64], lo: &[i64], hi: &[i64]) -> bool {
    for i in (0..p.len()).rev() {
        if p[i] < hi[i] {
            p[i] += 1;
            for j in i + 1..p.len() {
                p[j] = lo[j];
            }
            return true;
        }
    }
    false
}

/// Number of primitive (p, q) in Z^m x Z^n, q nonzero with first nonzero
/// coordinate positive, `|q|` in the spec window, satisfying the solution
/// inequality of the spec's variant and exponent mode.
pub fn count_md(x: &DMatrix<f64>, spec: &CountSpec) -> Result<u64> {
    if x.nrows() != spec.m || x.ncols() != spec.n {
        return Err(Error::Dimension { expected: spec.m * spec.n, got: x.nrows() * x.ncols() });
    }
    let (w1, w2) = spec.window;
    if !(w2.is_finite() && w2 >= 0.0) {
        return Err(Error::invalid("window upper bound must be finite and nonnegative"));
    }
    let q_max = w2.floor() as i64;
    let side = 2u128 * q_max as u128 + 1;
    let q_candidates = side.checked_pow(spec.n as u32).unwrap_or(u128::MAX);
    if q_candidates > spec.budget as u128 {
        return Err(Error::Budget { candidates: q_candidates, limit: spec.budget });
    }

    let mut tested: u64 = 0;
    let mut count = 0u64;
    let mut q_f = vec![0.0f64; spec.n];
    let mut center = vec![0.0f64; spec.m];
    let q_lo_v = vec![-q_max; spec.n];
    let q_hi_v = vec![q_max; spec.n];
    let mut q = q_lo_v.clone();
    loop {
        // first nonzero coordinate must be positive; this also drops q = 0
        let sign_ok = matches!(q.iter().find(|c| **c != 0), Some(v) if *v > 0);
        if sign_ok {
            for (dst, src) in q_f.iter_mut().zip(q.iter()) {
                *dst = *src as f64;
            }
            let q_norm = spec.norm_y.norm(&q_f);
            if w1 <= q_norm && q_norm <= w2 {
                let rho = spec.threshold(q_norm);
                for i in 0..spec.m {
                    let mut acc = 0.0;
                    for j in 0..spec.n {
                        acc += x[(i, j)] * q_f[j];
                    }
                    center[i] = acc;
                }
                // numerators live in the product of intervals [center_i +- rho]
                let p_lo: Vec<i64> = center.iter().map(|c| (c - rho).ceil() as i64).collect();
                let p_hi: Vec<i64> = center.iter().map(|c| (c + rho).floor() as i64).collect();
                if p_lo.iter().zip(&p_hi).all(|(lo, hi)| lo <= hi) {
                    let mut p = p_lo.clone();
                    loop {
                        tested += 1;
                        if tested > spec.budget {
                            return Err(Error::Budget {
                                candidates: tested as u128,
                                limit: spec.budget,
                            });
                        }
                        let inside = match spec.norm_x {
                            NormKind::Supremum => true, // the box is exactly the sup ball
                            NormKind::Euclidean => {
                                let s: f64 = p
                                    .iter()
                                    .zip(&center)
                                    .map(|(pi, ci)| (*pi as f64 - ci) * (*pi as f64 - ci))
                                    .sum();
                                s.sqrt() <= rho
                            }
                        };
                        if inside {
                            let g = p
                                .iter()
                                .chain(q.iter())
                                .fold(0u64, |acc, c| gcd_u64(acc, c.unsigned_abs()));
                            if g == 1 {
                                count += 1;
                            }
                        }
                        if !advance_odometer(&mut p, &p_lo, &p_hi) {
                            break;
                        }
                    }
                }
            }
        }
        if !advance_odometer(&mut q, &q_lo_v, &q_hi_v) {
            break;
        }
    }
    Ok(count)
}

/// Counts solutions for a target on the curve: `count_md` at the column
/// vector `phi(s)` with n = 1.
pub fn count_curve(s: f64, cspec: &CurveSpec, spec: &CountSpec) -> Result<u64> {
    if spec.m != cspec.curve_dimension || spec.n != 1 {
        return Err(Error::Dimension { expected: cspec.curve_dimension, got: spec.m });
    }
    if !(cspec.interval.0 <= s && s <= cspec.interval.1) {
        return Err(Error::invalid(format!(
            "s = {s} outside curve interval [{}, {}]",
            cspec.interval.0, cspec.interval.1
        )));
    }
    count_md(&cspec.point(s), spec)
}

/// Number of primitive v in Z^2 whose rotation by `theta` lands in the
/// scaled wedge `{c1 N <= y <= c2 N, |x| y <= A}` (wedge family) or the
/// scaled box `{|x| <= A, 0 <= y <= N}` (box family).
///
/// Strip enumeration: iterate the integer coordinate with the larger
/// direction cosine against the strip's long axis and solve the admissible
/// interval for the other, so work is linear in the window length.
pub fn count_circle(
    theta: f64,
    a: f64,
    c1: f64,
    c2: f64,
    n_scale: u64,
    family: RegionFamily,
    budget: u64,
) -> Result<u64> {
    let nf = n_scale as f64;
    let (y_lo, y_hi, half_width) = match family {
        RegionFamily::HyperbolicWedge => {
            if !(0.0 < c1 && c1 < c2) {
                return Err(Error::invalid(format!("wedge needs 0 < c1 < c2, got ({c1}, {c2})")));
            }
            (c1 * nf, c2 * nf, a / (c1 * nf))
        }
        RegionFamily::Box => (0.0, nf, a),
    };
    let (sin, cos) = theta.sin_cos();
    // v = (p, q): x = p cos - q sin, y = p sin + q cos.
    // Iterate the coordinate that advances fastest along the long (y) axis.
    let iterate_first = sin.abs() >= cos.abs();
    // coefficients of (iterated k, solved t) in x and y
    let (kx, tx, ky, ty) =
        if iterate_first { (cos, -sin, sin, cos) } else { (-sin, cos, cos, sin) };

    // bounding rectangle corners pulled back to v coordinates
    let mut k_lo = f64::INFINITY;
    let mut k_hi = f64::NEG_INFINITY;
    for &xs in &[-half_width, half_width] {
        for &ys in &[y_lo, y_hi] {
            // v = r_{-theta} (x, y)
            let p = xs * cos + ys * sin;
            let q = -xs * sin + ys * cos;
            let k = if iterate_first { p } else { q };
            k_lo = k_lo.min(k);
            k_hi = k_hi.max(k);
        }
    }
    let k_lo = k_lo.floor() as i64 - 1;
    let k_hi = k_hi.ceil() as i64 + 1;
    let span = (k_hi - k_lo).max(0) as u128;
    if span > budget as u128 {
        return Err(Error::Budget { candidates: span, limit: budget });
    }

    let mut tested = 0u64;
    let mut count = 0u64;
    let eps = 1e-12;
    for k in k_lo..=k_hi {
        let kf = k as f64;
        // y constraint: y_lo <= k ky + t ty <= y_hi
        // x constraint: -W <= k kx + t tx <= W
        let mut t_lo = f64::NEG_INFINITY;
        let mut t_hi = f64::INFINITY;
        // relative padding so rounding in the division can only widen the
        // candidate interval; the exact membership test filters the extras
        let mut clamp = |coef: f64, lo: f64, hi: f64, base: f64| -> bool {
            if coef.abs() > eps {
                let (l, h) = ((lo - base) / coef, (hi - base) / coef);
                let (l, h) = if coef > 0.0 { (l, h) } else { (h, l) };
                let pad = 1e-9 * (1.0 + l.abs().max(h.abs()));
                t_lo = t_lo.max(l - pad);
                t_hi = t_hi.min(h + pad);
                true
            } else {
                let pad = 1e-9 * (1.0 + base.abs().max(hi.abs()));
                lo - pad <= base && base <= hi + pad
            }
        };
        if !clamp(ty, y_lo, y_hi, kf * ky) {
            continue;
        }
        if !clamp(tx, -half_width, half_width, kf * kx) {
            continue;
        }
        if t_lo > t_hi {
            continue;
        }
        for t in (t_lo.ceil() as i64)..=(t_hi.floor() as i64) {
            tested += 1;
            if tested > budget {
                return Err(Error::Budget { candidates: tested as u128, limit: budget });
            }
            let (p, q) = if iterate_first { (k, t) } else { (t, k) };
            if p == 0 && q == 0 {
                continue;
            }
            let (pf, qf) = (p as f64, q as f64);
            let x = pf * cos - qf * sin;
            let y = pf * sin + qf * cos;
            let inside = match family {
                RegionFamily::HyperbolicWedge => y_lo <= y && y <= y_hi && x.abs() * y <= a,
                RegionFamily::Box => x.abs() <= a && y_lo <= y && y <= y_hi,
            };
            if inside && gcd_u64(p.unsigned_abs(), q.unsigned_abs()) == 1 {
                count += 1;
            }
        }
    }
    Ok(count)
}
