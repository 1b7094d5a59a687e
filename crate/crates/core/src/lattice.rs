//! Haar sampling of unimodular lattices in dimension 2, enumeration of
//! primitive lattice points in bounded plane targets, and the lattice-side
//! estimator of the limiting count distributions.
//!
//! The sampler draws the shape parameter tau from the hyperbolic density
//! 1/y^2 on the strip `|x| <= 1/2, y >= sqrt(3)/2` (inverse CDF in y,
//! uniform in x), rejects proposals with `x^2 + y^2 < 1`, and composes with
//! an independent uniform rotation. The acceptance probability is
//! pi / (2 sqrt 3) ~ 0.9069, which doubles as a built-in self-check.
//!
//! Exact Haar sampling is provided for d = 2 only; higher-dimensional limit
//! laws are reached through the Diophantine side at large N, with the Siegel
//! and Rogers formulas as the checks.

use nalgebra::DMatrix;
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{rotation, GroupElement, Region, DET_TOL};
use crate::process::{estimate_distribution, EquivariantProcess};
use crate::stats::EmpiricalDistribution;

/// A unimodular lattice `B Z^d` given by its basis matrix (columns are the
/// basis vectors); `|det B - 1| <= 1e-10` is enforced.
///
/// Serializes as a row-major JSON matrix (array of rows).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis {
    basis: DMatrix<f64>,
}

impl Serialize for LatticeBasis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dimension();
        let rows: Vec<Vec<f64>> =
            (0..d).map(|i| (0..d).map(|j| self.basis[(i, j)]).collect()).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LatticeBasis {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(deserializer)?;
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(D::Error::custom("lattice basis must be a nonempty square matrix"));
        }
        let mut m = DMatrix::zeros(d, d);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        LatticeBasis::new(m).map_err(D::Error::custom)
    }
}

impl LatticeBasis {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::invalid("lattice basis must be square"));
        }
        let det = basis.determinant();
        if !((det - 1.0).abs() <= DET_TOL) {
            return Err(Error::invalid(format!(
                "lattice basis determinant {det} is not 1 within {DET_TOL:e}"
            )));
        }
        Ok(LatticeBasis { basis })
    }

    pub fn standard(dim: usize) -> Self {
        LatticeBasis { basis: DMatrix::identity(dim, dim) }
    }

    pub fn dimension(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// The lattice point with integer coordinates `w`.
    pub fn point(&self, w: &[i64]) -> Result<Vec<f64>> {
        let d = self.dimension();
        if w.len() != d {
            return Err(Error::Dimension { expected: d, got: w.len() });
        }
        let mut out = vec![0.0; d];
        for (j, &wj) in w.iter().enumerate() {
            let wf = wj as f64;
            for i in 0..d {
                out[i] += self.basis[(i, j)] * wf;
            }
        }
        Ok(out)
    }

    /// Left action of a group element: the lattice `g B Z^d`.
    pub fn transformed(&self, g: &GroupElement) -> Result<LatticeBasis> {
        if g.dim() != self.dimension() {
            return Err(Error::Dimension { expected: self.dimension(), got: g.dim() });
        }
        LatticeBasis::new(g.matrix() * &self.basis)
    }

    /// Euclidean length of a shortest nonzero vector (d = 2 only), via
    /// Lagrange-Gauss reduction.
    pub fn shortest_vector_len(&self) -> Result<f64> {
        if self.dimension() != 2 {
            return Err(Error::Dimension { expected: 2, got: self.dimension() });
        }
        let mut u = [self.basis[(0, 0)], self.basis[(1, 0)]];
        let mut v = [self.basis[(0, 1)], self.basis[(1, 1)]];
        let norm2 = |w: &[f64; 2]| w[0] * w[0] + w[1] * w[1];
        for _ in 0..64 {
            if norm2(&v) < norm2(&u) {
                std::mem::swap(&mut u, &mut v);
            }
            let mu = ((u[0] * v[0] + u[1] * v[1]) / norm2(&u)).round();
            if mu == 0.0 {
                break;
            }
            v[0] -= mu * u[0];
            v[1] -= mu * u[1];
        }
        Ok(norm2(&u).min(norm2(&v)).sqrt())
    }
}

/// One Haar draw on the space of unimodular 2-D lattices: shape parameter
/// `tau` in the fundamental domain plus an independent rotation angle.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarSample2 {
    pub tau_x: f64,
    pub tau_y: f64,
    pub phi: f64,
    pub basis: LatticeBasis,
}

/// One proposal from the strip `|x| <= 1/2, y >= sqrt(3)/2` with density
/// proportional to 1/y^2; accepted iff `x^2 + y^2 >= 1`.
fn propose_tau<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64, bool) {
    let u: f64 = rng.gen();
    let tau_y = (3f64.sqrt() / 2.0) / (1.0 - u);
    let tau_x = rng.gen_range(-0.5..=0.5);
    (tau_x, tau_y, tau_x * tau_x + tau_y * tau_y >= 1.0)
}

/// Draws a lattice whose distribution is Haar on the space of unimodular
/// 2-D lattices.
pub fn sample_haar_lattice2<R: Rng + ?Sized>(rng: &mut R) -> HaarSample2 {
    let (tau_x, tau_y) = loop {
        let (x, y, ok) = propose_tau(rng);
        if ok {
            break (x, y);
        }
    };
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = tau_y.sqrt().recip();
    let shape = DMatrix::from_row_slice(2, 2, &[s, s * tau_x, 0.0, s * tau_y]);
    let basis = LatticeBasis { basis: rotation(phi).matrix() * shape };
    HaarSample2 { tau_x, tau_y, phi, basis }
}

/// Enumeration target: a region of the two supported families, or a
/// Euclidean disc centered at the origin (test instrumentation).
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Region(Region),
    Disc { radius: f64 },
}

impl Target {
    fn bounding_box(&self) -> Result<[(f64, f64); 2]> {
        match self {
            Target::Region(r) => r.bounding_box_2d(),
            Target::Disc { radius } => {
                if !radius.is_finite() {
                    return Err(Error::Unbounded);
                }
                Ok([(-radius, *radius), (-radius, *radius)])
            }
        }
    }

    fn contains(&self, v: &[f64; 2]) -> bool {
        match self {
            Target::Region(r) => r.contains(v).unwrap_or(false),
            Target::Disc { radius } => v[0] * v[0] + v[1] * v[1] <= radius * radius,
        }
    }
}

/// All integer coordinate vectors w with gcd(w) = 1 and `basis . w` inside
/// the target, in lexicographic order.
pub fn enumerate_primitive(
    lat: &LatticeBasis,
    target: &Target,
    budget: u64,
) -> Result<Vec<[i64; 2]>> {
    if lat.dimension() != 2 {
        return Err(Error::Dimension { expected: 2, got: lat.dimension() });
    }
    let [(bx_lo, bx_hi), (by_lo, by_hi)] = target.bounding_box()?;
    let b = &lat.basis;
    let (b00, b01, b10, b11) = (b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]);
    let inv = b.clone().try_inverse().ok_or(Error::invalid("singular basis"))?;

    // integer range of w0 from the pulled-back box corners, padded one step
    let mut w0_lo = f64::INFINITY;
    let mut w0_hi = f64::NEG_INFINITY;
    for &x in &[bx_lo, bx_hi] {
        for &y in &[by_lo, by_hi] {
            let w0 = inv[(0, 0)] * x + inv[(0, 1)] * y;
            w0_lo = w0_lo.min(w0);
            w0_hi = w0_hi.max(w0);
        }
    }
    if !w0_lo.is_finite() || !w0_hi.is_finite() {
        return Err(Error::Unbounded);
    }
    let w0_lo = w0_lo.floor() as i64 - 1;
    let w0_hi = w0_hi.ceil() as i64 + 1;

    let mut tested = 0u64;
    let mut out = Vec::new();
    let eps = 1e-9;
    for w0 in w0_lo..=w0_hi {
        let w0f = w0 as f64;
        // refine the w1 interval from v = w0 col0 + w1 col1 in the box
        let mut t_lo = f64::NEG_INFINITY;
        let mut t_hi = f64::INFINITY;
        let mut feasible = true;
        for (coef, base, lo, hi) in
            [(b01, w0f * b00, bx_lo, bx_hi), (b11, w0f * b10, by_lo, by_hi)]
        {
            let pad = eps * (1.0 + lo.abs().max(hi.abs()));
            if coef.abs() > 1e-12 {
                let (l, h) = ((lo - base) / coef, (hi - base) / coef);
                let (l, h) = if coef > 0.0 { (l, h) } else { (h, l) };
                t_lo = t_lo.max(l - pad);
                t_hi = t_hi.min(h + pad);
            } else if !(lo - pad <= base && base <= hi + pad) {
                feasible = false;
                break;
            }
        }
        if !feasible || t_lo > t_hi {
            continue;
        }
        for w1 in (t_lo.ceil() as i64)..=(t_hi.floor() as i64) {
            tested += 1;
            if tested > budget {
                return Err(Error::Budget { candidates: tested as u128, limit: budget });
            }
            let w1f = w1 as f64;
            let v = [w0f * b00 + w1f * b01, w0f * b10 + w1f * b11];
            if target.contains(&v) && gcd2(w0, w1) == 1 {
                out.push([w0, w1]);
            }
        }
    }
    Ok(out)
}

fn gcd2(a: i64, b: i64) -> u64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Number of primitive lattice points in the region.
pub fn lattice_count(lat: &LatticeBasis, region: &Region, budget: u64) -> Result<u64> {
    Ok(enumerate_primitive(lat, &Target::Region(region.clone()), budget)?.len() as u64)
}

/// The Haar-lattice point process: sampler draws a Haar lattice, counter is
/// `lattice_count` on the given region.
pub fn haar_lattice_process(budget: u64) -> EquivariantProcess<HaarSample2> {
    EquivariantProcess::new(
        sample_haar_lattice2,
        move |sample: &HaarSample2, region: &Region| lattice_count(&sample.basis, region, budget),
    )
}

/// Empirical PMF of the primitive-point count over independent Haar draws;
/// the lattice-side estimate of the limiting count distribution.
pub fn estimate_lattice_pmf(
    region: &Region,
    samples: u64,
    seed: u64,
    budget: u64,
) -> Result<EmpiricalDistribution> {
    estimate_distribution(&haar_lattice_process(budget), region, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::DEFAULT_BUDGET;
    use crate::geometry::{diag_flow, ExponentMode, NormKind, RegionFamily, YSign};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_samples_are_unimodular_and_in_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let s = sample_haar_lattice2(&mut rng);
            assert!((s.basis.basis().determinant() - 1.0).abs() <= DET_TOL);
            assert!(s.tau_x.abs() <= 0.5);
            assert!(s.tau_y >= 3f64.sqrt() / 2.0);
            assert!(s.tau_x * s.tau_x + s.tau_y * s.tau_y >= 1.0);
            assert!((0.0..std::f64::consts::TAU).contains(&s.phi));
        }
    }

    #[test]
    fn haar_acceptance_rate_matches_hyperbolic_measure_ratio() {
        // ratio of the fundamental domain to the proposal strip in the
        // hyperbolic measure: (pi/3) / (2/sqrt 3) = pi / (2 sqrt 3)
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws = 1_000_000u64;
        let mut accepted = 0u64;
        for _ in 0..draws {
            if propose_tau(&mut rng).2 {
                accepted += 1;
            }
        }
        let p_hat = accepted as f64 / draws as f64;
        let p = std::f64::consts::PI / (2.0 * 3f64.sqrt());
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((p_hat - p).abs() <= 3.0 * se, "rate {p_hat} vs {p} (se {se})");
    }

    #[test]
    fn siegel_mean_over_disc() {
        // E #(prim points in disc of radius 2) = (6/pi^2) * pi * 4
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 1_000_000u64;
        let target = Target::Disc { radius: 2.0 };
        let mut total = 0u64;
        let mut total_sq = 0f64;
        for _ in 0..draws {
            let s = sample_haar_lattice2(&mut rng);
            let k = enumerate_primitive(&s.basis, &target, DEFAULT_BUDGET).unwrap().len() as u64;
            total += k;
            total_sq += (k * k) as f64;
        }
        let mean = total as f64 / draws as f64;
        let var = total_sq / draws as f64 - mean * mean;
        let se = (var / draws as f64).sqrt();
        let expect = 6.0 / std::f64::consts::PI.powi(2) * std::f64::consts::PI * 4.0;
        assert!((mean - expect).abs() <= 3.0 * se, "mean {mean} vs {expect} (se {se})");
    }

    #[test]
    fn enumerate_identity_disc() {
        let lat = LatticeBasis::standard(2);
        let pts = enumerate_primitive(&lat, &Target::Disc { radius: 2.5 }, DEFAULT_BUDGET).unwrap();
        assert_eq!(pts.len(), 16);
        let mut sorted = pts.clone();
        sorted.sort();
        assert_eq!(pts, sorted, "lexicographic order");
        assert!(pts.contains(&[2, 1]) && pts.contains(&[-2, -1]) && pts.contains(&[1, -2]));
        assert!(!pts.contains(&[2, 2]) && !pts.contains(&[2, 0]));
    }

    #[test]
    fn enumerate_identity_kesten_box() {
        let lat = LatticeBasis::standard(2);
        let region = Region::kesten_box_1d(0.5).unwrap();
        let pts =
            enumerate_primitive(&lat, &Target::Region(region), DEFAULT_BUDGET).unwrap();
        assert_eq!(pts, vec![[0, 1]]);
    }

    #[test]
    fn enumerate_empty_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = sample_haar_lattice2(&mut rng);
        let region = Region::new(
            RegionFamily::Box,
            1,
            1,
            1e-9,
            (0.3, 0.7),
            NormKind::Supremum,
            NormKind::Supremum,
            ExponentMode::Consistent,
            YSign::Full,
        )
        .unwrap();
        let pts = enumerate_primitive(&s.basis, &Target::Region(region), DEFAULT_BUDGET).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn enumerate_budget_error() {
        let lat = LatticeBasis::standard(2);
        match enumerate_primitive(&lat, &Target::Disc { radius: 500.0 }, 100) {
            Err(Error::Budget { limit, .. }) => assert_eq!(limit, 100),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn enumerate_unbounded_error() {
        let lat = LatticeBasis::standard(2);
        match enumerate_primitive(&lat, &Target::Disc { radius: f64::INFINITY }, 100) {
            Err(Error::Unbounded) => {}
            other => panic!("expected unbounded error, got {other:?}"),
        }
    }

    /// Naive double loop over |w|_inf <= 50.
    fn brute_force(lat: &LatticeBasis, target: &Target) -> Vec<[i64; 2]> {
        let mut out = vec![];
        for w0 in -50..=50i64 {
            for w1 in -50..=50i64 {
                if gcd2(w0, w1) != 1 {
                    continue;
                }
                let v = lat.point(&[w0, w1]).unwrap();
                if target.contains(&[v[0], v[1]]) {
                    out.push([w0, w1]);
                }
            }
        }
        out
    }

    #[test]
    fn enumerate_matches_brute_force_on_random_regions() {
        // integer unimodular bases keep every candidate inside the +-50
        // brute-force window for targets of this size
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..1000 {
            let k = rng.gen_range(-2..=2i64);
            let lat = if i % 3 == 0 {
                LatticeBasis::standard(2)
            } else {
                LatticeBasis::new(DMatrix::from_row_slice(
                    2,
                    2,
                    &[1.0, k as f64, 0.0, 1.0],
                ))
                .unwrap()
            };
            let a = rng.gen_range(0.05..3.0);
            let target = if rng.gen_bool(0.5) {
                let c1 = rng.gen_range(0.1..1.5);
                let c2 = c1 + rng.gen_range(0.1..2.0);
                let y_sign = if rng.gen_bool(0.5) { YSign::PositiveCone } else { YSign::Full };
                let family = if rng.gen_bool(0.5) {
                    RegionFamily::HyperbolicWedge
                } else {
                    RegionFamily::Box
                };
                Target::Region(
                    Region::new(
                        family,
                        1,
                        1,
                        a,
                        (c1, c2),
                        NormKind::Supremum,
                        NormKind::Supremum,
                        ExponentMode::Consistent,
                        y_sign,
                    )
                    .unwrap(),
                )
            } else {
                Target::Disc { radius: rng.gen_range(0.2..5.0) }
            };
            let fast = enumerate_primitive(&lat, &target, DEFAULT_BUDGET).unwrap();
            let slow = brute_force(&lat, &target);
            assert_eq!(fast, slow, "case {i}: {target:?}");
        }
    }

    #[test]
    fn enumerate_matches_brute_force_on_haar_lattices() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let mut checked = 0;
        while checked < 300 {
            let lat = sample_haar_lattice2(&mut rng).basis;
            let target = if rng.gen_bool(0.5) {
                Target::Region(Region::est_wedge_1d(rng.gen_range(0.1..1.5), 1.0, 2.0).unwrap())
            } else {
                Target::Disc { radius: rng.gen_range(0.3..3.0) }
            };
            // conservative containment bound: |w|_inf <= ||B^-1||_inf |v|_inf
            let inv = lat.basis().clone().try_inverse().unwrap();
            let row_sum = (inv[(0, 0)].abs() + inv[(0, 1)].abs())
                .max(inv[(1, 0)].abs() + inv[(1, 1)].abs());
            let v_max = match &target {
                Target::Region(_) => 2.0f64.max(1.5),
                Target::Disc { radius } => *radius,
            };
            if row_sum * v_max > 49.0 {
                continue; // too skewed for the fixed brute-force window
            }
            checked += 1;
            let fast = enumerate_primitive(&lat, &target, DEFAULT_BUDGET).unwrap();
            let slow = brute_force(&lat, &target);
            assert_eq!(fast, slow, "{target:?}");
        }
    }

    #[test]
    fn rotation_invariance_per_sample_on_discs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let target = Target::Disc { radius: 1.7 };
        let rot = rotation(0.83);
        for _ in 0..1000 {
            let s = sample_haar_lattice2(&mut rng);
            let rotated = s.basis.transformed(&rot).unwrap();
            let k1 = enumerate_primitive(&s.basis, &target, DEFAULT_BUDGET).unwrap().len();
            let k2 = enumerate_primitive(&rotated, &target, DEFAULT_BUDGET).unwrap().len();
            assert_eq!(k1, k2);
        }
    }

    #[test]
    fn group_actions_preserve_unimodularity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let s = sample_haar_lattice2(&mut rng);
            let g = diag_flow(rng.gen_range(-1.0..1.0), 1, 1);
            let moved = s.basis.transformed(&g).unwrap();
            assert!((moved.basis().determinant() - 1.0).abs() <= DET_TOL);
            let rot = rotation(rng.gen_range(0.0..std::f64::consts::TAU));
            let turned = s.basis.transformed(&rot).unwrap();
            assert!((turned.basis().determinant() - 1.0).abs() <= DET_TOL);
        }
    }

    #[test]
    fn pmf_mean_matches_siegel_for_kesten_box() {
        let region = Region::kesten_box_1d(0.5).unwrap();
        let dist = estimate_lattice_pmf(&region, 100_000, 8, DEFAULT_BUDGET).unwrap();
        let expect = 6.0 / std::f64::consts::PI.powi(2) * region.volume();
        let se = dist.se_mean();
        assert!(
            (dist.mean() - expect).abs() <= 3.0 * se,
            "mean {} vs {expect} (se {se})",
            dist.mean()
        );
    }

    #[test]
    fn pmf_no_samples_error() {
        let region = Region::kesten_box_1d(0.5).unwrap();
        assert_eq!(
            estimate_lattice_pmf(&region, 0, 1, DEFAULT_BUDGET).unwrap_err(),
            Error::NoSamples
        );
    }

    #[test]
    fn wedge_below_threshold_never_two() {
        // A < c/(1+c^2): two primitive points in the wedge would span a
        // fundamental cell of area < 1.
        let region = Region::est_wedge_1d(0.35, 1.0, 2.0).unwrap();
        let dist = estimate_lattice_pmf(&region, 100_000, 9, DEFAULT_BUDGET).unwrap();
        assert_eq!(dist.counts().keys().copied().max().unwrap(), 1);
        assert!(dist.pmf(2) == 0.0);
    }

    #[test]
    fn basis_serializes_row_major() {
        let lat = LatticeBasis::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0])).unwrap();
        let json = serde_json::to_string(&lat).unwrap();
        assert_eq!(json, "[[1.0,0.5],[0.0,1.0]]");
        let back: LatticeBasis = serde_json::from_str(&json).unwrap();
        assert_eq!(back, lat);
        // determinant invariant enforced on the way in
        assert!(serde_json::from_str::<LatticeBasis>("[[2.0,0.0],[0.0,1.0]]").is_err());
        assert!(serde_json::from_str::<LatticeBasis>("[[1.0,0.0]]").is_err());
    }

    #[test]
    fn shortest_vector_of_standard_lattice() {
        assert!((LatticeBasis::standard(2).shortest_vector_len().unwrap() - 1.0).abs() < 1e-12);
        // shear by a unimodular integer matrix leaves the lattice unchanged
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 0.0, 1.0]);
        let lat = LatticeBasis::new(m).unwrap();
        assert!((lat.shortest_vector_len().unwrap() - 1.0).abs() < 1e-12);
    }
}
