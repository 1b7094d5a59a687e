//! Empirical count distributions, moments with standard errors, the closed
//! forms and bounds attached to the limit laws (Siegel expectation, the
//! Rogers-Schmidt variance bound and its Chebyshev consequence, the
//! positivity closed form), and distribution comparison metrics.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Region;

/// Integer-valued histogram over counts k.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl EmpiricalDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: BTreeMap<u64, u64>) -> Self {
        let total = counts.values().sum();
        EmpiricalDistribution { counts, total }
    }

    pub fn record(&mut self, k: u64) {
        *self.counts.entry(k).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn pmf(&self, k: u64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        *self.counts.get(&k).unwrap_or(&0) as f64 / self.total as f64
    }

    /// P(K <= k).
    pub fn cdf(&self, k: u64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let below: u64 = self.counts.range(..=k).map(|(_, c)| c).sum();
        below as f64 / self.total as f64
    }

    /// Binomial standard error of the pmf at k.
    pub fn pmf_se(&self, k: u64) -> f64 {
        let p = self.pmf(k);
        (p * (1.0 - p) / self.total as f64).sqrt()
    }

    /// P(K > 0).
    pub fn p_positive(&self) -> f64 {
        1.0 - self.pmf(0)
    }

    pub fn mean(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let s: f64 = self.counts.iter().map(|(k, c)| *k as f64 * *c as f64).sum();
        s / self.total as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.total < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let ss: f64 =
            self.counts.iter().map(|(k, c)| (*k as f64 - mean).powi(2) * *c as f64).sum();
        ss / (self.total - 1) as f64
    }

    pub fn se_mean(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        (self.variance() / self.total as f64).sqrt()
    }

    pub fn max_k(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }
}

/// Sample moments together with the dimension-d variance bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub samples: u64,
    /// `C_d * mean` with `C_d = 8 zeta(d-1)/zeta(d)`; present for d >= 3.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variance_bound: Option<f64>,
    /// Sample variance within the bound, with 3 bootstrap SE of slack.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound_satisfied: Option<bool>,
}

/// Empirical tail frequency against the Chebyshev-type bound `C_d / T^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    /// Frequency of `|k - mean| > T sqrt(mean)`.
    pub tail_frequency: f64,
    pub tail_se: f64,
    pub bound: f64,
    /// Tail within the bound allowing 3 SE of estimation slack.
    pub satisfied: bool,
}

/// Distribution distance report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub tv: f64,
    pub ks: f64,
}

/// The closed form `(12/pi^2) A ln c` for P(EST(A, c) > 0), valid for
/// `A <= c/(1 + c^2)` where the limit law carries at most one solution.
pub fn est_closed_form(a: f64, c: f64) -> Result<f64> {
    if !(a > 0.0) || !(c > 1.0) {
        return Err(Error::invalid(format!("need A > 0 and c > 1, got A = {a}, c = {c}")));
    }
    let limit = c / (1.0 + c * c);
    if a > limit {
        return Err(Error::OutsideValidityRange { a, limit });
    }
    Ok(12.0 / std::f64::consts::PI.powi(2) * a * c.ln())
}

/// Riemann zeta at integer s >= 2, absolute error <= 1e-12. The even cases
/// 2 and 4 use the closed forms.
pub fn zeta(s: i64) -> Result<f64> {
    if s < 2 {
        return Err(Error::Divergent { s });
    }
    let pi = std::f64::consts::PI;
    Ok(match s {
        2 => pi * pi / 6.0,
        4 => pi.powi(4) / 90.0,
        _ => {
            // Euler-Maclaurin: sum to K, then integral tail with the first
            // two correction terms; error O(s^3 K^{-s-3}).
            let k = 1000u64;
            let sf = s as f64;
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (j as f64).powi(-(s as i32));
            }
            let kf = k as f64;
            acc + kf.powf(1.0 - sf) / (sf - 1.0) - 0.5 * kf.powf(-sf)
                + sf / 12.0 * kf.powf(-sf - 1.0)
        }
    })
}

/// Expected number of primitive lattice points in the region under the Haar
/// law: `volume(region) / zeta(d)` with `d = m + n`.
pub fn siegel_expectation(region: &Region) -> f64 {
    let d = region.dim() as i64;
    region.volume() / zeta(d).expect("region dimension is at least 2")
}

/// `C_d = 8 zeta(d-1) / zeta(d)`, the variance-bound constant for d >= 3.
pub fn variance_bound_constant(d: usize) -> Result<f64> {
    if d < 3 {
        return Err(Error::invalid(format!("variance bound needs d >= 3, got {d}")));
    }
    Ok(8.0 * zeta(d as i64 - 1)? / zeta(d as i64)?)
}

/// Standard error of the sample variance by nonparametric bootstrap with a
/// fixed internal seed (deterministic for a given distribution).
fn bootstrap_variance_se(e: &EmpiricalDistribution, resamples: u64) -> f64 {
    let total = e.total();
    if total < 2 {
        return 0.0;
    }
    // cumulative counts for inverse-CDF resampling
    let cum: Vec<(u64, u64)> = {
        let mut acc = 0u64;
        e.counts()
            .iter()
            .map(|(k, c)| {
                acc += c;
                (*k, acc)
            })
            .collect()
    };
    let draw = |rng: &mut ChaCha8Rng| -> u64 {
        let u = rng.gen_range(0..total);
        let idx = cum.partition_point(|(_, c)| *c <= u);
        cum[idx].0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_b007);
    let mut variances = Vec::with_capacity(resamples as usize);
    for _ in 0..resamples {
        let mut sum = 0.0f64;
        let mut sum_sq = 0.0f64;
        for _ in 0..total {
            let k = draw(&mut rng) as f64;
            sum += k;
            sum_sq += k * k;
        }
        let mean = sum / total as f64;
        variances.push((sum_sq - total as f64 * mean * mean) / (total - 1) as f64);
    }
    let m = variances.iter().sum::<f64>() / resamples as f64;
    let v = variances.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    v.sqrt()
}

/// Sample moments with the Rogers-Schmidt bound check (d >= 3; for d = 2
/// the bound fields are omitted).
pub fn moment_report(e: &EmpiricalDistribution, d: usize) -> Result<MomentReport> {
    if e.total() < 2 {
        return Err(Error::InsufficientSamples { got: e.total() });
    }
    let mean = e.mean();
    let variance = e.variance();
    let (variance_bound, bound_satisfied) = if d >= 3 {
        let bound = variance_bound_constant(d)? * mean;
        let slack = 3.0 * bootstrap_variance_se(e, 200);
        (Some(bound), Some(variance <= bound + slack))
    } else {
        (None, None)
    };
    Ok(MomentReport {
        mean,
        variance,
        se_mean: e.se_mean(),
        samples: e.total(),
        variance_bound,
        bound_satisfied,
    })
}

/// Empirical tail frequency of `|k - mean| > T sqrt(mean)` against the
/// bound `C_d / T^2`, flagged when violated beyond 3 SE.
pub fn concentration_check(e: &EmpiricalDistribution, d: usize, t: f64) -> Result<ConcentrationReport> {
    if e.total() < 2 {
        return Err(Error::InsufficientSamples { got: e.total() });
    }
    if !(t > 0.0) {
        return Err(Error::invalid(format!("T must be positive, got {t}")));
    }
    let cd = variance_bound_constant(d)?;
    let mean = e.mean();
    let radius = t * mean.sqrt();
    let tail: u64 = e
        .counts()
        .iter()
        .filter(|(k, _)| (**k as f64 - mean).abs() > radius)
        .map(|(_, c)| c)
        .sum();
    let tail_frequency = tail as f64 / e.total() as f64;
    let tail_se = (tail_frequency * (1.0 - tail_frequency) / e.total() as f64).sqrt();
    let bound = cd / (t * t);
    Ok(ConcentrationReport {
        tail_frequency,
        tail_se,
        bound,
        satisfied: tail_frequency <= bound + 3.0 * tail_se,
    })
}

/// Total-variation and Kolmogorov-Smirnov distances between two empirical
/// PMFs on the nonnegative integers.
pub fn compare(e1: &EmpiricalDistribution, e2: &EmpiricalDistribution) -> Result<Comparison> {
    if e1.is_empty() || e2.is_empty() {
        return Err(Error::NoSamples);
    }
    let k_max = e1.max_k().unwrap_or(0).max(e2.max_k().unwrap_or(0));
    let mut tv = 0.0;
    let mut ks: f64 = 0.0;
    let mut cdf1 = 0.0;
    let mut cdf2 = 0.0;
    for k in 0..=k_max {
        let (p1, p2) = (e1.pmf(k), e2.pmf(k));
        tv += (p1 - p2).abs();
        cdf1 += p1;
        cdf2 += p2;
        ks = ks.max((cdf1 - cdf2).abs());
    }
    Ok(Comparison { tv: 0.5 * tv, ks })
}
