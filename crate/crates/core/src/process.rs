//! Equivariant measure processes and the generic distribution estimator:
//! a process is a sampler of configurations plus a counting-measure
//! evaluation on regions, and the estimator is the empirical law of the
//! count over independent samples.
//!
//! Determinism contract: sample i draws from a ChaCha8 stream keyed by
//! (master seed, i), and per-sample results are reduced in sample-index
//! order, so output is identical for any worker count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{adaptive_simpson, Region};
use crate::stats::EmpiricalDistribution;

/// RNG for sample `index` under `seed`: one ChaCha8 stream per sample.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

type Sampler<C> = Box<dyn Fn(&mut ChaCha8Rng) -> C + Send + Sync>;
type Counter<C> = Box<dyn Fn(&C, &Region) -> Result<u64> + Send + Sync>;

/// A sampler of configurations together with a counting evaluation
/// `nu(configuration)(region)`. The counter must be a pure function of its
/// two arguments; configurations are opaque to the estimator.
pub struct EquivariantProcess<C> {
    sampler: Sampler<C>,
    counter: Counter<C>,
}

impl<C> EquivariantProcess<C> {
    pub fn new(
        sampler: impl Fn(&mut ChaCha8Rng) -> C + Send + Sync + 'static,
        counter: impl Fn(&C, &Region) -> Result<u64> + Send + Sync + 'static,
    ) -> Self {
        EquivariantProcess { sampler: Box::new(sampler), counter: Box::new(counter) }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> C {
        (self.sampler)(rng)
    }

    pub fn count(&self, config: &C, region: &Region) -> Result<u64> {
        (self.counter)(config, region)
    }
}

/// Empirical distribution of the count over `samples` independent draws.
pub fn estimate_distribution<C: Send>(
    process: &EquivariantProcess<C>,
    region: &Region,
    samples: u64,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let counts: Result<Vec<u64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let config = process.sample(&mut rng);
            process.count(&config, region)
        })
        .collect();
    let mut dist = EmpiricalDistribution::new();
    for k in counts? {
        dist.record(k);
    }
    Ok(dist)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Uniform,
    Density,
    Window,
    Circle,
    Curve,
}

/// Built-in density catalogue for absolutely continuous target sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum DensityKind {
    Uniform,
    /// 2s on [0, 1].
    Linear2s,
    TruncatedGaussian {
        mu: f64,
        sigma: f64,
    },
}

impl DensityKind {
    /// Normalized pdf on the support; the gaussian is renormalized to the
    /// truncated mass.
    fn compiled(&self, support: (f64, f64)) -> CompiledDensity {
        let (a, b) = support;
        match self {
            DensityKind::Uniform => {
                let h = 1.0 / (b - a);
                CompiledDensity { pdf: Box::new(move |_| h), bound: h }
            }
            DensityKind::Linear2s => {
                let bound = 2.0 * a.abs().max(b.abs());
                CompiledDensity { pdf: Box::new(|s| 2.0 * s), bound }
            }
            DensityKind::TruncatedGaussian { mu, sigma } => {
                let (mu, sigma) = (*mu, *sigma);
                let raw = move |s: f64| (-0.5 * ((s - mu) / sigma).powi(2)).exp();
                let mass = adaptive_simpson(&raw, a, b, 1e-12);
                let pdf = move |s: f64| raw(s) / mass;
                let bound = pdf(mu.clamp(a, b));
                CompiledDensity { pdf: Box::new(pdf), bound }
            }
        }
    }
}

struct CompiledDensity {
    pdf: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    bound: f64,
}

/// Target-sampler specification. `support` is the base interval; `x0` and
/// `beta` parameterize shrinking windows of width `N^-beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub support: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub density: Option<DensityKind>,
}

impl SamplerSpec {
    pub fn uniform(support: (f64, f64)) -> Result<Self> {
        SamplerSpec { kind: SamplerKind::Uniform, support, x0: None, beta: None, density: None }
            .validated()
    }

    pub fn density(support: (f64, f64), density: DensityKind) -> Result<Self> {
        SamplerSpec {
            kind: SamplerKind::Density,
            support,
            x0: None,
            beta: None,
            density: Some(density),
        }
        .validated()
    }

    pub fn window(x0: f64, beta: f64) -> Result<Self> {
        SamplerSpec {
            kind: SamplerKind::Window,
            support: (0.0, 1.0),
            x0: Some(x0),
            beta: Some(beta),
            density: None,
        }
        .validated()
    }

    pub fn circle() -> Self {
        SamplerSpec {
            kind: SamplerKind::Circle,
            support: (0.0, std::f64::consts::TAU),
            x0: None,
            beta: None,
            density: None,
        }
    }

    pub fn curve(interval: (f64, f64)) -> Result<Self> {
        SamplerSpec { kind: SamplerKind::Curve, support: interval, x0: None, beta: None, density: None }
            .validated()
    }

    pub fn validated(self) -> Result<Self> {
        let (a, b) = self.support;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(format!("support must be a finite interval, got ({a}, {b})")));
        }
        match self.kind {
            SamplerKind::Density => {
                let Some(density) = self.density else {
                    return Err(Error::invalid("density sampler needs a density"));
                };
                if let DensityKind::TruncatedGaussian { sigma, .. } = density {
                    if !(sigma > 0.0) {
                        return Err(Error::invalid("gaussian sigma must be positive"));
                    }
                }
                // the normalization check is what pins bad (density, support)
                // combinations, e.g. 2s outside [0, 1]
                let compiled = density.compiled(self.support);
                let mass = adaptive_simpson(&|s| (compiled.pdf)(s), a, b, 1e-10);
                if (mass - 1.0).abs() > 1e-6 {
                    return Err(Error::invalid(format!(
                        "density integrates to {mass} over ({a}, {b}), not 1"
                    )));
                }
            }
            SamplerKind::Window => {
                let Some(beta) = self.beta else {
                    return Err(Error::invalid("window sampler needs beta"));
                };
                if beta >= 0.5 {
                    return Err(Error::WindowTooNarrow { beta });
                }
                if !(0.0..0.5).contains(&beta) {
                    return Err(Error::invalid(format!("beta must be in [0, 1/2), got {beta}")));
                }
                if self.x0.is_none() {
                    return Err(Error::invalid("window sampler needs x0"));
                }
            }
            _ => {}
        }
        Ok(self)
    }
}

/// Builds the scalar target sampler described by the spec at scale N.
pub fn make_sampler(
    spec: &SamplerSpec,
    n_scale: u64,
) -> Result<Box<dyn Fn(&mut ChaCha8Rng) -> f64 + Send + Sync>> {
    let spec = spec.clone().validated()?;
    let (a, b) = spec.support;
    match spec.kind {
        SamplerKind::Uniform | SamplerKind::Curve => {
            Ok(Box::new(move |rng| rng.gen_range(a..b)))
        }
        SamplerKind::Circle => Ok(Box::new(move |rng| rng.gen_range(0.0..std::f64::consts::TAU))),
        SamplerKind::Window => {
            let x0 = spec.x0.unwrap();
            let beta = spec.beta.unwrap();
            let half = 0.5 * (n_scale as f64).powf(-beta);
            let lo = (x0 - half).max(a);
            let hi = (x0 + half).min(b);
            if !(lo < hi) {
                return Err(Error::invalid(format!(
                    "window around {x0} does not meet the support ({a}, {b})"
                )));
            }
            Ok(Box::new(move |rng| rng.gen_range(lo..hi)))
        }
        SamplerKind::Density => {
            let compiled = spec.density.unwrap().compiled(spec.support);
            Ok(Box::new(move |rng| loop {
                let s = rng.gen_range(a..b);
                let u: f64 = rng.gen_range(0.0..compiled.bound);
                if u <= (compiled.pdf)(s) {
                    return s;
                }
            }))
        }
    }
}
