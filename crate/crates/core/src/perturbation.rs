//! Noise samplers and the per-value noise cache.
//!
//! Huff-DP draws Laplace noise with scale `b = ΔF / ε` once per unique value
//! and folds the perturbed reading with `abs`. The Gaussian and staircase
//! samplers exist as comparison baselines and draw per instance.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::huffman::canonical;

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    sensitivity: f64,
    mean: f64,
    epsilon: f64,
}

impl NoiseParams {
    pub fn new(sensitivity: f64, mean: f64, epsilon: f64) -> Result<Self> {
        check_positive("sensitivity", sensitivity)?;
        check_positive("epsilon", epsilon)?;
        if !mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mean must be finite, got {mean}"
            )));
        }
        Ok(NoiseParams {
            sensitivity,
            mean,
            epsilon,
        })
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Laplace scale `ΔF / ε`.
    pub fn scale(&self) -> f64 {
        self.sensitivity / self.epsilon
    }
}

/// Laplace density with location `mean` and scale `scale`.
pub fn laplace_density(x: f64, mean: f64, scale: f64) -> f64 {
    (-(x - mean).abs() / scale).exp() / (2.0 * scale)
}

/// Draws from `Laplace(μ, ΔF/ε)` by inverting the CDF.
pub fn laplace_sample<R: Rng + ?Sized>(params: &NoiseParams, rng: &mut R) -> f64 {
    let u = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break u - 0.5;
        }
    };
    params.mean - params.scale() * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// One noise sample per distinct value.
#[derive(Debug, Clone, Default)]
pub struct NoiseCache {
    samples: HashMap<u64, f64>,
    computations: usize,
}

impl NoiseCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        NoiseCache {
            samples: HashMap::with_capacity(n),
            computations: 0,
        }
    }

    pub fn get(&self, value: f64) -> Option<f64> {
        self.samples.get(&canonical(value).to_bits()).copied()
    }

    /// Returns the cached sample for `value`, computing it with `draw` on the
    /// first request only.
    pub fn get_or_insert_with<F: FnOnce() -> f64>(&mut self, value: f64, draw: F) -> f64 {
        let computations = &mut self.computations;
        *self
            .samples
            .entry(canonical(value).to_bits())
            .or_insert_with(|| {
                *computations += 1;
                draw()
            })
    }

    /// Stores a precomputed sample; a value that is already cached keeps its
    /// existing sample.
    pub fn insert(&mut self, value: f64, noise: f64) -> f64 {
        self.get_or_insert_with(value, || noise)
    }

    /// Number of fresh noise computations performed.
    pub fn computation_count(&self) -> usize {
        self.computations
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `|v + N_v|` with `N_v` taken from (or added to) the cache.
pub fn perturb_value<R: Rng + ?Sized>(
    v: f64,
    params: &NoiseParams,
    cache: &mut NoiseCache,
    rng: &mut R,
) -> f64 {
    let noise = cache.get_or_insert_with(v, || laplace_sample(params, rng));
    (v + noise).abs()
}

/// Standard deviation of the analytic Gaussian mechanism,
/// `ΔF · sqrt(2 ln(1.25/δ)) / ε`.
pub fn gaussian_sigma(epsilon: f64, delta: f64, sensitivity: f64) -> Result<f64> {
    check_positive("epsilon", epsilon)?;
    check_positive("sensitivity", sensitivity)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(sensitivity * (2.0 * (1.25 / delta).ln()).sqrt() / epsilon)
}

pub fn gaussian_noise<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    sigma * z
}

/// `v + N(0, σ²)`; no folding.
pub fn gaussian_baseline<R: Rng + ?Sized>(
    v: f64,
    epsilon: f64,
    delta: f64,
    sensitivity: f64,
    rng: &mut R,
) -> Result<f64> {
    let sigma = gaussian_sigma(epsilon, delta, sensitivity)?;
    Ok(v + gaussian_noise(sigma, rng))
}

/// The γ minimising expected `|noise|` for the staircase distribution.
pub fn optimal_staircase_gamma(epsilon: f64) -> f64 {
    1.0 / (1.0 + (epsilon / 2.0).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaircaseParams {
    pub epsilon: f64,
    pub sensitivity: f64,
    pub gamma: f64,
}

impl StaircaseParams {
    pub fn new(epsilon: f64, sensitivity: f64, gamma: Option<f64>) -> Result<Self> {
        check_positive("epsilon", epsilon)?;
        check_positive("sensitivity", sensitivity)?;
        let gamma = gamma.unwrap_or_else(|| optimal_staircase_gamma(epsilon));
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0, 1), got {gamma}"
            )));
        }
        Ok(StaircaseParams {
            epsilon,
            sensitivity,
            gamma,
        })
    }
}

/// Staircase noise as a mixture: a symmetric sign, a geometric stair index
/// `G` with ratio `e^-ε`, a Bernoulli `B` picking the tall (`[0, γ)`) or short
/// (`[γ, 1)`) part of the stair, and a uniform offset within it.
pub fn staircase_noise<R: Rng + ?Sized>(params: &StaircaseParams, rng: &mut R) -> f64 {
    let StaircaseParams {
        epsilon,
        sensitivity,
        gamma,
    } = *params;
    let ratio = (-epsilon).exp();

    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let stair = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break (u.ln() / -epsilon).floor();
        }
    };
    let p_tall = gamma / (gamma + (1.0 - gamma) * ratio);
    let tall = rng.random::<f64>() < p_tall;
    let offset: f64 = rng.random();
    let magnitude = if tall {
        stair + gamma * offset
    } else {
        stair + gamma + (1.0 - gamma) * offset
    };
    sign * magnitude * sensitivity
}

pub fn staircase_baseline<R: Rng + ?Sized>(
    v: f64,
    epsilon: f64,
    sensitivity: f64,
    gamma: Option<f64>,
    rng: &mut R,
) -> Result<f64> {
    let params = StaircaseParams::new(epsilon, sensitivity, gamma)?;
    Ok(v + staircase_noise(&params, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn scale_is_sensitivity_over_epsilon() {
        let p = NoiseParams::new(3.0, 0.0, 0.5).unwrap();
        assert_eq!(p.scale(), 6.0);
        assert!(NoiseParams::new(0.0, 0.0, 1.0).is_err());
        assert!(NoiseParams::new(1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn cache_counts_once_per_value() {
        let p = NoiseParams::new(1.0, 0.0, 1.0).unwrap();
        let mut cache = NoiseCache::new();
        let mut rng = seeded(3);
        let outs: Vec<f64> = (0..8)
            .map(|_| perturb_value(180.0, &p, &mut cache, &mut rng))
            .collect();
        assert!(outs.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(cache.computation_count(), 1);
        perturb_value(650.0, &p, &mut cache, &mut rng);
        assert_eq!(cache.computation_count(), 2);
        assert_eq!(cache.len(), 2);
    }

    #[test]
    fn forced_noise() {
        let p = NoiseParams::new(1.0, 0.0, 1.0).unwrap();
        let mut rng = seeded(0);
        let mut cache = NoiseCache::new();
        cache.insert(42.0, 0.0);
        assert_eq!(perturb_value(42.0, &p, &mut cache, &mut rng), 42.0);
        cache.insert(5.0, -12.0);
        assert_eq!(perturb_value(5.0, &p, &mut cache, &mut rng), 7.0);
        // already cached, the new sample is ignored
        assert_eq!(cache.insert(5.0, 1.0), -12.0);
        assert_eq!(cache.computation_count(), 2);
    }

    #[test]
    fn gaussian_sigma_value() {
        let s = gaussian_sigma(1.0, 1e-5, 1.0).unwrap();
        assert!((s - 4.844_805_262_605_389).abs() < 1e-9);
        assert!(gaussian_sigma(1.0, 1.25, 1.0).is_err());
        assert!(gaussian_sigma(1.0, 0.0, 1.0).is_err());
        let mut rng = seeded(0);
        assert!(gaussian_baseline(1.0, 1.0, 1.25, 1.0, &mut rng).is_err());
    }

    #[test]
    fn staircase_parameter_checks() {
        assert!(StaircaseParams::new(1.0, 1.0, Some(0.0)).is_err());
        assert!(StaircaseParams::new(1.0, 1.0, Some(1.0)).is_err());
        let p = StaircaseParams::new(1.0, 1.0, None).unwrap();
        assert!((p.gamma - 0.377_540_668_798_145_4).abs() < 1e-12);
    }

    #[test]
    fn staircase_large_epsilon_stays_in_first_stair() {
        let p = StaircaseParams::new(10.0, 2.0, None).unwrap();
        let mut rng = seeded(11);
        let n = 100_000;
        let inside = (0..n)
            .filter(|_| staircase_noise(&p, &mut rng).abs() < 2.0)
            .count();
        assert!(inside as f64 / n as f64 >= 0.99);
    }
}
