//! End-to-end Huff-DP runs and the per-instance baselines.
//!
//! A Huff-DP run scans the whole stream first (frequency table, Huffman
//! tree, levels), then draws one ε and one Laplace sample per unique value
//! and replays them over the stream in its original order. Each unique value
//! reads from its own seeded stream, so the parallel and sequential paths
//! produce identical output.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::budget::{select_budget, BudgetConfig};
use crate::error::{Error, Result};
use crate::huffman::{build_tree, FrequencyTable};
use crate::leveling::{assign_levels, LevelAssignment, DEFAULT_L_MAX};
use crate::par::{self, Execution};
use crate::perturbation::{
    gaussian_noise, gaussian_sigma, laplace_sample, NoiseCache, NoiseParams, StaircaseParams,
};
use crate::rng::{instance_rng, value_rng};

pub const DEFAULT_DELTA: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub budget: BudgetConfig,
    /// ΔF, in data units.
    pub sensitivity: f64,
    /// Laplace location μ.
    pub mean: f64,
    pub l_max: u32,
    pub seed: u64,
    /// Fold Huff-DP outputs with `abs`.
    pub abs_fold: bool,
    /// Fold baseline outputs with `abs`.
    pub baseline_abs: bool,
    /// Gaussian baseline δ.
    pub delta: f64,
    /// Staircase baseline γ; `None` picks the ℓ1-optimal value.
    pub gamma: Option<f64>,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            budget: BudgetConfig::default(),
            sensitivity: 1.0,
            mean: 0.0,
            l_max: DEFAULT_L_MAX,
            seed: 0,
            abs_fold: true,
            baseline_abs: false,
            delta: DEFAULT_DELTA,
            gamma: None,
            execution: Execution::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.budget.validate()?;
        // surfaces bad sensitivity / mean
        NoiseParams::new(self.sensitivity, self.mean, 1.0)?;
        if self.l_max == 0 {
            return Err(Error::InvalidConfig("l_max must be at least 1".into()));
        }
        if self.l_max > self.budget.max_level() {
            return Err(Error::InvalidConfig(format!(
                "l_max {} exceeds the {} levels in the {} table",
                self.l_max,
                self.budget.max_level(),
                self.budget.selector
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "gamma must lie in (0, 1), got {g}"
                )));
            }
        }
        Ok(())
    }
}

/// What a Huff-DP run decided for one unique value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRecord {
    pub value: f64,
    pub count: u64,
    pub level: u32,
    pub epsilon: f64,
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationResult {
    /// Released stream, same order and length as the input.
    pub perturbed: Vec<f64>,
    /// Noise added at each position.
    pub noise: Vec<f64>,
    /// Scale parameter of the noise at each position (Laplace `b`, Gaussian
    /// `σ`, staircase `ΔF`).
    pub scales: Vec<f64>,
    /// Huff-DP only, ascending by value. Empty for baselines.
    pub per_value: Vec<ValueRecord>,
    pub noise_computation_count: usize,
}

impl PerturbationResult {
    pub fn len(&self) -> usize {
        self.perturbed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perturbed.is_empty()
    }

    pub fn record(&self, value: f64) -> Option<&ValueRecord> {
        let value = value + 0.0;
        self.per_value
            .binary_search_by(|r| r.value.total_cmp(&value))
            .ok()
            .map(|i| &self.per_value[i])
    }
}

/// Draws ε and the Laplace sample for a single unique value, in that order,
/// from the value's own stream.
pub fn value_record(value: f64, count: u64, level: u32, cfg: &RunConfig) -> Result<ValueRecord> {
    let mut rng = value_rng(cfg.seed, value);
    let epsilon = select_budget(level, &cfg.budget, &mut rng)?;
    let params = NoiseParams::new(cfg.sensitivity, cfg.mean, epsilon)?;
    let noise = laplace_sample(&params, &mut rng);
    Ok(ValueRecord {
        value,
        count,
        level,
        epsilon,
        noise,
    })
}

/// Frequency table, codebook, and levels for a stream.
pub fn analyze(stream: &[f64], l_max: u32) -> Result<(FrequencyTable, LevelAssignment)> {
    let freq = FrequencyTable::from_stream(stream)?;
    let book = build_tree(&freq)?;
    let levels = assign_levels(&book, l_max)?;
    Ok((freq, levels))
}

pub fn run_huffdp(stream: &[f64], cfg: &RunConfig) -> Result<PerturbationResult> {
    cfg.validate()?;
    let (freq, levels) = analyze(stream, cfg.l_max)?;

    let per_value = par::try_map(levels.entries(), cfg.execution, |entry| {
        let count = freq.entries()[freq.index_of(entry.value).expect("value in table")].1;
        value_record(entry.value, count, entry.level, cfg)
    })?;

    let mut cache = NoiseCache::with_capacity(per_value.len());
    for r in &per_value {
        cache.insert(r.value, r.noise);
    }

    let abs_fold = cfg.abs_fold;
    let released = par::map(stream, cfg.execution, |&v| {
        let idx = freq.index_of(v).expect("value in table");
        let r = &per_value[idx];
        let noise = cache.get(v).expect("noise cached");
        let out = v + noise;
        (
            if abs_fold { out.abs() } else { out },
            noise,
            cfg.sensitivity / r.epsilon,
        )
    });

    let mut result = PerturbationResult {
        perturbed: Vec::with_capacity(stream.len()),
        noise: Vec::with_capacity(stream.len()),
        scales: Vec::with_capacity(stream.len()),
        per_value,
        noise_computation_count: cache.computation_count(),
    };
    for (p, n, s) in released {
        result.perturbed.push(p);
        result.noise.push(n);
        result.scales.push(s);
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    Laplace,
    Gaussian,
    Staircase,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [Baseline::Laplace, Baseline::Gaussian, Baseline::Staircase];

    pub fn as_str(self) -> &'static str {
        match self {
            Baseline::Laplace => "laplace",
            Baseline::Gaussian => "gaussian",
            Baseline::Staircase => "staircase",
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "laplace" => Ok(Baseline::Laplace),
            "gaussian" => Ok(Baseline::Gaussian),
            "staircase" => Ok(Baseline::Staircase),
            other => Err(Error::InvalidParameter(format!(
                "unknown baseline {other:?}"
            ))),
        }
    }
}

enum Sampler {
    Laplace(NoiseParams),
    Gaussian(f64),
    Staircase(StaircaseParams),
}

impl Sampler {
    fn scale(&self) -> f64 {
        match self {
            Sampler::Laplace(p) => p.scale(),
            Sampler::Gaussian(sigma) => *sigma,
            Sampler::Staircase(p) => p.sensitivity,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Laplace(p) => laplace_sample(p, rng),
            Sampler::Gaussian(sigma) => gaussian_noise(*sigma, rng),
            Sampler::Staircase(p) => crate::perturbation::staircase_noise(p, rng),
        }
    }
}

/// Perturbs every instance independently with a fixed ε.
pub fn run_baseline(
    stream: &[f64],
    mechanism: Baseline,
    epsilon: f64,
    cfg: &RunConfig,
) -> Result<PerturbationResult> {
    if stream.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(pos) = stream.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(pos));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    let sampler = match mechanism {
        Baseline::Laplace => {
            Sampler::Laplace(NoiseParams::new(cfg.sensitivity, cfg.mean, epsilon)?)
        }
        Baseline::Gaussian => {
            Sampler::Gaussian(gaussian_sigma(epsilon, cfg.delta, cfg.sensitivity)?)
        }
        Baseline::Staircase => {
            Sampler::Staircase(StaircaseParams::new(epsilon, cfg.sensitivity, cfg.gamma)?)
        }
    };
    let scale = sampler.scale();
    let fold = cfg.baseline_abs;
    let released = par::map_range(stream.len(), cfg.execution, |i| {
        let noise = sampler.draw(&mut instance_rng(cfg.seed, i));
        let out = stream[i] + noise;
        (if fold { out.abs() } else { out }, noise)
    });
    let (perturbed, noise) = released.into_iter().unzip();
    Ok(PerturbationResult {
        perturbed,
        noise,
        scales: vec![scale; stream.len()],
        per_value: Vec::new(),
        noise_computation_count: stream.len(),
    })
}
