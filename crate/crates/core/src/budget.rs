//! Privacy budget decision functions.
//!
//! Each selector maps a privacy level to an ε draw:
//!
//! ```text
//! static: ε = β · U[S_p, F_p)
//! sine:   ε = max(ε_min, β · sin(U(0, π)) / level)
//! fuzzy:  ε = β · (b_p · (U[S_B1, S_B2) + U[F_B1, F_B2)) + c_p · U[C_V1, C_V2)) / 100
//! ```
//!
//! Uniform draws are half-open. Callers pass their own random stream; nothing
//! here holds hidden state.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selector {
    Static,
    Sine,
    Fuzzy,
}

impl Selector {
    pub const ALL: [Selector; 3] = [Selector::Static, Selector::Sine, Selector::Fuzzy];

    pub fn as_str(self) -> &'static str {
        match self {
            Selector::Static => "static",
            Selector::Sine => "sine",
            Selector::Fuzzy => "fuzzy",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "static" => Ok(Selector::Static),
            "sine" => Ok(Selector::Sine),
            "fuzzy" => Ok(Selector::Fuzzy),
            other => Err(Error::InvalidParameter(format!(
                "unknown selector {other:?}"
            ))),
        }
    }
}

/// Closed description of a half-open draw range `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    /// Uniform draw on `[lo, hi)`; returns `lo` for a degenerate interval.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let x = self.lo + (self.hi - self.lo) * u;
        // guard against rounding up to the excluded endpoint
        if x >= self.hi && self.hi > self.lo {
            self.lo.max(f64::from_bits(self.hi.to_bits() - 1))
        } else {
            x
        }
    }

    fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// Fuzzy parameters for one level: start boundary, core, and end boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzyLevel {
    pub start: Interval,
    pub core: Interval,
    pub end: Interval,
}

impl FuzzyLevel {
    /// Boundary bands of `half_width` around both endpoints of a static range,
    /// with the core filling the space in between, clamped to `[floor, 1]`.
    pub fn around(range: Interval, half_width: f64, floor: f64) -> Self {
        let clamp = |x: f64| x.clamp(floor, 1.0);
        FuzzyLevel {
            start: Interval::new(clamp(range.lo - half_width), clamp(range.lo + half_width)),
            core: Interval::new(clamp(range.lo + half_width), clamp(range.hi - half_width)),
            end: Interval::new(clamp(range.hi - half_width), clamp(range.hi + half_width)),
        }
    }
}

pub const DEFAULT_EPSILON_MIN: f64 = 0.01;
pub const DEFAULT_BOUNDARY_WEIGHT: f64 = 20.0;
pub const DEFAULT_CORE_WEIGHT: f64 = 60.0;
pub const FUZZY_HALF_WIDTH: f64 = 0.03;

/// Five contiguous 0.2-wide ranges descending from 1.0; the last one starts at
/// `epsilon_min` so ε stays positive.
pub fn default_static_table(epsilon_min: f64) -> Vec<Interval> {
    (1..=5)
        .map(|l| {
            let l = l as f64;
            let lo = snap(1.0 - 0.2 * l);
            let hi = snap(1.2 - 0.2 * l);
            Interval::new(lo.max(epsilon_min), hi)
        })
        .collect()
}

/// Removes accumulated rounding so table edges land on their decimal values.
fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

pub fn default_fuzzy_table(static_table: &[Interval], epsilon_min: f64) -> Vec<FuzzyLevel> {
    static_table
        .iter()
        .map(|&r| {
            let mut f = FuzzyLevel::around(r, FUZZY_HALF_WIDTH, epsilon_min);
            for iv in [&mut f.start, &mut f.core, &mut f.end] {
                iv.lo = snap(iv.lo);
                iv.hi = snap(iv.hi);
            }
            f
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetConfig {
    pub selector: Selector,
    /// Multiplier applied to every draw (β₁, β₂ or β₃ depending on selector).
    pub beta: f64,
    /// `[S_p, F_p)` per level, index 0 = level 1.
    pub static_table: Vec<Interval>,
    pub fuzzy_table: Vec<FuzzyLevel>,
    /// Percentage weight of each fuzzy boundary draw.
    pub boundary_weight: f64,
    /// Percentage weight of the fuzzy core draw.
    pub core_weight: f64,
    pub epsilon_min: f64,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        let static_table = default_static_table(DEFAULT_EPSILON_MIN);
        let fuzzy_table = default_fuzzy_table(&static_table, DEFAULT_EPSILON_MIN);
        BudgetConfig {
            selector: Selector::Static,
            beta: 1.0,
            static_table,
            fuzzy_table,
            boundary_weight: DEFAULT_BOUNDARY_WEIGHT,
            core_weight: DEFAULT_CORE_WEIGHT,
            epsilon_min: DEFAULT_EPSILON_MIN,
        }
    }
}

impl BudgetConfig {
    pub fn new(selector: Selector, beta: f64) -> Self {
        BudgetConfig {
            selector,
            beta,
            ..Default::default()
        }
    }

    /// Highest level with a table entry for the configured selector.
    pub fn max_level(&self) -> u32 {
        match self.selector {
            Selector::Static => self.static_table.len() as u32,
            Selector::Fuzzy => self.fuzzy_table.len() as u32,
            Selector::Sine => u32::MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.epsilon_min > 0.0 && self.epsilon_min.is_finite()) {
            return bad(format!(
                "epsilon_min must be positive, got {}",
                self.epsilon_min
            ));
        }
        for (i, r) in self.static_table.iter().enumerate() {
            if !(r.is_finite() && 0.0 < r.lo && r.lo < r.hi) {
                return bad(format!(
                    "static level {}: need 0 < S_p < F_p, got [{}, {})",
                    i + 1,
                    r.lo,
                    r.hi
                ));
            }
        }
        for (i, f) in self.fuzzy_table.iter().enumerate() {
            let ok = [f.start, f.core, f.end].iter().all(Interval::is_finite)
                && f.start.lo > 0.0
                && f.start.lo < f.start.hi
                && f.start.hi <= f.core.lo
                && f.core.lo < f.core.hi
                && f.core.hi <= f.end.lo
                && f.end.lo < f.end.hi;
            if !ok {
                return bad(format!(
                    "fuzzy level {}: need 0 < S_B1 < S_B2 <= C_V1 < C_V2 <= F_B1 < F_B2",
                    i + 1
                ));
            }
        }
        if self.boundary_weight < 0.0 || self.core_weight < 0.0 {
            return bad("fuzzy weights must be non-negative".into());
        }
        if (2.0 * self.boundary_weight + self.core_weight - 100.0).abs() > 1e-9 {
            return bad(format!(
                "fuzzy weights must satisfy 2*b_p + c_p = 100, got b_p={} c_p={}",
                self.boundary_weight, self.core_weight
            ));
        }
        match self.selector {
            Selector::Static if self.static_table.is_empty() => bad("static table is empty".into()),
            Selector::Fuzzy if self.fuzzy_table.is_empty() => bad("fuzzy table is empty".into()),
            _ => Ok(()),
        }
    }

    /// Analytic `[min, max]` of the configured selector's ε at `level`.
    pub fn bounds(&self, level: u32) -> Result<(f64, f64)> {
        let b = self.beta;
        match self.selector {
            Selector::Static => {
                let r = table_entry(&self.static_table, level)?;
                Ok((b * r.lo, b * r.hi))
            }
            Selector::Sine => {
                check_positive_level(level)?;
                Ok((self.epsilon_min, (b / level as f64).max(self.epsilon_min)))
            }
            Selector::Fuzzy => {
                let f = table_entry(&self.fuzzy_table, level)?;
                let (bw, cw) = (self.boundary_weight, self.core_weight);
                let lo = b * (bw * (f.start.lo + f.end.lo) + cw * f.core.lo) / 100.0;
                let hi = b * (bw * (f.start.hi + f.end.hi) + cw * f.core.hi) / 100.0;
                Ok((lo, hi))
            }
        }
    }
}

fn check_positive_level(level: u32) -> Result<()> {
    if level == 0 {
        Err(Error::InvalidLevel {
            level,
            max: u32::MAX,
        })
    } else {
        Ok(())
    }
}

fn table_entry<T: Copy>(table: &[T], level: u32) -> Result<T> {
    if level == 0 || level as usize > table.len() {
        return Err(Error::InvalidLevel {
            level,
            max: table.len() as u32,
        });
    }
    Ok(table[level as usize - 1])
}

pub fn static_epsilon<R: Rng + ?Sized>(level: u32, cfg: &BudgetConfig, rng: &mut R) -> Result<f64> {
    let range = table_entry(&cfg.static_table, level)?;
    Ok(cfg.beta * range.sample(rng))
}

/// Uniform angle on the open interval `(0, π)`.
fn open_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u * PI;
        }
    }
}

pub fn sine_epsilon<R: Rng + ?Sized>(level: u32, cfg: &BudgetConfig, rng: &mut R) -> Result<f64> {
    check_positive_level(level)?;
    let angle = open_angle(rng);
    Ok((cfg.beta * angle.sin() / level as f64).max(cfg.epsilon_min))
}

pub fn fuzzy_epsilon<R: Rng + ?Sized>(level: u32, cfg: &BudgetConfig, rng: &mut R) -> Result<f64> {
    let f = table_entry(&cfg.fuzzy_table, level)?;
    let start = f.start.sample(rng);
    let end = f.end.sample(rng);
    let core = f.core.sample(rng);
    Ok(cfg.beta * (cfg.boundary_weight * (start + end) + cfg.core_weight * core) / 100.0)
}

/// Dispatches to the selector named in `cfg`.
pub fn select_budget<R: Rng + ?Sized>(level: u32, cfg: &BudgetConfig, rng: &mut R) -> Result<f64> {
    match cfg.selector {
        Selector::Static => static_epsilon(level, cfg, rng),
        Selector::Sine => sine_epsilon(level, cfg, rng),
        Selector::Fuzzy => fuzzy_epsilon(level, cfg, rng),
    }
}
