//! Dataset ingestion, utility metrics, and experiment reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::budget::{BudgetConfig, Selector};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::pipeline::{run_baseline, run_huffdp, Baseline, PerturbationResult, RunConfig};

pub const REPORT_SCHEMA: u32 = 1;
pub const DEFAULT_CAP: usize = 5_000;
pub const PLOT_PREFIX: usize = 500;
pub const SIG_DIGITS: usize = 6;

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Formats `x` with `digits` significant digits, `%g` style.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_fraction(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_owned()
    }
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format_sig(x, digits)
        .parse()
        .expect("formatted float parses")
}

pub fn quantize(v: f64, width: f64) -> f64 {
    (v / width).round() * width + 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub column: Vec<f64>,
    pub source_path: Option<PathBuf>,
    pub quantization: Option<f64>,
    /// Rows dropped because the selected field was missing or not numeric.
    pub skipped_rows: usize,
}

impl Dataset {
    /// Wraps an in-memory column, quantizing it when `quantization` is set.
    pub fn from_values(
        name: impl Into<String>,
        values: Vec<f64>,
        quantization: Option<f64>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let column = match quantization {
            Some(w) if !(w > 0.0 && w.is_finite()) => {
                return Err(Error::InvalidParameter(format!(
                    "quantization width must be positive, got {w}"
                )))
            }
            Some(w) => values.into_iter().map(|v| quantize(v, w)).collect(),
            None => values,
        };
        Ok(Dataset {
            name: name.into(),
            column,
            source_path: None,
            quantization,
            skipped_rows: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.column.len()
    }

    pub fn is_empty(&self) -> bool {
        self.column.is_empty()
    }

    pub fn distinct(&self) -> usize {
        let mut bits: Vec<u64> = self.column.iter().map(|v| (v + 0.0).to_bits()).collect();
        bits.sort_unstable();
        bits.dedup();
        bits.len()
    }

    /// Spread of the column, usable as a data-derived ΔF.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .column
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    /// Zero-based field index; a header row is optional.
    Index(usize),
}

impl FromStr for ColumnSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::BadColumn("empty column selector".into()));
        }
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_owned()),
        })
    }
}

impl std::fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnSelector::Name(n) => f.write_str(n),
            ColumnSelector::Index(i) => write!(f, "#{i}"),
        }
    }
}

/// Reads one numeric column from a CSV file, keeping at most `cap` values.
///
/// Selecting by name requires a header row. Selecting by index treats a
/// non-numeric first row as a header.
pub fn ingest_csv(
    path: &Path,
    column: &ColumnSelector,
    quantization: Option<f64>,
    cap: usize,
) -> Result<Dataset> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    if cap == 0 {
        return Err(Error::InvalidParameter("row cap must be positive".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut records = reader.records();

    let (field, mut first_data) = match column {
        ColumnSelector::Name(name) => {
            let header = records
                .next()
                .transpose()?
                .ok_or_else(|| Error::NoNumericRows(name.clone()))?;
            let idx = header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::BadColumn(format!("no column named {name:?}")))?;
            (idx, None)
        }
        ColumnSelector::Index(i) => {
            let first = records.next().transpose()?;
            match first {
                Some(rec) if rec.get(*i).and_then(|f| f.parse::<f64>().ok()).is_none() => {
                    if rec.len() <= *i {
                        return Err(Error::BadColumn(format!(
                            "index {i} out of range for {} fields",
                            rec.len()
                        )));
                    }
                    (*i, None) // header row
                }
                other => (*i, other),
            }
        }
    };

    let mut values = Vec::new();
    let mut skipped = 0usize;
    let mut take = |rec: &csv::StringRecord, values: &mut Vec<f64>| match rec
        .get(field)
        .and_then(|f| f.parse::<f64>().ok())
    {
        Some(v) if v.is_finite() => values.push(v),
        _ => skipped += 1,
    };
    if let Some(rec) = first_data.take() {
        take(&rec, &mut values);
    }
    for rec in records {
        if values.len() >= cap {
            break;
        }
        take(&rec?, &mut values);
    }
    if values.is_empty() {
        return Err(Error::NoNumericRows(column.to_string()));
    }
    if skipped > 0 {
        log::warn!(
            "{}: skipped {skipped} non-numeric rows in column {column}",
            path.display()
        );
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut ds = Dataset::from_values(name, values, quantization)?;
    ds.source_path = Some(path.to_path_buf());
    ds.skipped_rows = skipped;
    Ok(ds)
}

/// Mean absolute error, `(1/N) Σ |original - perturbed|`.
pub fn mae(original: &[f64], perturbed: &[f64]) -> Result<f64> {
    if original.len() != perturbed.len() {
        return Err(Error::LengthMismatch(original.len(), perturbed.len()));
    }
    if original.is_empty() {
        return Err(Error::EmptyInput);
    }
    let total: f64 = original
        .iter()
        .zip(perturbed)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(total / original.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MechanismSpec {
    HuffDp { selector: Selector, beta: f64 },
    Laplace { epsilon: f64 },
    Gaussian { epsilon: f64 },
    Staircase { epsilon: f64 },
}

impl MechanismSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            MechanismSpec::HuffDp { .. } => "huffdp",
            MechanismSpec::Laplace { .. } => "laplace",
            MechanismSpec::Gaussian { .. } => "gaussian",
            MechanismSpec::Staircase { .. } => "staircase",
        }
    }

    /// Short identifier used in file names, e.g. `huffdp-fuzzy-b2`.
    pub fn id(&self) -> String {
        match *self {
            MechanismSpec::HuffDp { selector, beta } => {
                format!("huffdp-{selector}-b{}", format_sig(beta, SIG_DIGITS))
            }
            MechanismSpec::Laplace { epsilon }
            | MechanismSpec::Gaussian { epsilon }
            | MechanismSpec::Staircase { epsilon } => {
                format!("{}-e{}", self.kind(), format_sig(epsilon, SIG_DIGITS))
            }
        }
    }

    fn baseline(&self) -> Option<(Baseline, f64)> {
        match *self {
            MechanismSpec::HuffDp { .. } => None,
            MechanismSpec::Laplace { epsilon } => Some((Baseline::Laplace, epsilon)),
            MechanismSpec::Gaussian { epsilon } => Some((Baseline::Gaussian, epsilon)),
            MechanismSpec::Staircase { epsilon } => Some((Baseline::Staircase, epsilon)),
        }
    }

    /// Runs this mechanism over `stream` with `cfg` (selector and β override
    /// the budget config for Huff-DP).
    pub fn run(&self, stream: &[f64], cfg: &RunConfig) -> Result<PerturbationResult> {
        match *self {
            MechanismSpec::HuffDp { selector, beta } => {
                let cfg = RunConfig {
                    budget: BudgetConfig {
                        selector,
                        beta,
                        ..cfg.budget.clone()
                    },
                    ..cfg.clone()
                };
                run_huffdp(stream, &cfg)
            }
            _ => {
                let (b, eps) = self.baseline().expect("baseline");
                run_baseline(stream, b, eps, cfg)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: u32,
    /// Distinct values at this level.
    pub values: usize,
    /// Stream instances carrying those values.
    pub instances: u64,
    pub epsilon_min: f64,
    pub epsilon_mean: f64,
    pub epsilon_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema: u32,
    pub mechanism: String,
    pub selector: Option<Selector>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
    pub mae: f64,
    pub noise_computation_count: usize,
    pub instance_count: usize,
    pub levels: Vec<LevelSummary>,
    pub runtime_ms: u64,
}

impl EvalReport {
    pub fn new(
        spec: &MechanismSpec,
        original: &[f64],
        result: &PerturbationResult,
        runtime_ms: u64,
    ) -> Result<Self> {
        let (selector, beta, epsilon) = match *spec {
            MechanismSpec::HuffDp { selector, beta } => (Some(selector), Some(beta), None),
            _ => (None, None, spec.baseline().map(|b| b.1)),
        };
        let r = |x: f64| round_sig(x, SIG_DIGITS);
        Ok(EvalReport {
            schema: REPORT_SCHEMA,
            mechanism: spec.kind().to_owned(),
            selector,
            beta: beta.map(r),
            epsilon: epsilon.map(r),
            mae: r(mae(original, &result.perturbed)?),
            noise_computation_count: result.noise_computation_count,
            instance_count: original.len(),
            levels: level_summaries(result)
                .into_iter()
                .map(|s| LevelSummary {
                    epsilon_min: r(s.epsilon_min),
                    epsilon_mean: r(s.epsilon_mean),
                    epsilon_max: r(s.epsilon_max),
                    ..s
                })
                .collect(),
            runtime_ms,
        })
    }
}

/// Per-level ε statistics over the unique values of a Huff-DP result.
pub fn level_summaries(result: &PerturbationResult) -> Vec<LevelSummary> {
    let max_level = result.per_value.iter().map(|r| r.level).max().unwrap_or(0);
    (1..=max_level)
        .filter_map(|level| {
            let eps: Vec<(f64, u64)> = result
                .per_value
                .iter()
                .filter(|r| r.level == level)
                .map(|r| (r.epsilon, r.count))
                .collect();
            if eps.is_empty() {
                return None;
            }
            Some(LevelSummary {
                level,
                values: eps.len(),
                instances: eps.iter().map(|e| e.1).sum(),
                epsilon_min: eps.iter().map(|e| e.0).fold(f64::INFINITY, f64::min),
                epsilon_mean: eps.iter().map(|e| e.0).sum::<f64>() / eps.len() as f64,
                epsilon_max: eps.iter().map(|e| e.0).fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect()
}

/// `index,original,perturbed` rows for the first `limit` instances.
pub fn perturbed_csv(original: &[f64], perturbed: &[f64], limit: usize) -> String {
    let mut out = String::from("index,original,perturbed\n");
    for (i, (o, p)) in original.iter().zip(perturbed).take(limit).enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{}",
            format_sig(*o, SIG_DIGITS),
            format_sig(*p, SIG_DIGITS)
        );
    }
    out
}

/// Output of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct Experiment {
    pub reports: Vec<EvalReport>,
    pub results: Vec<PerturbationResult>,
    /// Files written, in emission order.
    pub files: Vec<PathBuf>,
}

/// Runs each mechanism over the dataset. With `out_dir`, writes per mechanism
/// `NN_<id>.csv` (full perturbed stream) and `NN_<id>_first500.csv`, plus one
/// `report.json` holding the report array in declaration order.
pub fn run_experiment(
    dataset: &Dataset,
    mechanisms: &[MechanismSpec],
    cfg: &RunConfig,
    out_dir: Option<&Path>,
) -> Result<Experiment> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput);
    }
    let outcomes = par::try_map(mechanisms, cfg.execution, |spec| {
        let start = Instant::now();
        let result = spec.run(&dataset.column, cfg)?;
        let elapsed = start.elapsed().as_millis() as u64;
        let report = EvalReport::new(spec, &dataset.column, &result, elapsed)?;
        Ok::<_, Error>((report, result))
    })?;
    let (reports, results): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();

    let mut files = Vec::new();
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        for (i, (spec, result)) in mechanisms.iter().zip(&results).enumerate() {
            let stem = format!("{i:02}_{}", spec.id());
            let full = dir.join(format!("{stem}.csv"));
            fs::write(
                &full,
                perturbed_csv(&dataset.column, &result.perturbed, usize::MAX),
            )?;
            let prefix = dir.join(format!("{stem}_first{PLOT_PREFIX}.csv"));
            fs::write(
                &prefix,
                perturbed_csv(&dataset.column, &result.perturbed, PLOT_PREFIX),
            )?;
            files.push(full);
            files.push(prefix);
        }
        let report_path = dir.join("report.json");
        fs::write(&report_path, serde_json::to_string_pretty(&reports)? + "\n")?;
        files.push(report_path);
    }
    Ok(Experiment {
        reports,
        results,
        files,
    })
}

/// MAE of `spec` on `stream` for each seed in `seeds`, in seed order.
pub fn mae_over_seeds(
    stream: &[f64],
    spec: &MechanismSpec,
    cfg: &RunConfig,
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<f64>> {
    par::try_map(seeds, exec, |&seed| {
        let cfg = RunConfig {
            seed,
            execution: Execution::Sequential,
            ..cfg.clone()
        };
        let r = spec.run(stream, &cfg)?;
        mae(stream, &r.perturbed)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(format_sig(180.0, 6), "180");
        assert_eq!(format_sig(4.56789012, 6), "4.56789");
        assert_eq!(format_sig(-2.5, 6), "-2.5");
        assert_eq!(format_sig(1234567.0, 6), "1.23457e6");
        assert_eq!(format_sig(0.000012345678, 6), "1.23457e-5");
        assert_eq!(format_sig(0.00012345678, 6), "0.000123457");
        assert_eq!(format_sig(9.9999996, 6), "10");
        assert_eq!(round_sig(4.844805262605389, 6), 4.84481);
    }

    #[test]
    fn quantization_rounds_to_bucket() {
        let ds = Dataset::from_values("q", vec![12.0, 18.0, 11.0], Some(10.0)).unwrap();
        assert_eq!(ds.column, vec![10.0, 20.0, 10.0]);
        assert!(Dataset::from_values("q", vec![1.0], Some(0.0)).is_err());
        assert!(Dataset::from_values("q", vec![], None).is_err());
    }

    #[test]
    fn mae_cases() {
        assert_eq!(mae(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mae(&[0.0, 0.0], &[1.0, -1.0]).unwrap(), 1.0);
        assert!(matches!(
            mae(&[0.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch(1, 2))
        ));
        assert!(mae(&[], &[]).is_err());
    }

    #[test]
    fn column_selector_parsing() {
        assert_eq!(
            "d".parse::<ColumnSelector>().unwrap(),
            ColumnSelector::Name("d".into())
        );
        assert_eq!(
            "2".parse::<ColumnSelector>().unwrap(),
            ColumnSelector::Index(2)
        );
    }

    #[test]
    fn mechanism_ids() {
        let h = MechanismSpec::HuffDp {
            selector: Selector::Fuzzy,
            beta: 2.0,
        };
        assert_eq!(h.id(), "huffdp-fuzzy-b2");
        assert_eq!(MechanismSpec::Laplace { epsilon: 0.5 }.id(), "laplace-e0.5");
    }

    #[test]
    fn csv_prefix() {
        let o = [1.0, 2.0, 3.0];
        let full = perturbed_csv(&o, &o, usize::MAX);
        let head = perturbed_csv(&o, &o, 2);
        assert_eq!(full, "index,original,perturbed\n0,1,1\n1,2,2\n2,3,3\n");
        assert!(full.starts_with(&head) && full.len() > head.len());
    }
}
