use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use huffdp::eval::{format_sig, ingest_csv, run_experiment, ColumnSelector, Dataset, DEFAULT_CAP};
use huffdp::{Execution, MechanismSpec, RunConfig, Selector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MechanismArg {
    Huffdp,
    Laplace,
    Gaussian,
    Staircase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SelectorArg {
    Static,
    Sine,
    Fuzzy,
}

impl From<SelectorArg> for Selector {
    fn from(s: SelectorArg) -> Self {
        match s {
            SelectorArg::Static => Selector::Static,
            SelectorArg::Sine => Selector::Sine,
            SelectorArg::Fuzzy => Selector::Fuzzy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SyntheticArg {
    /// The 20-reading smart-meter example
    Table1,
    /// Heavy mode value with a geometric tail
    Heavy,
}

/// Perturb a numeric stream with Huff-DP and baseline mechanisms and report
/// MAE and noise-computation counts.
#[derive(Debug, Parser)]
#[command(name = "huffdp", version)]
struct Args {
    /// CSV file to read
    #[arg(
        long,
        required_unless_present = "synthetic",
        conflicts_with = "synthetic"
    )]
    input: Option<PathBuf>,

    /// Column name (requires a header) or zero-based index
    #[arg(long, default_value = "0")]
    column: String,

    /// Use a built-in synthetic stream instead of --input
    #[arg(long, value_enum)]
    synthetic: Option<SyntheticArg>,

    /// Length of the heavy synthetic stream
    #[arg(long, default_value_t = 5000)]
    instances: usize,

    /// Mechanisms to run, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_value = "huffdp")]
    mechanism: Vec<MechanismArg>,

    /// Budget selectors for huffdp, comma separated (default: static, or the config value)
    #[arg(long, value_enum, value_delimiter = ',')]
    selector: Vec<SelectorArg>,

    /// β values for huffdp, comma separated
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,

    /// Fixed ε values for the baselines, comma separated
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    epsilon: Vec<f64>,

    /// Sensitivity ΔF
    #[arg(long)]
    sensitivity: Option<f64>,

    /// Set ΔF to the (max - min) of the ingested column
    #[arg(long, conflicts_with = "sensitivity")]
    sensitivity_from_range: bool,

    /// Quantization bucket width applied before perturbation
    #[arg(long)]
    quantize: Option<f64>,

    /// Base RNG seed
    #[arg(long)]
    seed: Option<u64>,

    /// Maximum number of rows kept from the input
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,

    /// Directory for perturbed CSVs and report.json
    #[arg(long)]
    out: Option<PathBuf>,

    /// Do not fold Huff-DP outputs with abs
    #[arg(long)]
    no_abs: bool,

    /// Fold baseline outputs with abs
    #[arg(long)]
    baseline_abs: bool,

    /// Gaussian baseline δ
    #[arg(long)]
    delta: Option<f64>,

    /// Staircase baseline γ (default: ℓ1-optimal)
    #[arg(long)]
    gamma: Option<f64>,

    /// Maximum privacy level
    #[arg(long)]
    l_max: Option<u32>,

    /// TOML run configuration; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,

    /// Disable data-parallel execution
    #[arg(long)]
    sequential: bool,
}

fn load_config(args: &Args) -> huffdp::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str::<RunConfig>(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = args.sensitivity {
        cfg.sensitivity = s;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(d) = args.delta {
        cfg.delta = d;
    }
    if args.gamma.is_some() {
        cfg.gamma = args.gamma;
    }
    if let Some(l) = args.l_max {
        cfg.l_max = l;
    }
    if args.no_abs {
        cfg.abs_fold = false;
    }
    if args.baseline_abs {
        cfg.baseline_abs = true;
    }
    if args.sequential {
        cfg.execution = Execution::Sequential;
    }
    Ok(cfg)
}

fn mechanisms(args: &Args, cfg: &RunConfig) -> Vec<MechanismSpec> {
    let betas = if args.beta.is_empty() {
        vec![cfg.budget.beta]
    } else {
        args.beta.clone()
    };
    let selectors: Vec<Selector> = if args.selector.is_empty() {
        vec![cfg.budget.selector]
    } else {
        args.selector.iter().map(|&s| s.into()).collect()
    };
    let mut out = Vec::new();
    for &m in &args.mechanism {
        match m {
            MechanismArg::Huffdp => {
                for &selector in &selectors {
                    for &beta in &betas {
                        out.push(MechanismSpec::HuffDp { selector, beta });
                    }
                }
            }
            _ => {
                for &epsilon in &args.epsilon {
                    out.push(match m {
                        MechanismArg::Laplace => MechanismSpec::Laplace { epsilon },
                        MechanismArg::Gaussian => MechanismSpec::Gaussian { epsilon },
                        MechanismArg::Staircase => MechanismSpec::Staircase { epsilon },
                        MechanismArg::Huffdp => unreachable!(),
                    });
                }
            }
        }
    }
    out
}

fn run(args: Args) -> huffdp::Result<()> {
    let mut cfg = load_config(&args)?;
    let dataset = match (&args.input, args.synthetic) {
        (Some(path), _) => {
            let column: ColumnSelector = args.column.parse()?;
            ingest_csv(path, &column, args.quantize, args.cap)?
        }
        (None, Some(SyntheticArg::Table1)) => {
            Dataset::from_values("table1", huffdp::synthetic::table1_stream(), args.quantize)?
        }
        (None, Some(SyntheticArg::Heavy)) => Dataset::from_values(
            "heavy",
            huffdp::synthetic::heavy_mode_stream(args.instances.min(args.cap), cfg.seed),
            args.quantize,
        )?,
        (None, None) => unreachable!("clap requires --input or --synthetic"),
    };
    if args.sensitivity_from_range {
        let range = dataset.range();
        cfg.sensitivity = if range > 0.0 { range } else { 1.0 };
    }
    let specs = mechanisms(&args, &cfg);
    let exp = run_experiment(&dataset, &specs, &cfg, args.out.as_deref())?;

    println!(
        "dataset {} ({} instances, {} distinct, ΔF {})",
        dataset.name,
        dataset.len(),
        dataset.distinct(),
        format_sig(cfg.sensitivity, 6)
    );
    println!(
        "{:<24} {:>12} {:>12} {:>10}",
        "mechanism", "mae", "noise_count", "ms"
    );
    for (spec, report) in specs.iter().zip(&exp.reports) {
        println!(
            "{:<24} {:>12} {:>12} {:>10}",
            spec.id(),
            format_sig(report.mae, 6),
            report.noise_computation_count,
            report.runtime_ms
        );
    }
    for f in &exp.files {
        log::info!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
