//! Huffman-depth driven privacy budgets for streams of repeated readings.
//!
//! Frequent values get short Huffman codes and rare values long ones. The
//! code length, shifted so the most frequent value sits at depth 1 and capped
//! at a maximum level, decides how much privacy budget a value receives:
//! rarer values draw a smaller ε and therefore more Laplace noise. Budget and
//! noise are computed once per unique value and reused for every occurrence.
//!
//! ```
//! use huffdp::{run_huffdp, RunConfig};
//!
//! let stream = huffdp::synthetic::table1_stream();
//! let result = run_huffdp(&stream, &RunConfig::default()).unwrap();
//! assert_eq!(result.noise_computation_count, 6);
//! assert_eq!(result.record(650.0).unwrap().level, 4);
//! ```

pub mod budget;
pub mod error;
pub mod eval;
pub mod huffman;
pub mod leveling;
pub mod par;
pub mod perturbation;
pub mod pipeline;
pub mod rng;
pub mod synthetic;

pub use budget::{select_budget, BudgetConfig, FuzzyLevel, Interval, Selector};
pub use error::{Error, Result};
pub use eval::{ingest_csv, mae, run_experiment, Dataset, EvalReport, MechanismSpec};
pub use huffman::{build_tree, weighted_code_length, FrequencyTable, HuffmanCodebook};
pub use leveling::{assign_levels, required_privacy_label, LevelAssignment, PrivacyLabel};
pub use par::Execution;
pub use perturbation::{laplace_sample, perturb_value, NoiseCache, NoiseParams};
pub use pipeline::{run_baseline, run_huffdp, Baseline, PerturbationResult, RunConfig};
