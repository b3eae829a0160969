//! Optional run configuration file. Every field mirrors a command-line
//! option; a flag given on the command line wins over the file, and the
//! file wins over built-in defaults.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use biotok::analysis::Context;
use biotok::corpus::{DedupMode, Granularity};
use biotok::masking::{BudgetUnit, Strategy};
use biotok::ner::SchemeMode;
use serde::Deserialize;

use crate::UsageError;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub clean: CleanSection,
    pub train_bpe: TrainSection,
    pub encode: EncodeSection,
    pub mask: MaskSection,
    pub ner_eval: NerEvalSection,
    pub analysis: AnalysisSection,
    pub report: ReportSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleanSection {
    pub input: Option<PathBuf>,
    pub format: Option<InputFormat>,
    pub source: Option<String>,
    pub lang: Option<String>,
    pub min_lang_score: Option<f64>,
    pub min_chars: Option<usize>,
    pub min_tokens: Option<usize>,
    pub alpha_ratio: Option<f64>,
    pub dedup: Option<DedupMode>,
    pub granularity: Option<Granularity>,
    pub case_insensitive: Option<bool>,
    pub passthrough: Option<BTreeSet<String>>,
    pub abbreviations: Option<Vec<String>>,
    pub out: Option<PathBuf>,
    pub stats_out: Option<PathBuf>,
    pub drops_out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub input: Option<Vec<PathBuf>>,
    pub vocab_size: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodeSection {
    pub vocab: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaskSection {
    pub vocab: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub stats_out: Option<PathBuf>,
    pub strategy: Option<Strategy>,
    pub mask_prob: Option<f64>,
    pub replace_mask: Option<f64>,
    pub replace_random: Option<f64>,
    pub keep: Option<f64>,
    pub budget_unit: Option<BudgetUnit>,
    pub pack: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NerEvalSection {
    pub gold: Option<PathBuf>,
    pub pred: Option<Vec<PathBuf>>,
    pub mode: Option<SchemeMode>,
    pub report: Option<ReportFormat>,
    #[serde(rename = "macro")]
    pub macro_average: Option<bool>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub vocab: Option<PathBuf>,
    pub tasks: Option<Vec<PathBuf>>,
    pub gold: Option<Vec<PathBuf>>,
    pub pred: Option<PathBuf>,
    pub model: Option<String>,
    pub task_name: Option<String>,
    pub context: Option<Context>,
    pub mode: Option<SchemeMode>,
    pub unique: Option<bool>,
    pub max_bucket: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    pub input: Option<Vec<PathBuf>>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Jsonl,
    Txt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl RunConfig {
    /// Read a TOML file, or JSON when the extension is `.json`. Unknown keys
    /// and malformed values are usage errors; an unreadable file is not.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parsed = if is_json {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())).into())
    }
}

/// Resolve an option: flag, then config, then `default`.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Resolve a required option, naming the flag when neither source sets it.
pub fn require<T>(flag: Option<T>, config: Option<T>, name: &str) -> Result<T, UsageError> {
    flag.or(config)
        .ok_or_else(|| UsageError(format!("the following required argument was not provided: {name}")))
}
