//! The `biotok` command-line tool.
//!
//! [`run`] parses arguments, loads the optional `--config` file and runs one
//! subcommand, returning the process exit code: 0 on success, 2 for usage
//! errors (bad flags, missing options, invalid values or config keys) and 1
//! for failures while reading inputs or writing outputs.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::config::{InputFormat, ReportFormat, RunConfig};

/// An invalid invocation: reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Parse a unit-like enum value from its serialized name.
fn enum_arg<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "biotok",
    version,
    about = "Corpus cleaning, byte-level BPE, masking and NER/vocabulary analysis"
)]
pub struct Cli {
    /// TOML or JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for every random choice of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split, filter and deduplicate a raw corpus.
    Clean(CleanArgs),
    /// Train a byte-level BPE vocabulary.
    TrainBpe(TrainArgs),
    /// Encode text with a trained vocabulary.
    Encode(EncodeArgs),
    /// Build masked-language-model examples from encoded sentences.
    Mask(MaskArgs),
    /// Score BIO-tagged predictions against gold annotations.
    NerEval(NerEvalArgs),
    /// Count the vocabulary entries a task's text uses.
    Overlap(OverlapArgs),
    /// Subword-count statistics of gold annotations.
    SegStats(SegStatsArgs),
    /// Entity scores grouped by annotation subword count.
    Dissect(DissectArgs),
    /// Merge analysis artifacts into table-shaped CSV files.
    Report(ReportArgs),
}

#[derive(Debug, clap::Args)]
pub struct CleanArgs {
    /// Raw corpus file.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Source name for plain-text input.
    #[arg(long)]
    pub source: Option<String>,
    /// Required language code, or `none` to disable the language filter.
    #[arg(long)]
    pub lang: Option<String>,
    #[arg(long, value_name = "P")]
    pub min_lang_score: Option<f64>,
    #[arg(long, value_name = "N")]
    pub min_chars: Option<usize>,
    #[arg(long, value_name = "N")]
    pub min_tokens: Option<usize>,
    #[arg(long, value_name = "R")]
    pub alpha_ratio: Option<f64>,
    /// off, per-source or global.
    #[arg(long, value_parser = enum_arg::<biotok::corpus::DedupMode>)]
    pub dedup: Option<biotok::corpus::DedupMode>,
    /// sentence or document.
    #[arg(long, value_parser = enum_arg::<biotok::corpus::Granularity>)]
    pub granularity: Option<biotok::corpus::Granularity>,
    /// Ignore case when comparing sentences for dedup.
    #[arg(long)]
    pub case_insensitive: bool,
    /// Source to split only, without filtering or dedup (repeatable).
    #[arg(long, value_name = "SOURCE")]
    pub passthrough: Vec<String>,
    /// Cleaned documents (JSON lines).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Per-source statistics as CSV; a JSON copy is written next to it.
    #[arg(long, value_name = "PATH")]
    pub stats_out: Option<PathBuf>,
    /// Drop log (JSON lines).
    #[arg(long, value_name = "PATH")]
    pub drops_out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct TrainArgs {
    /// Training text: cleaned JSON lines, raw JSON lines, or plain text (repeatable).
    #[arg(long, value_name = "PATH")]
    pub input: Vec<PathBuf>,
    #[arg(long, value_name = "N")]
    pub vocab_size: Option<usize>,
    /// Output directory for vocab.json, merges.txt and tokenizer_meta.json.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct EncodeArgs {
    #[arg(long, value_name = "DIR")]
    pub vocab: Option<PathBuf>,
    /// Plain text (one sentence per line) or cleaned JSON lines; stdin when omitted.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Print space-separated ids, one line per sentence.
    #[arg(long, conflicts_with = "pieces")]
    pub ids: bool,
    /// Print space-separated subword pieces, one line per sentence.
    #[arg(long)]
    pub pieces: bool,
}

#[derive(Debug, clap::Args)]
pub struct MaskArgs {
    #[arg(long, value_name = "DIR")]
    pub vocab: Option<PathBuf>,
    /// Encoded sentences as written by `encode`.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Masked examples (JSON lines).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Observed selection and replacement rates (JSON).
    #[arg(long, value_name = "PATH")]
    pub stats_out: Option<PathBuf>,
    /// swm or wwm.
    #[arg(long, value_parser = enum_arg::<biotok::masking::Strategy>)]
    pub strategy: Option<biotok::masking::Strategy>,
    #[arg(long, value_name = "P")]
    pub mask_prob: Option<f64>,
    #[arg(long, value_name = "P")]
    pub replace_mask: Option<f64>,
    #[arg(long, value_name = "P")]
    pub replace_random: Option<f64>,
    #[arg(long, value_name = "P")]
    pub keep: Option<f64>,
    /// subword or word: what the whole-word masking budget counts.
    #[arg(long, value_parser = enum_arg::<biotok::masking::BudgetUnit>)]
    pub budget_unit: Option<biotok::masking::BudgetUnit>,
    /// Pack each document's sentences into examples of at most N subwords.
    #[arg(long, value_name = "N")]
    pub pack: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct NerEvalArgs {
    #[arg(long, value_name = "PATH")]
    pub gold: Option<PathBuf>,
    /// Predictions (CoNLL, or JSON lines of tag arrays); several runs are aggregated.
    #[arg(long, value_name = "PATH")]
    pub pred: Vec<PathBuf>,
    /// strict or repair.
    #[arg(long, value_parser = enum_arg::<biotok::ner::SchemeMode>)]
    pub mode: Option<biotok::ner::SchemeMode>,
    #[arg(long, value_enum)]
    pub report: Option<ReportFormat>,
    /// Also report the macro average over entity types.
    #[arg(long = "macro")]
    pub macro_average: bool,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub task_name: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct AnalysisArgs {
    #[arg(long, value_name = "DIR")]
    pub vocab: Option<PathBuf>,
    /// Model label; defaults to the vocabulary directory name.
    #[arg(long)]
    pub model: Option<String>,
    /// Task label; defaults to the first task file's stem.
    #[arg(long)]
    pub task_name: Option<String>,
    /// strict or repair.
    #[arg(long, value_parser = enum_arg::<biotok::ner::SchemeMode>)]
    pub mode: Option<biotok::ner::SchemeMode>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct OverlapArgs {
    #[command(flatten)]
    pub common: AnalysisArgs,
    /// CoNLL files of the task; their token sets are combined (repeatable).
    #[arg(long = "task", value_name = "PATH")]
    pub tasks: Vec<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SegStatsArgs {
    #[command(flatten)]
    pub common: AnalysisArgs,
    /// Gold CoNLL files (repeatable).
    #[arg(long, value_name = "PATH")]
    pub gold: Vec<PathBuf>,
    /// Count each distinct annotation once.
    #[arg(long)]
    pub unique: bool,
    /// word-initial or mid-sentence.
    #[arg(long, value_parser = enum_arg::<biotok::analysis::Context>)]
    pub context: Option<biotok::analysis::Context>,
}

#[derive(Debug, clap::Args)]
pub struct DissectArgs {
    #[command(flatten)]
    pub common: AnalysisArgs,
    #[arg(long, value_name = "PATH")]
    pub gold: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub pred: Option<PathBuf>,
    /// Annotations with more subwords share the top bucket.
    #[arg(long, value_name = "N")]
    pub max_bucket: Option<usize>,
    /// word-initial or mid-sentence.
    #[arg(long, value_parser = enum_arg::<biotok::analysis::Context>)]
    pub context: Option<biotok::analysis::Context>,
}

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    /// Artifact files, or directories searched for them (repeatable).
    #[arg(long, value_name = "PATH")]
    pub input: Vec<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("BIOTOK_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Run the tool on `argv` (program name first) and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    match cli.command {
        Command::Clean(args) => commands::clean(args, &config.clean),
        Command::TrainBpe(args) => commands::train_bpe(args, &config.train_bpe),
        Command::Encode(args) => commands::encode(args, &config.encode),
        Command::Mask(args) => commands::mask(args, &config.mask, seed),
        Command::NerEval(args) => commands::ner_eval(args, &config.ner_eval, &config.analysis),
        Command::Overlap(args) => commands::overlap(args, &config.analysis),
        Command::SegStats(args) => commands::seg_stats(args, &config.analysis),
        Command::Dissect(args) => commands::dissect(args, &config.analysis),
        Command::Report(args) => commands::report(args, &config.report),
    }
}
