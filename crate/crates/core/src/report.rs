//! Labelled analysis artifacts and their consolidation into table-shaped
//! CSV files, one per table family.
//!
//! Every analysis command writes an [`Artifact`] as JSON. [`build_tables`]
//! turns any mix of artifacts into [`Table`]s with a fixed column layout and
//! a deterministic row order, so the same inputs always give the same bytes.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{Buckets, DissectionReport, OverlapReport, SegStatsReport};
use crate::ner::{aggregate_runs, NerError, NerScores, RunAggregate};

/// An analysis result tagged with the model and task it describes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Labeled<T> {
    pub model: String,
    pub task: String,
    #[serde(flatten)]
    pub report: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroAverage {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Scores of one or more prediction runs against the same gold file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NerEvalReport {
    pub runs: Vec<NerScores>,
    pub aggregate: RunAggregate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub macro_average: Option<MacroAverage>,
}

impl NerEvalReport {
    /// Aggregate `runs`; with `with_macro`, also average the per-run macro
    /// scores.
    pub fn new(runs: Vec<NerScores>, with_macro: bool) -> Result<Self, NerError> {
        let aggregate = aggregate_runs(&runs)?;
        let macro_average = with_macro.then(|| {
            let n = runs.len() as f64;
            let (p, r, f) = runs
                .iter()
                .map(NerScores::macro_average)
                .fold((0.0, 0.0, 0.0), |a, m| (a.0 + m.0, a.1 + m.1, a.2 + m.2));
            MacroAverage {
                precision: p / n,
                recall: r / n,
                f1: f / n,
            }
        });
        Ok(NerEvalReport {
            runs,
            aggregate,
            macro_average,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Artifact {
    Overlap(OverlapReport),
    SegStats(Labeled<SegStatsReport>),
    Dissection(Labeled<DissectionReport>),
    NerEval(Labeled<NerEvalReport>),
}

impl Artifact {
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Overlap(_) => "overlap",
            Artifact::SegStats(_) => "seg-stats",
            Artifact::Dissection(_) => "dissection",
            Artifact::NerEval(_) => "ner-eval",
        }
    }

    fn label(&self) -> (&str, &str) {
        match self {
            Artifact::Overlap(r) => (&r.model, &r.task),
            Artifact::SegStats(l) => (&l.model, &l.task),
            Artifact::Dissection(l) => (&l.model, &l.task),
            Artifact::NerEval(l) => (&l.model, &l.task),
        }
    }
}

pub const ARTIFACT_KINDS: [&str; 4] = ["overlap", "seg-stats", "dissection", "ner-eval"];

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("no analysis artifacts found; expected JSON files of kind {}", ARTIFACT_KINDS.join(", "))]
    NoArtifacts,
    #[error("{path}: {message}")]
    InvalidArtifact { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Read one artifact from a JSON file.
pub fn read_artifact(path: &Path) -> Result<Artifact, ReportError> {
    let text = fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| ReportError::InvalidArtifact {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// A CSV table: file stem, header and rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, header: &[&'static str]) -> Self {
        Table {
            name,
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> io::Result<()> {
        let mut csv = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        csv.write_record(&self.header)?;
        for row in &self.rows {
            csv.write_record(row)?;
        }
        csv.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = Vec::new();
        self.write_csv(&mut out).expect("writing to memory cannot fail");
        String::from_utf8(out).expect("csv output is UTF-8")
    }
}

fn fixed(value: f64, places: usize) -> String {
    format!("{value:.places$}")
}

pub const OVERLAP_HEADER: [&str; 5] = ["model", "task", "count", "vocab_size", "percent"];
pub const NER_HEADER: [&str; 7] = ["model", "task", "runs", "precision", "recall", "f1", "f1_std"];
pub const SEG_STATS_HEADER: [&str; 5] = ["model", "task", "annotations", "mean", "median"];
pub const SEG_BUCKETS_HEADER: [&str; 7] = ["model", "task", "1", "2", "3", "4", "5+"];
pub const DISSECTION_HEADER: [&str; 10] = [
    "model",
    "task",
    "bucket",
    "tp",
    "fp",
    "fn",
    "precision",
    "recall",
    "f1",
    "support",
];
pub const PLOT_HEADER: [&str; 5] = ["bucket", "f1", "precision", "recall", "support"];
pub const PER_TYPE_HEADER: [&str; 7] = ["type", "tp", "fp", "fn", "precision", "recall", "f1"];

/// Vocabulary overlap rows; percentages rounded to whole numbers.
pub fn overlap_rows(r: &OverlapReport) -> Vec<Vec<String>> {
    vec![vec![
        r.model.clone(),
        r.task.clone(),
        r.overlap_count.to_string(),
        r.vocab_size.to_string(),
        r.rounded_percent().to_string(),
    ]]
}

/// Plot-ready rows of a dissection.
pub fn plot_table(report: &DissectionReport) -> Table {
    let mut t = Table::new("dissection_plot", &PLOT_HEADER);
    for (label, f1, p, r, support) in report.plot_rows() {
        t.rows.push(vec![
            label.to_string(),
            fixed(f1, 4),
            fixed(p, 4),
            fixed(r, 4),
            support.to_string(),
        ]);
    }
    t
}

/// Per-type rows of one scoring run, followed by a `micro` row.
pub fn per_type_table(scores: &NerScores) -> Table {
    let mut t = Table::new("ner_per_type", &PER_TYPE_HEADER);
    let rows = scores
        .per_type
        .iter()
        .map(|(k, v)| (k.as_str(), v))
        .chain(std::iter::once(("micro", &scores.micro)));
    for (name, p) in rows {
        t.rows.push(vec![
            name.to_string(),
            p.counts.tp.to_string(),
            p.counts.fp.to_string(),
            p.counts.fn_.to_string(),
            fixed(p.precision, 4),
            fixed(p.recall, 4),
            fixed(p.f1, 4),
        ]);
    }
    t
}

pub const AGGREGATE_HEADER: [&str; 8] = [
    "type",
    "runs",
    "precision",
    "precision_std",
    "recall",
    "recall_std",
    "f1",
    "f1_std",
];

/// Per-type mean and sample std over runs, followed by a `micro` row.
pub fn aggregate_table(aggregate: &RunAggregate) -> Table {
    let mut t = Table::new("ner_aggregate", &AGGREGATE_HEADER);
    let rows = aggregate
        .per_type
        .iter()
        .map(|(k, v)| (k.as_str(), v))
        .chain(std::iter::once(("micro", &aggregate.micro)));
    for (name, m) in rows {
        t.rows.push(vec![
            name.to_string(),
            aggregate.runs.to_string(),
            fixed(m.precision.mean, 4),
            fixed(m.precision.std, 4),
            fixed(m.recall.mean, 4),
            fixed(m.recall.std, 4),
            fixed(m.f1.mean, 4),
            fixed(m.f1.std, 4),
        ]);
    }
    t
}

/// Group artifacts into one table per family present. Rows are ordered by
/// (model, task) and then by their natural order within an artifact.
pub fn build_tables(artifacts: &[Artifact]) -> Result<Vec<Table>, ReportError> {
    if artifacts.is_empty() {
        return Err(ReportError::NoArtifacts);
    }
    let mut sorted: Vec<&Artifact> = artifacts.iter().collect();
    sorted.sort_by(|a, b| a.label().cmp(&b.label()));

    let mut overlap = Table::new("overlap", &OVERLAP_HEADER);
    let mut ner = Table::new("ner", &NER_HEADER);
    let mut seg_stats = Table::new("seg_stats", &SEG_STATS_HEADER);
    let mut seg_buckets = Table::new("seg_buckets", &SEG_BUCKETS_HEADER);
    let mut dissection = Table::new("dissection", &DISSECTION_HEADER);

    for artifact in sorted {
        match artifact {
            Artifact::Overlap(r) => overlap.rows.extend(overlap_rows(r)),
            Artifact::NerEval(l) => {
                let a = &l.report.aggregate;
                ner.rows.push(vec![
                    l.model.clone(),
                    l.task.clone(),
                    a.runs.to_string(),
                    fixed(a.micro.precision.mean, 4),
                    fixed(a.micro.recall.mean, 4),
                    fixed(a.micro.f1.mean, 4),
                    fixed(a.micro.f1.std, 4),
                ]);
            }
            Artifact::SegStats(l) => {
                let r = &l.report;
                seg_stats.rows.push(vec![
                    l.model.clone(),
                    l.task.clone(),
                    r.annotations.to_string(),
                    fixed(r.mean, 2),
                    fixed(r.median, 2),
                ]);
                let mut row = vec![l.model.clone(), l.task.clone()];
                row.extend(r.buckets.percentages().iter().map(|p| fixed(*p, 2)));
                seg_buckets.rows.push(row);
            }
            Artifact::Dissection(l) => {
                for b in &l.report.buckets {
                    dissection.rows.push(vec![
                        l.model.clone(),
                        l.task.clone(),
                        b.label.clone(),
                        b.scores.counts.tp.to_string(),
                        b.scores.counts.fp.to_string(),
                        b.scores.counts.fn_.to_string(),
                        fixed(b.scores.precision, 4),
                        fixed(b.scores.recall, 4),
                        fixed(b.scores.f1, 4),
                        b.support.to_string(),
                    ]);
                }
            }
        }
    }
    let present = |kind: &str| artifacts.iter().any(|a| a.kind() == kind);
    let mut tables = Vec::new();
    if present("ner-eval") {
        tables.push(ner);
    }
    if present("overlap") {
        tables.push(overlap);
    }
    if present("seg-stats") {
        tables.push(seg_stats);
        tables.push(seg_buckets);
    }
    if present("dissection") {
        tables.push(dissection);
    }
    Ok(tables)
}

/// Write `report.json` (all artifacts, ordered by kind, model and task) and
/// one CSV per table family into `out`. Returns the paths written.
pub fn write_report(artifacts: &[Artifact], out: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let tables = build_tables(artifacts)?;
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ReportError::Io { path, source }
    };
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut written = Vec::new();

    let mut ordered: Vec<&Artifact> = artifacts.iter().collect();
    ordered.sort_by(|a, b| (a.kind(), a.label()).cmp(&(b.kind(), b.label())));
    let json_path = out.join("report.json");
    let mut json = serde_json::to_string_pretty(&ordered).expect("artifacts serialize");
    json.push('\n');
    fs::write(&json_path, json).map_err(io_err(&json_path))?;
    written.push(json_path);

    for table in &tables {
        let path = out.join(format!("{}.csv", table.name));
        fs::write(&path, table.to_csv_string()).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

/// Sum of the rounded bucket percentages of one table row.
pub fn bucket_row_sum(buckets: &Buckets) -> f64 {
    buckets.percentages().iter().sum()
}
