mod analysis;
mod corpus;

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use serde::Serialize;

use crate::UsageError;

pub use analysis::{dissect, ner_eval, overlap, report, seg_stats};
pub use corpus::{clean, encode, mask, train_bpe};

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

/// A file, or stdin when no path is given.
fn open_input(path: Option<&Path>) -> anyhow::Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) => Box::new(open(p)?),
        None => Box::new(BufReader::new(io::stdin())),
    })
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("cannot create directory {}", parent.display()))?;
    }
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// A file, or stdout when no path is given.
fn create_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn finish(mut writer: impl Write, path: Option<&Path>) -> anyhow::Result<()> {
    writer.flush().with_context(|| match path {
        Some(p) => format!("cannot write {}", p.display()),
        None => "cannot write to stdout".to_string(),
    })
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .with_context(|| format!("cannot write {}", path.display()))?;
    finish(w, Some(path))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize to JSON");
    text.push('\n');
    text
}

/// Refuse to write an output over one of the inputs.
fn ensure_distinct(inputs: &[&Path], output: Option<&Path>) -> Result<(), UsageError> {
    let Some(out) = output else { return Ok(()) };
    let canon = |p: &Path| fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf());
    let out = canon(out);
    match inputs.iter().find(|i| canon(i) == out) {
        Some(i) => Err(UsageError(format!("output {} would overwrite an input", i.display()))),
        None => Ok(()),
    }
}

fn check_fraction(name: &str, value: f64) -> Result<(), UsageError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(UsageError(format!("{name} must be between 0 and 1, got {value}")))
    }
}

/// File name without extension, for default labels.
fn stem(path: &Path) -> String {
    path.file_stem()
        .or_else(|| path.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn dir_name(path: &Path) -> String {
    let canon: PathBuf = fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf());
    canon
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn non_empty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}
