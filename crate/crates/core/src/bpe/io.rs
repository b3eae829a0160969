use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::vocab::{BpeVocab, DEFAULT_SPECIALS};
use super::BpeError;

pub const VOCAB_FILE: &str = "vocab.json";
pub const MERGES_FILE: &str = "merges.txt";
/// Optional side file with the training budget and the special-token list.
pub const META_FILE: &str = "tokenizer_meta.json";

const MERGES_HEADER: &str = "#version: 0.2";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    vocab_size: Option<usize>,
    specials: Vec<String>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BpeError + '_ {
    move |source| BpeError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write `vocab.json`, `merges.txt` and the meta file into `dir`.
pub fn save_vocab(vocab: &BpeVocab, dir: &Path) -> Result<(), BpeError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let mut json = String::from("{");
    for (id, token) in vocab.tokens().enumerate() {
        if id > 0 {
            json.push(',');
        }
        let key = serde_json::to_string(token).expect("string serializes");
        write!(json, "{key}:{id}").unwrap();
    }
    json.push('}');
    let path = dir.join(VOCAB_FILE);
    fs::write(&path, json).map_err(io_err(&path))?;

    let mut merges = String::from(MERGES_HEADER);
    merges.push('\n');
    for (l, r) in vocab.merges() {
        writeln!(merges, "{l} {r}").unwrap();
    }
    let path = dir.join(MERGES_FILE);
    fs::write(&path, merges).map_err(io_err(&path))?;

    let meta = Meta {
        vocab_size: vocab.configured_size(),
        specials: vocab.special_tokens().into_iter().map(String::from).collect(),
    };
    let path = dir.join(META_FILE);
    let text = serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n";
    fs::write(&path, text).map_err(io_err(&path))
}

/// Load a vocabulary directory. The meta file is optional; without it the
/// standard reserved names found in `vocab.json` are treated as specials.
pub fn load_vocab(dir: &Path) -> Result<BpeVocab, BpeError> {
    let vocab_path = dir.join(VOCAB_FILE);
    let text = fs::read_to_string(&vocab_path).map_err(io_err(&vocab_path))?;
    let tokens: HashMap<String, u32> = serde_json::from_str(&text).map_err(|e| BpeError::Parse {
        path: vocab_path.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;

    let merges_path = dir.join(MERGES_FILE);
    let text = fs::read_to_string(&merges_path).map_err(io_err(&merges_path))?;
    let mut merges = Vec::new();
    let mut merge_lines = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if (idx == 0 && line.starts_with("#version")) || line.is_empty() {
            continue;
        }
        let mut parts = line.split(' ');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                merges.push((l.to_string(), r.to_string()));
                merge_lines.push(line_no);
            }
            _ => {
                return Err(BpeError::Parse {
                    path: merges_path,
                    line: line_no,
                    message: format!("expected \"left right\", found {line:?}"),
                })
            }
        }
    }

    let meta_path = dir.join(META_FILE);
    let meta = if meta_path.exists() {
        let text = fs::read_to_string(&meta_path).map_err(io_err(&meta_path))?;
        Some(serde_json::from_str::<Meta>(&text).map_err(|e| BpeError::Parse {
            path: meta_path.clone(),
            line: e.line(),
            message: e.to_string(),
        })?)
    } else {
        None
    };
    let (specials, configured) = match meta {
        Some(m) => (m.specials, m.vocab_size),
        None => (
            DEFAULT_SPECIALS
                .iter()
                .filter(|s| tokens.contains_key(**s))
                .map(|s| s.to_string())
                .collect(),
            None,
        ),
    };

    BpeVocab::from_parts(tokens, merges, &specials, configured).map_err(|e| match e {
        BpeError::InvalidMerge {
            rank,
            left,
            right,
            reason,
        } => BpeError::Parse {
            path: merges_path,
            line: merge_lines[rank],
            message: format!("merge \"{left} {right}\": {reason}"),
        },
        other => other,
    })
}
