//! Strict entity-level evaluation of BIO-tagged NER output.
//!
//! Gold and predicted files are parsed into [`TaggedSentence`]s, turned into
//! typed spans, and compared by exact `(start, end, type)` match.

mod aggregate;
mod conll;
mod score;
mod spans;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate_runs, MeanStd, MetricAggregate, RunAggregate};
pub use conll::{attach_tags, parse_conll, parse_conll_str, parse_tag_lines, read_conll};
pub use score::{score, score_counts, Counts, NerScores, Prf};
pub use spans::{extract_entities, EntitySpan};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Outside,
    Begin(String),
    Inside(String),
}

impl Tag {
    pub fn entity_type(&self) -> Option<&str> {
        match self {
            Tag::Outside => None,
            Tag::Begin(t) | Tag::Inside(t) => Some(t),
        }
    }
}

impl FromStr for Tag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "O" {
            return Ok(Tag::Outside);
        }
        match s.split_once('-') {
            Some(("B", ty)) if !ty.is_empty() => Ok(Tag::Begin(ty.to_string())),
            Some(("I", ty)) if !ty.is_empty() => Ok(Tag::Inside(ty.to_string())),
            _ => Err(format!("invalid BIO tag {s:?}")),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Outside => f.write_str("O"),
            Tag::Begin(t) => write!(f, "B-{t}"),
            Tag::Inside(t) => write!(f, "I-{t}"),
        }
    }
}

impl Serialize for Tag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Tokens with parallel BIO tags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSentence {
    pub tokens: Vec<String>,
    pub tags: Vec<Tag>,
}

impl TaggedSentence {
    pub fn new(tokens: Vec<String>, tags: Vec<Tag>) -> Self {
        assert_eq!(tokens.len(), tags.len(), "tokens and tags must be parallel");
        TaggedSentence { tokens, tags }
    }

    /// Build from whitespace-free tokens and tag strings, for tests and docs.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, NerError> {
        let mut tokens = Vec::with_capacity(pairs.len());
        let mut tags = Vec::with_capacity(pairs.len());
        for (i, (tok, tag)) in pairs.iter().enumerate() {
            tokens.push(tok.to_string());
            tags.push(tag.parse().map_err(|message| NerError::Parse {
                source_name: "<pairs>".into(),
                line: i + 1,
                message,
            })?);
        }
        Ok(TaggedSentence { tokens, tags })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// How illegal `I-X` tags are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeMode {
    /// `I-X` must continue a `B-X`/`I-X`; anything else is an error.
    #[default]
    Strict,
    /// An orphan `I-X` opens a new span as if it were `B-X`.
    Repair,
}

#[derive(Debug, thiserror::Error)]
pub enum NerError {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("sentence {sentence}: tag {tag} at token {token} does not continue an entity of the same type")]
    IllegalTransition { sentence: usize, token: usize, tag: String },
    #[error("sentence {sentence}: gold has {gold} tokens, prediction has {pred}")]
    Misaligned { sentence: usize, gold: usize, pred: usize },
    #[error("gold has {gold} sentences, prediction has {pred}")]
    SentenceCount { gold: usize, pred: usize },
    #[error("no runs to aggregate")]
    NoRuns,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_syntax() {
        assert_eq!("O".parse::<Tag>().unwrap(), Tag::Outside);
        assert_eq!("B-DRUG".parse::<Tag>().unwrap(), Tag::Begin("DRUG".into()));
        assert_eq!("I-NORMALIZABLES".parse::<Tag>().unwrap().to_string(), "I-NORMALIZABLES");
        for bad in ["X-DRUG", "B-", "B", "", "o", "I_DRUG"] {
            assert!(bad.parse::<Tag>().is_err(), "{bad}");
        }
    }
}
