//! Vocabulary and segmentation analyses over a trained vocabulary and a
//! tagged task corpus: how much of the vocabulary a task actually uses, how
//! finely gold annotations are split, and how entity scores vary with the
//! number of subwords an annotation is split into.

mod dissect;
mod overlap;
mod segmentation;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ner::NerError;

pub use dissect::{dissect_scores, BucketScores, DissectionReport};
pub use overlap::{overlap, sentence_text, task_token_set, OverlapReport};
pub use segmentation::{
    annotations, seg_stats, segment_annotations, segment_listing, Buckets, SegStatsReport, SegmentationRow,
};

/// How an annotation's surface form is presented to the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Context {
    /// Encoded as-is, so the first word carries no leading-space marker.
    #[default]
    WordInitial,
    /// Encoded with a leading space, as the term would appear after another word.
    MidSentence,
}

impl Context {
    /// The string actually handed to the encoder for `surface`.
    pub fn apply(self, surface: &str) -> std::borrow::Cow<'_, str> {
        match self {
            Context::WordInitial => surface.into(),
            Context::MidSentence => format!(" {surface}").into(),
        }
    }
}

impl FromStr for Context {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "word-initial" => Ok(Context::WordInitial),
            "mid-sentence" => Ok(Context::MidSentence),
            _ => Err(format!("unknown context {s:?} (expected word-initial or mid-sentence)")),
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Context::WordInitial => "word-initial",
            Context::MidSentence => "mid-sentence",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("annotation {index} is empty")]
    EmptyAnnotation { index: usize },
    #[error("no annotations to summarise")]
    NoAnnotations,
    #[error("max bucket must be at least 1")]
    InvalidMaxBucket,
    #[error(transparent)]
    Ner(#[from] NerError),
}

/// Round to `places` decimals for display.
pub fn round_to(value: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (value * scale).round() / scale
}
