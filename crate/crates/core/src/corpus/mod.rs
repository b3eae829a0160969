//! Corpus cleaning: sentence splitting, language identification, noise
//! filtering and two-phase deduplication over heterogeneous sources, with
//! document boundaries preserved and per-source statistics.

mod dedup;
mod filter;
mod io;
mod lang;
mod pipeline;
mod split;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use dedup::{dedup, dedup_key, dedup_with, DedupOptions, DedupScope, Deduplicator, Granularity};
pub use filter::{filter_sentence, whitespace_tokens, DropReason, FilterConfig, FilterVerdict, LanguageGate};
pub use io::{read_jsonl, read_txt, write_drop_log, write_jsonl, write_stats_csv, ReadIssue};
pub use lang::{detect_language, language_scores, supported_languages, LanguageGuess, UNDETERMINED};
pub use pipeline::{clean_corpus, clean_documents, CleanConfig, CleanOutput, Cleaner, DedupMode, DropRecord};
pub use split::{split_sentences, SentenceSplitter, SPANISH_ABBREVIATIONS};

/// A document as ingested, before any cleaning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub source: String,
    pub text: String,
    #[serde(flatten)]
    pub meta: BTreeMap<String, serde_json::Value>,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, source: impl Into<String>, text: impl Into<String>) -> Self {
        RawDocument {
            id: id.into(),
            source: source.into(),
            text: text.into(),
            meta: BTreeMap::new(),
        }
    }
}

/// One cleaned document: its surviving sentences, in original order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanDocument {
    pub id: String,
    pub source: String,
    pub sentences: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceStats {
    /// Whitespace-delimited tokens in the cleaned text.
    pub tokens: u64,
    pub documents: u64,
    pub sentences: u64,
}

impl std::ops::AddAssign for SourceStats {
    fn add_assign(&mut self, rhs: Self) {
        self.tokens += rhs.tokens;
        self.documents += rhs.documents;
        self.sentences += rhs.sentences;
    }
}

/// Per-source counts over the cleaned output.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub sources: BTreeMap<String, SourceStats>,
}

impl CorpusStats {
    pub fn record(&mut self, doc: &CleanDocument) {
        let row = self.sources.entry(doc.source.clone()).or_default();
        *row += SourceStats {
            tokens: doc.sentences.iter().map(|s| whitespace_tokens(s) as u64).sum(),
            documents: 1,
            sentences: doc.sentences.len() as u64,
        };
    }

    pub fn total(&self) -> SourceStats {
        self.sources.values().fold(SourceStats::default(), |mut acc, row| {
            acc += *row;
            acc
        })
    }
}
