use std::collections::{BTreeSet, HashSet};

use log::warn;
use serde::{Deserialize, Serialize};

use super::dedup::{DedupOptions, DedupScope, Deduplicator};
use super::filter::{filter_sentence, DropReason, FilterConfig};
use super::io::ReadIssue;
use super::split::SentenceSplitter;
use super::{CleanDocument, CorpusStats, RawDocument};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DedupMode {
    Off,
    /// Within each source only.
    PerSource,
    /// Within each source, then across the concatenated corpus.
    #[default]
    Global,
}

impl DedupMode {
    fn scopes(self) -> &'static [DedupScope] {
        match self {
            DedupMode::Off => &[],
            DedupMode::PerSource => &[DedupScope::WithinSource],
            DedupMode::Global => &[DedupScope::WithinSource, DedupScope::Global],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleanConfig {
    pub filter: FilterConfig,
    pub dedup: DedupMode,
    pub dedup_options: DedupOptions,
    /// Sources that are only sentence-split: no filtering, no dedup.
    pub passthrough_sources: BTreeSet<String>,
    /// Replaces the built-in abbreviation list when set.
    pub abbreviations: Option<Vec<String>>,
}

impl Default for CleanConfig {
    fn default() -> Self {
        CleanConfig {
            filter: FilterConfig::default(),
            dedup: DedupMode::Global,
            dedup_options: DedupOptions::default(),
            passthrough_sources: BTreeSet::new(),
            abbreviations: None,
        }
    }
}

/// One line of the drop log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropRecord {
    pub id: String,
    /// `None` when the whole document was rejected.
    pub sentence_index: Option<usize>,
    pub reason: DropReason,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CleanOutput {
    pub clean: Vec<CleanDocument>,
    pub stats: CorpusStats,
    pub drops: Vec<DropRecord>,
}

/// Streaming cleaner. Documents must be pushed in the declared input
/// order; the result equals a sequential first-occurrence-wins pass.
#[derive(Debug)]
pub struct Cleaner {
    config: CleanConfig,
    splitter: SentenceSplitter,
    dedup: Deduplicator,
    ids: HashSet<String>,
    stats: CorpusStats,
    drops: Vec<DropRecord>,
}

impl Cleaner {
    pub fn new(config: CleanConfig) -> Self {
        let splitter = match &config.abbreviations {
            Some(list) => SentenceSplitter::with_abbreviations(list),
            None => SentenceSplitter::default(),
        };
        Cleaner {
            dedup: Deduplicator::new(config.dedup_options),
            splitter,
            config,
            ids: HashSet::new(),
            stats: CorpusStats::default(),
            drops: Vec::new(),
        }
    }

    pub fn push(&mut self, raw: RawDocument) -> Option<CleanDocument> {
        if raw.id.is_empty() || !self.ids.insert(raw.id.clone()) {
            warn!("skipping document with empty or repeated id {:?}", raw.id);
            self.drop_document(raw.id, DropReason::Malformed);
            return None;
        }
        let sentences = self.splitter.split(&raw.text);
        self.process(raw.id, raw.source, sentences)
    }

    /// Re-clean an already split document; its sentences are taken as is.
    pub fn push_split(&mut self, doc: CleanDocument) -> Option<CleanDocument> {
        if doc.id.is_empty() || !self.ids.insert(doc.id.clone()) {
            warn!("skipping document with empty or repeated id {:?}", doc.id);
            self.drop_document(doc.id, DropReason::Malformed);
            return None;
        }
        self.process(doc.id, doc.source, doc.sentences)
    }

    fn process(&mut self, id: String, source: String, sentences: Vec<String>) -> Option<CleanDocument> {
        if self.config.passthrough_sources.contains(&source) {
            return self.emit(CleanDocument { id, source, sentences });
        }

        let mut kept = Vec::with_capacity(sentences.len());
        let mut origin = Vec::with_capacity(sentences.len());
        for (idx, sentence) in sentences.into_iter().enumerate() {
            match filter_sentence(&sentence, &self.config.filter).reason() {
                None => {
                    kept.push(sentence);
                    origin.push(idx);
                }
                Some(reason) => self.drops.push(DropRecord {
                    id: id.clone(),
                    sentence_index: Some(idx),
                    reason,
                }),
            }
        }
        if kept.is_empty() {
            return None;
        }
        let doc = CleanDocument {
            id: id.clone(),
            source,
            sentences: kept,
        };
        let (doc, removed) = self.dedup.admit(doc, self.config.dedup.scopes());
        for r in removed {
            self.drops.push(DropRecord {
                id: id.clone(),
                sentence_index: Some(origin[r]),
                reason: DropReason::Duplicate,
            });
        }
        doc.and_then(|d| self.emit(d))
    }

    /// Log an input record that could not be read.
    pub fn record_issue(&mut self, issue: &ReadIssue) {
        warn!("{issue}");
        let id = issue.id.clone().unwrap_or_else(|| format!("line:{}", issue.line));
        self.drop_document(id, DropReason::Malformed);
    }

    fn drop_document(&mut self, id: String, reason: DropReason) {
        self.drops.push(DropRecord {
            id,
            sentence_index: None,
            reason,
        });
    }

    fn emit(&mut self, doc: CleanDocument) -> Option<CleanDocument> {
        if doc.sentences.is_empty() {
            return None;
        }
        self.stats.record(&doc);
        Some(doc)
    }

    pub fn stats(&self) -> &CorpusStats {
        &self.stats
    }

    pub fn finish(self) -> (CorpusStats, Vec<DropRecord>) {
        (self.stats, self.drops)
    }
}

/// Split, filter and deduplicate a document stream. Unreadable records are
/// logged to the drop log and skipped.
pub fn clean_corpus<I>(raw: I, config: &CleanConfig) -> CleanOutput
where
    I: IntoIterator<Item = Result<RawDocument, ReadIssue>>,
{
    let mut cleaner = Cleaner::new(config.clone());
    let mut clean = Vec::new();
    for item in raw {
        match item {
            Ok(doc) => clean.extend(cleaner.push(doc)),
            Err(issue) => cleaner.record_issue(&issue),
        }
    }
    let (stats, drops) = cleaner.finish();
    CleanOutput { clean, stats, drops }
}

/// Run already split documents through filtering and dedup again.
pub fn clean_documents<I>(docs: I, config: &CleanConfig) -> CleanOutput
where
    I: IntoIterator<Item = CleanDocument>,
{
    let mut cleaner = Cleaner::new(config.clone());
    let clean = docs.into_iter().filter_map(|d| cleaner.push_split(d)).collect();
    let (stats, drops) = cleaner.finish();
    CleanOutput { clean, stats, drops }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open() -> CleanConfig {
        CleanConfig {
            filter: FilterConfig::permissive(),
            ..CleanConfig::default()
        }
    }

    #[test]
    fn empty_stream() {
        let out = clean_corpus(Vec::new(), &CleanConfig::default());
        assert!(out.clean.is_empty());
        assert_eq!(out.stats.total(), Default::default());
    }

    #[test]
    fn repeated_sentence_within_one_document() {
        let out = clean_corpus([Ok(RawDocument::new("d1", "web", "Hola. Hola."))], &open());
        assert_eq!(out.clean.len(), 1);
        assert_eq!(out.clean[0].sentences, vec!["Hola."]);
        let total = out.stats.total();
        assert_eq!((total.documents, total.sentences, total.tokens), (1, 1, 1));
        assert_eq!(
            out.drops,
            vec![DropRecord {
                id: "d1".into(),
                sentence_index: Some(1),
                reason: DropReason::Duplicate
            }]
        );
    }

    #[test]
    fn drop_log_uses_original_sentence_positions() {
        let text = "El paciente ingresó ayer por la tarde. Vale. El paciente ingresó ayer por la tarde. Se le administró insulina por vía oral.";
        let out = clean_corpus([Ok(RawDocument::new("d", "s", text))], &CleanConfig::default());
        assert_eq!(out.clean[0].sentences.len(), 2);
        let reasons: Vec<_> = out.drops.iter().map(|d| (d.sentence_index, d.reason)).collect();
        assert_eq!(
            reasons,
            vec![(Some(1), DropReason::TooShort), (Some(2), DropReason::Duplicate)]
        );
    }

    #[test]
    fn passthrough_source_is_untouched() {
        let mut config = CleanConfig::default();
        config.passthrough_sources.insert("clinical".into());
        let docs = [
            Ok(RawDocument::new("a", "clinical", "Ok. Ok.")),
            Ok(RawDocument::new("b", "bio", "Ok. Ok.")),
        ];
        let out = clean_corpus(docs, &config);
        assert_eq!(out.clean.len(), 1);
        assert_eq!(out.clean[0].sentences, vec!["Ok.", "Ok."]);
    }

    #[test]
    fn repeated_ids_and_read_issues_are_logged() {
        let docs = vec![
            Ok(RawDocument::new("a", "s", "Primera frase.")),
            Ok(RawDocument::new("a", "s", "Otra frase.")),
            Err(ReadIssue {
                line: 3,
                id: None,
                message: "bad json".into(),
            }),
        ];
        let out = clean_corpus(docs, &open());
        assert_eq!(out.clean.len(), 1);
        assert_eq!(out.drops.len(), 2);
        assert_eq!(out.drops[1].id, "line:3");
        assert!(out.drops.iter().all(|d| d.sentence_index.is_none()));
    }

    #[test]
    fn per_source_mode_keeps_cross_source_repeats() {
        let docs = || {
            vec![
                Ok(RawDocument::new("a", "x", "Misma frase.")),
                Ok(RawDocument::new("b", "y", "Misma frase.")),
            ]
        };
        let per_source = CleanConfig {
            dedup: DedupMode::PerSource,
            ..open()
        };
        assert_eq!(clean_corpus(docs(), &per_source).clean.len(), 2);
        assert_eq!(clean_corpus(docs(), &open()).clean.len(), 1);
        let off = CleanConfig {
            dedup: DedupMode::Off,
            ..open()
        };
        assert_eq!(clean_corpus(docs(), &off).stats.total().sentences, 2);
    }
}
