use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::CleanDocument;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DedupScope {
    WithinSource,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Granularity {
    #[default]
    Sentence,
    Document,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DedupOptions {
    pub granularity: Granularity,
    pub case_sensitive: bool,
}

impl Default for DedupOptions {
    fn default() -> Self {
        DedupOptions {
            granularity: Granularity::Sentence,
            case_sensitive: true,
        }
    }
}

/// Trim, collapse internal whitespace runs to one space, optionally fold case.
pub fn dedup_key(sentence: &str, case_sensitive: bool) -> String {
    let mut key = String::with_capacity(sentence.len());
    for (i, word) in sentence.split_whitespace().enumerate() {
        if i > 0 {
            key.push(' ');
        }
        if case_sensitive {
            key.push_str(word);
        } else {
            key.extend(word.chars().flat_map(char::to_lowercase));
        }
    }
    key
}

/// First-occurrence-wins filter over a document stream.
///
/// Keys are remembered per source and globally; a scope selects which of
/// the two sets a candidate is checked against.
#[derive(Debug, Default)]
pub struct Deduplicator {
    options: DedupOptions,
    per_source: HashMap<String, HashSet<String>>,
    global: HashSet<String>,
}

impl Deduplicator {
    pub fn new(options: DedupOptions) -> Self {
        Deduplicator {
            options,
            ..Default::default()
        }
    }

    fn seen(&self, source: &str, key: &str, scopes: &[DedupScope]) -> bool {
        scopes.iter().any(|scope| match scope {
            DedupScope::WithinSource => self.per_source.get(source).is_some_and(|set| set.contains(key)),
            DedupScope::Global => self.global.contains(key),
        })
    }

    fn remember(&mut self, source: &str, key: String) {
        self.per_source
            .entry(source.to_string())
            .or_default()
            .insert(key.clone());
        self.global.insert(key);
    }

    /// Drop already-seen content from `doc`, checking the listed scopes in
    /// order. Returns the surviving document (if any) and the indices of
    /// the removed sentences.
    pub fn admit(&mut self, mut doc: CleanDocument, scopes: &[DedupScope]) -> (Option<CleanDocument>, Vec<usize>) {
        let case_sensitive = self.options.case_sensitive;
        match self.options.granularity {
            Granularity::Sentence => {
                let mut removed = Vec::new();
                let mut kept = Vec::with_capacity(doc.sentences.len());
                for (idx, sentence) in doc.sentences.into_iter().enumerate() {
                    let key = dedup_key(&sentence, case_sensitive);
                    if self.seen(&doc.source, &key, scopes) {
                        removed.push(idx);
                    } else {
                        self.remember(&doc.source, key);
                        kept.push(sentence);
                    }
                }
                doc.sentences = kept;
                ((!doc.sentences.is_empty()).then_some(doc), removed)
            }
            Granularity::Document => {
                let key = doc
                    .sentences
                    .iter()
                    .map(|s| dedup_key(s, case_sensitive))
                    .collect::<Vec<_>>()
                    .join("\n");
                if self.seen(&doc.source, &key, scopes) {
                    let removed = (0..doc.sentences.len()).collect();
                    (None, removed)
                } else {
                    self.remember(&doc.source, key);
                    (Some(doc), Vec::new())
                }
            }
        }
    }
}

/// Remove repeated content from `documents`, keeping first occurrences in
/// input order. Documents left without sentences are dropped.
pub fn dedup(documents: Vec<CleanDocument>, scope: DedupScope) -> Vec<CleanDocument> {
    dedup_with(documents, scope, DedupOptions::default())
}

pub fn dedup_with(documents: Vec<CleanDocument>, scope: DedupScope, options: DedupOptions) -> Vec<CleanDocument> {
    let mut dd = Deduplicator::new(options);
    documents
        .into_iter()
        .filter_map(|doc| dd.admit(doc, &[scope]).0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, source: &str, sentences: &[&str]) -> CleanDocument {
        CleanDocument {
            id: id.to_string(),
            source: source.to_string(),
            sentences: sentences.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn first_occurrence_wins() {
        let out = dedup(
            vec![doc("1", "s", &["A", "B"]), doc("2", "s", &["B", "C"])],
            DedupScope::Global,
        );
        assert_eq!(out, vec![doc("1", "s", &["A", "B"]), doc("2", "s", &["C"])]);
    }

    #[test]
    fn emptied_documents_disappear() {
        let out = dedup(
            vec![doc("1", "s", &["A"]), doc("2", "s", &["A", "  A "])],
            DedupScope::Global,
        );
        assert_eq!(out, vec![doc("1", "s", &["A"])]);
    }

    #[test]
    fn scope_controls_cross_source_matches() {
        let input = vec![doc("1", "x", &["A b"]), doc("2", "y", &["A  b"])];
        assert_eq!(dedup(input.clone(), DedupScope::WithinSource).len(), 2);
        assert_eq!(dedup(input, DedupScope::Global).len(), 1);
    }

    #[test]
    fn case_folding_is_optional() {
        let input = vec![doc("1", "x", &["Insulina"]), doc("2", "x", &["insulina"])];
        assert_eq!(dedup(input.clone(), DedupScope::Global).len(), 2);
        let folded = DedupOptions {
            case_sensitive: false,
            ..Default::default()
        };
        assert_eq!(dedup_with(input, DedupScope::Global, folded).len(), 1);
    }

    #[test]
    fn document_granularity() {
        let opts = DedupOptions {
            granularity: Granularity::Document,
            ..Default::default()
        };
        let input = vec![
            doc("1", "x", &["A", "B"]),
            doc("2", "x", &["A"]),
            doc("3", "x", &["A", " B"]),
        ];
        let out = dedup_with(input, DedupScope::Global, opts);
        let ids: Vec<_> = out.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, vec!["1", "2"]);
    }
}
