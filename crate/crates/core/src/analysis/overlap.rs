use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bpe::BpeVocab;
use crate::ner::TaggedSentence;

/// How many vocabulary entries a task's text actually uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub model: String,
    pub task: String,
    pub overlap_count: usize,
    pub vocab_size: usize,
    /// `100 × overlap_count / vocab_size`, unrounded.
    pub percent: f64,
}

impl OverlapReport {
    pub fn new(model: &str, task: &str, overlap_count: usize, vocab_size: usize) -> Self {
        let percent = if vocab_size == 0 {
            0.0
        } else {
            100.0 * overlap_count as f64 / vocab_size as f64
        };
        OverlapReport {
            model: model.to_string(),
            task: task.to_string(),
            overlap_count,
            vocab_size,
            percent,
        }
    }

    /// The percentage rounded to a whole number, as shown in tables.
    pub fn rounded_percent(&self) -> i64 {
        self.percent.round() as i64
    }
}

/// A sentence's text: its tokens joined by single spaces.
pub fn sentence_text(sentence: &TaggedSentence) -> String {
    sentence.tokens.join(" ")
}

/// Distinct subwords produced by encoding every sentence of a task.
pub fn task_token_set<'a, I>(sentences: I, vocab: &BpeVocab) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a TaggedSentence>,
{
    let mut set = BTreeSet::new();
    for sentence in sentences {
        for piece in vocab.encode(&sentence_text(sentence)).subwords {
            set.insert(piece);
        }
    }
    set
}

/// Size of `token_set ∩ vocabulary`, absolute and relative to the full
/// vocabulary size (special tokens included).
pub fn overlap(model: &str, task: &str, vocab: &BpeVocab, token_set: &BTreeSet<String>) -> OverlapReport {
    let overlap_count = token_set.iter().filter(|t| vocab.contains(t)).count();
    OverlapReport::new(model, task, overlap_count, vocab.size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpe::{train_bpe, TrainerConfig};

    fn sentence(text: &str) -> TaggedSentence {
        let pairs: Vec<(&str, &str)> = text.split(' ').map(|t| (t, "O")).collect();
        TaggedSentence::from_pairs(&pairs).unwrap()
    }

    #[test]
    fn empty_task_uses_nothing() {
        let vocab = train_bpe(["ab ab"], &TrainerConfig::new(263)).unwrap();
        let set = task_token_set(&[], &vocab);
        assert!(set.is_empty());
        let report = overlap("m", "t", &vocab, &set);
        assert_eq!((report.overlap_count, report.percent), (0, 0.0));
    }

    #[test]
    fn repeated_word_gives_plain_and_space_marked_forms() {
        let vocab = train_bpe(["ab ab ab ab"], &TrainerConfig::new(263)).unwrap();
        assert!(vocab.contains("ab") && vocab.contains("Ġab"));
        let set = task_token_set(&[sentence("ab ab")], &vocab);
        assert_eq!(set.into_iter().collect::<Vec<_>>(), vec!["ab", "Ġab"]);
    }

    #[test]
    fn set_is_a_subset_of_the_vocabulary() {
        let vocab = train_bpe(["el paciente presenta fiebre alta"], &TrainerConfig::new(280)).unwrap();
        let set = task_token_set(&[sentence("la paciente tiene fiebre"), sentence("¿Qué dosis?")], &vocab);
        assert!(set.len() <= vocab.size());
        assert!(set.iter().all(|t| vocab.contains(t)));
        let report = overlap("m", "t", &vocab, &set);
        assert_eq!(report.overlap_count, set.len());
    }

    #[test]
    fn rounding_of_reported_pairs() {
        let report = |count, size| OverlapReport::new("", "", count, size);
        assert_eq!(report(20_620, 52_000).rounded_percent(), 40);
        assert_eq!(report(15_792, 30_000).rounded_percent(), 53);
        assert_eq!(report(12_829, 31_000).rounded_percent(), 41);
    }
}
