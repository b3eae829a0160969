use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{AnalysisError, Context};
use crate::bpe::BpeVocab;
use crate::ner::{extract_entities, score_counts, Counts, EntitySpan, NerScores, Prf, SchemeMode, TaggedSentence};

/// Scores restricted to annotations split into `bucket` subwords.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketScores {
    pub bucket: usize,
    /// `"k"`, or `"k+"` for the top bucket that absorbs longer annotations.
    pub label: String,
    #[serde(flatten)]
    pub scores: Prf,
    /// Gold annotations in the bucket (`tp + fn`).
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissectionReport {
    pub max_bucket: usize,
    pub context: Context,
    /// Non-empty buckets in increasing order.
    pub buckets: Vec<BucketScores>,
    pub overall: NerScores,
}

impl DissectionReport {
    /// Rows of `bucket,f1,precision,recall,support` for plotting.
    pub fn plot_rows(&self) -> impl Iterator<Item = (&str, f64, f64, f64, usize)> {
        self.buckets.iter().map(|b| {
            (
                b.label.as_str(),
                b.scores.f1,
                b.scores.precision,
                b.scores.recall,
                b.support,
            )
        })
    }
}

/// Re-score `pred` against `gold` separately for each annotation length.
///
/// A true positive or false negative belongs to the bucket of the gold span;
/// a false positive belongs to the bucket of the predicted span. Lengths
/// above `max_bucket` are merged into bucket `max_bucket`.
pub fn dissect_scores(
    gold: &[TaggedSentence],
    pred: &[TaggedSentence],
    vocab: &BpeVocab,
    max_bucket: usize,
    mode: SchemeMode,
    context: Context,
) -> Result<DissectionReport, AnalysisError> {
    if max_bucket == 0 {
        return Err(AnalysisError::InvalidMaxBucket);
    }
    let overall = NerScores::from_counts(score_counts(gold, pred, mode)?);

    let mut lengths: HashMap<String, usize> = HashMap::new();
    let mut bucket_of = |span: &EntitySpan| -> usize {
        let n = *lengths
            .entry(span.surface.clone())
            .or_insert_with(|| vocab.count_subwords(&context.apply(&span.surface)));
        n.clamp(1, max_bucket)
    };

    let mut counts: BTreeMap<usize, Counts> = BTreeMap::new();
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        let gold_spans = extract_entities(g, mode, i)?;
        let pred_spans = extract_entities(p, mode, i)?;
        let key = |s: &EntitySpan| (s.start, s.end, s.entity_type.clone());
        let pred_set: HashSet<_> = pred_spans.iter().map(key).collect();
        let gold_set: HashSet<_> = gold_spans.iter().map(key).collect();
        for s in &gold_spans {
            let c = counts.entry(bucket_of(s)).or_default();
            if pred_set.contains(&key(s)) {
                c.tp += 1;
            } else {
                c.fn_ += 1;
            }
        }
        for s in &pred_spans {
            if !gold_set.contains(&key(s)) {
                counts.entry(bucket_of(s)).or_default().fp += 1;
            }
        }
    }

    let buckets = counts
        .into_iter()
        .map(|(bucket, c)| BucketScores {
            bucket,
            label: if bucket == max_bucket {
                format!("{bucket}+")
            } else {
                bucket.to_string()
            },
            support: c.tp + c.fn_,
            scores: c.into(),
        })
        .collect();
    Ok(DissectionReport {
        max_bucket,
        context,
        buckets,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpe::{train_bpe, TrainerConfig};

    fn sent(pairs: &[(&str, &str)]) -> TaggedSentence {
        TaggedSentence::from_pairs(pairs).unwrap()
    }

    fn vocab() -> BpeVocab {
        train_bpe(["dolor dolor dolor dolor"], &TrainerConfig::new(300)).unwrap()
    }

    #[test]
    fn tp_fn_by_gold_and_fp_by_prediction() {
        let v = vocab();
        assert_eq!(v.count_subwords("dolor"), 1);
        assert_eq!(v.count_subwords("xyz"), 3);
        let gold = vec![sent(&[("dolor", "B-S"), ("de", "O"), ("xyz", "B-S")])];
        let pred = vec![sent(&[("dolor", "B-S"), ("de", "B-S"), ("xyz", "O")])];
        let r = dissect_scores(&gold, &pred, &v, 10, SchemeMode::Strict, Context::WordInitial).unwrap();
        let by_bucket: Vec<_> = r
            .buckets
            .iter()
            .map(|b| (b.bucket, b.scores.counts, b.support))
            .collect();
        assert_eq!(
            by_bucket,
            vec![
                (1, Counts { tp: 1, fp: 0, fn_: 0 }, 1),
                (2, Counts { tp: 0, fp: 1, fn_: 0 }, 0),
                (3, Counts { tp: 0, fp: 0, fn_: 1 }, 1),
            ]
        );
    }

    #[test]
    fn single_bucket_equals_overall() {
        let v = vocab();
        let gold = vec![sent(&[("a", "B-S"), ("b", "I-S"), ("c", "B-T")])];
        let pred = vec![sent(&[("a", "B-S"), ("b", "O"), ("c", "B-T")])];
        let r = dissect_scores(&gold, &pred, &v, 1, SchemeMode::Strict, Context::WordInitial).unwrap();
        assert_eq!(r.buckets.len(), 1);
        assert_eq!(r.buckets[0].label, "1+");
        assert_eq!(r.buckets[0].scores, r.overall.micro);
    }

    #[test]
    fn errors() {
        let v = vocab();
        let gold = vec![sent(&[("a", "O")])];
        assert!(matches!(
            dissect_scores(&gold, &gold, &v, 0, SchemeMode::Strict, Context::WordInitial),
            Err(AnalysisError::InvalidMaxBucket)
        ));
        assert!(dissect_scores(&gold, &[], &v, 3, SchemeMode::Strict, Context::WordInitial).is_err());
    }
}
