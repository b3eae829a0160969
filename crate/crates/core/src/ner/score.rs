use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{extract_entities, NerError, SchemeMode, TaggedSentence};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, rhs: Self) {
        self.tp += rhs.tp;
        self.fp += rhs.fp;
        self.fn_ += rhs.fn_;
    }
}

/// Counts with derived precision, recall and F1. Every ratio with a zero
/// denominator is 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    #[serde(flatten)]
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl From<Counts> for Prf {
    fn from(c: Counts) -> Self {
        let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            counts: c,
            precision,
            recall,
            f1,
        }
    }
}

/// Micro-averaged scores plus a breakdown by entity type.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NerScores {
    #[serde(flatten)]
    pub micro: Prf,
    pub per_type: BTreeMap<String, Prf>,
}

impl NerScores {
    pub fn from_counts(per_type: BTreeMap<String, Counts>) -> Self {
        let mut micro = Counts::default();
        for c in per_type.values() {
            micro += *c;
        }
        NerScores {
            micro: micro.into(),
            per_type: per_type.into_iter().map(|(k, c)| (k, c.into())).collect(),
        }
    }

    /// Unweighted mean of per-type precision, recall and F1.
    pub fn macro_average(&self) -> (f64, f64, f64) {
        if self.per_type.is_empty() {
            return (0.0, 0.0, 0.0);
        }
        let n = self.per_type.len() as f64;
        let sum = self.per_type.values().fold((0.0, 0.0, 0.0), |acc, p| {
            (acc.0 + p.precision, acc.1 + p.recall, acc.2 + p.f1)
        });
        (sum.0 / n, sum.1 / n, sum.2 / n)
    }
}

fn check_alignment(gold: &[TaggedSentence], pred: &[TaggedSentence]) -> Result<(), NerError> {
    if gold.len() != pred.len() {
        return Err(NerError::SentenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(NerError::Misaligned {
                sentence: i,
                gold: g.len(),
                pred: p.len(),
            });
        }
    }
    Ok(())
}

/// Per-type tp/fp/fn under exact (start, end, type) matching.
pub fn score_counts(
    gold: &[TaggedSentence],
    pred: &[TaggedSentence],
    mode: SchemeMode,
) -> Result<BTreeMap<String, Counts>, NerError> {
    check_alignment(gold, pred)?;
    let mut per_type: BTreeMap<String, Counts> = BTreeMap::new();
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        let gold_spans = extract_entities(g, mode, i)?;
        let pred_spans = extract_entities(p, mode, i)?;
        let key = |s: &super::EntitySpan| (s.start, s.end, s.entity_type.clone());
        let gold_set: HashSet<_> = gold_spans.iter().map(key).collect();
        let pred_set: HashSet<_> = pred_spans.iter().map(key).collect();
        for s in &pred_spans {
            let c = per_type.entry(s.entity_type.clone()).or_default();
            if gold_set.contains(&key(s)) {
                c.tp += 1;
            } else {
                c.fp += 1;
            }
        }
        for s in &gold_spans {
            if !pred_set.contains(&key(s)) {
                per_type.entry(s.entity_type.clone()).or_default().fn_ += 1;
            }
        }
    }
    Ok(per_type)
}

/// Strict entity-level precision, recall and F1 of `pred` against `gold`.
pub fn score(gold: &[TaggedSentence], pred: &[TaggedSentence], mode: SchemeMode) -> Result<NerScores, NerError> {
    score_counts(gold, pred, mode).map(NerScores::from_counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(rows: &[&[&str]]) -> Vec<TaggedSentence> {
        rows.iter()
            .map(|tags| {
                let pairs: Vec<(&str, &str)> = tags.iter().map(|t| ("w", *t)).collect();
                TaggedSentence::from_pairs(&pairs).unwrap()
            })
            .collect()
    }

    #[test]
    fn perfect_prediction() {
        let gold = corpus(&[&["B-DRUG", "I-DRUG", "O", "B-DIS"]]);
        let s = score(&gold, &gold, SchemeMode::Strict).unwrap();
        assert_eq!((s.micro.precision, s.micro.recall, s.micro.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn boundary_error_costs_fp_and_fn() {
        let gold = corpus(&[&["B-DRUG", "I-DRUG", "O", "B-DIS"]]);
        let pred = corpus(&[&["B-DRUG", "O", "O", "B-DIS"]]);
        let s = score(&gold, &pred, SchemeMode::Strict).unwrap();
        assert_eq!(s.micro.counts, Counts { tp: 1, fp: 1, fn_: 1 });
        assert_eq!((s.micro.precision, s.micro.recall, s.micro.f1), (0.5, 0.5, 0.5));
        assert_eq!(s.per_type["DRUG"].counts, Counts { tp: 0, fp: 1, fn_: 1 });
        assert_eq!(s.per_type["DIS"].f1, 1.0);
    }

    #[test]
    fn empty_prediction_scores_zero() {
        let gold = corpus(&[&["B-DRUG", "O"]]);
        let pred = corpus(&[&["O", "O"]]);
        let s = score(&gold, &pred, SchemeMode::Strict).unwrap();
        assert_eq!((s.micro.precision, s.micro.recall, s.micro.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn misalignment_names_sentence() {
        let gold = corpus(&[&["O"], &["O", "O"]]);
        let pred = corpus(&[&["O"], &["O"]]);
        assert!(matches!(
            score(&gold, &pred, SchemeMode::Strict),
            Err(NerError::Misaligned { sentence: 1, .. })
        ));
        assert!(matches!(
            score(&gold, &pred[..1], SchemeMode::Strict),
            Err(NerError::SentenceCount { .. })
        ));
    }

    #[test]
    fn macro_average_over_types() {
        let gold = corpus(&[&["B-A", "O", "B-B"]]);
        let pred = corpus(&[&["B-A", "O", "O"]]);
        let s = score(&gold, &pred, SchemeMode::Strict).unwrap();
        assert_eq!(s.macro_average(), (0.5, 0.5, 0.5));
    }

    #[test]
    fn json_shape() {
        let gold = corpus(&[&["B-A"]]);
        let v = serde_json::to_value(score(&gold, &gold, SchemeMode::Strict).unwrap()).unwrap();
        assert_eq!(v["tp"], 1);
        assert_eq!(v["fn"], 0);
        assert_eq!(v["per_type"]["A"]["f1"], 1.0);
    }
}
