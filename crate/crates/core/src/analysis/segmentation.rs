use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, Context};
use crate::bpe::BpeVocab;
use crate::ner::{extract_entities, SchemeMode, TaggedSentence};

/// Gold annotation surface forms, in corpus order. With `unique`, only the
/// first occurrence of each distinct surface form is kept.
pub fn annotations(gold: &[TaggedSentence], mode: SchemeMode, unique: bool) -> Result<Vec<String>, AnalysisError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, sentence) in gold.iter().enumerate() {
        for span in extract_entities(sentence, mode, i)? {
            if !unique || seen.insert(span.surface.clone()) {
                out.push(span.surface);
            }
        }
    }
    Ok(out)
}

/// Number of subwords each annotation is split into.
pub fn segment_annotations<S: AsRef<str>>(
    annotations: &[S],
    vocab: &BpeVocab,
    context: Context,
) -> Result<Vec<usize>, AnalysisError> {
    annotations
        .iter()
        .enumerate()
        .map(|(index, a)| {
            let a = a.as_ref();
            if a.trim().is_empty() {
                return Err(AnalysisError::EmptyAnnotation { index });
            }
            Ok(vocab.count_subwords(&context.apply(a)))
        })
        .collect()
}

/// One term and the pieces it is split into, each piece shown as text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentationRow {
    pub term: String,
    pub pieces: Vec<String>,
}

impl SegmentationRow {
    /// Pieces joined with `-`, e.g. `HB-s-A-g`.
    pub fn display(&self) -> String {
        self.pieces.join("-")
    }
}

/// Side-by-side listing of how `terms` are split.
pub fn segment_listing<S: AsRef<str>>(terms: &[S], vocab: &BpeVocab, context: Context) -> Vec<SegmentationRow> {
    terms
        .iter()
        .map(|term| {
            let term = term.as_ref();
            let seg = vocab.encode(&context.apply(term));
            let pieces = seg
                .ids
                .iter()
                .map(|&id| {
                    let bytes = vocab.decode_bytes(&[id]).unwrap_or_default();
                    String::from_utf8_lossy(&bytes).into_owned()
                })
                .collect();
            SegmentationRow {
                term: term.to_string(),
                pieces,
            }
        })
        .collect()
}

/// Fractions of annotations split into 1, 2, 3, 4 and 5 or more subwords.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Buckets {
    #[serde(rename = "1")]
    pub one: f64,
    #[serde(rename = "2")]
    pub two: f64,
    #[serde(rename = "3")]
    pub three: f64,
    #[serde(rename = "4")]
    pub four: f64,
    #[serde(rename = "5+")]
    pub five_plus: f64,
}

impl Buckets {
    pub const LABELS: [&'static str; 5] = ["1", "2", "3", "4", "5+"];

    pub fn as_array(&self) -> [f64; 5] {
        [self.one, self.two, self.three, self.four, self.five_plus]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Buckets {
            one: a[0],
            two: a[1],
            three: a[2],
            four: a[3],
            five_plus: a[4],
        }
    }

    /// Percentages with two decimals, for tables. Rounded by largest
    /// remainder, so each value is within 0.01 of the exact percentage and
    /// a row of fractions summing to one adds up to exactly 100.00.
    pub fn percentages(&self) -> [f64; 5] {
        let exact = self.as_array().map(|f| f * 10_000.0);
        let mut hundredths = exact.map(|x| x.floor());
        let target = exact.iter().sum::<f64>().round();
        let mut order: Vec<usize> = (0..5).collect();
        order.sort_by(|&a, &b| {
            let (ra, rb) = (exact[a] - hundredths[a], exact[b] - hundredths[b]);
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let missing = (target - hundredths.iter().sum::<f64>()).max(0.0) as usize;
        for &i in order.iter().take(missing) {
            hundredths[i] += 1.0;
        }
        hundredths.map(|h| h / 100.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegStatsReport {
    pub annotations: usize,
    pub mean: f64,
    pub median: f64,
    pub buckets: Buckets,
}

/// Mean, median (mean of the middle two for an even count) and bucket
/// fractions of subword counts.
pub fn seg_stats(counts: &[usize]) -> Result<SegStatsReport, AnalysisError> {
    if counts.is_empty() {
        return Err(AnalysisError::NoAnnotations);
    }
    let n = counts.len();
    let mean = counts.iter().sum::<usize>() as f64 / n as f64;
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let median = if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    };
    let mut tally = [0usize; 5];
    for &c in counts {
        tally[c.clamp(1, 5) - 1] += 1;
    }
    Ok(SegStatsReport {
        annotations: n,
        mean,
        median,
        buckets: Buckets::from_array(tally.map(|t| t as f64 / n as f64)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpe::{train_bpe, TrainerConfig};

    #[test]
    fn closed_form_stats() {
        let s = seg_stats(&[1, 2, 3]).unwrap();
        assert_eq!((s.mean, s.median), (2.0, 2.0));
        let third = 1.0 / 3.0;
        assert_eq!(s.buckets.as_array(), [third, third, third, 0.0, 0.0]);
    }

    #[test]
    fn even_median_and_overflow_bucket() {
        let s = seg_stats(&[7, 1, 5, 2]).unwrap();
        assert_eq!(s.median, 3.5);
        assert_eq!(s.buckets.as_array(), [0.25, 0.25, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn displayed_percentages_add_up() {
        let s = seg_stats(&[1, 1, 1, 2, 2, 2, 3]).unwrap();
        let p = s.buckets.percentages();
        assert_eq!(p, [42.86, 42.86, 14.28, 0.0, 0.0]);
        assert!((p.iter().sum::<f64>() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn all_single_subword() {
        let s = seg_stats(&[1; 9]).unwrap();
        assert_eq!((s.mean, s.median, s.buckets.one), (1.0, 1.0, 1.0));
        assert_eq!(s.buckets.percentages(), [100.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn empty_inputs_are_errors() {
        assert!(matches!(seg_stats(&[]), Err(AnalysisError::NoAnnotations)));
        let vocab = train_bpe(["ab"], &TrainerConfig::new(262)).unwrap();
        assert!(matches!(
            segment_annotations(&["ab", " "], &vocab, Context::WordInitial),
            Err(AnalysisError::EmptyAnnotation { index: 1 })
        ));
    }

    #[test]
    fn whole_token_counts_once_and_context_matters() {
        let vocab = train_bpe(["insulina insulina insulina"], &TrainerConfig::new(300)).unwrap();
        assert!(vocab.contains("insulina") && vocab.contains("Ġinsulina"));
        assert_eq!(
            segment_annotations(&["insulina"], &vocab, Context::WordInitial).unwrap(),
            vec![1]
        );
        assert_eq!(
            segment_annotations(&["insulina"], &vocab, Context::MidSentence).unwrap(),
            vec![1]
        );
        let rows = segment_listing(&["insulinas"], &vocab, Context::WordInitial);
        assert_eq!(rows[0].display(), "insulina-s");
    }

    #[test]
    fn unique_keeps_first_occurrence() {
        let s = TaggedSentence::from_pairs(&[("a", "B-X"), ("b", "O"), ("a", "B-X"), ("c", "B-Y")]).unwrap();
        let all = annotations(std::slice::from_ref(&s), SchemeMode::Strict, false).unwrap();
        assert_eq!(all, vec!["a", "a", "c"]);
        let unique = annotations(&[s], SchemeMode::Strict, true).unwrap();
        assert_eq!(unique, vec!["a", "c"]);
    }
}
