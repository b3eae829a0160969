use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{NerError, NerScores, Prf};

/// Mean and sample standard deviation (k − 1 denominator; 0 for one run).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Values are shifted by the first one before summing, so identical
    /// inputs give their exact value and a std of exactly zero.
    pub fn of(values: &[f64]) -> Option<Self> {
        let (&first, _) = values.split_first()?;
        let n = values.len() as f64;
        let shift = values.iter().map(|v| v - first).sum::<f64>() / n;
        let mean = first + shift;
        let std = if values.len() < 2 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - first - shift).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        };
        Some(MeanStd { mean, std })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricAggregate {
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub f1: MeanStd,
}

impl MetricAggregate {
    fn of(runs: &[Prf]) -> Self {
        let pick = |f: fn(&Prf) -> f64| {
            let values: Vec<f64> = runs.iter().map(f).collect();
            MeanStd::of(&values).unwrap_or_default()
        };
        MetricAggregate {
            precision: pick(|p| p.precision),
            recall: pick(|p| p.recall),
            f1: pick(|p| p.f1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAggregate {
    pub runs: usize,
    #[serde(flatten)]
    pub micro: MetricAggregate,
    pub per_type: BTreeMap<String, MetricAggregate>,
}

/// Mean and sample std of micro and per-type metrics over runs. A type
/// missing from a run contributes zeros for that run.
pub fn aggregate_runs(scores: &[NerScores]) -> Result<RunAggregate, NerError> {
    if scores.is_empty() {
        return Err(NerError::NoRuns);
    }
    let micro: Vec<Prf> = scores.iter().map(|s| s.micro).collect();
    let mut types: Vec<&String> = scores.iter().flat_map(|s| s.per_type.keys()).collect();
    types.sort();
    types.dedup();
    let per_type = types
        .into_iter()
        .map(|t| {
            let runs: Vec<Prf> = scores
                .iter()
                .map(|s| s.per_type.get(t).copied().unwrap_or_default())
                .collect();
            (t.clone(), MetricAggregate::of(&runs))
        })
        .collect();
    Ok(RunAggregate {
        runs: scores.len(),
        micro: MetricAggregate::of(&micro),
        per_type,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_f1(f1: f64) -> NerScores {
        NerScores {
            micro: Prf {
                f1,
                precision: f1,
                recall: f1,
                ..Default::default()
            },
            per_type: BTreeMap::new(),
        }
    }

    #[test]
    fn single_run() {
        let a = aggregate_runs(&[with_f1(0.73)]).unwrap();
        assert_eq!(a.micro.f1, MeanStd { mean: 0.73, std: 0.0 });
    }

    #[test]
    fn two_runs_closed_form() {
        let a = aggregate_runs(&[with_f1(0.8), with_f1(0.9)]).unwrap();
        assert!((a.micro.f1.mean - 0.85).abs() < 1e-12);
        assert!((a.micro.f1.std - 0.005f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn identical_runs_have_zero_spread() {
        for v in [0.7, 0.1, 0.8765432, 1.0 / 3.0] {
            let runs = vec![with_f1(v); 5];
            let a = aggregate_runs(&runs).unwrap();
            assert_eq!(a.micro.f1, MeanStd { mean: v, std: 0.0 });
        }
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(aggregate_runs(&[]), Err(NerError::NoRuns)));
    }
}
