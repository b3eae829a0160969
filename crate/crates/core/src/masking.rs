//! Masked-language-model example generation with subword masking (SWM)
//! or whole word masking (WWM).
//!
//! Selection picks which positions become prediction targets; each
//! selected position is then replaced by the mask token, replaced by a
//! random token, or left unchanged according to the configured split.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bpe::{BpeVocab, Segmentation};

/// Label at positions that are not prediction targets.
pub const IGNORE_LABEL: i64 = -100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Every subword position is selected independently.
    #[default]
    Swm,
    /// Whole words are selected; all their subwords together.
    Wwm,
}

/// What the WWM budget counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetUnit {
    #[default]
    Subword,
    Word,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaskingConfig {
    pub strategy: Strategy,
    pub mask_prob: f64,
    pub replace_mask: f64,
    pub replace_random: f64,
    pub keep: f64,
    pub budget_unit: BudgetUnit,
    pub seed: u64,
}

impl Default for MaskingConfig {
    fn default() -> Self {
        MaskingConfig {
            strategy: Strategy::Swm,
            mask_prob: 0.15,
            replace_mask: 0.8,
            replace_random: 0.1,
            keep: 0.1,
            budget_unit: BudgetUnit::Subword,
            seed: 0,
        }
    }
}

impl MaskingConfig {
    pub fn validate(&self) -> Result<(), MaskingError> {
        if !(0.0..=1.0).contains(&self.mask_prob) {
            return Err(MaskingError::InvalidConfig(format!(
                "mask_prob {} is outside [0, 1]",
                self.mask_prob
            )));
        }
        let parts = [self.replace_mask, self.replace_random, self.keep];
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(MaskingError::InvalidConfig(
                "replacement fractions must be non-negative".into(),
            ));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(MaskingError::InvalidConfig(format!(
                "replacement fractions sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MaskingError {
    #[error("cannot mask an empty segmentation")]
    EmptySegmentation,
    #[error("invalid masking configuration: {0}")]
    InvalidConfig(String),
    #[error("vocabulary has no <mask> token")]
    NoMaskToken,
    #[error("vocabulary has no non-special tokens to sample replacements from")]
    NoReplacementTokens,
    #[error("no examples given")]
    NoExamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Replacement {
    Mask,
    Random,
    Keep,
}

/// A corrupted id sequence with its prediction targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskedExample {
    pub input_ids: Vec<u32>,
    /// Original id at selected positions, [`IGNORE_LABEL`] elsewhere.
    pub labels: Vec<i64>,
    /// Selected positions, ascending.
    pub selected: Vec<usize>,
    /// Number of positions that could have been selected.
    #[serde(skip)]
    pub maskable: usize,
    /// Replacement applied at each entry of `selected`.
    #[serde(skip)]
    pub replacements: Vec<Replacement>,
}

/// Token ids the masker needs from a vocabulary.
#[derive(Debug, Clone)]
pub struct TokenSpace {
    pub mask_id: u32,
    pub size: u32,
    /// Sorted ascending.
    pub specials: Vec<u32>,
}

impl TokenSpace {
    pub fn from_vocab(vocab: &BpeVocab) -> Result<Self, MaskingError> {
        let space = TokenSpace {
            mask_id: vocab.mask_id().ok_or(MaskingError::NoMaskToken)?,
            size: vocab.size() as u32,
            specials: vocab.special_ids().to_vec(),
        };
        if space.specials.len() >= space.size as usize {
            return Err(MaskingError::NoReplacementTokens);
        }
        Ok(space)
    }

    fn is_special(&self, id: u32) -> bool {
        self.specials.binary_search(&id).is_ok()
    }

    /// Uniform over non-special ids.
    fn random_token<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        loop {
            let id = rng.gen_range(0..self.size);
            if !self.is_special(id) {
                return id;
            }
        }
    }
}

/// Round `x` up or down at random so the expectation is `x`.
fn stochastic_round<R: Rng + ?Sized>(x: f64, rng: &mut R) -> usize {
    let floor = x.floor();
    let frac = x - floor;
    floor as usize + usize::from(frac > 0.0 && rng.gen::<f64>() < frac)
}

/// Build one masked example from `seg`.
///
/// Special-token positions are never selected. Under WWM, word groups
/// (restricted to their maskable positions) are drawn without replacement
/// in random order until the budget of `mask_prob` × maskable positions is
/// reached; the last group may overshoot it.
pub fn make_example<R: Rng + ?Sized>(
    seg: &Segmentation,
    config: &MaskingConfig,
    space: &TokenSpace,
    rng: &mut R,
) -> Result<MaskedExample, MaskingError> {
    config.validate()?;
    if seg.is_empty() {
        return Err(MaskingError::EmptySegmentation);
    }
    let ids = &seg.ids;
    let maskable: Vec<usize> = (0..ids.len()).filter(|&i| !space.is_special(ids[i])).collect();

    let mut selected: Vec<usize> = match config.strategy {
        Strategy::Swm => maskable
            .iter()
            .copied()
            .filter(|_| rng.gen::<f64>() < config.mask_prob)
            .collect(),
        Strategy::Wwm => {
            let mut groups: Vec<Vec<usize>> = word_groups(seg)
                .into_iter()
                .map(|g| g.filter(|&i| !space.is_special(ids[i])).collect::<Vec<_>>())
                .filter(|g| !g.is_empty())
                .collect();
            groups.shuffle(rng);
            let (target, counts_subwords) = match config.budget_unit {
                BudgetUnit::Subword => (config.mask_prob * maskable.len() as f64, true),
                BudgetUnit::Word => (config.mask_prob * groups.len() as f64, false),
            };
            let target = stochastic_round(target, rng);
            let mut picked = Vec::new();
            let mut spent = 0;
            for group in groups {
                if spent >= target {
                    break;
                }
                spent += if counts_subwords { group.len() } else { 1 };
                picked.extend(group);
            }
            picked
        }
    };
    selected.sort_unstable();

    let mut input_ids = ids.clone();
    let mut labels = vec![IGNORE_LABEL; ids.len()];
    let mut replacements = Vec::with_capacity(selected.len());
    for &pos in &selected {
        labels[pos] = i64::from(ids[pos]);
        let u: f64 = rng.gen();
        let action = if u < config.replace_mask {
            input_ids[pos] = space.mask_id;
            Replacement::Mask
        } else if u < config.replace_mask + config.replace_random {
            input_ids[pos] = space.random_token(rng);
            Replacement::Random
        } else {
            Replacement::Keep
        };
        replacements.push(action);
    }
    Ok(MaskedExample {
        input_ids,
        labels,
        selected,
        maskable: maskable.len(),
        replacements,
    })
}

/// The segmentation's word groups, or one group per position when it has
/// none recorded.
fn word_groups(seg: &Segmentation) -> Vec<Range<usize>> {
    if seg.word_groups.is_empty() {
        (0..seg.len()).map(|i| i..i + 1).collect()
    } else {
        seg.word_groups.clone()
    }
}

/// Concatenate a document's sentence segmentations into examples of at most
/// `max_len` positions. Sentences are never split; one longer than the cap
/// becomes an example of its own.
pub fn pack_document(sentences: &[Segmentation], max_len: usize) -> Vec<Segmentation> {
    let mut out = Vec::new();
    let mut current = Segmentation::default();
    for seg in sentences {
        if !current.is_empty() && current.len() + seg.len() > max_len {
            out.push(std::mem::take(&mut current));
        }
        current.extend(seg);
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaskingStats {
    pub maskable: usize,
    pub selected: usize,
    pub selection_rate: f64,
    pub mask_rate: f64,
    pub random_rate: f64,
    pub keep_rate: f64,
}

/// Empirical selection and replacement rates over `examples`.
pub fn masking_stats(examples: &[MaskedExample]) -> Result<MaskingStats, MaskingError> {
    if examples.is_empty() {
        return Err(MaskingError::NoExamples);
    }
    let maskable: usize = examples.iter().map(|e| e.maskable).sum();
    let selected: usize = examples.iter().map(|e| e.selected.len()).sum();
    let count = |kind: Replacement| {
        examples
            .iter()
            .flat_map(|e| &e.replacements)
            .filter(|&&r| r == kind)
            .count()
    };
    let rate = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    Ok(MaskingStats {
        maskable,
        selected,
        selection_rate: rate(selected, maskable),
        mask_rate: rate(count(Replacement::Mask), selected),
        random_rate: rate(count(Replacement::Random), selected),
        keep_rate: rate(count(Replacement::Keep), selected),
    })
}

#[cfg(test)]
#[allow(clippy::single_range_in_vec_init)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space() -> TokenSpace {
        TokenSpace {
            mask_id: 4,
            size: 100,
            specials: vec![0, 1, 2, 3, 4],
        }
    }

    fn seg(ids: Vec<u32>, groups: Vec<Range<usize>>) -> Segmentation {
        Segmentation {
            subwords: ids.iter().map(|i| i.to_string()).collect(),
            ids,
            word_groups: groups,
        }
    }

    #[test]
    fn zero_probability_changes_nothing() {
        let s = seg(vec![10, 11, 12], vec![0..1, 1..3]);
        let config = MaskingConfig {
            mask_prob: 0.0,
            ..Default::default()
        };
        for strategy in [Strategy::Swm, Strategy::Wwm] {
            let config = MaskingConfig {
                strategy,
                ..config.clone()
            };
            let ex = make_example(&s, &config, &space(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
            assert_eq!(ex.input_ids, s.ids);
            assert!(ex.selected.is_empty());
            assert!(ex.labels.iter().all(|&l| l == IGNORE_LABEL));
        }
    }

    #[test]
    fn full_masking_spares_specials() {
        let s = seg(vec![0, 10, 11, 12, 2], vec![0..1, 1..2, 2..4, 4..5]);
        let config = MaskingConfig {
            mask_prob: 1.0,
            replace_mask: 1.0,
            replace_random: 0.0,
            keep: 0.0,
            ..Default::default()
        };
        let ex = make_example(&s, &config, &space(), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(ex.input_ids, vec![0, 4, 4, 4, 2]);
        assert_eq!(ex.labels, vec![IGNORE_LABEL, 10, 11, 12, IGNORE_LABEL]);
        assert_eq!(ex.selected, vec![1, 2, 3]);
        assert_eq!(ex.maskable, 3);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            make_example(&Segmentation::default(), &MaskingConfig::default(), &space(), &mut rng),
            Err(MaskingError::EmptySegmentation)
        );
        let bad = MaskingConfig {
            replace_mask: 0.5,
            ..Default::default()
        };
        let s = seg(vec![10], vec![0..1]);
        assert!(matches!(
            make_example(&s, &bad, &space(), &mut rng),
            Err(MaskingError::InvalidConfig(_))
        ));
        let bad = MaskingConfig {
            mask_prob: 1.5,
            ..Default::default()
        };
        assert!(make_example(&s, &bad, &space(), &mut rng).is_err());
    }

    #[test]
    fn four_piece_word_is_atomic_under_wwm() {
        // "hidrocortisona" as 4 pieces between two single-piece words
        let s = seg(vec![20, 30, 31, 32, 33, 21], vec![0..1, 1..5, 5..6]);
        let config = MaskingConfig {
            strategy: Strategy::Wwm,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut hit = 0;
        for _ in 0..1000 {
            let ex = make_example(&s, &config, &space(), &mut rng).unwrap();
            let inside = ex.selected.iter().filter(|p| (1..5).contains(*p)).count();
            assert!(inside == 0 || inside == 4, "{:?}", ex.selected);
            hit += usize::from(inside == 4);
        }
        assert!(hit > 0);
    }

    #[test]
    fn seed_determinism() {
        let s = seg((10..60).collect(), (0..50).map(|i| i..i + 1).collect());
        let config = MaskingConfig::default();
        let a = make_example(&s, &config, &space(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = make_example(&s, &config, &space(), &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn packing_respects_cap() {
        let a = seg(vec![10, 11], vec![0..2]);
        let b = seg(vec![12], vec![0..1]);
        let c = seg(vec![13, 14, 15], vec![0..1, 1..3]);
        let packed = pack_document(&[a, b, c], 3);
        assert_eq!(packed.len(), 2);
        assert_eq!(packed[0].ids, vec![10, 11, 12]);
        assert_eq!(packed[0].word_groups, vec![0..2, 2..3]);
        assert_eq!(packed[1].word_groups, vec![0..1, 1..3]);
    }

    #[test]
    fn stats_of_unmasked_examples() {
        let s = seg(vec![10, 11], vec![0..2]);
        let config = MaskingConfig {
            mask_prob: 0.0,
            ..Default::default()
        };
        let ex = make_example(&s, &config, &space(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let stats = masking_stats(&[ex]).unwrap();
        assert_eq!(stats.selection_rate, 0.0);
        assert_eq!(masking_stats(&[]), Err(MaskingError::NoExamples));
    }
}
