use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use log::{debug, info};

use super::bytes::bytes_to_token;
use super::pretokenize::pretokenize;
use super::vocab::{BpeVocab, DEFAULT_SPECIALS};
use super::BpeError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainerConfig {
    /// Total vocabulary size: specials + 256 byte tokens + merges.
    pub vocab_size: usize,
    /// Reserved tokens, given the lowest ids in this order.
    pub specials: Vec<String>,
}

impl TrainerConfig {
    pub fn new(vocab_size: usize) -> Self {
        TrainerConfig {
            vocab_size,
            specials: DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn merge_budget(&self) -> Result<usize, BpeError> {
        let minimum = 256 + self.specials.len();
        if self.vocab_size <= minimum {
            return Err(BpeError::VocabTooSmall {
                requested: self.vocab_size,
                minimum,
            });
        }
        Ok(self.vocab_size - minimum)
    }
}

type Pair = (u32, u32);

/// Heap entry. Higher count wins; among equal counts the pair whose
/// (left bytes, right bytes) sorts first wins.
#[derive(PartialEq, Eq)]
struct Candidate {
    count: u64,
    left: Vec<u8>,
    right: Vec<u8>,
    pair: Pair,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| (&other.left, &other.right).cmp(&(&self.left, &self.right)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Trainer {
    symbols: Vec<Vec<u8>>,
    known: HashSet<Vec<u8>>,
    words: Vec<Vec<u32>>,
    freqs: Vec<u64>,
    pair_counts: HashMap<Pair, u64>,
    pair_words: HashMap<Pair, BTreeSet<usize>>,
    excluded: HashSet<Pair>,
    heap: BinaryHeap<Candidate>,
}

impl Trainer {
    fn new(word_freqs: HashMap<Vec<u8>, u64>) -> Self {
        let mut types: Vec<(Vec<u8>, u64)> = word_freqs.into_iter().collect();
        types.sort_unstable();
        let symbols: Vec<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
        let mut trainer = Trainer {
            known: symbols.iter().cloned().collect(),
            symbols,
            words: Vec::with_capacity(types.len()),
            freqs: Vec::with_capacity(types.len()),
            pair_counts: HashMap::new(),
            pair_words: HashMap::new(),
            excluded: HashSet::new(),
            heap: BinaryHeap::new(),
        };
        for (idx, (bytes, freq)) in types.into_iter().enumerate() {
            let word: Vec<u32> = bytes.iter().map(|&b| u32::from(b)).collect();
            for w in word.windows(2) {
                let pair = (w[0], w[1]);
                *trainer.pair_counts.entry(pair).or_default() += freq;
                trainer.pair_words.entry(pair).or_default().insert(idx);
            }
            trainer.words.push(word);
            trainer.freqs.push(freq);
        }
        let pairs: Vec<Pair> = trainer.pair_counts.keys().copied().collect();
        for pair in pairs {
            trainer.push(pair);
        }
        trainer
    }

    fn push(&mut self, pair: Pair) {
        let count = self.pair_counts.get(&pair).copied().unwrap_or(0);
        if count > 0 && !self.excluded.contains(&pair) {
            self.heap.push(Candidate {
                count,
                left: self.symbols[pair.0 as usize].clone(),
                right: self.symbols[pair.1 as usize].clone(),
                pair,
            });
        }
    }

    /// Pop the best live pair whose concatenation is not already a token.
    fn next_merge(&mut self) -> Option<(Pair, Vec<u8>)> {
        while let Some(top) = self.heap.pop() {
            if self.excluded.contains(&top.pair) || self.pair_counts.get(&top.pair).copied().unwrap_or(0) != top.count {
                continue;
            }
            let mut merged = top.left;
            merged.extend_from_slice(&top.right);
            if self.known.contains(&merged) {
                // Another merge already produced this string; adding it
                // again would give one token two derivations.
                self.excluded.insert(top.pair);
                continue;
            }
            return Some((top.pair, merged));
        }
        None
    }

    fn apply(&mut self, pair: Pair, merged: Vec<u8>) {
        let new_id = self.symbols.len() as u32;
        self.known.insert(merged.clone());
        self.symbols.push(merged);

        let affected = self.pair_words.remove(&pair).unwrap_or_default();
        let mut touched = HashSet::new();
        for idx in affected {
            let freq = self.freqs[idx];
            let word = &self.words[idx];
            if word.len() < 2 {
                continue;
            }
            for w in word.windows(2) {
                let p = (w[0], w[1]);
                if let Some(c) = self.pair_counts.get_mut(&p) {
                    *c -= freq;
                }
                touched.insert(p);
            }
            let mut next = Vec::with_capacity(word.len());
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && (word[i], word[i + 1]) == pair {
                    next.push(new_id);
                    i += 2;
                } else {
                    next.push(word[i]);
                    i += 1;
                }
            }
            let still_present: HashSet<Pair> = next.windows(2).map(|w| (w[0], w[1])).collect();
            for w in next.windows(2) {
                let p = (w[0], w[1]);
                *self.pair_counts.entry(p).or_default() += freq;
                self.pair_words.entry(p).or_default().insert(idx);
                touched.insert(p);
            }
            for p in word.windows(2).map(|w| (w[0], w[1])) {
                if !still_present.contains(&p) {
                    if let Some(set) = self.pair_words.get_mut(&p) {
                        set.remove(&idx);
                    }
                }
            }
            self.words[idx] = next;
        }
        self.pair_counts.remove(&pair);
        let mut touched: Vec<Pair> = touched.into_iter().collect();
        touched.sort_unstable();
        for p in touched {
            if self.pair_counts.get(&p) == Some(&0) {
                self.pair_counts.remove(&p);
            }
            self.push(p);
        }
    }
}

/// Learn a byte-level BPE vocabulary from `corpus`.
///
/// Pair statistics are gathered over word types weighted by their
/// frequency. Each step merges the most frequent adjacent pair; ties go to
/// the lexicographically smallest (left bytes, right bytes). Training stops
/// at `config.vocab_size` tokens or when no pair is left.
pub fn train_bpe<I, S>(corpus: I, config: &TrainerConfig) -> Result<BpeVocab, BpeError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let budget = config.merge_budget()?;
    let mut word_freqs: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut any_text = false;
    for sentence in corpus {
        let sentence = sentence.as_ref();
        any_text |= !sentence.is_empty();
        for piece in pretokenize(sentence) {
            *word_freqs.entry(sentence.as_bytes()[piece].to_vec()).or_default() += 1;
        }
    }
    if !any_text {
        return Err(BpeError::EmptyCorpus);
    }
    info!(
        "training on {} word types, {} merges budgeted",
        word_freqs.len(),
        budget
    );

    let mut trainer = Trainer::new(word_freqs);
    let mut merges = Vec::with_capacity(budget);
    while merges.len() < budget {
        let Some((pair, merged)) = trainer.next_merge() else {
            debug!("pair statistics exhausted after {} merges", merges.len());
            break;
        };
        merges.push((
            bytes_to_token(&trainer.symbols[pair.0 as usize]),
            bytes_to_token(&trainer.symbols[pair.1 as usize]),
        ));
        trainer.apply(pair, merged);
    }

    let mut tokens: HashMap<String, u32> = HashMap::new();
    for special in &config.specials {
        let id = tokens.len() as u32;
        if tokens.insert(special.clone(), id).is_some() {
            return Err(BpeError::InvalidVocab(format!("special {special:?} listed twice")));
        }
    }
    for symbol in &trainer.symbols {
        let token = bytes_to_token(symbol);
        let id = tokens.len() as u32;
        if tokens.insert(token.clone(), id).is_some() {
            return Err(BpeError::InvalidVocab(format!(
                "special {token:?} collides with a byte token"
            )));
        }
    }
    BpeVocab::from_parts(tokens, merges, &config.specials, Some(config.vocab_size))
}
