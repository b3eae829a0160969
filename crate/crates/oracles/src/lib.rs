//! Slow, obviously-correct reference implementations. Tests compare the
//! production code in `biotok` against these; nothing here is shared with it.

pub mod bpe {
    use std::collections::{BTreeMap, BTreeSet};

    type Pair = (Vec<u8>, Vec<u8>);

    /// Split into pre-tokens: non-whitespace runs, each taking one preceding
    /// ASCII space when the whitespace before it ends in one; all other
    /// whitespace runs stand alone.
    pub fn words(text: &str) -> Vec<Vec<u8>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out: Vec<String> = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let mut ws = String::new();
            while i < chars.len() && chars[i].is_whitespace() {
                ws.push(chars[i]);
                i += 1;
            }
            let mut word = String::new();
            while i < chars.len() && !chars[i].is_whitespace() {
                word.push(chars[i]);
                i += 1;
            }
            if word.is_empty() {
                out.push(ws);
            } else if ws.ends_with(' ') {
                let rest = &ws[..ws.len() - 1];
                if !rest.is_empty() {
                    out.push(rest.to_string());
                }
                out.push(format!(" {word}"));
            } else {
                if !ws.is_empty() {
                    out.push(ws);
                }
                out.push(word);
            }
        }
        out.into_iter().map(String::into_bytes).collect()
    }

    /// Brute-force BPE: every step recounts all adjacent pairs over the
    /// running text, picks the most frequent, breaks ties by the smallest
    /// (left, right) byte strings, skips pairs whose concatenation is
    /// already a symbol, and merges left to right everywhere.
    pub fn merges(corpus: &[&str], max_merges: usize) -> Vec<(Vec<u8>, Vec<u8>)> {
        let mut seqs: Vec<Vec<Vec<u8>>> = corpus
            .iter()
            .flat_map(|s| words(s))
            .map(|w| w.into_iter().map(|b| vec![b]).collect())
            .collect();
        let mut symbols: BTreeSet<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
        let mut learned = Vec::new();
        while learned.len() < max_merges {
            let mut counts: BTreeMap<(Vec<u8>, Vec<u8>), usize> = BTreeMap::new();
            for seq in &seqs {
                for w in seq.windows(2) {
                    *counts.entry((w[0].clone(), w[1].clone())).or_default() += 1;
                }
            }
            let mut best: Option<(Pair, usize)> = None;
            for (pair, count) in counts {
                let joined = [pair.0.as_slice(), pair.1.as_slice()].concat();
                if symbols.contains(&joined) {
                    continue;
                }
                // BTreeMap iterates pairs ascending, so strict > keeps the
                // smallest pair among equal counts.
                if best.as_ref().is_none_or(|(_, c)| count > *c) {
                    best = Some((pair, count));
                }
            }
            let Some(((left, right), _)) = best else { break };
            let joined = [left.as_slice(), right.as_slice()].concat();
            for seq in &mut seqs {
                let mut next = Vec::new();
                let mut i = 0;
                while i < seq.len() {
                    if i + 1 < seq.len() && seq[i] == left && seq[i + 1] == right {
                        next.push(joined.clone());
                        i += 2;
                    } else {
                        next.push(seq[i].clone());
                        i += 1;
                    }
                }
                *seq = next;
            }
            symbols.insert(joined);
            learned.push((left, right));
        }
        learned
    }

    /// Segment `word` by replaying `merges` in rank order over the whole
    /// word, one rule at a time.
    pub fn segment_word(word: &[u8], merges: &[(Vec<u8>, Vec<u8>)]) -> Vec<Vec<u8>> {
        let mut seq: Vec<Vec<u8>> = word.iter().map(|&b| vec![b]).collect();
        for (left, right) in merges {
            let mut next = Vec::new();
            let mut i = 0;
            while i < seq.len() {
                if i + 1 < seq.len() && &seq[i] == left && &seq[i + 1] == right {
                    next.push([left.as_slice(), right.as_slice()].concat());
                    i += 2;
                } else {
                    next.push(seq[i].clone());
                    i += 1;
                }
            }
            seq = next;
        }
        seq
    }

    /// Subword count of `text` under `merges`.
    pub fn count(text: &str, merges: &[(Vec<u8>, Vec<u8>)]) -> usize {
        words(text).iter().map(|w| segment_word(w, merges).len()).sum()
    }
}

pub mod ner {
    use std::collections::{BTreeMap, BTreeSet};

    /// (sentence, start, end, type)
    pub type Span = (usize, usize, usize, String);

    /// Enumerate spans of one tag sequence: a span opens at every B-X and at
    /// any I-X not continuing an open X span, and runs while I-X follows.
    pub fn spans(sentence: usize, tags: &[&str]) -> BTreeSet<Span> {
        let mut out = BTreeSet::new();
        let mut open: Option<(usize, String)> = None;
        for (i, tag) in tags.iter().enumerate() {
            let (prefix, ty) = match tag.split_once('-') {
                Some((p, t)) => (p, t.to_string()),
                None => ("O", String::new()),
            };
            let continues = prefix == "I" && open.as_ref().is_some_and(|(_, t)| *t == ty);
            if !continues {
                if let Some((s, t)) = open.take() {
                    out.insert((sentence, s, i, t));
                }
                if prefix != "O" {
                    open = Some((i, ty));
                }
            }
        }
        if let Some((s, t)) = open {
            out.insert((sentence, s, tags.len(), t));
        }
        out
    }

    #[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
    pub struct Counts {
        pub tp: usize,
        pub fp: usize,
        pub fn_: usize,
    }

    /// Micro counts and per-type counts by materialising both span sets.
    pub fn score(gold: &[Vec<&str>], pred: &[Vec<&str>]) -> (Counts, BTreeMap<String, Counts>) {
        let mut g = BTreeSet::new();
        let mut p = BTreeSet::new();
        for (i, tags) in gold.iter().enumerate() {
            g.extend(spans(i, tags));
        }
        for (i, tags) in pred.iter().enumerate() {
            p.extend(spans(i, tags));
        }
        let mut per_type: BTreeMap<String, Counts> = BTreeMap::new();
        for s in g.intersection(&p) {
            per_type.entry(s.3.clone()).or_default().tp += 1;
        }
        for s in p.difference(&g) {
            per_type.entry(s.3.clone()).or_default().fp += 1;
        }
        for s in g.difference(&p) {
            per_type.entry(s.3.clone()).or_default().fn_ += 1;
        }
        let micro = Counts {
            tp: g.intersection(&p).count(),
            fp: p.difference(&g).count(),
            fn_: g.difference(&p).count(),
        };
        (micro, per_type)
    }

    /// Per-bucket counts: gold spans (matched or missed) use their own
    /// bucket, spurious predicted spans theirs.
    pub fn bucketed(
        gold: &[Vec<&str>],
        pred: &[Vec<&str>],
        bucket: impl Fn(&Span) -> usize,
    ) -> BTreeMap<usize, Counts> {
        let mut g = BTreeSet::new();
        let mut p = BTreeSet::new();
        for (i, tags) in gold.iter().enumerate() {
            g.extend(spans(i, tags));
        }
        for (i, tags) in pred.iter().enumerate() {
            p.extend(spans(i, tags));
        }
        let mut out: BTreeMap<usize, Counts> = BTreeMap::new();
        for s in &g {
            let c = out.entry(bucket(s)).or_default();
            if p.contains(s) {
                c.tp += 1;
            } else {
                c.fn_ += 1;
            }
        }
        for s in p.difference(&g) {
            out.entry(bucket(s)).or_default().fp += 1;
        }
        out
    }

    pub fn prf(c: Counts) -> (f64, f64, f64) {
        let p = if c.tp + c.fp == 0 {
            0.0
        } else {
            c.tp as f64 / (c.tp + c.fp) as f64
        };
        let r = if c.tp + c.fn_ == 0 {
            0.0
        } else {
            c.tp as f64 / (c.tp + c.fn_) as f64
        };
        let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        (p, r, f)
    }
}

pub mod dedup {
    /// Whether each `(source, sentence)` survives first-occurrence dedup,
    /// comparing every item with every earlier one.
    pub fn keep(items: &[(&str, &str)], global: bool) -> Vec<bool> {
        let norm = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
        (0..items.len())
            .map(|i| !(0..i).any(|j| (global || items[j].0 == items[i].0) && norm(items[j].1) == norm(items[i].1)))
            .collect()
    }
}

/// Random inputs shared by property tests.
pub mod gen {
    use rand::seq::SliceRandom;
    use rand::Rng;

    /// Text over a small alphabet with spaces, newlines and multi-byte
    /// characters, so merges are frequent and byte boundaries get exercised.
    pub fn small_text<R: Rng>(rng: &mut R, max_bytes: usize) -> String {
        const PIECES: [&str; 12] = ["a", "b", "c", "ab", " ", " ", "\n", "ñ", "é", "  ", "aa", "ba"];
        let mut s = String::new();
        loop {
            let piece = PIECES.choose(rng).unwrap();
            if s.len() + piece.len() > max_bytes {
                return s;
            }
            s.push_str(piece);
            if rng.gen_bool(0.03) {
                return s;
            }
        }
    }

    /// Arbitrary UTF-8 drawn from several script ranges, controls included.
    pub fn any_text<R: Rng>(rng: &mut R, max_chars: usize) -> String {
        let n = rng.gen_range(0..=max_chars);
        (0..n)
            .map(|_| loop {
                let cp = match rng.gen_range(0..6) {
                    0 => rng.gen_range(0x20..0x7f),
                    1 => rng.gen_range(0..0x20),
                    2 => rng.gen_range(0xa0..0x250),
                    3 => rng.gen_range(0x370..0x3000),
                    4 => rng.gen_range(0x1f300..0x1fa00),
                    _ => rng.gen_range(0..0x110000),
                };
                if let Some(c) = char::from_u32(cp) {
                    break c;
                }
            })
            .collect()
    }

    /// A BIO tag sequence of length `len` over `types`. With `legal`, every
    /// I-X continues an X span.
    pub fn tags<R: Rng>(rng: &mut R, len: usize, types: &[&str], legal: bool) -> Vec<String> {
        let mut out: Vec<String> = Vec::with_capacity(len);
        for _ in 0..len {
            let ty = types.choose(rng).unwrap();
            let tag = match rng.gen_range(0..3) {
                0 => "O".to_string(),
                1 => format!("B-{ty}"),
                _ => {
                    let prev = out.last().and_then(|t| t.split_once('-')).map(|(_, t)| t.to_string());
                    match (legal, prev) {
                        (true, Some(p)) => format!("I-{p}"),
                        (true, None) => "O".to_string(),
                        (false, _) => format!("I-{ty}"),
                    }
                }
            };
            out.push(tag);
        }
        out
    }

    /// A corpus of tag sequences: `sentences` sentences of 0..=max_len tags.
    pub fn tag_corpus<R: Rng>(rng: &mut R, sentences: usize, max_len: usize, legal: bool) -> Vec<Vec<String>> {
        const TYPES: [&str; 3] = ["DRUG", "DIS", "PROC"];
        (0..sentences)
            .map(|_| {
                let len = rng.gen_range(0..=max_len);
                tags(rng, len, &TYPES, legal)
            })
            .collect()
    }

    /// Perturb a tag corpus: each tag is replaced with probability `p`.
    pub fn perturb<R: Rng>(rng: &mut R, corpus: &[Vec<String>], p: f64, legal: bool) -> Vec<Vec<String>> {
        corpus
            .iter()
            .map(|sent| {
                let fresh = tags(rng, sent.len(), &["DRUG", "DIS", "PROC"], legal);
                let mut out: Vec<String> = sent
                    .iter()
                    .zip(fresh)
                    .map(|(old, new)| if rng.gen_bool(p) { new } else { old.clone() })
                    .collect();
                if legal {
                    repair(&mut out);
                }
                out
            })
            .collect()
    }

    /// Turn every orphan I-X into B-X.
    pub fn repair(tags: &mut [String]) {
        for i in 0..tags.len() {
            if let Some(ty) = tags[i].strip_prefix("I-") {
                let ok = i > 0 && tags[i - 1].split_once('-').is_some_and(|(_, t)| t == ty);
                if !ok {
                    tags[i] = format!("B-{ty}");
                }
            }
        }
    }

    /// Spanish-looking sentences from a fixed word list, some repeated.
    pub fn sentences<R: Rng>(rng: &mut R, n: usize) -> Vec<String> {
        const WORDS: [&str; 16] = [
            "el",
            "paciente",
            "presenta",
            "fiebre",
            "alta",
            "y",
            "dolor",
            "abdominal",
            "con",
            "la",
            "insulina",
            "tratamiento",
            "de",
            "los",
            "síntomas",
            "mejoran",
        ];
        let mut out: Vec<String> = Vec::with_capacity(n);
        for _ in 0..n {
            if !out.is_empty() && rng.gen_bool(0.25) {
                let again = out.choose(rng).unwrap().clone();
                out.push(again);
                continue;
            }
            let len = rng.gen_range(4..10);
            let words: Vec<&str> = (0..len).map(|_| *WORDS.choose(rng).unwrap()).collect();
            let mut s = words.join(" ");
            s[..1].make_ascii_uppercase();
            s.push('.');
            out.push(s);
        }
        out
    }
}
