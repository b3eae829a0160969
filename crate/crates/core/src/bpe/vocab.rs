use std::collections::HashMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::bytes::{bytes_to_token, token_to_bytes};
use super::pretokenize::pretokenize;
use super::BpeError;

pub const MASK_TOKEN: &str = "<mask>";
pub const UNK_TOKEN: &str = "<unk>";

/// Reserved tokens, in id order, for freshly trained vocabularies.
pub const DEFAULT_SPECIALS: [&str; 5] = ["<s>", "<pad>", "</s>", UNK_TOKEN, MASK_TOKEN];

/// A byte-level BPE vocabulary: token strings, their ids, and the ranked
/// merge list that produces every non-base token.
///
/// Ids are dense (`0..size`). Special tokens carry no bytes; every other
/// token is a printable rendering of a byte string.
#[derive(Debug, Clone)]
pub struct BpeVocab {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    // None for specials
    token_bytes: Vec<Option<Vec<u8>>>,
    specials: Vec<u32>,
    byte_ids: [u32; 256],
    merges: Vec<(u32, u32)>,
    merge_ranks: HashMap<(u32, u32), (u32, u32)>,
    configured_size: Option<usize>,
}

/// One encoded string: parallel subword strings and ids, plus the
/// partition of positions into pre-token (word) groups.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Segmentation {
    pub subwords: Vec<String>,
    pub ids: Vec<u32>,
    #[serde(with = "group_pairs")]
    pub word_groups: Vec<Range<usize>>,
}

impl Segmentation {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Append `other`, shifting its word groups past the current end.
    pub fn extend(&mut self, other: &Segmentation) {
        let offset = self.ids.len();
        self.subwords.extend(other.subwords.iter().cloned());
        self.ids.extend_from_slice(&other.ids);
        self.word_groups
            .extend(other.word_groups.iter().map(|g| g.start + offset..g.end + offset));
    }
}

mod group_pairs {
    use std::ops::Range;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(groups: &[Range<usize>], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[usize; 2]> = groups.iter().map(|g| [g.start, g.end]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Range<usize>>, D::Error> {
        let pairs = Vec::<[usize; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[s, e]| s..e).collect())
    }
}

impl BpeVocab {
    /// Assemble a vocabulary from a token→id map and a ranked merge list,
    /// validating it the same way for trained and loaded vocabularies.
    ///
    /// `specials` names the reserved tokens; they must be present in `tokens`.
    pub fn from_parts(
        tokens: HashMap<String, u32>,
        merges: Vec<(String, String)>,
        specials: &[String],
        configured_size: Option<usize>,
    ) -> Result<Self, BpeError> {
        let size = tokens.len();
        let mut by_id: Vec<Option<String>> = vec![None; size];
        for (token, &id) in &tokens {
            let slot = by_id.get_mut(id as usize).ok_or_else(|| {
                BpeError::InvalidVocab(format!(
                    "id {id} of {token:?} is outside 0..{size}; ids must be contiguous"
                ))
            })?;
            if let Some(other) = slot {
                return Err(BpeError::InvalidVocab(format!(
                    "id {id} assigned to both {other:?} and {token:?}"
                )));
            }
            *slot = Some(token.clone());
        }
        // HashMap keys are unique and every slot is filled exactly once, so
        // by_id is a bijection onto 0..size here.
        let by_id: Vec<String> = by_id.into_iter().map(Option::unwrap).collect();

        let mut special_ids = Vec::with_capacity(specials.len());
        for name in specials {
            let id = *tokens
                .get(name)
                .ok_or_else(|| BpeError::InvalidVocab(format!("special token {name:?} missing from vocabulary")))?;
            special_ids.push(id);
        }
        special_ids.sort_unstable();
        special_ids.dedup();

        let mut token_bytes = Vec::with_capacity(size);
        let mut byte_ids = [u32::MAX; 256];
        for (id, token) in by_id.iter().enumerate() {
            if special_ids.binary_search(&(id as u32)).is_ok() {
                token_bytes.push(None);
                continue;
            }
            let bytes = token_to_bytes(token).ok_or_else(|| {
                BpeError::InvalidVocab(format!(
                    "token {token:?} (id {id}) uses characters outside the byte alphabet"
                ))
            })?;
            if bytes.is_empty() {
                return Err(BpeError::InvalidVocab(format!("empty token at id {id}")));
            }
            if let [b] = bytes[..] {
                byte_ids[b as usize] = id as u32;
            }
            token_bytes.push(Some(bytes));
        }
        if let Some(b) = byte_ids.iter().position(|&id| id == u32::MAX) {
            return Err(BpeError::InvalidVocab(format!(
                "base byte 0x{b:02x} ({:?}) has no token",
                bytes_to_token(&[b as u8])
            )));
        }

        let mut merge_ids = Vec::with_capacity(merges.len());
        let mut merge_ranks = HashMap::with_capacity(merges.len());
        for (rank, (left, right)) in merges.into_iter().enumerate() {
            let invalid = |reason: String| BpeError::InvalidMerge {
                rank,
                left: left.clone(),
                right: right.clone(),
                reason,
            };
            let lookup = |part: &str| -> Result<u32, BpeError> {
                match tokens.get(part) {
                    Some(&id) if token_bytes[id as usize].is_some() => Ok(id),
                    Some(_) => Err(invalid(format!("{part:?} is a special token"))),
                    None => Err(invalid(format!("unknown token {part:?}"))),
                }
            };
            let (l, r) = (lookup(&left)?, lookup(&right)?);
            let merged = format!("{left}{right}");
            let out = *tokens
                .get(&merged)
                .ok_or_else(|| invalid(format!("result {merged:?} is not in the vocabulary")))?;
            if merge_ranks.insert((l, r), (rank as u32, out)).is_some() {
                return Err(invalid("duplicate merge".to_string()));
            }
            merge_ids.push((l, r));
        }

        Ok(BpeVocab {
            tokens: by_id,
            ids: tokens,
            token_bytes,
            specials: special_ids,
            byte_ids,
            merges: merge_ids,
            merge_ranks,
            configured_size,
        })
    }

    /// Total number of tokens, specials included.
    pub fn size(&self) -> usize {
        self.tokens.len()
    }

    /// The budget the vocabulary was trained for, when known.
    pub fn configured_size(&self) -> Option<usize> {
        self.configured_size
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    /// Tokens in id order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    /// Merges in rank order, as token strings.
    pub fn merges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.merges
            .iter()
            .map(|&(l, r)| (self.tokens[l as usize].as_str(), self.tokens[r as usize].as_str()))
    }

    pub fn num_merges(&self) -> usize {
        self.merges.len()
    }

    /// Raw bytes of a non-special token.
    pub fn token_bytes(&self, id: u32) -> Option<&[u8]> {
        self.token_bytes.get(id as usize)?.as_deref()
    }

    /// Ids of the reserved tokens, ascending.
    pub fn special_ids(&self) -> &[u32] {
        &self.specials
    }

    pub fn special_tokens(&self) -> Vec<&str> {
        self.specials
            .iter()
            .map(|&id| self.tokens[id as usize].as_str())
            .collect()
    }

    pub fn is_special(&self, id: u32) -> bool {
        self.specials.binary_search(&id).is_ok()
    }

    pub fn mask_id(&self) -> Option<u32> {
        self.id(MASK_TOKEN).filter(|&id| self.is_special(id))
    }

    /// Encode `text`: pre-tokenize, then apply merges in rank order inside
    /// each pre-token. Never produces unknown tokens.
    pub fn encode(&self, text: &str) -> Segmentation {
        let mut seg = Segmentation::default();
        for piece in pretokenize(text) {
            let start = seg.ids.len();
            self.encode_piece(&text.as_bytes()[piece], &mut seg.ids);
            seg.word_groups.push(start..seg.ids.len());
        }
        seg.subwords = seg.ids.iter().map(|&id| self.tokens[id as usize].clone()).collect();
        seg
    }

    /// Number of subwords `text` encodes to.
    pub fn count_subwords(&self, text: &str) -> usize {
        let mut ids = Vec::new();
        for piece in pretokenize(text) {
            self.encode_piece(&text.as_bytes()[piece], &mut ids);
        }
        ids.len()
    }

    fn encode_piece(&self, bytes: &[u8], out: &mut Vec<u32>) {
        let mut word: Vec<u32> = bytes.iter().map(|&b| self.byte_ids[b as usize]).collect();
        while word.len() > 1 {
            let best = word
                .windows(2)
                .filter_map(|w| {
                    self.merge_ranks
                        .get(&(w[0], w[1]))
                        .map(|&(rank, out)| (rank, (w[0], w[1]), out))
                })
                .min();
            let Some((_, pair, merged)) = best else { break };
            let mut next = Vec::with_capacity(word.len());
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && (word[i], word[i + 1]) == pair {
                    next.push(merged);
                    i += 2;
                } else {
                    next.push(word[i]);
                    i += 1;
                }
            }
            word = next;
        }
        out.extend(word);
    }

    /// Bytes behind `ids`; specials contribute their literal text.
    pub fn decode_bytes(&self, ids: &[u32]) -> Result<Vec<u8>, BpeError> {
        let mut out = Vec::new();
        for (position, &id) in ids.iter().enumerate() {
            match self.token_bytes.get(id as usize) {
                Some(Some(bytes)) => out.extend_from_slice(bytes),
                Some(None) => out.extend_from_slice(self.tokens[id as usize].as_bytes()),
                None => {
                    return Err(BpeError::IdOutOfRange {
                        id,
                        position,
                        size: self.size(),
                    })
                }
            }
        }
        Ok(out)
    }

    pub fn decode(&self, ids: &[u32]) -> Result<String, BpeError> {
        String::from_utf8(self.decode_bytes(ids)?).map_err(|_| BpeError::InvalidUtf8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> BpeVocab {
        let mut tokens: HashMap<String, u32> = HashMap::new();
        for (i, s) in DEFAULT_SPECIALS.iter().enumerate() {
            tokens.insert(s.to_string(), i as u32);
        }
        for b in 0..=255u8 {
            tokens.insert(bytes_to_token(&[b]), 5 + b as u32);
        }
        for t in ["ab", "Ġab", "abab"] {
            let n = tokens.len() as u32;
            tokens.insert(t.to_string(), n);
        }
        let merges = vec![
            ("a".to_string(), "b".to_string()),
            ("Ġ".to_string(), "ab".to_string()),
            ("ab".to_string(), "ab".to_string()),
        ];
        let specials: Vec<String> = DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect();
        BpeVocab::from_parts(tokens, merges, &specials, None).unwrap()
    }

    #[test]
    fn empty_input() {
        let v = toy();
        assert!(v.encode("").is_empty());
        assert_eq!(v.decode(&[]).unwrap(), "");
    }

    #[test]
    fn merges_apply_in_rank_order() {
        let v = toy();
        let seg = v.encode("abab ab");
        assert_eq!(seg.subwords, vec!["abab", "Ġab"]);
        assert_eq!(seg.word_groups, vec![0..1, 1..2]);
        assert_eq!(v.decode(&seg.ids).unwrap(), "abab ab");
    }

    #[test]
    fn out_of_range_id_names_position() {
        let v = toy();
        let err = v.decode(&[5, v.size() as u32]).unwrap_err();
        assert!(matches!(err, BpeError::IdOutOfRange { position: 1, .. }));
    }

    #[test]
    fn special_lookup() {
        let v = toy();
        assert_eq!(v.mask_id(), Some(4));
        assert!(v.is_special(0));
        assert!(!v.is_special(5));
        assert_eq!(v.decode(&[0, 5 + b'a' as u32]).unwrap(), "<s>a");
    }

    #[test]
    fn rejects_merge_with_unknown_part() {
        let v = toy();
        let mut tokens: HashMap<String, u32> = v.tokens().enumerate().map(|(i, t)| (t.to_string(), i as u32)).collect();
        tokens.remove("abab");
        let specials: Vec<String> = DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect();
        let err = BpeVocab::from_parts(tokens, vec![("a".into(), "zz".into())], &specials, None).unwrap_err();
        assert!(matches!(err, BpeError::InvalidMerge { rank: 0, .. }));
    }

    #[test]
    fn round_trips_awkward_text() {
        let v = toy();
        for s in ["áçñ €", "\u{0}\u{7f}\t\r\n", "😀 🧬  x", " lead", "trail  "] {
            let seg = v.encode(s);
            assert_eq!(v.decode(&seg.ids).unwrap(), s);
        }
    }
}
