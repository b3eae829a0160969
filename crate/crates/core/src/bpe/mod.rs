//! Byte-level byte-pair encoding.
//!
//! [`train_bpe`] learns a ranked merge list from a sentence stream,
//! [`BpeVocab::encode`] applies it, and [`BpeVocab::decode`] inverts it byte
//! for byte. Vocabularies round-trip through the usual `vocab.json` +
//! `merges.txt` pair, so externally trained byte-level BPE models load too.

mod bytes;
mod io;
mod pretokenize;
mod train;
mod vocab;

pub use bytes::{byte_to_char, bytes_to_token, char_to_byte, token_to_bytes};
pub use io::{load_vocab, save_vocab, MERGES_FILE, META_FILE, VOCAB_FILE};
pub use pretokenize::pretokenize;
pub use train::{train_bpe, TrainerConfig};
pub use vocab::{BpeVocab, Segmentation, DEFAULT_SPECIALS, MASK_TOKEN, UNK_TOKEN};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BpeError {
    #[error("vocabulary size {requested} leaves no room for merges (need more than {minimum})")]
    VocabTooSmall { requested: usize, minimum: usize },
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("token id {id} at position {position} is out of range (vocabulary has {size} tokens)")]
    IdOutOfRange { id: u32, position: usize, size: usize },
    #[error("decoded bytes are not valid UTF-8")]
    InvalidUtf8,
    #[error("invalid vocabulary: {0}")]
    InvalidVocab(String),
    #[error("merge #{rank} ({left} {right}): {reason}")]
    InvalidMerge {
        rank: usize,
        left: String,
        right: String,
        reason: String,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}
