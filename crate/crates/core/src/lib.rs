//! Text-side tooling for building and analysing domain-specific language
//! models: corpus cleaning, byte-level BPE, masked-LM example generation,
//! strict BIO entity scoring, and vocabulary/segmentation analysis.

pub mod analysis;
pub mod bpe;
pub mod corpus;
pub mod masking;
pub mod ner;
pub mod report;
