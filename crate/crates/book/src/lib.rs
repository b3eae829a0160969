//! The guide's chapters, compiled as doc tests so every listing in the book
//! is checked by `cargo test`. One module per chapter keeps failures easy to
//! trace back to their source file.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/corpus.md")]
pub mod corpus {}
#[doc = include_str!("../../../book/src/bpe.md")]
pub mod bpe {}
#[doc = include_str!("../../../book/src/masking.md")]
pub mod masking {}
#[doc = include_str!("../../../book/src/ner.md")]
pub mod ner {}
#[doc = include_str!("../../../book/src/analysis.md")]
pub mod analysis {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
