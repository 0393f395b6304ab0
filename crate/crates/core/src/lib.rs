//! Preprocessing, evaluation and system-combination toolkit for
//! Arabic-English machine translation experiments.
//!
//! The crate is organized by pipeline stage:
//!
//! * [`normalize`] - orthographic normalization of Alif, Ya and diacritics.
//! * [`scheme`] - the Raw / ATB / D3 tokenization schemes and detokenization.
//! * [`bpe`] - byte-pair encoding learn / apply / undo and the merge-file format.
//! * [`corpus`] - parallel corpora, reference-scheme length filtering,
//!   nested learning-curve splits and vocabulary statistics.
//! * [`bleu`] - case-insensitive multi-reference BLEU, smoothed sentence
//!   BLEU, bootstrap confidence intervals and paired p-values.
//! * [`select`] - length-based and oracle selection between two systems.

pub mod bleu;
pub mod bpe;
pub mod corpus;
mod error;
pub mod normalize;
pub mod scheme;
pub mod select;

pub use error::{Error, Result};
pub use normalize::{normalize_text, NormalizeOptions, NormalizedText};
pub use scheme::{detokenize, segment_word, tokenize, CliticTable, Scheme, TokenSequence};
