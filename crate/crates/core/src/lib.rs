//! Treebank engineering toolkit for CoNLL-U dependency corpora.
//!
//! * [`conllu`]: object model, reader, canonical writer, structural checks.
//! * [`pattern`]: Grew-style graph patterns and an exact matcher.
//! * [`validate`]: rulesets with error/warning levels, dismissals, rule
//!   self-tests and stale-tree scanning.
//! * [`convert`]: legacy (pseudo-token) vs. concatenative multiword-token
//!   schemes, plus BIES tags.
//! * [`score`]: CoNLL 2018 shared-task metrics over differing tokenizations.
//! * [`agree`]: inter-annotator agreement (Cohen's kappa) and validator audits.
//! * [`stats`]: corpus profiling and cross-corpus vocabulary comparison.

pub mod agree;
pub mod conllu;
pub mod convert;
pub mod pattern;
pub mod score;
pub mod stats;
pub mod validate;

pub use conllu::{Corpus, Feats, Misc, MwtSpan, Sentence, Word};
