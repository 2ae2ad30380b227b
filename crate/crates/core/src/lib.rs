//! Normalization and classification of noisy free-text shipping addresses.
//!
//! The crate is organised around the offline/online split of the workflow:
//!
//! * [`corpus`] loads address records and counts tokens across the corpus.
//! * [`textmetrics`] holds the two string comparators (Levenshtein, Metaphone).
//! * [`preprocess`] builds the split/merge/bigram/spell lookup tables from
//!   corpus statistics and applies the five-stage cleaning pipeline.
//! * [`embed`] trains skip-gram vectors and composes TF-IDF weighted address
//!   vectors.
//! * [`classify`] is a softmax regression over address vectors.
//! * [`addrlm`] is an additive-smoothed n-gram model used to flag junk input.
//! * [`synthgen`] produces labelled synthetic corpora with injected errors.

pub mod addrlm;
pub mod classify;
pub mod corpus;
pub mod embed;
mod error;
pub mod experiment;
pub mod preprocess;
pub mod rng;
pub mod synthgen;
pub mod textmetrics;

pub use error::{Error, Result};

/// Version stamp written into every serialized artifact.
pub const ARTIFACT_VERSION: u32 = 1;
