//! Supervised word sense disambiguation built on non-negative matrix
//! factorization of co-occurrence matrices.
//!
//! The pipeline ingests dependency-annotated, sense-tagged instances of a
//! target word, builds co-occurrence matrices over its contexts, factorizes
//! them (either a single matrix or three coupled matrices with interleaved
//! updates), folds per-sense centroids into the latent space and classifies
//! test occurrences by cosine similarity.
//!
//! Three model variants are provided:
//!
//! - `baseline1`: factorize the sentence co-occurrence matrix A only.
//! - `local`: interleave A with the window-context matrix B and a
//!   context-context matrix C counted over the training sentences.
//! - `global`: as `local`, but the third matrix D counts dependency-arc
//!   co-occurrences over a large external corpus, which densifies the
//!   factorization signal for small training sets.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod interleaved;
pub mod matrix;
pub mod nmf;
pub mod synth;
pub mod wsd;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, SparseMatrix};
