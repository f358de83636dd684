//! Ingestion of dependency-annotated, sense-tagged instances and raw
//! sentences, plus construction of the co-occurrence matrices A, B, C and D.

mod build;
mod jsonl;
mod store;
mod types;
mod vocab;

pub use build::{
    build_corpus_matrices, build_matrix_a, build_matrix_b, build_matrix_c_local,
    build_matrix_d_global, build_vocab, CorpusConfig, CorpusMatrices, VocabRole,
};
pub(crate) use build::{a_positions, b_positions};
pub use jsonl::{
    for_each_sentence, load_instances, load_sentences, write_instances, write_sentences,
};
pub use store::{load_matrices_dir, save_matrices_dir, MatricesDir};
pub use types::{Instance, Sentence, Token};
pub use vocab::Vocabulary;
