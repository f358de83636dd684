use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::jsonl::for_each_sentence;
use crate::corpus::types::Instance;
use crate::corpus::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;

/// Counting knobs shared by vocabulary and matrix construction. Tokens whose
/// POS tag is in the stoplist are excluded from every count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub window: usize,
    pub min_count: usize,
    pub pos_stoplist: BTreeSet<String>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            window: 5,
            min_count: 1,
            pos_stoplist: ["PUNCT", "SYM", "記号", "補助記号"]
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

impl CorpusConfig {
    pub(crate) fn counts(&self, pos: &str) -> bool {
        !self.pos_stoplist.contains(pos)
    }
}

/// Which extraction rule a vocabulary follows: sentence-wide co-occurrence
/// columns (matrix A) or windowed context columns (matrices B, C, D rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VocabRole {
    AColumns,
    BColumns,
}

/// Token positions that count for matrix A: everything in the sentence
/// except the target occurrence itself.
pub(crate) fn a_positions<'a>(
    inst: &'a Instance,
    cfg: &'a CorpusConfig,
) -> impl Iterator<Item = usize> + 'a {
    (0..inst.tokens.len())
        .filter(move |&i| i != inst.target_index && cfg.counts(&inst.tokens[i].pos))
}

/// Token positions that count for matrix B: within `window` of the target,
/// clipped at the sentence edges, target excluded.
pub(crate) fn b_positions<'a>(
    inst: &'a Instance,
    cfg: &'a CorpusConfig,
) -> impl Iterator<Item = usize> + 'a {
    let lo = inst.target_index.saturating_sub(cfg.window);
    let hi = (inst.target_index + cfg.window).min(inst.tokens.len() - 1);
    (lo..=hi).filter(move |&i| i != inst.target_index && cfg.counts(&inst.tokens[i].pos))
}

/// Builds a frozen vocabulary of lemmas meeting the role's extraction rule
/// with frequency >= `cfg.min_count`, indexed in first-occurrence order.
pub fn build_vocab(instances: &[Instance], role: VocabRole, cfg: &CorpusConfig) -> Vocabulary {
    let mut order: Vec<String> = Vec::new();
    let mut counts: HashMap<String, usize> = HashMap::new();
    let mut bump = |lemma: &str| {
        if let Some(c) = counts.get_mut(lemma) {
            *c += 1;
        } else {
            counts.insert(lemma.to_string(), 1);
            order.push(lemma.to_string());
        }
    };
    for inst in instances {
        match role {
            VocabRole::AColumns => {
                for i in a_positions(inst, cfg) {
                    bump(&inst.tokens[i].lemma);
                }
            }
            VocabRole::BColumns => {
                for i in b_positions(inst, cfg) {
                    bump(&inst.tokens[i].lemma);
                }
            }
        }
    }
    let mut vocab = Vocabulary::new();
    for lemma in order {
        if counts[&lemma] >= cfg.min_count.max(1) {
            vocab.add(&lemma).expect("vocabulary is not frozen yet");
        }
    }
    vocab.freeze();
    vocab
}

/// Matrix A: one row per instance, entry (i, j) counts occurrences of
/// vocabulary lemma j anywhere in instance i's sentence, the target token
/// excluded.
pub fn build_matrix_a(
    instances: &[Instance],
    vocab_a: &Vocabulary,
    cfg: &CorpusConfig,
) -> SparseMatrix {
    let mut trips = Vec::new();
    for (row, inst) in instances.iter().enumerate() {
        for i in a_positions(inst, cfg) {
            if let Some(col) = vocab_a.index_of(&inst.tokens[i].lemma) {
                trips.push((row, col, 1.0));
            }
        }
    }
    SparseMatrix::from_triplets(instances.len(), vocab_a.len(), &trips)
        .expect("counting emits only in-range unit triplets")
}

/// Matrix B: one row per instance, entry (i, j) counts vocabulary lemma j
/// within the context window around the target.
pub fn build_matrix_b(
    instances: &[Instance],
    vocab_b: &Vocabulary,
    cfg: &CorpusConfig,
) -> SparseMatrix {
    let mut trips = Vec::new();
    for (row, inst) in instances.iter().enumerate() {
        for i in b_positions(inst, cfg) {
            if let Some(col) = vocab_b.index_of(&inst.tokens[i].lemma) {
                trips.push((row, col, 1.0));
            }
        }
    }
    SparseMatrix::from_triplets(instances.len(), vocab_b.len(), &trips)
        .expect("counting emits only in-range unit triplets")
}

/// Matrix C: plain sentence co-occurrence between windowed context words
/// (rows, over vocab B) and every other word of the same training sentence
/// (columns, over vocab A).
pub fn build_matrix_c_local(
    instances: &[Instance],
    vocab_b: &Vocabulary,
    vocab_a: &Vocabulary,
    cfg: &CorpusConfig,
) -> SparseMatrix {
    let mut trips = Vec::new();
    for inst in instances {
        for pc in b_positions(inst, cfg) {
            let Some(row) = vocab_b.index_of(&inst.tokens[pc].lemma) else {
                continue;
            };
            for pw in 0..inst.tokens.len() {
                if pw == pc || !cfg.counts(&inst.tokens[pw].pos) {
                    continue;
                }
                if let Some(col) = vocab_a.index_of(&inst.tokens[pw].lemma) {
                    trips.push((row, col, 1.0));
                }
            }
        }
    }
    SparseMatrix::from_triplets(vocab_b.len(), vocab_a.len(), &trips)
        .expect("counting emits only in-range unit triplets")
}

/// Matrix D: dependency-arc co-occurrence counted in a single streamed pass
/// over a large corpus. Arcs are direction-agnostic: each head/dependent
/// pair contributes on both orientations that the vocabularies admit.
pub fn build_matrix_d_global(
    global_corpus: &Path,
    vocab_b: &Vocabulary,
    vocab_a: &Vocabulary,
    cfg: &CorpusConfig,
) -> Result<SparseMatrix> {
    let mut counts: HashMap<(usize, usize), f64> = HashMap::new();
    for_each_sentence(global_corpus, |sent| {
        for (di, tok) in sent.tokens.iter().enumerate() {
            let Some(hi) = tok.head else { continue };
            let head = &sent.tokens[hi];
            debug_assert_ne!(hi, di, "self-heads are rejected at parse time");
            if !cfg.counts(&head.pos) || !cfg.counts(&tok.pos) {
                continue;
            }
            if let (Some(r), Some(c)) = (vocab_b.index_of(&head.lemma), vocab_a.index_of(&tok.lemma))
            {
                *counts.entry((r, c)).or_insert(0.0) += 1.0;
            }
            if let (Some(r), Some(c)) = (vocab_b.index_of(&tok.lemma), vocab_a.index_of(&head.lemma))
            {
                *counts.entry((r, c)).or_insert(0.0) += 1.0;
            }
        }
    })?;
    let trips: Vec<(usize, usize, f64)> = counts
        .into_iter()
        .map(|((r, c), v)| (r, c, v))
        .collect();
    SparseMatrix::from_triplets(vocab_b.len(), vocab_a.len(), &trips)
}

/// The matrices and vocabularies one target word's training set produces.
/// Shape coupling holds by construction: A and B share their row count, C
/// and D are |vocab B| x |vocab A|.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusMatrices {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub c_local: SparseMatrix,
    pub d_global: Option<SparseMatrix>,
    pub vocab_a: Vocabulary,
    pub vocab_b: Vocabulary,
    pub window: usize,
    pub pos_stoplist: BTreeSet<String>,
}

/// Builds vocabularies plus A, B, C (and D when a global corpus is given)
/// from one training set.
pub fn build_corpus_matrices(
    train: &[Instance],
    global_corpus: Option<&Path>,
    cfg: &CorpusConfig,
) -> Result<CorpusMatrices> {
    if train.is_empty() {
        return Err(Error::config("no training instances"));
    }
    let vocab_a = build_vocab(train, VocabRole::AColumns, cfg);
    let vocab_b = build_vocab(train, VocabRole::BColumns, cfg);
    let a = build_matrix_a(train, &vocab_a, cfg);
    let b = build_matrix_b(train, &vocab_b, cfg);
    let c_local = build_matrix_c_local(train, &vocab_b, &vocab_a, cfg);
    let d_global = match global_corpus {
        Some(path) => Some(build_matrix_d_global(path, &vocab_b, &vocab_a, cfg)?),
        None => None,
    };
    Ok(CorpusMatrices {
        a,
        b,
        c_local,
        d_global,
        vocab_a,
        vocab_b,
        window: cfg.window,
        pos_stoplist: cfg.pos_stoplist.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::types::Token;

    fn inst(target_index: usize, lemmas: &[&str]) -> Instance {
        Instance {
            id: "i".into(),
            target_lemma: lemmas[target_index].into(),
            target_index,
            sense_id: Some("s".into()),
            tokens: lemmas.iter().map(|l| Token::new(l, "N")).collect(),
        }
    }

    fn vocab_of(lemmas: &[&str]) -> Vocabulary {
        let mut v = Vocabulary::new();
        for l in lemmas {
            v.add(l).unwrap();
        }
        v.freeze();
        v
    }

    fn cfg(window: usize) -> CorpusConfig {
        CorpusConfig {
            window,
            ..CorpusConfig::default()
        }
    }

    #[test]
    fn vocab_counts_and_min_count() {
        let instances = vec![inst(0, &["t", "a", "b"])];
        let v = build_vocab(&instances, VocabRole::AColumns, &cfg(5));
        assert_eq!(v.len(), 2);

        let mut strict = cfg(5);
        strict.min_count = 2;
        let v2 = build_vocab(&instances, VocabRole::AColumns, &strict);
        assert!(v2.is_empty());
    }

    #[test]
    fn vocab_is_deterministic() {
        let instances = vec![inst(0, &["t", "b", "a", "b"]), inst(1, &["c", "t", "a"])];
        let v1 = build_vocab(&instances, VocabRole::AColumns, &cfg(5));
        let v2 = build_vocab(&instances, VocabRole::AColumns, &cfg(5));
        assert_eq!(v1, v2);
        assert_eq!(v1.index_of("b"), Some(0));
        assert_eq!(v1.index_of("a"), Some(1));
        assert_eq!(v1.index_of("c"), Some(2));
    }

    #[test]
    fn matrix_a_counts_sentence_wide_and_skips_target() {
        let instances = vec![inst(0, &["t", "a", "b", "a"])];
        let vocab = vocab_of(&["a", "b"]);
        let a = build_matrix_a(&instances, &vocab, &cfg(5));
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.get(0, 1), 1.0);
    }

    #[test]
    fn matrix_a_target_only_sentence_gives_zero_row() {
        let instances = vec![inst(0, &["t"])];
        let vocab = vocab_of(&["a"]);
        let a = build_matrix_a(&instances, &vocab, &cfg(5));
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn matrix_a_ignores_out_of_vocabulary_lemmas() {
        let instances = vec![inst(0, &["t", "z", "a"])];
        let vocab = vocab_of(&["a"]);
        let a = build_matrix_a(&instances, &vocab, &cfg(5));
        assert_eq!(a.row_dense(0), vec![1.0]);
    }

    #[test]
    fn matrix_b_window_of_one_sees_both_neighbors() {
        let instances = vec![inst(1, &["a", "t", "b"])];
        let vocab = vocab_of(&["a", "b"]);
        let b = build_matrix_b(&instances, &vocab, &cfg(1));
        assert_eq!(b.row_dense(0), vec![1.0, 1.0]);
    }

    #[test]
    fn matrix_b_window_excludes_distant_tokens() {
        let instances = vec![inst(2, &["x", "a", "t"])];
        let vocab = vocab_of(&["x", "a"]);
        let b = build_matrix_b(&instances, &vocab, &cfg(1));
        assert_eq!(b.row_dense(0), vec![0.0, 1.0]);
    }

    #[test]
    fn matrix_b_clips_at_sentence_start() {
        let instances = vec![inst(0, &["t", "a", "b", "c"])];
        let vocab = vocab_of(&["a", "b", "c"]);
        let b = build_matrix_b(&instances, &vocab, &cfg(2));
        assert_eq!(b.row_dense(0), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn matrix_c_counts_context_to_sentence_pairs() {
        let instances = vec![inst(0, &["t", "a", "b"])];
        let vocab_b = vocab_of(&["a", "b"]);
        let vocab_a = vocab_of(&["a", "b", "t"]);
        let c = build_matrix_c_local(&instances, &vocab_b, &vocab_a, &cfg(2));
        // row a: co-occurs with b and t; row b: with a and t
        assert_eq!(c.row_dense(0), vec![0.0, 1.0, 1.0]);
        assert_eq!(c.row_dense(1), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn matrix_c_empty_input_keeps_coupled_shape() {
        let vocab_b = vocab_of(&["a", "b"]);
        let vocab_a = vocab_of(&["a", "b", "t"]);
        let c = build_matrix_c_local(&[], &vocab_b, &vocab_a, &cfg(2));
        assert_eq!((c.rows(), c.cols()), (2, 3));
        assert_eq!(c.nnz(), 0);
    }

    #[test]
    fn stoplisted_pos_is_excluded_everywhere() {
        let mut instances = vec![inst(0, &["t", "a", "b"])];
        instances[0].tokens[2].pos = "PUNCT".into();
        let v = build_vocab(&instances, VocabRole::AColumns, &cfg(5));
        assert_eq!(v.len(), 1);
        let vocab = vocab_of(&["a", "b"]);
        let a = build_matrix_a(&instances, &vocab, &cfg(5));
        assert_eq!(a.row_dense(0), vec![1.0, 0.0]);
    }
}
