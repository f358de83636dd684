//! Deterministic synthetic corpora with cleanly separable senses, used by
//! the test suite and benchmarks.
//!
//! Every sense owns a disjoint context vocabulary. Instance sentences draw
//! their non-target tokens from the instance's sense vocabulary, and global
//! sentences draw all tokens from one sense's vocabulary with chain-shaped
//! dependency arcs, so the dependency matrix D is block structured.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Instance, Sentence, Token};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthConfig {
    pub senses: usize,
    pub train_per_sense: usize,
    pub test_per_sense: usize,
    pub vocab_per_sense: usize,
    pub sentence_len: usize,
    pub global_sentences: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            senses: 2,
            train_per_sense: 20,
            test_per_sense: 20,
            vocab_per_sense: 8,
            sentence_len: 9,
            global_sentences: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthCorpus {
    pub target_lemma: String,
    pub train: Vec<Instance>,
    pub test: Vec<Instance>,
    pub global: Vec<Sentence>,
}

fn context_lemma(sense: usize, word: usize) -> String {
    format!("w{sense}_{word}")
}

fn chain_token(lemma: String, position: usize) -> Token {
    let mut tok = Token::new(&lemma, "N");
    if position > 0 {
        tok = tok.with_head(position - 1, "dep");
    }
    tok
}

fn make_instance(
    id: String,
    sense: usize,
    cfg: &SynthConfig,
    rng: &mut ChaCha8Rng,
) -> Instance {
    let len = cfg.sentence_len.max(2);
    let target_index = rng.random_range(0..len);
    let tokens = (0..len)
        .map(|q| {
            let lemma = if q == target_index {
                "target".to_string()
            } else {
                context_lemma(sense, rng.random_range(0..cfg.vocab_per_sense))
            };
            chain_token(lemma, q)
        })
        .collect();
    Instance {
        id,
        target_lemma: "target".into(),
        target_index,
        sense_id: Some(format!("s{sense}")),
        tokens,
    }
}

/// Generates a corpus; the same config reproduces the same corpus.
pub fn generate(cfg: &SynthConfig) -> SynthCorpus {
    assert!(cfg.senses >= 1 && cfg.vocab_per_sense >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut train = Vec::with_capacity(cfg.senses * cfg.train_per_sense);
    for sense in 0..cfg.senses {
        for i in 0..cfg.train_per_sense {
            train.push(make_instance(
                format!("s{sense}_train_{i}"),
                sense,
                cfg,
                &mut rng,
            ));
        }
    }
    let mut test = Vec::with_capacity(cfg.senses * cfg.test_per_sense);
    for sense in 0..cfg.senses {
        for i in 0..cfg.test_per_sense {
            test.push(make_instance(
                format!("s{sense}_test_{i}"),
                sense,
                cfg,
                &mut rng,
            ));
        }
    }

    let mut global = Vec::with_capacity(cfg.global_sentences);
    for gi in 0..cfg.global_sentences {
        let sense = gi % cfg.senses;
        let tokens = (0..cfg.sentence_len.max(2))
            .map(|q| {
                let lemma = context_lemma(sense, rng.random_range(0..cfg.vocab_per_sense));
                chain_token(lemma, q)
            })
            .collect();
        global.push(Sentence { tokens });
    }

    SynthCorpus {
        target_lemma: "target".into(),
        train,
        test,
        global,
    }
}
