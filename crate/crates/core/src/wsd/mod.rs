//! Sense models: per-sense centroids folded into the latent space, and
//! cosine-argmax classification of new occurrences.

mod persist;

pub use persist::{load_model, save_model};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusConfig, CorpusMatrices, Instance};
use crate::error::{Error, Result};
use crate::interleaved::{interleaved_factorize, InterleavedConfig};
use crate::matrix::{DenseMatrix, EPSILON};
use crate::nmf::{factorize, NmfConfig, Objective};

/// Which matrices drive the latent space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Factorize the sentence co-occurrence matrix A alone; both training
    /// centroids and test vectors fold through H.
    Baseline1,
    /// Interleave A, B and the training-set context matrix C.
    LatentLocal,
    /// Interleave A, B and the dependency matrix D from a large corpus.
    LatentGlobal,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Baseline1 => "baseline1",
            Variant::LatentLocal => "local",
            Variant::LatentGlobal => "global",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline1" => Ok(Variant::Baseline1),
            "local" => Ok(Variant::LatentLocal),
            "global" => Ok(Variant::LatentGlobal),
            other => Err(Error::config(format!(
                "unknown variant '{other}' (expected baseline1, local or global)"
            ))),
        }
    }
}

/// Factorization schedule for training. `max_iters` drives the single-matrix
/// run of `baseline1`; `outer_iters`/`inner_iters` drive the interleaved
/// variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub k: usize,
    pub seed: u64,
    pub objective: Objective,
    pub epsilon: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub outer_iters: usize,
    pub inner_iters: usize,
}

impl TrainConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        TrainConfig {
            k,
            seed,
            objective: Objective::default(),
            epsilon: EPSILON,
            tol: 1e-6,
            max_iters: 200,
            outer_iters: 50,
            inner_iters: 10,
        }
    }

    fn nmf_config(&self) -> NmfConfig {
        NmfConfig {
            k: self.k,
            max_iters: self.max_iters,
            tol: self.tol,
            seed: self.seed,
            objective: self.objective,
            epsilon: self.epsilon,
        }
    }

    fn interleaved_config(&self) -> InterleavedConfig {
        InterleavedConfig {
            k: self.k,
            outer_iters: self.outer_iters,
            inner: NmfConfig {
                k: self.k,
                max_iters: self.inner_iters,
                tol: self.tol,
                seed: self.seed,
                objective: self.objective,
                epsilon: self.epsilon,
            },
        }
    }
}

/// A trained sense model: latent sense vectors plus the fold matrices and
/// vocabularies needed to project test occurrences.
#[derive(Debug, Clone, PartialEq)]
pub struct SenseModel {
    pub variant: Variant,
    pub k: usize,
    pub window: usize,
    pub sense_ids: Vec<String>,
    pub sense_vectors: Vec<Vec<f64>>,
    pub fold_matrix_train: DenseMatrix,
    pub fold_matrix_test: DenseMatrix,
    pub vocab_a: crate::corpus::Vocabulary,
    pub vocab_b: Option<crate::corpus::Vocabulary>,
    pub pos_stoplist: BTreeSet<String>,
    pub most_frequent_sense: String,
}

/// Mean feature vector per sense, senses ordered by first occurrence in
/// `rows`.
pub fn sense_centroids(rows: &[(Vec<f64>, String)]) -> Result<Vec<(String, Vec<f64>)>> {
    if rows.is_empty() {
        return Err(Error::config("no labeled rows to average"));
    }
    let dim = rows[0].0.len();
    let mut order: Vec<String> = Vec::new();
    let mut sums: Vec<Vec<f64>> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for (vec, sense) in rows {
        if vec.len() != dim {
            return Err(Error::shape(format!(
                "row of length {} mixed with rows of length {dim}",
                vec.len()
            )));
        }
        let slot = match order.iter().position(|s| s == sense) {
            Some(i) => i,
            None => {
                order.push(sense.clone());
                sums.push(vec![0.0; dim]);
                counts.push(0);
                order.len() - 1
            }
        };
        for (acc, v) in sums[slot].iter_mut().zip(vec) {
            *acc += v;
        }
        counts[slot] += 1;
    }
    Ok(order
        .into_iter()
        .zip(sums)
        .zip(counts)
        .map(|((sense, sum), count)| {
            let centroid = sum.into_iter().map(|s| s / count as f64).collect();
            (sense, centroid)
        })
        .collect())
}

/// Projects a feature vector into the latent space: `v . M^T` for a
/// `k x dim(v)` fold matrix, yielding a k-vector.
pub fn fold_in(v: &[f64], m: &DenseMatrix) -> Result<Vec<f64>> {
    if v.len() != m.cols() {
        return Err(Error::shape(format!(
            "vector of length {} cannot fold through a {}x{} matrix",
            v.len(),
            m.rows(),
            m.cols()
        )));
    }
    let mut out = vec![0.0; m.rows()];
    for (j, o) in out.iter_mut().enumerate() {
        let row = m.row(j);
        for (a, b) in v.iter().zip(row) {
            *o += a * b;
        }
    }
    Ok(out)
}

/// Cosine similarity; zero-norm inputs score 0 so that featureless test
/// vectors fall through to the most-frequent-sense fallback.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::shape(format!(
            "cosine over lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu < EPSILON || nv < EPSILON {
        return Ok(0.0);
    }
    Ok(dot / (nu * nv))
}

fn most_frequent(labels: &[String]) -> String {
    let mut order: Vec<&String> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for label in labels {
        match order.iter().position(|s| *s == label) {
            Some(i) => counts[i] += 1,
            None => {
                order.push(label);
                counts.push(1);
            }
        }
    }
    let mut best = 0usize;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    order[best].clone()
}

/// Trains from row labels aligned with the rows of `matrices.a`.
pub fn train_from_labels(
    labels: &[String],
    matrices: &CorpusMatrices,
    variant: Variant,
    config: &TrainConfig,
) -> Result<SenseModel> {
    if labels.len() != matrices.a.rows() {
        return Err(Error::config(format!(
            "{} labels for {} training rows",
            labels.len(),
            matrices.a.rows()
        )));
    }
    if labels.is_empty() {
        return Err(Error::config("no training rows"));
    }

    let rows: Vec<(Vec<f64>, String)> = labels
        .iter()
        .enumerate()
        .map(|(i, sense)| (matrices.a.row_dense(i), sense.clone()))
        .collect();
    let centroids = sense_centroids(&rows)?;

    let (fold_train, fold_test, vocab_b) = match variant {
        Variant::Baseline1 => {
            let fact = factorize(&matrices.a, &config.nmf_config())?;
            (fact.h.clone(), fact.h, None)
        }
        Variant::LatentLocal | Variant::LatentGlobal => {
            let third = match variant {
                Variant::LatentLocal => &matrices.c_local,
                Variant::LatentGlobal => matrices.d_global.as_ref().ok_or_else(|| {
                    Error::config("the global variant needs matrix D; build with a global corpus")
                })?,
                Variant::Baseline1 => unreachable!(),
            };
            let cf = interleaved_factorize(
                &matrices.a,
                &matrices.b,
                third,
                &config.interleaved_config(),
            )?;
            (cf.h, cf.g, Some(matrices.vocab_b.clone()))
        }
    };

    let mut sense_ids = Vec::with_capacity(centroids.len());
    let mut sense_vectors = Vec::with_capacity(centroids.len());
    for (sense, centroid) in centroids {
        sense_vectors.push(fold_in(&centroid, &fold_train)?);
        sense_ids.push(sense);
    }

    Ok(SenseModel {
        variant,
        k: config.k,
        window: matrices.window,
        sense_ids,
        sense_vectors,
        fold_matrix_train: fold_train,
        fold_matrix_test: fold_test,
        vocab_a: matrices.vocab_a.clone(),
        vocab_b,
        pos_stoplist: matrices.pos_stoplist.clone(),
        most_frequent_sense: most_frequent(labels),
    })
}

/// Trains a sense model from labeled instances and their matrices.
pub fn train(
    instances: &[Instance],
    matrices: &CorpusMatrices,
    variant: Variant,
    config: &TrainConfig,
) -> Result<SenseModel> {
    let labels: Vec<String> = instances
        .iter()
        .map(|inst| {
            inst.sense_id
                .clone()
                .ok_or_else(|| Error::config(format!("training instance '{}' has no sense_id", inst.id)))
        })
        .collect::<Result<_>>()?;
    train_from_labels(&labels, matrices, variant, config)
}

/// Outcome of classifying one occurrence. `scores` aligns with the model's
/// `sense_ids`; `fallback` marks an input with no in-vocabulary features.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub sense_id: String,
    pub scores: Vec<f64>,
    pub fallback: bool,
}

/// Test-time feature vector for one instance: a sentence-wide count vector
/// over vocabulary A for `baseline1`, a windowed count vector over
/// vocabulary B otherwise. Unknown lemmas are dropped.
pub fn feature_vector(model: &SenseModel, instance: &Instance) -> Vec<f64> {
    let cfg = CorpusConfig {
        window: model.window,
        min_count: 1,
        pos_stoplist: model.pos_stoplist.clone(),
    };
    match model.variant {
        Variant::Baseline1 => {
            let mut f = vec![0.0; model.vocab_a.len()];
            for i in crate::corpus::a_positions(instance, &cfg) {
                if let Some(j) = model.vocab_a.index_of(&instance.tokens[i].lemma) {
                    f[j] += 1.0;
                }
            }
            f
        }
        Variant::LatentLocal | Variant::LatentGlobal => {
            let vocab_b = model
                .vocab_b
                .as_ref()
                .expect("latent models always carry vocabulary B");
            let mut f = vec![0.0; vocab_b.len()];
            for i in crate::corpus::b_positions(instance, &cfg) {
                if let Some(j) = vocab_b.index_of(&instance.tokens[i].lemma) {
                    f[j] += 1.0;
                }
            }
            f
        }
    }
}

/// Classifies a prebuilt feature vector.
pub fn classify_vector(model: &SenseModel, f: &[f64]) -> Result<Classification> {
    if f.iter().all(|&v| v == 0.0) {
        return Ok(Classification {
            sense_id: model.most_frequent_sense.clone(),
            scores: vec![0.0; model.sense_ids.len()],
            fallback: true,
        });
    }
    let d = fold_in(f, &model.fold_matrix_test)?;
    let mut scores = Vec::with_capacity(model.sense_ids.len());
    for b in &model.sense_vectors {
        scores.push(cosine(&d, b)?);
    }
    let mut best = 0usize;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(Classification {
        sense_id: model.sense_ids[best].clone(),
        scores,
        fallback: false,
    })
}

/// Classifies one occurrence of the target word.
pub fn classify(model: &SenseModel, instance: &Instance) -> Result<Classification> {
    let f = feature_vector(model, instance);
    classify_vector(model, &f)
}
