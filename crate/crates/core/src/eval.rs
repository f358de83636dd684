//! Multi-seed experiment driver: per-target-word train/test splits, seeded
//! runs, and per-run plus averaged precision reports.

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::corpus::{build_corpus_matrices, load_instances, CorpusConfig, Instance};
use crate::error::{Error, Result};
use crate::matrix::EPSILON;
use crate::nmf::Objective;
use crate::wsd::{classify, train, TrainConfig, Variant};

/// Everything one experiment needs. All randomness flows from `seeds`; the
/// per-word factorization seed is derived from the run seed and the target
/// word, so target words are independent and order-insensitive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub variant: Variant,
    pub k: usize,
    pub window: usize,
    pub min_count: usize,
    pub seeds: Vec<u64>,
    pub objective: Objective,
    pub epsilon: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub pos_stoplist: BTreeSet<String>,
    pub train_path: PathBuf,
    pub test_path: PathBuf,
    pub global_path: Option<PathBuf>,
    pub out_path: Option<PathBuf>,
}

impl RunSpec {
    /// Defaults mirror [`TrainConfig::new`] and [`CorpusConfig::default`],
    /// with three seeded runs.
    pub fn new(variant: Variant, k: usize, train_path: PathBuf, test_path: PathBuf) -> Self {
        let corpus = CorpusConfig::default();
        let tc = TrainConfig::new(k, 0);
        RunSpec {
            variant,
            k,
            window: corpus.window,
            min_count: corpus.min_count,
            seeds: vec![0, 1, 2],
            objective: tc.objective,
            epsilon: EPSILON,
            tol: tc.tol,
            max_iters: tc.max_iters,
            outer_iters: tc.outer_iters,
            inner_iters: tc.inner_iters,
            pos_stoplist: corpus.pos_stoplist,
            train_path,
            test_path,
            global_path: None,
            out_path: None,
        }
    }

    fn corpus_config(&self) -> CorpusConfig {
        CorpusConfig {
            window: self.window,
            min_count: self.min_count,
            pos_stoplist: self.pos_stoplist.clone(),
        }
    }

    fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            k: self.k,
            seed,
            objective: self.objective,
            epsilon: self.epsilon,
            tol: self.tol,
            max_iters: self.max_iters,
            outer_iters: self.outer_iters,
            inner_iters: self.inner_iters,
        }
    }
}

/// One target word under one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunCell {
    pub precision: f64,
    pub correct: usize,
    pub total: usize,
    pub fallbacks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordReport {
    pub target: String,
    pub runs: Vec<RunCell>,
}

/// Per-word and pooled results of an experiment. `run_precisions` are micro
/// precisions (pooled over all test instances of all target words);
/// `average_precision` is their arithmetic mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: RunSpec,
    pub words: Vec<WordReport>,
    pub run_precisions: Vec<f64>,
    pub average_precision: f64,
    pub run_fallbacks: Vec<usize>,
}

impl EvalReport {
    /// Report skeleton around externally computed per-run precisions; used
    /// by rendering tools and tests.
    pub fn from_run_precisions(config: RunSpec, run_precisions: Vec<f64>) -> EvalReport {
        let average_precision = mean(&run_precisions);
        let run_fallbacks = vec![0; run_precisions.len()];
        EvalReport {
            config,
            words: Vec::new(),
            run_precisions,
            average_precision,
            run_fallbacks,
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Fraction of predictions matching gold labels.
pub fn precision<S1: AsRef<str>, S2: AsRef<str>>(predicted: &[S1], gold: &[S2]) -> Result<f64> {
    if predicted.is_empty() || predicted.len() != gold.len() {
        return Err(Error::config(format!(
            "precision needs equal-length non-empty lists, got {} and {}",
            predicted.len(),
            gold.len()
        )));
    }
    let matches = predicted
        .iter()
        .zip(gold)
        .filter(|(p, g)| p.as_ref() == g.as_ref())
        .count();
    Ok(matches as f64 / predicted.len() as f64)
}

/// FNV-1a over the run seed and the target word. Stable across platforms,
/// so per-word factorizations do not depend on word order.
pub fn word_seed(run_seed: u64, word: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for byte in run_seed.to_le_bytes().iter().chain(word.as_bytes()) {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn word_context(word: &str, err: Error) -> Error {
    match err {
        Error::ConfigError(msg) => Error::config(format!("target word '{word}': {msg}")),
        Error::ShapeError(msg) => Error::shape(format!("target word '{word}': {msg}")),
        other => other,
    }
}

fn group_by_target(instances: Vec<Instance>) -> (Vec<String>, HashMap<String, Vec<Instance>>) {
    let mut order = Vec::new();
    let mut groups: HashMap<String, Vec<Instance>> = HashMap::new();
    for inst in instances {
        let key = inst.target_lemma.clone();
        match groups.get_mut(&key) {
            Some(v) => v.push(inst),
            None => {
                order.push(key.clone());
                groups.insert(key, vec![inst]);
            }
        }
    }
    (order, groups)
}

/// Runs the full protocol: for every target word appearing in both files,
/// build its matrices once, then train and classify under every seed.
/// Identical specs produce identical reports.
pub fn run_experiment(spec: &RunSpec) -> Result<EvalReport> {
    if spec.seeds.is_empty() {
        return Err(Error::config("at least one seed is required"));
    }
    if spec.variant == Variant::LatentGlobal && spec.global_path.is_none() {
        return Err(Error::config(
            "the global variant needs --global <corpus.jsonl>",
        ));
    }
    let train_instances = load_instances(&spec.train_path)?;
    let test_instances = load_instances(&spec.test_path)?;
    if train_instances.is_empty() {
        return Err(Error::config("no training instances"));
    }
    if test_instances.is_empty() {
        return Err(Error::config("no test instances"));
    }

    let (word_order, train_groups) = group_by_target(train_instances);
    let (_, test_groups) = group_by_target(test_instances);
    for word in test_groups.keys() {
        if !train_groups.contains_key(word) {
            return Err(Error::config(format!(
                "target word '{word}' has test instances but no training instances"
            )));
        }
    }

    let corpus_cfg = spec.corpus_config();
    let global = match spec.variant {
        Variant::LatentGlobal => spec.global_path.as_deref(),
        _ => None,
    };

    let mut words = Vec::new();
    for word in &word_order {
        let Some(test_group) = test_groups.get(word) else {
            continue; // word has no test instances; nothing to score
        };
        let train_group = &train_groups[word];
        let gold: Vec<String> = test_group
            .iter()
            .map(|inst| {
                inst.sense_id.clone().ok_or_else(|| {
                    Error::config(format!(
                        "test instance '{}' of '{word}' has no gold sense_id",
                        inst.id
                    ))
                })
            })
            .collect::<Result<_>>()?;

        let matrices = build_corpus_matrices(train_group, global, &corpus_cfg)
            .map_err(|e| word_context(word, e))?;

        let mut runs = Vec::with_capacity(spec.seeds.len());
        for &run_seed in &spec.seeds {
            let tcfg = spec.train_config(word_seed(run_seed, word));
            let model = train(train_group, &matrices, spec.variant, &tcfg)
                .map_err(|e| word_context(word, e))?;
            let mut predicted = Vec::with_capacity(test_group.len());
            let mut fallbacks = 0usize;
            for inst in test_group {
                let c = classify(&model, inst)?;
                if c.fallback {
                    fallbacks += 1;
                }
                predicted.push(c.sense_id);
            }
            let correct = predicted
                .iter()
                .zip(&gold)
                .filter(|(p, g)| p == g)
                .count();
            runs.push(RunCell {
                precision: precision(&predicted, &gold)?,
                correct,
                total: test_group.len(),
                fallbacks,
            });
        }
        words.push(WordReport {
            target: word.clone(),
            runs,
        });
    }

    let n_runs = spec.seeds.len();
    let mut run_precisions = Vec::with_capacity(n_runs);
    let mut run_fallbacks = vec![0usize; n_runs];
    for r in 0..n_runs {
        let mut correct = 0usize;
        let mut total = 0usize;
        for w in &words {
            correct += w.runs[r].correct;
            total += w.runs[r].total;
            run_fallbacks[r] += w.runs[r].fallbacks;
        }
        run_precisions.push(correct as f64 / total as f64);
    }
    let average_precision = mean(&run_precisions);

    Ok(EvalReport {
        config: spec.clone(),
        words,
        run_precisions,
        average_precision,
        run_fallbacks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Json,
}

/// Deterministic serialization. The TSV table has one row per target word
/// and a pooled `ALL` row whose highest per-run precision is flagged with a
/// trailing `*`; JSON round-trips the full report.
pub fn report_render(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Tsv => render_tsv(report),
    }
}

fn render_tsv(report: &EvalReport) -> String {
    let n_runs = report.run_precisions.len();
    let mut out = String::from("target");
    for r in 1..=n_runs {
        out.push_str(&format!("\trun_{r}"));
    }
    out.push_str("\taverage\n");

    for word in &report.words {
        out.push_str(&word.target);
        let ps: Vec<f64> = word.runs.iter().map(|c| c.precision).collect();
        for p in &ps {
            out.push_str(&format!("\t{p}"));
        }
        out.push_str(&format!("\t{}\n", mean(&ps)));
    }

    if n_runs > 0 {
        let mut best = 0usize;
        for (i, &p) in report.run_precisions.iter().enumerate() {
            if p > report.run_precisions[best] {
                best = i;
            }
        }
        out.push_str("ALL");
        for (i, p) in report.run_precisions.iter().enumerate() {
            if i == best {
                out.push_str(&format!("\t{p}*"));
            } else {
                out.push_str(&format!("\t{p}"));
            }
        }
        out.push_str(&format!("\t{}\n", report.average_precision));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_examples() {
        let a = ["x", "y", "z"];
        assert_eq!(precision(&a, &a).unwrap(), 1.0);
        assert_eq!(precision(&["x", "y"], &["x", "z"]).unwrap(), 0.5);
        assert_eq!(precision(&["x"], &["y"]).unwrap(), 0.0);
        assert!(precision(&a, &["x"]).is_err());
        let empty: [&str; 0] = [];
        assert!(precision(&empty, &empty).is_err());
    }

    #[test]
    fn word_seed_is_stable_and_word_sensitive() {
        assert_eq!(word_seed(1, "bank"), word_seed(1, "bank"));
        assert_ne!(word_seed(1, "bank"), word_seed(2, "bank"));
        assert_ne!(word_seed(1, "bank"), word_seed(1, "tank"));
    }

    fn dummy_spec() -> RunSpec {
        RunSpec::new(
            Variant::Baseline1,
            2,
            PathBuf::from("train.jsonl"),
            PathBuf::from("test.jsonl"),
        )
    }

    #[test]
    fn summary_row_flags_first_maximum() {
        let report =
            EvalReport::from_run_precisions(dummy_spec(), vec![0.5328, 0.5388, 0.5180]);
        let tsv = report_render(&report, ReportFormat::Tsv);
        assert!(tsv.contains("\t0.5388*"));
        assert!(!tsv.contains("0.5328*"));
        assert!(!tsv.contains("0.518*"));
    }

    #[test]
    fn empty_report_is_header_only() {
        let report = EvalReport::from_run_precisions(dummy_spec(), vec![]);
        let tsv = report_render(&report, ReportFormat::Tsv);
        assert_eq!(tsv, "target\taverage\n");
    }

    #[test]
    fn json_round_trips() {
        let report =
            EvalReport::from_run_precisions(dummy_spec(), vec![0.6044, 0.6148, 0.6104]);
        let json = report_render(&report, ReportFormat::Json);
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn average_is_the_mean_of_runs() {
        let report =
            EvalReport::from_run_precisions(dummy_spec(), vec![0.6044, 0.6148, 0.6104]);
        assert!((report.average_precision - 0.609866666666).abs() < 1e-9);
    }
}
