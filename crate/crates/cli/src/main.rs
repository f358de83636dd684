//! `lswsd` command line: build co-occurrence matrices, train sense models,
//! classify occurrences and run seeded evaluations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use lswsd_core::corpus::{
    build_corpus_matrices, load_instances, load_matrices_dir, save_matrices_dir, CorpusConfig,
};
use lswsd_core::eval::{report_render, run_experiment, EvalReport, ReportFormat, RunSpec};
use lswsd_core::nmf::Objective;
use lswsd_core::wsd::{classify, load_model, save_model, train_from_labels, TrainConfig, Variant};

#[derive(Parser)]
#[command(name = "lswsd", version, about = "Word sense disambiguation via factorized co-occurrence matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Baseline1,
    Local,
    Global,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Baseline1 => Variant::Baseline1,
            VariantArg::Local => Variant::LatentLocal,
            VariantArg::Global => Variant::LatentGlobal,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Kl,
    Frobenius,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Objective {
        match o {
            ObjectiveArg::Kl => Objective::KullbackLeibler,
            ObjectiveArg::Frobenius => Objective::Frobenius,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Tsv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build co-occurrence matrices and vocabularies from training instances.
    BuildMatrices {
        /// Training instances (JSONL).
        #[arg(long)]
        train: PathBuf,
        /// Raw dependency-annotated corpus (JSONL) for the global matrix D.
        #[arg(long)]
        global: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Context window radius for matrix B.
        #[arg(long, default_value_t = 5)]
        window: usize,
        /// Minimum lemma frequency for vocabulary membership.
        #[arg(long, default_value_t = 1)]
        min_count: usize,
    },
    /// Train a sense model from a built matrices directory.
    Train {
        /// Matrices directory produced by build-matrices.
        #[arg(long)]
        matrices: PathBuf,
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Latent dimension count.
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output model directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "kl")]
        objective: ObjectiveArg,
        /// Update steps for the single-matrix variant.
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        /// Outer cycles for the interleaved variants.
        #[arg(long, default_value_t = 50)]
        outer_iters: usize,
        /// Inner update steps per block and cycle.
        #[arg(long, default_value_t = 10)]
        inner_iters: usize,
        /// Relative-improvement stopping threshold (0 disables).
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Classify instances with a trained model; writes one TSV row per
    /// instance with the predicted sense and per-sense scores.
    Classify {
        /// Model directory produced by train.
        #[arg(long)]
        model: PathBuf,
        /// Instances to classify (JSONL); sense_id may be absent.
        #[arg(long)]
        input: PathBuf,
        /// Output TSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full per-target-word protocol over multiple seeds and report
    /// per-run and averaged precision.
    Evaluate {
        /// Sense-tagged training instances (JSONL).
        #[arg(long)]
        train: PathBuf,
        /// Sense-tagged test instances (JSONL).
        #[arg(long)]
        test: PathBuf,
        /// Raw corpus for the global variant.
        #[arg(long)]
        global: Option<PathBuf>,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        k: usize,
        /// Comma-separated run seeds.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        seeds: Vec<u64>,
        #[arg(long, value_enum, default_value = "tsv")]
        format: FormatArg,
        /// Report output path.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        window: usize,
        #[arg(long, default_value_t = 1)]
        min_count: usize,
        #[arg(long, value_enum, default_value = "kl")]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        #[arg(long, default_value_t = 50)]
        outer_iters: usize,
        #[arg(long, default_value_t = 10)]
        inner_iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::BuildMatrices {
            train,
            global,
            out,
            window,
            min_count,
        } => build_matrices_cmd(train, global, out, window, min_count),
        Command::Train {
            matrices,
            variant,
            k,
            seed,
            out,
            objective,
            max_iters,
            outer_iters,
            inner_iters,
            tol,
        } => train_cmd(
            matrices,
            variant.into(),
            k,
            seed,
            out,
            objective.into(),
            max_iters,
            outer_iters,
            inner_iters,
            tol,
        ),
        Command::Classify { model, input, out } => classify_cmd(model, input, out),
        Command::Evaluate {
            train,
            test,
            global,
            variant,
            k,
            seeds,
            format,
            out,
            window,
            min_count,
            objective,
            max_iters,
            outer_iters,
            inner_iters,
            tol,
        } => {
            let mut spec = RunSpec::new(variant.into(), k, train, test);
            spec.global_path = global;
            spec.seeds = seeds;
            spec.window = window;
            spec.min_count = min_count;
            spec.objective = objective.into();
            spec.max_iters = max_iters;
            spec.outer_iters = outer_iters;
            spec.inner_iters = inner_iters;
            spec.tol = tol;
            spec.out_path = Some(out);
            evaluate_cmd(
                spec,
                match format {
                    FormatArg::Tsv => ReportFormat::Tsv,
                    FormatArg::Json => ReportFormat::Json,
                },
            )
        }
    }
}

fn build_matrices_cmd(
    train: PathBuf,
    global: Option<PathBuf>,
    out: PathBuf,
    window: usize,
    min_count: usize,
) -> Result<()> {
    let instances = load_instances(&train).with_context(|| format!("reading {}", train.display()))?;
    let cfg = CorpusConfig {
        window,
        min_count,
        ..CorpusConfig::default()
    };
    let matrices = build_corpus_matrices(&instances, global.as_deref(), &cfg)?;
    save_matrices_dir(&out, &matrices, &instances)?;
    println!(
        "built {} instance rows, |vocab A|={}, |vocab B|={}{} -> {}",
        matrices.a.rows(),
        matrices.vocab_a.len(),
        matrices.vocab_b.len(),
        if matrices.d_global.is_some() {
            ", with global matrix D"
        } else {
            ""
        },
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn train_cmd(
    matrices_dir: PathBuf,
    variant: Variant,
    k: usize,
    seed: u64,
    out: PathBuf,
    objective: Objective,
    max_iters: usize,
    outer_iters: usize,
    inner_iters: usize,
    tol: f64,
) -> Result<()> {
    let store = load_matrices_dir(&matrices_dir)
        .with_context(|| format!("reading {}", matrices_dir.display()))?;
    let labels: Vec<String> = store
        .sense_ids
        .iter()
        .zip(&store.instance_ids)
        .map(|(sense, id)| {
            sense
                .clone()
                .ok_or_else(|| anyhow::anyhow!("instance '{id}' has no sense_id; cannot train"))
        })
        .collect::<Result<_>>()?;
    let mut tcfg = TrainConfig::new(k, seed);
    tcfg.objective = objective;
    tcfg.max_iters = max_iters;
    tcfg.outer_iters = outer_iters;
    tcfg.inner_iters = inner_iters;
    tcfg.tol = tol;
    let model = train_from_labels(&labels, &store.matrices, variant, &tcfg)?;
    save_model(&model, &out)?;
    println!(
        "trained {} model: k={}, {} senses, fallback sense '{}' -> {}",
        variant,
        k,
        model.sense_ids.len(),
        model.most_frequent_sense,
        out.display()
    );
    Ok(())
}

fn classify_cmd(model_dir: PathBuf, input: PathBuf, out: PathBuf) -> Result<()> {
    let model = load_model(&model_dir).with_context(|| format!("reading {}", model_dir.display()))?;
    let instances = load_instances(&input)?;
    let mut writer = BufWriter::new(File::create(&out)?);
    write!(writer, "id\tpredicted\tfallback")?;
    for sense in &model.sense_ids {
        write!(writer, "\tscore:{sense}")?;
    }
    writeln!(writer)?;
    for inst in &instances {
        let c = classify(&model, inst)?;
        write!(writer, "{}\t{}\t{}", inst.id, c.sense_id, u8::from(c.fallback))?;
        for score in &c.scores {
            write!(writer, "\t{score}")?;
        }
        writeln!(writer)?;
    }
    writer.flush()?;
    println!("classified {} instances -> {}", instances.len(), out.display());
    Ok(())
}

fn evaluate_cmd(spec: RunSpec, format: ReportFormat) -> Result<()> {
    let out = spec
        .out_path
        .clone()
        .expect("evaluate always sets an output path");
    let report: EvalReport = run_experiment(&spec)?;
    if report.run_precisions.is_empty() {
        bail!("no precision cells were produced");
    }
    let rendered = report_render(&report, format);
    std::fs::write(&out, rendered)?;
    println!(
        "evaluated {} target words over {} runs; average precision {:.4} -> {}",
        report.words.len(),
        report.run_precisions.len(),
        report.average_precision,
        out.display()
    );
    Ok(())
}
