//! Single-matrix non-negative factorization X ~= W.H via multiplicative
//! updates, with seeded initialization, warm starts and convergence control.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{frobenius_objective, kl_objective, DenseMatrix, SparseMatrix, EPSILON};

/// Objective minimized by the update rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Generalized Kullback-Leibler divergence (the default).
    #[default]
    KullbackLeibler,
    /// Squared Frobenius distance.
    Frobenius,
}

impl Objective {
    pub fn evaluate(&self, x: &SparseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<f64> {
        match self {
            Objective::KullbackLeibler => kl_objective(x, w, h),
            Objective::Frobenius => frobenius_objective(x, w, h),
        }
    }
}

/// Solver settings. `tol` is a relative-improvement threshold; setting it to
/// zero disables early stopping so exactly `max_iters` steps run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NmfConfig {
    pub k: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    pub objective: Objective,
    pub epsilon: f64,
}

impl NmfConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        NmfConfig {
            k,
            max_iters: 200,
            tol: 1e-6,
            seed,
            objective: Objective::default(),
            epsilon: EPSILON,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::config("k must be >= 1"));
        }
        if self.max_iters < 1 {
            return Err(Error::config("max_iters must be >= 1"));
        }
        if self.tol < 0.0 || !self.tol.is_finite() {
            return Err(Error::config("tol must be finite and >= 0"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::config("epsilon must be > 0"));
        }
        Ok(())
    }
}

/// Result of a factorization run. `objective_history[0]` is the objective at
/// the starting point; one entry follows per update step.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub w: DenseMatrix,
    pub h: DenseMatrix,
    pub objective_history: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
}

impl Factorization {
    pub fn final_objective(&self) -> f64 {
        *self
            .objective_history
            .last()
            .expect("history holds at least the initial objective")
    }
}

pub(crate) fn init_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let values = (0..rows * cols)
        .map(|_| 1.0 - rng.random::<f64>()) // uniform on (0, 1]
        .collect();
    DenseMatrix::from_raw(rows, cols, values)
}

/// Random factor pair for an `m x n` target: W is `m x k`, H is `k x n`,
/// entries i.i.d. uniform on (0, 1]. The same seed reproduces the same
/// matrices bit-for-bit; W is drawn before H, each row-major.
pub fn init_factors(m: usize, n: usize, k: usize, seed: u64) -> Result<(DenseMatrix, DenseMatrix)> {
    if m == 0 || n == 0 || k == 0 {
        return Err(Error::shape(format!(
            "factor dimensions must be positive, got m={m}, n={n}, k={k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = init_matrix(m, k, &mut rng);
    let h = init_matrix(k, n, &mut rng);
    Ok((w, h))
}

fn check_factor_shapes(x: &SparseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<()> {
    if w.rows() != x.rows() || h.cols() != x.cols() || w.cols() != h.rows() {
        return Err(Error::shape(format!(
            "factors {}x{} and {}x{} do not conform to a {}x{} target",
            w.rows(),
            w.cols(),
            h.rows(),
            h.cols(),
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// `x_ij / max((WH)_ij, eps)` at the stored entries of `x`, row-major.
fn ratios_at_nonzeros(x: &SparseMatrix, w: &DenseMatrix, h: &DenseMatrix, eps: f64) -> Vec<f64> {
    let k = w.cols();
    let n = h.cols();
    let hv = h.values();
    let mut out = Vec::with_capacity(x.nnz());
    for i in 0..x.rows() {
        let wrow = w.row(i);
        let (cols, vals) = x.row(i);
        for (&j, &xv) in cols.iter().zip(vals) {
            let mut y = 0.0;
            for (l, &wl) in wrow.iter().enumerate().take(k) {
                y += wl * hv[l * n + j];
            }
            out.push(xv / y.max(eps));
        }
    }
    out
}

fn update_w_kl(x: &SparseMatrix, w: &DenseMatrix, h: &DenseMatrix, eps: f64) -> DenseMatrix {
    let (m, k) = (w.rows(), w.cols());
    let n = h.cols();
    let hv = h.values();
    let ratios = ratios_at_nonzeros(x, w, h, eps);

    // numerator (X ./ WH) H^T
    let mut num = vec![0.0; m * k];
    let mut pos = 0usize;
    for i in 0..m {
        let (cols, _) = x.row(i);
        let nrow = &mut num[i * k..(i + 1) * k];
        for &j in cols {
            let r = ratios[pos];
            pos += 1;
            for (t, nt) in nrow.iter_mut().enumerate() {
                *nt += r * hv[t * n + j];
            }
        }
    }

    // denominator 1 H^T: row sums of H, constant down each column of W
    let mut den = vec![0.0; k];
    for (t, dt) in den.iter_mut().enumerate() {
        for j in 0..n {
            *dt += hv[t * n + j];
        }
    }

    let mut out = vec![0.0; m * k];
    for i in 0..m {
        let wrow = w.row(i);
        for t in 0..k {
            out[i * k + t] = wrow[t] * num[i * k + t] / den[t].max(eps);
        }
    }
    DenseMatrix::from_raw(m, k, out)
}

fn update_h_kl(x: &SparseMatrix, w: &DenseMatrix, h: &DenseMatrix, eps: f64) -> DenseMatrix {
    let (k, n) = (h.rows(), h.cols());
    let m = w.rows();
    let ratios = ratios_at_nonzeros(x, w, h, eps);

    // numerator W^T (X ./ WH)
    let mut num = vec![0.0; k * n];
    let mut pos = 0usize;
    for i in 0..m {
        let wrow = w.row(i);
        let (cols, _) = x.row(i);
        for &j in cols {
            let r = ratios[pos];
            pos += 1;
            for (t, &wt) in wrow.iter().enumerate() {
                num[t * n + j] += wt * r;
            }
        }
    }

    // denominator W^T 1: column sums of W, constant along each row of H
    let mut den = vec![0.0; k];
    for i in 0..m {
        let wrow = w.row(i);
        for (t, dt) in den.iter_mut().enumerate() {
            *dt += wrow[t];
        }
    }

    let hv = h.values();
    let mut out = vec![0.0; k * n];
    for t in 0..k {
        let d = den[t].max(eps);
        for j in 0..n {
            out[t * n + j] = hv[t * n + j] * num[t * n + j] / d;
        }
    }
    DenseMatrix::from_raw(k, n, out)
}

fn update_w_frobenius(x: &SparseMatrix, w: &DenseMatrix, h: &DenseMatrix, eps: f64) -> DenseMatrix {
    let (m, k) = (w.rows(), w.cols());
    let n = h.cols();
    let hv = h.values();

    // numerator X H^T
    let mut num = vec![0.0; m * k];
    for i in 0..m {
        let (cols, vals) = x.row(i);
        let nrow = &mut num[i * k..(i + 1) * k];
        for (&j, &xv) in cols.iter().zip(vals) {
            for (t, nt) in nrow.iter_mut().enumerate() {
                *nt += xv * hv[t * n + j];
            }
        }
    }

    // denominator W (H H^T)
    let mut hht = vec![0.0; k * k];
    for t in 0..k {
        for u in 0..k {
            let mut s = 0.0;
            for j in 0..n {
                s += hv[t * n + j] * hv[u * n + j];
            }
            hht[t * k + u] = s;
        }
    }
    let mut out = vec![0.0; m * k];
    for i in 0..m {
        let wrow = w.row(i);
        for t in 0..k {
            let mut d = 0.0;
            for (u, &wu) in wrow.iter().enumerate() {
                d += wu * hht[u * k + t];
            }
            out[i * k + t] = wrow[t] * num[i * k + t] / d.max(eps);
        }
    }
    DenseMatrix::from_raw(m, k, out)
}

fn update_h_frobenius(x: &SparseMatrix, w: &DenseMatrix, h: &DenseMatrix, eps: f64) -> DenseMatrix {
    let (k, n) = (h.rows(), h.cols());
    let m = w.rows();
    let hv = h.values();

    // numerator W^T X
    let mut num = vec![0.0; k * n];
    for i in 0..m {
        let wrow = w.row(i);
        let (cols, vals) = x.row(i);
        for (&j, &xv) in cols.iter().zip(vals) {
            for (t, &wt) in wrow.iter().enumerate() {
                num[t * n + j] += wt * xv;
            }
        }
    }

    // denominator (W^T W) H
    let mut wtw = vec![0.0; k * k];
    for i in 0..m {
        let wrow = w.row(i);
        for t in 0..k {
            for u in 0..k {
                wtw[t * k + u] += wrow[t] * wrow[u];
            }
        }
    }
    let mut out = vec![0.0; k * n];
    for t in 0..k {
        for j in 0..n {
            let mut d = 0.0;
            for u in 0..k {
                d += wtw[t * k + u] * hv[u * n + j];
            }
            out[t * n + j] = hv[t * n + j] * num[t * n + j] / d.max(eps);
        }
    }
    DenseMatrix::from_raw(k, n, out)
}

fn w_step(
    x: &SparseMatrix,
    w: &DenseMatrix,
    h: &DenseMatrix,
    objective: Objective,
    eps: f64,
) -> DenseMatrix {
    match objective {
        Objective::KullbackLeibler => update_w_kl(x, w, h, eps),
        Objective::Frobenius => update_w_frobenius(x, w, h, eps),
    }
}

fn h_step(
    x: &SparseMatrix,
    w: &DenseMatrix,
    h: &DenseMatrix,
    objective: Objective,
    eps: f64,
) -> DenseMatrix {
    match objective {
        Objective::KullbackLeibler => update_h_kl(x, w, h, eps),
        Objective::Frobenius => update_h_frobenius(x, w, h, eps),
    }
}

/// One multiplicative update of W followed by H, where the H update uses the
/// already-updated W. Does not increase the objective (up to floating-point
/// slack from the epsilon floors).
pub fn update_step(
    x: &SparseMatrix,
    w: &DenseMatrix,
    h: &DenseMatrix,
    objective: Objective,
    epsilon: f64,
) -> Result<(DenseMatrix, DenseMatrix)> {
    check_factor_shapes(x, w, h)?;
    if !(epsilon > 0.0) {
        return Err(Error::config("epsilon must be > 0"));
    }
    let w_next = w_step(x, w, h, objective, epsilon);
    let h_next = h_step(x, &w_next, h, objective, epsilon);
    Ok((w_next, h_next))
}

fn run_updates(
    x: &SparseMatrix,
    mut w: DenseMatrix,
    mut h: DenseMatrix,
    config: &NmfConfig,
    update_w: bool,
    update_h: bool,
) -> Result<Factorization> {
    let mut history = vec![config.objective.evaluate(x, &w, &h)?];
    let mut converged = false;
    let mut iterations_run = 0usize;
    for _ in 0..config.max_iters {
        if update_w {
            w = w_step(x, &w, &h, config.objective, config.epsilon);
        }
        if update_h {
            h = h_step(x, &w, &h, config.objective, config.epsilon);
        }
        iterations_run += 1;
        let prev = *history.last().unwrap();
        let cur = config.objective.evaluate(x, &w, &h)?;
        history.push(cur);
        if config.tol > 0.0 && (prev - cur) / (1.0 + prev) < config.tol {
            converged = true;
            break;
        }
    }
    Ok(Factorization {
        w,
        h,
        objective_history: history,
        iterations_run,
        converged,
    })
}

/// Factorizes `x` from a seeded random start.
pub fn factorize(x: &SparseMatrix, config: &NmfConfig) -> Result<Factorization> {
    config.validate()?;
    if config.k > x.rows().min(x.cols()) {
        return Err(Error::config(format!(
            "k={} exceeds min dimension of a {}x{} matrix",
            config.k,
            x.rows(),
            x.cols()
        )));
    }
    let (w, h) = init_factors(x.rows(), x.cols(), config.k, config.seed)?;
    run_updates(x, w, h, config, true, true)
}

/// Factorizes `x` starting from the supplied factors. A factor whose update
/// flag is false is returned unchanged.
pub fn factorize_warm(
    x: &SparseMatrix,
    w0: &DenseMatrix,
    h0: &DenseMatrix,
    config: &NmfConfig,
    update_w: bool,
    update_h: bool,
) -> Result<Factorization> {
    config.validate()?;
    check_factor_shapes(x, w0, h0)?;
    if w0.cols() != config.k {
        return Err(Error::shape(format!(
            "warm start has k={}, config has k={}",
            w0.cols(),
            config.k
        )));
    }
    run_updates(x, w0.clone(), h0.clone(), config, update_w, update_h)
}
