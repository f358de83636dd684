//! Non-negative sparse and dense matrices plus the handful of products and
//! objective evaluations the factorizations need.
//!
//! All products accumulate in a fixed order (row-major, ascending column
//! index) so that a run is bit-reproducible given a seed.

mod dense;
mod io;
mod ops;
mod sparse;

pub use dense::DenseMatrix;
pub use io::{
    read_dense, read_dense_file, read_sparse, read_sparse_file, write_dense, write_dense_file,
    write_sparse, write_sparse_file,
};
pub use ops::{frobenius_objective, kl_objective, matmul, sparse_dense_matmul};
pub use sparse::SparseMatrix;

/// Floor applied to denominators and log arguments throughout the crate.
pub const EPSILON: f64 = 1e-12;
