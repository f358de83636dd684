use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Non-negative sparse matrix in compressed-row form.
///
/// Entries are stored row-major with ascending column indices inside a row.
/// Construction sums duplicate coordinates and rejects negative, non-finite
/// or out-of-range entries, so every stored value is finite and >= 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicate
    /// coordinates are summed; entries that sum to zero are kept out of the
    /// stored set only if they were never mentioned (an explicit 0.0 triplet
    /// is dropped).
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(r, c, v) in triplets {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NonNegativityViolation {
                    row: r,
                    col: c,
                    value: v,
                });
            }
            if r >= rows || c >= cols {
                return Err(Error::IndexError {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
        }

        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                last = Some((r, c));
            }
            row_ptr[r + 1] = values.len();
        }
        // Empty rows inherit the pointer of the previous row.
        for r in 0..rows {
            if row_ptr[r + 1] < row_ptr[r] {
                row_ptr[r + 1] = row_ptr[r];
            }
        }

        let mut m = SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        };
        m.drop_zeros();
        Ok(m)
    }

    /// Matrix with no stored entries.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// n x n identity.
    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    fn drop_zeros(&mut self) {
        if !self.values.iter().any(|&v| v == 0.0) {
            return;
        }
        let mut row_ptr = vec![0usize; self.rows + 1];
        let mut col_idx = Vec::with_capacity(self.col_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.rows {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.values[i] != 0.0 {
                    col_idx.push(self.col_idx[i]);
                    values.push(self.values[i]);
                }
            }
            row_ptr[r + 1] = values.len();
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.values = values;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Value at `(row, col)`, zero if not stored.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.rows && col < self.cols, "index out of range");
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.col_idx[lo..hi].binary_search(&col) {
            Ok(i) => self.values[lo + i],
            Err(_) => 0.0,
        }
    }

    /// Column indices and values of one row, ascending by column.
    pub fn row(&self, row: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// Stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// One row expanded to a dense vector of length `cols`.
    pub fn row_dense(&self, row: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        let (cols, vals) = self.row(row);
        for (&c, &v) in cols.iter().zip(vals) {
            out[c] = v;
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut values = vec![0.0; self.rows * self.cols];
        for (r, c, v) in self.iter() {
            values[r * self.cols + c] = v;
        }
        DenseMatrix::from_raw(self.rows, self.cols, values)
    }

    /// Frobenius norm of the matrix itself.
    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn construction_keeps_exact_triplets() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 2.0)]).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(1, 1), 2.0);
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn duplicate_coordinates_are_summed() {
        let m = SparseMatrix::from_triplets(1, 1, &[(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 3.0);
    }

    #[test]
    fn negative_value_is_rejected() {
        let err = SparseMatrix::from_triplets(1, 1, &[(0, 0, -1.0)]).unwrap_err();
        assert!(matches!(err, Error::NonNegativityViolation { .. }));
    }

    #[test]
    fn non_finite_value_is_rejected() {
        let err = SparseMatrix::from_triplets(1, 1, &[(0, 0, f64::NAN)]).unwrap_err();
        assert!(matches!(err, Error::NonNegativityViolation { .. }));
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let err = SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IndexError { .. }));
    }

    #[test]
    fn rows_are_sorted_and_queryable() {
        let m =
            SparseMatrix::from_triplets(2, 3, &[(0, 2, 5.0), (0, 0, 1.0), (1, 1, 4.0)]).unwrap();
        let (cols, vals) = m.row(0);
        assert_eq!(cols, &[0, 2]);
        assert_eq!(vals, &[1.0, 5.0]);
        assert_eq!(m.row_dense(1), vec![0.0, 4.0, 0.0]);
    }

    #[test]
    fn explicit_zero_triplets_are_dropped() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 0, 0.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 0.0);
    }
}
