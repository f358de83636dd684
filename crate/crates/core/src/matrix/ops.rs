use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseMatrix, EPSILON};

fn check_product_shapes(x: &SparseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<()> {
    if w.rows() != x.rows() || h.cols() != x.cols() || w.cols() != h.rows() {
        return Err(Error::shape(format!(
            "objective over {}x{} target needs conformable factors, got {}x{} and {}x{}",
            x.rows(),
            x.cols(),
            w.rows(),
            w.cols(),
            h.rows(),
            h.cols()
        )));
    }
    Ok(())
}

/// Standard dense product. Accumulation per output cell runs over the inner
/// index in ascending order.
pub fn matmul(lhs: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    if lhs.cols() != rhs.rows() {
        return Err(Error::shape(format!(
            "cannot multiply {}x{} by {}x{}",
            lhs.rows(),
            lhs.cols(),
            rhs.rows(),
            rhs.cols()
        )));
    }
    let (m, inner, n) = (lhs.rows(), lhs.cols(), rhs.cols());
    let mut values = vec![0.0; m * n];
    for i in 0..m {
        let lrow = lhs.row(i);
        let out = &mut values[i * n..(i + 1) * n];
        for (l, &a) in lrow.iter().enumerate().take(inner) {
            let rrow = rhs.row(l);
            for j in 0..n {
                out[j] += a * rrow[j];
            }
        }
    }
    Ok(DenseMatrix::from_raw(m, n, values))
}

/// Sparse-times-dense product; equals `matmul(lhs.to_dense(), rhs)` in the
/// same per-cell accumulation order.
pub fn sparse_dense_matmul(lhs: &SparseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    if lhs.cols() != rhs.rows() {
        return Err(Error::shape(format!(
            "cannot multiply {}x{} by {}x{}",
            lhs.rows(),
            lhs.cols(),
            rhs.rows(),
            rhs.cols()
        )));
    }
    let (m, n) = (lhs.rows(), rhs.cols());
    let mut values = vec![0.0; m * n];
    for i in 0..m {
        let (cols, vals) = lhs.row(i);
        let out = &mut values[i * n..(i + 1) * n];
        for (&l, &a) in cols.iter().zip(vals) {
            let rrow = rhs.row(l);
            for j in 0..n {
                out[j] += a * rrow[j];
            }
        }
    }
    Ok(DenseMatrix::from_raw(m, n, values))
}

/// Writes row `i` of `W.H` into `buf` (length `H.cols()`).
fn product_row(w: &DenseMatrix, h: &DenseMatrix, i: usize, buf: &mut [f64]) {
    buf.fill(0.0);
    let wrow = w.row(i);
    for (l, &a) in wrow.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let hrow = h.row(l);
        for (b, &hv) in buf.iter_mut().zip(hrow) {
            *b += a * hv;
        }
    }
}

/// Generalized Kullback-Leibler divergence D(X || WH) =
/// sum_ij [ x * ln(x / y) - x + y ] with y = WH and the 0*ln(0) = 0
/// convention. Log denominators are floored at [`EPSILON`].
pub fn kl_objective(x: &SparseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<f64> {
    check_product_shapes(x, w, h)?;
    let n = x.cols();
    let mut buf = vec![0.0; n];
    let mut total = 0.0;
    for i in 0..x.rows() {
        product_row(w, h, i, &mut buf);
        let (cols, vals) = x.row(i);
        let mut k = 0usize;
        for (j, &y) in buf.iter().enumerate() {
            let xv = if k < cols.len() && cols[k] == j {
                let v = vals[k];
                k += 1;
                v
            } else {
                0.0
            };
            if xv > 0.0 {
                total += xv * (xv / y.max(EPSILON)).ln() - xv + y;
            } else {
                total += y;
            }
        }
    }
    // Flooring can shave the sum below zero by a sub-epsilon amount.
    Ok(total.max(0.0))
}

/// Squared Frobenius distance ||X - WH||_F^2.
pub fn frobenius_objective(x: &SparseMatrix, w: &DenseMatrix, h: &DenseMatrix) -> Result<f64> {
    check_product_shapes(x, w, h)?;
    let n = x.cols();
    let mut buf = vec![0.0; n];
    let mut total = 0.0;
    for i in 0..x.rows() {
        product_row(w, h, i, &mut buf);
        let (cols, vals) = x.row(i);
        let mut k = 0usize;
        for (j, &y) in buf.iter().enumerate() {
            let xv = if k < cols.len() && cols[k] == j {
                let v = vals[k];
                k += 1;
                v
            } else {
                0.0
            };
            let d = xv - y;
            total += d * d;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: usize, cols: usize, v: &[f64]) -> DenseMatrix {
        DenseMatrix::new(rows, cols, v.to_vec()).unwrap()
    }

    #[test]
    fn identity_times_matrix_is_matrix() {
        let m = dense(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let out = matmul(&DenseMatrix::identity(2), &m).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn hand_checked_product() {
        let a = dense(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = dense(2, 1, &[1.0, 1.0]);
        let out = matmul(&a, &b).unwrap();
        assert_eq!(out.values(), &[3.0, 7.0]);
    }

    #[test]
    fn mismatched_product_is_rejected() {
        let a = DenseMatrix::zeros(2, 3);
        let b = DenseMatrix::zeros(2, 3);
        assert!(matches!(matmul(&a, &b), Err(Error::ShapeError(_))));
    }

    #[test]
    fn sparse_identity_product_preserves_rhs() {
        let m = dense(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let out = sparse_dense_matmul(&SparseMatrix::identity(3), &m).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn zero_sparse_product_is_zero() {
        let m = dense(3, 2, &[1.0; 6]);
        let out = sparse_dense_matmul(&SparseMatrix::zeros(4, 3), &m).unwrap();
        assert_eq!(out, DenseMatrix::zeros(4, 2));
    }

    #[test]
    fn sparse_dense_mismatch_is_rejected() {
        let m = DenseMatrix::zeros(4, 2);
        assert!(sparse_dense_matmul(&SparseMatrix::zeros(4, 3), &m).is_err());
    }

    #[test]
    fn kl_zero_when_factors_reproduce_target() {
        let w = dense(2, 2, &[1.0, 0.5, 0.25, 2.0]);
        let h = dense(2, 3, &[1.0, 2.0, 0.5, 3.0, 0.1, 0.2]);
        let wh = matmul(&w, &h).unwrap();
        let mut trips = Vec::new();
        for r in 0..2 {
            for c in 0..3 {
                trips.push((r, c, wh.get(r, c)));
            }
        }
        let x = SparseMatrix::from_triplets(2, 3, &trips).unwrap();
        assert_eq!(kl_objective(&x, &w, &h).unwrap(), 0.0);
        assert_eq!(frobenius_objective(&x, &w, &h).unwrap(), 0.0);
    }

    #[test]
    fn kl_closed_form_single_cell() {
        // x = 1, y = e: 1 * ln(1/e) - 1 + e = e - 2
        let x = SparseMatrix::from_triplets(1, 1, &[(0, 0, 1.0)]).unwrap();
        let w = dense(1, 1, &[1.0]);
        let h = dense(1, 1, &[std::f64::consts::E]);
        let got = kl_objective(&x, &w, &h).unwrap();
        assert!((got - (std::f64::consts::E - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn kl_zero_entry_uses_plus_y_convention() {
        let x = SparseMatrix::zeros(1, 1);
        let w = dense(1, 1, &[1.0]);
        let h = dense(1, 1, &[0.5]);
        assert!((kl_objective(&x, &w, &h).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn frobenius_hand_checked() {
        let x = SparseMatrix::from_triplets(1, 2, &[(0, 0, 1.0)]).unwrap();
        let w = dense(1, 1, &[1.0]);
        let h = dense(1, 2, &[0.0, 1.0]);
        assert_eq!(frobenius_objective(&x, &w, &h).unwrap(), 2.0);
    }
}
