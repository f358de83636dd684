//! Text triplet persistence: a `rows cols nnz` header line followed by one
//! `row col value` line per stored entry, ASCII with LF line endings.
//!
//! Values are printed with Rust's shortest round-trip float formatting, so a
//! dump/load cycle reproduces every entry bit-for-bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SparseMatrix};

pub fn write_sparse<W: Write>(m: &SparseMatrix, mut out: W) -> Result<()> {
    writeln!(out, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for (r, c, v) in m.iter() {
        writeln!(out, "{} {} {}", r, c, v)?;
    }
    Ok(())
}

pub fn read_sparse<R: BufRead>(input: R) -> Result<SparseMatrix> {
    let mut lines = input.lines().enumerate();
    let (rows, cols, nnz) = loop {
        match lines.next() {
            Some((idx, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let mut parts = line.split_whitespace();
                let parse = |s: Option<&str>| -> Result<usize> {
                    s.ok_or_else(|| Error::parse(idx + 1, "expected `rows cols nnz` header"))?
                        .parse::<usize>()
                        .map_err(|e| Error::parse(idx + 1, e))
                };
                let rows = parse(parts.next())?;
                let cols = parse(parts.next())?;
                let nnz = parse(parts.next())?;
                if parts.next().is_some() {
                    return Err(Error::parse(idx + 1, "trailing fields in header"));
                }
                break (rows, cols, nnz);
            }
            None => return Err(Error::parse(1, "missing `rows cols nnz` header")),
        }
    };

    let mut triplets = Vec::with_capacity(nnz);
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let row: usize = parts
            .next()
            .ok_or_else(|| Error::parse(idx + 1, "expected `row col value`"))?
            .parse()
            .map_err(|e| Error::parse(idx + 1, e))?;
        let col: usize = parts
            .next()
            .ok_or_else(|| Error::parse(idx + 1, "missing column index"))?
            .parse()
            .map_err(|e| Error::parse(idx + 1, e))?;
        let value: f64 = parts
            .next()
            .ok_or_else(|| Error::parse(idx + 1, "missing value"))?
            .parse()
            .map_err(|e| Error::parse(idx + 1, e))?;
        if parts.next().is_some() {
            return Err(Error::parse(idx + 1, "trailing fields in entry"));
        }
        triplets.push((row, col, value));
    }
    if triplets.len() != nnz {
        return Err(Error::parse(
            1,
            format!("header declared {} entries, found {}", nnz, triplets.len()),
        ));
    }
    SparseMatrix::from_triplets(rows, cols, &triplets)
}

pub fn write_sparse_file(m: &SparseMatrix, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    write_sparse(m, BufWriter::new(file))
}

pub fn read_sparse_file(path: &Path) -> Result<SparseMatrix> {
    let file = File::open(path)?;
    read_sparse(BufReader::new(file))
}

/// Dense matrices share the triplet format; zeros are implicit.
pub fn write_dense<W: Write>(m: &DenseMatrix, mut out: W) -> Result<()> {
    let nnz = m.values().iter().filter(|&&v| v != 0.0).count();
    writeln!(out, "{} {} {}", m.rows(), m.cols(), nnz)?;
    for r in 0..m.rows() {
        for (c, &v) in m.row(r).iter().enumerate() {
            if v != 0.0 {
                writeln!(out, "{} {} {}", r, c, v)?;
            }
        }
    }
    Ok(())
}

pub fn read_dense<R: BufRead>(input: R) -> Result<DenseMatrix> {
    Ok(read_sparse(input)?.to_dense())
}

pub fn write_dense_file(m: &DenseMatrix, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    write_dense(m, BufWriter::new(file))
}

pub fn read_dense_file(path: &Path) -> Result<DenseMatrix> {
    let file = File::open(path)?;
    read_dense(BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_round_trip_is_exact() {
        let m = SparseMatrix::from_triplets(
            3,
            4,
            &[(0, 1, 0.1), (2, 3, 7.25), (1, 0, 1e-9), (2, 0, 3.0)],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_sparse(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("3 4 4\n"));
        assert!(text.ends_with('\n'));
        let back = read_sparse(&buf[..]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn dense_round_trip_restores_zeros() {
        let m = DenseMatrix::new(2, 3, vec![0.0, 1.5, 0.0, 2.0, 0.0, 0.25]).unwrap();
        let mut buf = Vec::new();
        write_dense(&m, &mut buf).unwrap();
        let back = read_dense(&buf[..]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn malformed_lines_name_their_line_number() {
        let text = "2 2 1\n0 0 oops\n";
        let err = read_sparse(text.as_bytes()).unwrap_err();
        match err {
            Error::ParseError { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn header_entry_count_is_checked() {
        let text = "2 2 2\n0 0 1.0\n";
        assert!(read_sparse(text.as_bytes()).is_err());
    }
}
