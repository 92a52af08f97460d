//! Minimal sparse matrix support: triplet assembly, compressed storage and a
//! left-looking sparse LU with partial pivoting for the monolithic saddle
//! solves. Matrices here are small enough (tens of thousands of unknowns)
//! that fill-reducing orderings are not worth their complexity.

use std::io::{self, Write};

use crate::error::{Error, Result};

/// Triplet (coordinate) matrix. Duplicate coordinates are summed on
/// compression.
#[derive(Debug, Clone)]
pub struct Coo {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Coo {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, val));
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored entries (structural nonzeros).
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn to_csr(&self) -> Csr {
        let mut indptr = vec![0usize; self.nrows + 1];
        for &(r, _, _) in &self.entries {
            indptr[r + 1] += 1;
        }
        for i in 0..self.nrows {
            indptr[i + 1] += indptr[i];
        }
        let mut indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        let mut next = indptr.clone();
        for &(r, c, v) in &self.entries {
            let slot = next[r];
            indices[slot] = c;
            values[slot] = v;
            next[r] += 1;
        }
        // Sort each row by column and merge duplicates.
        let mut out_indptr = vec![0usize; self.nrows + 1];
        let mut out_indices = Vec::with_capacity(self.nnz());
        let mut out_values = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            let lo = indptr[r];
            let hi = indptr[r + 1];
            let mut row: Vec<(usize, f64)> = indices[lo..hi]
                .iter()
                .copied()
                .zip(values[lo..hi].iter().copied())
                .collect();
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                if let Some(last) = out_indices.last() {
                    if *last == c && out_indices.len() > out_indptr[r] {
                        *out_values.last_mut().unwrap() += v;
                        continue;
                    }
                }
                out_indices.push(c);
                out_values.push(v);
            }
            out_indptr[r + 1] = out_indices.len();
        }
        Csr {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr: out_indptr,
            indices: out_indices,
            values: out_values,
        }
    }

    pub fn to_csc(&self) -> Csc {
        let transposed = Coo {
            nrows: self.ncols,
            ncols: self.nrows,
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        };
        let csr = transposed.to_csr();
        Csc {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr: csr.indptr,
            indices: csr.indices,
            values: csr.values,
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.nrows, self.ncols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// Write the matrix as "row col value" triplet lines (0-based indices),
    /// sorted by row then column.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut sorted = self.entries.clone();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        for (r, c, v) in sorted {
            writeln!(w, "{} {} {:.16e}", r, c, v)?;
        }
        Ok(())
    }
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct Csr {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl Csr {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            y[r] = acc;
        }
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = self.indptr[r];
        let hi = self.indptr[r + 1];
        (&self.indices[lo..hi], &self.values[lo..hi])
    }
}

/// Compressed sparse column matrix.
#[derive(Debug, Clone)]
pub struct Csc {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl Csc {
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn col(&self, c: usize) -> (&[usize], &[f64]) {
        let lo = self.indptr[c];
        let hi = self.indptr[c + 1];
        (&self.indices[lo..hi], &self.values[lo..hi])
    }
}

/// Sparse LU factorization P A = L U with partial pivoting, built column by
/// column (left-looking, dense working column). L is unit lower triangular;
/// its columns are stored with original row indices, U's rows are stored by
/// pivot position.
pub struct SparseLu {
    n: usize,
    /// Strictly-lower part of L per column, (original row, multiplier).
    l_cols: Vec<Vec<(usize, f64)>>,
    /// Strictly-upper part of U per column, (pivot position, value).
    u_cols: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
    /// Pivot position -> original row.
    perm: Vec<usize>,
}

impl SparseLu {
    pub fn factor(a: &Csc) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                context: "sparse LU: matrix must be square",
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        let n = a.nrows();
        let mut l_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut u_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut u_diag = vec![0.0; n];
        let mut perm = Vec::with_capacity(n);
        // pinv[orig row] = pivot position, or usize::MAX while unpivoted.
        let mut pinv = vec![usize::MAX; n];
        let mut work = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::with_capacity(n);

        for j in 0..n {
            let (rows, vals) = a.col(j);
            for (&r, &v) in rows.iter().zip(vals) {
                if work[r] == 0.0 {
                    touched.push(r);
                }
                work[r] += v;
            }
            // Eliminate with the already-pivoted columns, in pivot order.
            let mut ucol = Vec::new();
            for k in 0..j {
                let piv_row = perm[k];
                let ukj = work[piv_row];
                if ukj == 0.0 {
                    continue;
                }
                ucol.push((k, ukj));
                work[piv_row] = 0.0;
                for &(r, l) in &l_cols[k] {
                    if work[r] == 0.0 {
                        touched.push(r);
                    }
                    work[r] -= l * ukj;
                }
            }
            // Partial pivot among the not-yet-pivoted rows.
            let mut piv = usize::MAX;
            let mut piv_abs = 0.0;
            for &r in &touched {
                if pinv[r] == usize::MAX && work[r].abs() > piv_abs {
                    piv_abs = work[r].abs();
                    piv = r;
                }
            }
            if piv == usize::MAX || piv_abs == 0.0 {
                return Err(Error::SingularSystem("sparse LU"));
            }
            let pivot_val = work[piv];
            let mut lcol = Vec::new();
            for &r in &touched {
                let v = work[r];
                work[r] = 0.0;
                if r == piv || v == 0.0 {
                    continue;
                }
                if pinv[r] == usize::MAX {
                    lcol.push((r, v / pivot_val));
                } else {
                    // Numerically cancelled entry of an already-pivoted row;
                    // it belongs to U.
                    ucol.push((pinv[r], v));
                }
            }
            touched.clear();
            pinv[piv] = j;
            perm.push(piv);
            u_diag[j] = pivot_val;
            ucol.sort_by_key(|&(k, _)| k);
            u_cols.push(ucol);
            l_cols.push(lcol);
        }
        Ok(Self {
            n,
            l_cols,
            u_cols,
            u_diag,
            perm,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nonzeros stored in the L and U factors (including unit diagonal).
    pub fn factor_nnz(&self) -> usize {
        let l: usize = self.l_cols.iter().map(Vec::len).sum();
        let u: usize = self.u_cols.iter().map(Vec::len).sum();
        l + u + 2 * self.n
    }

    /// Solve A x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.n);
        // Forward substitution L y = P b, working in original row indices.
        let mut work = b.to_vec();
        let mut y = vec![0.0; self.n];
        for k in 0..self.n {
            let v = work[self.perm[k]];
            y[k] = v;
            if v != 0.0 {
                for &(r, l) in &self.l_cols[k] {
                    work[r] -= l * v;
                }
            }
        }
        // Back substitution U x = y, by columns.
        for j in (0..self.n).rev() {
            let xj = y[j] / self.u_diag[j];
            y[j] = xj;
            if xj != 0.0 {
                for &(k, u) in &self.u_cols[j] {
                    y[k] -= u * xj;
                }
            }
        }
        y
    }
}
