//! Compressed sparse row matrices with non-negative entries.
//!
//! Every motif formula is assembled from a handful of kernels on this type:
//! transpose, entrywise add and scale, and the masked product
//! `(X · Y) ⊙ Z` in [`motif_kernel`]. Column indices inside each row are
//! kept sorted and explicit zeros are never stored.

use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

fn check_value(v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::invalid(format!(
            "matrix entries must be finite and non-negative, got {v}"
        )));
    }
    Ok(())
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets in any order.
    /// Duplicate coordinates are summed and zero results dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::OutOfRange(format!(
                    "entry ({r}, {c}) in a {rows}x{cols} matrix"
                )));
            }
            check_value(v)?;
            entries.push((r, c, v));
        }
        entries.sort_unstable_by_key(|e| (e.0, e.1));

        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry") += v;
                continue;
            }
            last = Some((r, c));
            indptr[r + 1] += 1;
            indices.push(c);
            values.push(v);
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        let mut m = SparseMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        };
        m.prune_zeros();
        Ok(m)
    }

    /// Assembles a matrix from per-row `(sorted columns, values)` pairs.
    fn from_rows(rows: usize, cols: usize, row_data: Vec<(Vec<usize>, Vec<f64>)>) -> Self {
        debug_assert_eq!(row_data.len(), rows);
        let nnz = row_data.iter().map(|(c, _)| c.len()).sum();
        let mut indptr = Vec::with_capacity(rows + 1);
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        indptr.push(0);
        for (c, v) in row_data {
            indices.extend_from_slice(&c);
            values.extend_from_slice(&v);
            indptr.push(indices.len());
        }
        SparseMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    fn prune_zeros(&mut self) {
        if self.values.iter().all(|&v| v != 0.0) {
            return;
        }
        let mut write = 0;
        let mut start = 0;
        for r in 0..self.rows {
            let end = self.indptr[r + 1];
            for k in start..end {
                if self.values[k] != 0.0 {
                    self.indices[write] = self.indices[k];
                    self.values[write] = self.values[k];
                    write += 1;
                }
            }
            start = end;
            self.indptr[r + 1] = write;
        }
        self.indices.truncate(write);
        self.values.truncate(write);
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.indptr[r], self.indptr[r + 1]);
        (&self.indices[s..e], &self.values[s..e])
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.indptr[r + 1] - self.indptr[r]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        if r >= self.rows || c >= self.cols {
            return 0.0;
        }
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn contains(&self, r: usize, c: usize) -> bool {
        r < self.rows && self.row(r).0.binary_search(&c).is_ok()
    }

    /// Iterates stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).1.iter().sum()).collect()
    }

    /// Number of stored entries per column.
    pub fn col_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.cols];
        for &c in &self.indices {
            counts[c] += 1;
        }
        counts
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut indptr = vec![0usize; self.cols + 1];
        for &c in &self.indices {
            indptr[c + 1] += 1;
        }
        for c in 0..self.cols {
            indptr[c + 1] += indptr[c];
        }
        let mut next = indptr.clone();
        let mut indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let slot = next[c];
                indices[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            indptr,
            indices,
            values,
        }
    }

    fn check_same_dims(&self, other: &SparseMatrix, op: &'static str) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(())
    }

    /// Merges two matrices over the union of their supports; `f(a, b)` gets
    /// zero for a missing side. Zero results are dropped.
    pub fn union_with<F>(&self, other: &SparseMatrix, op: &'static str, f: F) -> Result<SparseMatrix>
    where
        F: Fn(f64, f64) -> f64,
    {
        self.check_same_dims(other, op)?;
        let mut indptr = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(self.nnz().max(other.nnz()));
        indptr.push(0);
        for r in 0..self.rows {
            let (ac, av) = self.row(r);
            let (bc, bv) = other.row(r);
            let (mut i, mut j) = (0, 0);
            while i < ac.len() || j < bc.len() {
                let (c, v) = if j >= bc.len() || (i < ac.len() && ac[i] < bc[j]) {
                    i += 1;
                    (ac[i - 1], f(av[i - 1], 0.0))
                } else if i >= ac.len() || bc[j] < ac[i] {
                    j += 1;
                    (bc[j - 1], f(0.0, bv[j - 1]))
                } else {
                    i += 1;
                    j += 1;
                    (ac[i - 1], f(av[i - 1], bv[j - 1]))
                };
                if v != 0.0 {
                    check_value(v)?;
                    indices.push(c);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Ok(SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.union_with(other, "add", |a, b| a + b)
    }

    /// Entrywise `self - other`. Fails if any result would be negative.
    pub fn subtract(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.union_with(other, "subtract", |a, b| a - b)
    }

    pub fn hadamard(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.union_with(other, "hadamard", |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Result<SparseMatrix> {
        check_value(c)?;
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out.prune_zeros();
        Ok(out)
    }

    /// Applies `f` to every stored value, dropping entries that become zero.
    pub fn map_values<F: Fn(f64) -> f64>(&self, f: F) -> Result<SparseMatrix> {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v = f(*v);
            check_value(*v)?;
        }
        out.prune_zeros();
        Ok(out)
    }

    /// Same support with every stored value replaced by one.
    pub fn binarized(&self) -> SparseMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = 1.0);
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.cols]; self.rows];
        for (r, c, v) in self.iter() {
            dense[r][c] = v;
        }
        dense
    }

    /// Writes the coordinate text format: optional `%`-prefixed header
    /// lines, then `%dims R C`, then one `i<TAB>j<TAB>value` per entry.
    pub fn write_coordinate<W: Write>(&self, out: &mut W, headers: &[String]) -> Result<()> {
        for h in headers {
            writeln!(out, "%{h}")?;
        }
        writeln!(out, "%dims {} {}", self.rows, self.cols)?;
        for (r, c, v) in self.iter() {
            writeln!(out, "{r}\t{c}\t{v}")?;
        }
        Ok(())
    }

    /// Reads the coordinate text format. Header lines other than `%dims`
    /// are returned verbatim (without the leading `%`).
    pub fn read_coordinate<R: BufRead>(input: R) -> Result<(SparseMatrix, Vec<String>)> {
        let mut dims = None;
        let mut headers = Vec::new();
        let mut triplets = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            let parse_err = |message: String| Error::Parse {
                line: lineno,
                message,
            };
            if let Some(h) = line.strip_prefix('%') {
                if let Some(d) = h.strip_prefix("dims ") {
                    let parts: Vec<&str> = d.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(parse_err(format!("bad dims header {line:?}")));
                    }
                    let r = parts[0].parse().map_err(|e| parse_err(format!("{e}")))?;
                    let c = parts[1].parse().map_err(|e| parse_err(format!("{e}")))?;
                    dims = Some((r, c));
                } else {
                    headers.push(h.to_string());
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            if parts.len() != 3 {
                return Err(parse_err(format!("expected 3 tab-separated fields, got {}", parts.len())));
            }
            let r: usize = parts[0].parse().map_err(|e| parse_err(format!("row: {e}")))?;
            let c: usize = parts[1].parse().map_err(|e| parse_err(format!("col: {e}")))?;
            let v: f64 = parts[2].parse().map_err(|e| parse_err(format!("value: {e}")))?;
            triplets.push((r, c, v));
        }
        let (rows, cols) = dims.ok_or_else(|| Error::invalid("missing %dims header"))?;
        Ok((SparseMatrix::from_triplets(rows, cols, triplets)?, headers))
    }
}

/// Computes `(X · Y) ⊙ Z`: the product `X · Y` evaluated only on the
/// support of `Z` and multiplied entrywise by `Z`.
///
/// Rows are processed in parallel; each output entry is accumulated in a
/// fixed order, so the result does not depend on the thread count.
pub fn motif_kernel(x: &SparseMatrix, y: &SparseMatrix, z: &SparseMatrix) -> Result<SparseMatrix> {
    if x.cols != y.rows {
        return Err(Error::DimensionMismatch {
            op: "motif_kernel (X·Y)",
            left: x.dims(),
            right: y.dims(),
        });
    }
    if (x.rows, y.cols) != z.dims() {
        return Err(Error::DimensionMismatch {
            op: "motif_kernel (⊙Z)",
            left: (x.rows, y.cols),
            right: z.dims(),
        });
    }

    let rows: Vec<(Vec<usize>, Vec<f64>)> = (0..z.rows)
        .into_par_iter()
        .map_init(
            || (vec![usize::MAX; z.cols], vec![0.0f64; z.cols]),
            |(stamp, acc), i| {
                let (zc, zv) = z.row(i);
                if zc.is_empty() {
                    return (Vec::new(), Vec::new());
                }
                for &j in zc {
                    stamp[j] = i;
                    acc[j] = 0.0;
                }
                let (xc, xv) = x.row(i);
                for (&k, &xik) in xc.iter().zip(xv) {
                    let (yc, yv) = y.row(k);
                    for (&j, &ykj) in yc.iter().zip(yv) {
                        if stamp[j] == i {
                            acc[j] += xik * ykj;
                        }
                    }
                }
                let mut cols = Vec::new();
                let mut vals = Vec::new();
                for (&j, &zij) in zc.iter().zip(zv) {
                    let v = acc[j] * zij;
                    if v != 0.0 {
                        cols.push(j);
                        vals.push(v);
                    }
                }
                (cols, vals)
            },
        )
        .collect();
    Ok(SparseMatrix::from_rows(z.rows, z.cols, rows))
}
