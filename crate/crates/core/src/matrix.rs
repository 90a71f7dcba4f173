//! Dense symmetric matrices and their plain-text file format.
//!
//! The text format is the count `n` on the first line followed by `n` lines of
//! `n` whitespace-separated decimal numbers. Readers require `Q_ij == Q_ji`
//! numerically; the textual spelling of mirrored entries may differ.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Dense symmetric `n × n` matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds a matrix by evaluating `f(i, j)` on the upper triangle (`i <= j`)
    /// and mirroring. Entries must be finite.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("matrix dimension must be at least 1".into()));
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(Error::Domain(format!("entry ({i}, {j}) is not finite")));
                }
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Ok(Self { n, data })
    }

    /// Builds a matrix from full rows, rejecting any asymmetry.
    #[allow(clippy::needless_range_loop)]
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Domain("matrix dimension must be at least 1".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Format(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                r.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let v = rows[i][j];
                if !v.is_finite() {
                    return Err(Error::Domain(format!(
                        "entry ({}, {}) is not finite",
                        i + 1,
                        j + 1
                    )));
                }
                if j > i && v != rows[j][i] {
                    return Err(Error::Format(format!(
                        "matrix is not symmetric at ({}, {}): {} vs {}",
                        i + 1,
                        j + 1,
                        v,
                        rows[j][i]
                    )));
                }
            }
        }
        Ok(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    /// Diagonal matrix with zero off-diagonal entries.
    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        assert!(n > 0, "empty diagonal");
        let mut data = vec![0.0; n * n];
        for (i, &d) in diag.iter().enumerate() {
            data[i * n + i] = d;
        }
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diag(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.get(i, i))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Principal submatrix on `indices` (in the given order).
    pub fn principal(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                data.push(self.get(i, j));
            }
        }
        Self { n: k, data }
    }

    /// `self + c·E` where `E` is the all-ones matrix.
    pub fn add_constant(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v + c).collect(),
        }
    }

    /// Quadratic form `xᵀ Q x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                if x[i] == 0.0 {
                    return 0.0;
                }
                let row = self.row(i);
                x[i] * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            })
            .sum()
    }

    /// Quadratic form restricted to a sparse vector given by `(index, weight)`.
    pub fn sparse_quad_form(&self, support: &[usize], weights: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (a, &i) in support.iter().enumerate() {
            for (b, &j) in support.iter().enumerate() {
                acc += weights[a] * weights[b] * self.get(i, j);
            }
        }
        acc
    }

    /// Serializes to the text format. Values use Rust's shortest round-trip
    /// representation, so `parse(to_text(q)) == q` bit for bit.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n * self.n * 24);
        let _ = writeln!(out, "{}", self.n);
        for i in 0..self.n {
            let line: Vec<String> = self.row(i).iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty input".into()))?;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("bad dimension line {header:?}")))?;
        if n == 0 {
            return Err(Error::Format("dimension must be at least 1".into()));
        }
        let mut rows = Vec::with_capacity(n);
        for (i, line) in lines.by_ref().take(n).enumerate() {
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| Error::Format(format!("row {}: bad number {tok:?}", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::Format(format!(
                "expected {n} rows, found {}",
                rows.len()
            )));
        }
        if lines.next().is_some() {
            return Err(Error::Format(format!("trailing data after {n} rows")));
        }
        Self::from_rows(&rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_is_exact() {
        let q =
            SymmetricMatrix::from_upper_fn(3, |i, j| (i as f64 + 0.1) / (j as f64 + 3.0) - 1e-17)
                .unwrap();
        let back = SymmetricMatrix::parse(&q.to_text()).unwrap();
        assert_eq!(q, back);
        assert!(q.to_text().starts_with("3\n"));
        assert_eq!(q.to_text().lines().count(), 4);
    }

    #[test]
    fn parse_accepts_differently_spelled_mirror() {
        let q = SymmetricMatrix::parse("2\n1 0.5\n5e-1 2\n").unwrap();
        assert_eq!(q.get(1, 0), 0.5);
    }

    #[test]
    fn parse_rejects_asymmetry() {
        let err = SymmetricMatrix::parse("2\n1 0.5\n0.4 2\n").unwrap_err();
        assert!(matches!(err, Error::Format(_)));
    }

    #[test]
    fn parse_rejects_ragged_and_short() {
        assert!(SymmetricMatrix::parse("2\n1 0.5\n0.5\n").is_err());
        assert!(SymmetricMatrix::parse("3\n1 0 0\n0 1 0\n").is_err());
        assert!(SymmetricMatrix::parse("0\n").is_err());
        assert!(SymmetricMatrix::parse("").is_err());
        assert!(SymmetricMatrix::parse("1\nnan\n").is_err());
    }

    #[test]
    fn quad_form_matches_sparse_form() {
        let q = SymmetricMatrix::from_upper_fn(4, |i, j| (i * 4 + j) as f64 - 5.0).unwrap();
        let x = [0.0, 0.25, 0.0, 0.75];
        let sparse = q.sparse_quad_form(&[1, 3], &[0.25, 0.75]);
        assert!((q.quad_form(&x) - sparse).abs() < 1e-14);
    }
}
