//! Dense square matrix used for liability and impact matrices.
//!
//! Networks in this crate are small (tens of banks), so a dense row-major
//! buffer is simpler and faster than a sparse structure.

use serde::{Deserialize, Serialize};

/// Row-major dense N x N matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    /// All-zero N x N matrix.
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Build from row-major data; `data.len()` must equal `n * n`.
    pub fn from_rows(n: usize, data: Vec<f64>) -> crate::Result<Self> {
        if data.len() != n * n {
            return Err(crate::Error::Dimension(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(SquareMatrix { n, data })
    }

    /// Build from nested rows, e.g. `&[&[0.0, 5.0], &[0.0, 0.0]]`.
    pub fn from_nested(rows: &[&[f64]]) -> crate::Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(crate::Error::Dimension(format!(
                    "row has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    /// Row-major view of the raw buffer.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// l_i = sum over j of M[i][j].
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().sum())
            .collect()
    }

    /// a_j = sum over i of M[i][j].
    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                sums[j] += self.data[i * self.n + j];
            }
        }
        sums
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Count of strictly positive off-diagonal entries.
    pub fn link_count(&self) -> usize {
        let mut m = 0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.get(i, j) > 0.0 {
                    m += 1;
                }
            }
        }
        m
    }

    /// Multiply every entry by `factor`.
    pub fn scale(&self, factor: f64) -> SquareMatrix {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }
}
