//! Dense matrices and LU factorization with partial pivoting.
//!
//! The tracked Jacobians are M-matrices along the whole path, so partial
//! pivoting is sufficient. A pivot falling below `1e-14 * max|entry|` is
//! reported as `SingularMatrix`; on valid inputs this never fires.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(DenseMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, e| acc.max(e.abs()))
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        Ok(y)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Packed LU factors with the row permutation applied during elimination.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    factors: DenseMatrix,
    pivot: Vec<usize>,
    sign: f64,
    min_pivot: f64,
}

impl LuFactorization {
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn factors(&self) -> &DenseMatrix {
        &self.factors
    }

    pub fn pivot(&self) -> &[usize] {
        &self.pivot
    }
}

/// Factor a square matrix with partial (row) pivoting.
pub fn lu_factor(m: &DenseMatrix) -> Result<LuFactorization> {
    if m.rows != m.cols {
        return Err(Error::InvalidArgument(format!(
            "lu_factor requires a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let threshold = 1e-14 * m.max_abs();
    let mut a = m.clone();
    let mut pivot = Vec::with_capacity(n);
    let mut sign = 1.0;
    let mut min_pivot = f64::INFINITY;

    for k in 0..n {
        let mut p = k;
        let mut best = a[(k, k)].abs();
        for i in k + 1..n {
            let v = a[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= threshold {
            return Err(Error::SingularMatrix {
                pivot: best,
                threshold,
            });
        }
        if p != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = t;
            }
            sign = -sign;
        }
        pivot.push(p);
        min_pivot = min_pivot.min(best);

        let d = a[(k, k)];
        for i in k + 1..n {
            let l = a[(i, k)] / d;
            a[(i, k)] = l;
            for j in k + 1..n {
                a[(i, j)] -= l * a[(k, j)];
            }
        }
    }

    Ok(LuFactorization {
        factors: a,
        pivot,
        sign,
        min_pivot,
    })
}

/// Solve M*y = rhs given the factorization of M.
pub fn lu_solve(f: &LuFactorization, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = f.factors.rows;
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let mut y = rhs.to_vec();
    for k in 0..n {
        y.swap(k, f.pivot[k]);
    }
    // forward substitution, unit lower triangle
    for i in 1..n {
        let mut s = y[i];
        for j in 0..i {
            s -= f.factors[(i, j)] * y[j];
        }
        y[i] = s;
    }
    // back substitution
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in i + 1..n {
            s -= f.factors[(i, j)] * y[j];
        }
        y[i] = s / f.factors[(i, i)];
    }
    Ok(y)
}

/// Factor and solve in one call.
pub fn solve(m: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    lu_solve(&lu_factor(m)?, rhs)
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
