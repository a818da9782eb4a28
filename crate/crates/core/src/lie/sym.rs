use serde::{Deserialize, Serialize};

use super::Mat3;

/// Real symmetric matrix stored as its packed lower triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTensor {
    dim: usize,
    packed: Vec<f64>,
}

fn idx(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymTensor {
    pub fn zeros(dim: usize) -> Self {
        SymTensor { dim, packed: vec![0.0; dim * (dim + 1) / 2] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut s = Self::zeros(dim);
        for i in 0..dim {
            s.set(i, i, 1.0);
        }
        s
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut s = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            s.set(i, i, v);
        }
        s
    }

    /// Symmetrizes a dense square matrix given by rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut s = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                s.set(i, j, 0.5 * (rows[i][j] + rows[j][i]));
            }
        }
        s
    }

    pub fn from_mat3(m: &Mat3) -> Self {
        let rows: Vec<Vec<f64>> = m.iter().map(|r| r.to_vec()).collect();
        Self::from_rows(&rows)
    }

    /// 6×6 block operator (A B; B A) with diagonal A and B.
    pub fn block_ab(a: &[f64; 3], b: &[f64; 3]) -> Self {
        let mut s = Self::zeros(6);
        for k in 0..3 {
            s.set(k, k, a[k]);
            s.set(k + 3, k + 3, a[k]);
            s.set(k + 3, k, b[k]);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.packed[idx(i, j)] = v;
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn to_mat3(&self) -> Mat3 {
        assert_eq!(self.dim, 3);
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    pub fn quad(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.get(i, j).powi(2);
            }
        }
        s.sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        SymTensor { dim: self.dim, packed: self.packed.iter().map(|v| c * v).collect() }
    }

    pub fn plus(&self, other: &SymTensor) -> Self {
        assert_eq!(self.dim, other.dim);
        let packed = self.packed.iter().zip(&other.packed).map(|(a, b)| a + b).collect();
        SymTensor { dim: self.dim, packed }
    }

    pub fn minus(&self, other: &SymTensor) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    /// `R S Rᵀ` for a square `r` given by rows.
    pub fn conjugate(&self, r: &[Vec<f64>]) -> Self {
        let n = self.dim;
        let mut rs = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                rs[i][j] = (0..n).map(|k| r[i][k] * self.get(k, j)).sum();
            }
        }
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                out.set(i, j, (0..n).map(|k| rs[i][k] * r[j][k]).sum());
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.packed.iter().all(|v| v.is_finite())
    }
}
