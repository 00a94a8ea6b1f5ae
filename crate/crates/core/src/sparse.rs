//! Compressed-row copies of dense operators for the inner time-stepping
//! loops. Ladder-operator products are mostly zeros; stepping through
//! hundreds of thousands of time steps with dense matvecs would dominate
//! runtime.

use std::borrow::Cow;

use num_complex::Complex64;

use crate::space::{CMatrix, CVector};

#[derive(Debug, Clone)]
pub(crate) struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    /// Max absolute row sum, an upper bound on the spectral norm for
    /// Hermitian combinations.
    row_bound: f64,
}

impl Csr {
    pub fn from_dense(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut row_bound = 0.0_f64;
        row_ptr.push(0);
        for r in 0..dim {
            let mut sum = 0.0;
            for c in 0..dim {
                let v = m[(r, c)];
                if v.re != 0.0 || v.im != 0.0 {
                    cols.push(c);
                    vals.push(v);
                    sum += v.norm();
                }
            }
            row_bound = row_bound.max(sum);
            row_ptr.push(cols.len());
        }
        Csr {
            dim,
            row_ptr,
            cols,
            vals,
            row_bound,
        }
    }

    #[cfg(test)]
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row_bound(&self) -> f64 {
        self.row_bound
    }

    /// `y += c · A x`
    #[inline]
    pub fn axpy(&self, c: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.dim) {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yr += c * acc;
        }
    }

    /// `Y += c · A X` for a column-major dense `X`.
    pub fn axpy_matrix(&self, c: Complex64, x: &CMatrix, y: &mut CMatrix) {
        let n = x.ncols();
        for j in 0..n {
            let xj = x.column(j);
            let xs = xj.as_slice();
            let mut yj = y.column_mut(j);
            let ys = yj.as_mut_slice();
            self.axpy(c, xs, ys);
        }
    }
}

/// A Hamiltonian frozen at one instant: `Σ c_k A_k`.
#[derive(Debug, Clone)]
pub struct Generator<'a> {
    pub(crate) dim: usize,
    pub(crate) parts: Vec<(Cow<'a, Csr>, Complex64)>,
}

impl<'a> Generator<'a> {
    pub(crate) fn new(dim: usize) -> Self {
        Generator {
            dim,
            parts: Vec::new(),
        }
    }

    pub(crate) fn from_dense(m: &CMatrix) -> Generator<'static> {
        Generator {
            dim: m.nrows(),
            parts: vec![(Cow::Owned(Csr::from_dense(m)), Complex64::new(1.0, 0.0))],
        }
    }

    pub(crate) fn push(&mut self, m: &'a Csr, c: Complex64) {
        if c.re != 0.0 || c.im != 0.0 {
            self.parts.push((Cow::Borrowed(m), c));
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        self.parts.iter().map(|(m, c)| c.norm() * m.row_bound()).sum()
    }

    /// `y = c · H x`
    pub fn apply_scaled(&self, c: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (m, k) in &self.parts {
            m.axpy(c * k, x, y);
        }
    }

    /// `Y += c · H X`
    pub fn apply_matrix(&self, c: Complex64, x: &CMatrix, y: &mut CMatrix) {
        for (m, k) in &self.parts {
            m.axpy_matrix(c * k, x, y);
        }
    }

    /// Dense copy, mainly for tests.
    pub fn to_dense(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        let mut x = CVector::zeros(self.dim);
        let mut y = CVector::zeros(self.dim);
        for j in 0..self.dim {
            x.fill(Complex64::new(0.0, 0.0));
            x[j] = Complex64::new(1.0, 0.0);
            self.apply_scaled(Complex64::new(1.0, 0.0), x.as_slice(), y.as_mut_slice());
            out.set_column(j, &y);
        }
        out
    }
}
