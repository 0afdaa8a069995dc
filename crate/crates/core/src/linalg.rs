//! Small dense complex matrix toolkit (row-major).

use crate::scalar::{cz, Real, C};

#[derive(Clone, Debug, PartialEq)]
pub struct CMat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![cz(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix buffer size");
        Self { rows, cols, data }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> C<T> {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut C<T> {
        &mut self.data[r * self.cols + c]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul inner dimension");
        let mut out = Self::zeros(self.rows, other.cols);
        T::gemm(self.rows, self.cols, other.cols, &self.data, &other.data, &mut out.data);
        out
    }

    pub fn frob2(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&mut self, s: T) {
        for z in &mut self.data {
            *z = *z * s;
        }
    }

    /// Keep the first `k` columns.
    pub fn take_cols(&self, k: usize) -> Self {
        let mut out = Self::zeros(self.rows, k);
        for r in 0..self.rows {
            out.data[r * k..(r + 1) * k].copy_from_slice(&self.data[r * self.cols..r * self.cols + k]);
        }
        out
    }

    /// Keep the first `k` rows.
    pub fn take_rows(&self, k: usize) -> Self {
        Self::from_vec(k, self.cols, self.data[..k * self.cols].to_vec())
    }

    /// Largest deviation of `A^H A` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.adjoint().matmul(self);
        let mut worst = 0.0f64;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                let z = g.at(i, j);
                worst = worst.max(((z.re.as_f64() - target).powi(2) + z.im.as_f64().powi(2)).sqrt());
            }
        }
        worst
    }
}

/// Thin QR by classical Gram-Schmidt with one re-orthogonalization pass.
///
/// Columns that vanish against the span of their predecessors are dropped,
/// so `q` is rows x k with k <= min(rows, cols) and `r` is k x cols.
pub fn thin_qr<T: Real>(a: &CMat<T>) -> (CMat<T>, CMat<T>) {
    let (m, n) = (a.rows, a.cols);
    let mut cols: Vec<Vec<C<T>>> = (0..n).map(|c| (0..m).map(|r| a.at(r, c)).collect()).collect();
    let scale = cols
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<T>())
        .fold(T::zero(), |acc, x| acc.max(x))
        .sqrt();
    let drop_tol = scale * T::lit(1e-13);
    let mut qcols: Vec<Vec<C<T>>> = Vec::new();
    let mut coeffs = vec![vec![cz::<T>(); n]; n.min(m)];
    for c in 0..n {
        let mut v = std::mem::take(&mut cols[c]);
        let mut acc = vec![cz::<T>(); qcols.len()];
        for _pass in 0..2 {
            for (k, q) in qcols.iter().enumerate() {
                let mut dot = cz::<T>();
                for (qi, vi) in q.iter().zip(v.iter()) {
                    dot = dot + qi.conj() * *vi;
                }
                for (vi, qi) in v.iter_mut().zip(q.iter()) {
                    *vi = *vi - *qi * dot;
                }
                acc[k] = acc[k] + dot;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for (k, d) in acc.into_iter().enumerate() {
            coeffs[k][c] = d;
        }
        if norm > drop_tol && norm > T::zero() && qcols.len() < m {
            let inv = T::one() / norm;
            for z in v.iter_mut() {
                *z = *z * inv;
            }
            let k = qcols.len();
            coeffs[k][c] = C::new(norm, T::zero());
            qcols.push(v);
        }
    }
    let k = qcols.len().max(1);
    let mut q = CMat::zeros(m, k);
    if qcols.is_empty() && m > 0 {
        *q.at_mut(0, 0) = C::new(T::one(), T::zero());
    }
    for (j, col) in qcols.iter().enumerate() {
        for r in 0..m {
            q.data[r * k + j] = col[r];
        }
    }
    let mut r = CMat::zeros(k, n);
    for i in 0..qcols.len() {
        for c in 0..n {
            r.data[i * n + c] = coeffs[i][c];
        }
    }
    (q, r)
}
