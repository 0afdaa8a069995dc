//! Scalar abstraction shared by the numerical kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

pub type C<T> = Complex<T>;

/// Thin SVD factors in row-major layout: `u` is rows x k, `vh` is k x cols.
pub struct DenseSvd<T> {
    pub u: Vec<C<T>>,
    pub s: Vec<T>,
    pub vh: Vec<C<T>>,
    pub k: usize,
}

/// Floating point type usable by the simulator.
///
/// Besides the usual float behaviour the two backend hooks route dense
/// complex products and small exact SVDs to optimized implementations.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Default + Debug + Display + Sum + Send + Sync + 'static
{
    /// `c = a * b` for row-major `a` (m x k), `b` (k x n), `c` (m x n).
    fn gemm(m: usize, k: usize, n: usize, a: &[C<Self>], b: &[C<Self>], c: &mut [C<Self>]);

    /// Exact thin SVD of a row-major rows x cols matrix.
    fn dense_svd(rows: usize, cols: usize, a: &[C<Self>]) -> DenseSvd<Self>;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

fn nalgebra_svd<T>(rows: usize, cols: usize, a: &[C<T>]) -> DenseSvd<T>
where
    T: Real + nalgebra::RealField,
{
    let m = DMatrix::<C<T>>::from_row_slice(rows, cols, a);
    let svd = m.svd(true, true);
    let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let s_raw: Vec<T> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..s_raw.len()).collect();
    order.sort_by(|&i, &j| s_raw[j].partial_cmp(&s_raw[i]).unwrap_or(std::cmp::Ordering::Equal));
    let k = order.len();
    let mut uo = vec![C::new(T::zero(), T::zero()); rows * k];
    let mut vo = vec![C::new(T::zero(), T::zero()); k * cols];
    let mut s = Vec::with_capacity(k);
    for (new, &old) in order.iter().enumerate() {
        s.push(s_raw[old]);
        for r in 0..rows {
            uo[r * k + new] = u[(r, old)];
        }
        for c in 0..cols {
            vo[new * cols + c] = vt[(old, c)];
        }
    }
    DenseSvd { u: uo, s, vh: vo, k }
}

impl Real for f64 {
    fn gemm(m: usize, k: usize, n: usize, a: &[C<f64>], b: &[C<f64>], c: &mut [C<f64>]) {
        assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
        if m == 0 || n == 0 {
            return;
        }
        if k == 0 {
            c[..m * n].fill(C::new(0.0, 0.0));
            return;
        }
        // SAFETY: Complex<f64> is repr(C) with layout [re, im], matching c64;
        // the slices are bounds-checked above and c does not alias a or b.
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                m,
                k,
                n,
                [1.0, 0.0],
                a.as_ptr() as *const [f64; 2],
                k as isize,
                1,
                b.as_ptr() as *const [f64; 2],
                n as isize,
                1,
                [0.0, 0.0],
                c.as_mut_ptr() as *mut [f64; 2],
                n as isize,
                1,
            );
        }
    }

    fn dense_svd(rows: usize, cols: usize, a: &[C<f64>]) -> DenseSvd<f64> {
        nalgebra_svd(rows, cols, a)
    }
}

impl Real for f32 {
    fn gemm(m: usize, k: usize, n: usize, a: &[C<f32>], b: &[C<f32>], c: &mut [C<f32>]) {
        assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
        if m == 0 || n == 0 {
            return;
        }
        if k == 0 {
            c[..m * n].fill(C::new(0.0, 0.0));
            return;
        }
        // SAFETY: as for f64, Complex<f32> matches the c32 layout.
        unsafe {
            matrixmultiply::cgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                m,
                k,
                n,
                [1.0, 0.0],
                a.as_ptr() as *const [f32; 2],
                k as isize,
                1,
                b.as_ptr() as *const [f32; 2],
                n as isize,
                1,
                [0.0, 0.0],
                c.as_mut_ptr() as *mut [f32; 2],
                n as isize,
                1,
            );
        }
    }

    fn dense_svd(rows: usize, cols: usize, a: &[C<f32>]) -> DenseSvd<f32> {
        nalgebra_svd(rows, cols, a)
    }
}

#[inline]
pub fn cz<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

#[inline]
pub fn cr<T: Real>(re: T) -> C<T> {
    C::new(re, T::zero())
}

/// `e^{i phi}`
#[inline]
pub fn cis<T: Real>(phi: T) -> C<T> {
    C::new(phi.cos(), phi.sin())
}
