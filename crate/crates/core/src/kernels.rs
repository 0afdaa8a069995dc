//! Spectral single-line and two-axis kernels on the shared grid.
//!
//! Amplitudes are stored as `c_j = psi(x_j) * sqrt(dx)`, so the discrete
//! Fourier transform is unitary and `sum |c_j|^2` is the norm.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::{Fft, FftPlanner};

use crate::grid::GridSpec;
use crate::scalar::{cis, cz, Real, C};

pub struct GridKernels<T: Real> {
    pub grid: GridSpec,
    pub x: Vec<T>,
    /// Angular frequency of each plain FFT bin (Nyquist bin negative).
    pub k: Vec<T>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    inv2: Arc<dyn Fft<T>>,
    shears: OnceLock<ShearTables<T>>,
}

/// Phase tables for the three-shear 45 degree coordinate rotation.
struct ShearTables<T> {
    /// Row `j`: multiplier shifting a line by `tan(pi/8) * x_j`.
    t: Vec<C<T>>,
    /// Row `i`: multiplier shifting a line by `-sin(pi/4) * x_i`.
    u: Vec<C<T>>,
}

type Cache = Mutex<HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl<T: Real> GridKernels<T> {
    /// Shared kernels for a grid; built once per (scalar type, size).
    pub fn get(grid: GridSpec) -> Arc<Self> {
        let key = (TypeId::of::<T>(), grid.n_points);
        let mut guard = cache().lock().expect("kernel cache poisoned");
        if let Some(k) = guard.get(&key) {
            if let Ok(k) = Arc::clone(k).downcast::<Self>() {
                return k;
            }
        }
        let built = Arc::new(Self::build(grid));
        guard.insert(key, built.clone() as Arc<dyn Any + Send + Sync>);
        built
    }

    fn build(grid: GridSpec) -> Self {
        let n = grid.n_points;
        let mut planner = FftPlanner::<T>::new();
        let d = grid.spacing;
        let x = (0..n).map(|j| T::lit(grid.x(j))).collect();
        let k = (0..n)
            .map(|m| {
                let mm = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
                T::lit(mm * d)
            })
            .collect();
        Self {
            grid,
            x,
            k,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            inv2: planner.plan_fft_inverse(2 * n),
            shears: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.grid.n_points
    }

    fn shear_tables(&self) -> &ShearTables<T> {
        self.shears.get_or_init(|| {
            let n = self.n();
            let t = (std::f64::consts::PI / 8.0).tan();
            let u = -std::f64::consts::FRAC_1_SQRT_2;
            let mut tt = vec![cz(); n * n];
            let mut ut = vec![cz(); n * n];
            for j in 0..n {
                let xj = self.grid.x(j);
                for m in 0..n {
                    let km = self.k[m].as_f64();
                    tt[j * n + m] = nyquist_phase::<T>(m, n, km, t * xj);
                    ut[j * n + m] = nyquist_phase::<T>(m, n, km, u * xj);
                }
            }
            ShearTables { t: tt, u: ut }
        })
    }

    // ---------------------------------------------------------------- lines

    pub fn fft(&self, line: &mut [C<T>]) {
        self.fwd.process(line);
    }

    pub fn ifft(&self, line: &mut [C<T>]) {
        self.inv.process(line);
    }

    /// Unitary centered transform to the momentum grid.
    pub fn dft(&self, line: &mut [C<T>]) {
        alternate(line);
        self.fwd.process(line);
        alternate(line);
        let s = T::one() / T::lit(self.n() as f64).sqrt();
        line.iter_mut().for_each(|z| *z = *z * s);
    }

    pub fn idft(&self, line: &mut [C<T>]) {
        alternate(line);
        self.inv.process(line);
        alternate(line);
        let s = T::one() / T::lit(self.n() as f64).sqrt();
        line.iter_mut().for_each(|z| *z = *z * s);
    }

    /// `x -> -x` on the periodic grid.
    pub fn parity(&self, line: &mut [C<T>]) {
        let n = line.len();
        for j in 1..n / 2 {
            line.swap(j, n - j);
        }
    }

    /// Multiply the spectrum by `phase` (length n) and return to position space.
    pub fn spectral_multiply(&self, line: &mut [C<T>], phase: &[C<T>]) {
        self.fwd.process(line);
        let s = T::one() / T::lit(self.n() as f64);
        for (z, p) in line.iter_mut().zip(phase) {
            *z = *z * *p * s;
        }
        self.inv.process(line);
    }

    /// `f(x) -> f(x - a)` by band-limited interpolation.
    pub fn shift(&self, line: &mut [C<T>], a: f64) {
        let n = self.n();
        let phase: Vec<C<T>> = (0..n).map(|m| nyquist_phase::<T>(m, n, self.k[m].as_f64(), a)).collect();
        self.spectral_multiply(line, &phase);
    }

    /// Apply `exp(-i phi n)` with `n` the number operator.
    pub fn rotate(&self, line: &mut [C<T>], phi: f64) {
        let quarter = std::f64::consts::FRAC_PI_2;
        let turns = (phi / quarter).round();
        let rem = phi - turns * quarter;
        match (turns as i64).rem_euclid(4) {
            1 => self.dft(line),
            2 => self.parity(line),
            3 => self.idft(line),
            _ => {}
        }
        if rem.abs() > 1e-15 {
            let a = -(rem / 2.0).tan();
            let b = -rem.sin();
            let chirp: Vec<C<T>> = self.x.iter().map(|&x| cis(T::lit(a * x.as_f64() * x.as_f64() / 2.0))).collect();
            let n = self.n();
            let kphase: Vec<C<T>> = (0..n)
                .map(|m| {
                    let km = self.k[m].as_f64();
                    let km = if m == n / 2 { 0.0 } else { km };
                    cis(T::lit(b * km * km / 2.0))
                })
                .collect();
            for (z, c) in line.iter_mut().zip(&chirp) {
                *z = *z * *c;
            }
            self.spectral_multiply(line, &kphase);
            for (z, c) in line.iter_mut().zip(&chirp) {
                *z = *z * *c;
            }
        }
    }

    /// Density `|psi|^2 * dx` at the 2n half-grid points, exact for band-limited psi.
    pub fn upsampled_density(&self, line: &[C<T>], out: &mut [T], scratch: &mut Vec<C<T>>) {
        let n = self.n();
        let mut freq = line.to_vec();
        self.fwd.process(&mut freq);
        scratch.clear();
        scratch.resize(2 * n, cz());
        for m in 0..n / 2 {
            scratch[m] = freq[m];
        }
        for m in n / 2 + 1..n {
            scratch[m + n] = freq[m];
        }
        let half = freq[n / 2] * T::lit(0.5);
        scratch[n / 2] = half;
        scratch[n + n / 2] = half;
        self.inv2.process(scratch);
        let s = T::one() / T::lit(n as f64);
        for (o, z) in out.iter_mut().zip(scratch.iter()) {
            *o = *o + (*z * s).norm_sqr() * T::lit(0.5);
        }
    }

    /// Band-limited interpolation weights evaluating a line at continuous `x`.
    pub fn interp_weights(&self, x: f64) -> Vec<T> {
        let n = self.n();
        let d = self.grid.spacing;
        let half_m = (n / 2) as f64 - 0.5;
        (0..n)
            .map(|j| {
                let u = d * (x - self.grid.x(j));
                let sh = (u / 2.0).sin();
                let core = if sh.abs() < 1e-12 { 2.0 * half_m } else { (half_m * u).sin() / sh };
                T::lit((core + (n as f64 * u / 2.0).cos()) / n as f64)
            })
            .collect()
    }

    // ------------------------------------------------------------ two axes

    /// Rotate the (i, j) coordinate plane of a (outer, n, n, inner) block by
    /// -pi/4 (`sign > 0`) or +pi/4 via three spectral shears.
    pub fn rotate_plane(&self, data: &mut [C<T>], outer: usize, inner: usize, sign: i32) {
        let tabs = self.shear_tables();
        let conj = sign < 0;
        // rotation by phi = -pi/4: shears x by -tan(phi/2) y = tan(pi/8) y, y by sin(phi) x
        self.shear_axis(data, outer, inner, true, &tabs.t, conj);
        self.shear_axis(data, outer, inner, false, &tabs.u, conj);
        self.shear_axis(data, outer, inner, true, &tabs.t, conj);
    }

    /// Shift lines along axis i (`along_first`) by an amount set by the j
    /// coordinate, or vice versa; `table` rows are indexed by the other axis.
    fn shear_axis(&self, data: &mut [C<T>], outer: usize, inner: usize, along_first: bool, table: &[C<T>], conj: bool) {
        let n = self.n();
        let s = T::one() / T::lit(n as f64);
        let block = n * n * inner;
        // all `inner` lines sharing one table row are transformed in one batch
        let mut buf = vec![cz::<T>(); n * inner];
        let mut scratch = vec![cz::<T>(); self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len())];
        let mut row = vec![cz::<T>(); n];
        for other in 0..n {
            for (r, p) in row.iter_mut().zip(&table[other * n..(other + 1) * n]) {
                *r = if conj { p.conj() * s } else { *p * s };
            }
            for o in 0..outer {
                let base = o * block;
                let (start, stride) = if along_first { (base + other * inner, n * inner) } else { (base + other * n * inner, inner) };
                for t in 0..n {
                    let src = &data[start + t * stride..start + t * stride + inner];
                    for (b, z) in src.iter().enumerate() {
                        buf[b * n + t] = *z;
                    }
                }
                self.fwd.process_with_scratch(&mut buf, &mut scratch);
                for line in buf.chunks_exact_mut(n) {
                    for (z, p) in line.iter_mut().zip(&row) {
                        *z = *z * *p;
                    }
                }
                self.inv.process_with_scratch(&mut buf, &mut scratch);
                for t in 0..n {
                    let dst = &mut data[start + t * stride..start + t * stride + inner];
                    for (b, z) in dst.iter_mut().enumerate() {
                        *z = buf[b * n + t];
                    }
                }
            }
        }
    }

    /// Apply `f` to every line along the middle axis of an (outer, n, inner) block.
    pub fn for_each_line(&self, data: &mut [C<T>], outer: usize, inner: usize, mut f: impl FnMut(&mut [C<T>])) {
        let n = self.n();
        let mut line = vec![cz::<T>(); n];
        for o in 0..outer {
            for b in 0..inner {
                let start = o * n * inner + b;
                for (t, z) in line.iter_mut().enumerate() {
                    *z = data[start + t * inner];
                }
                f(&mut line);
                for (t, z) in line.iter().enumerate() {
                    data[start + t * inner] = *z;
                }
            }
        }
    }
}

fn alternate<T: Real>(line: &mut [C<T>]) {
    for z in line.iter_mut().skip(1).step_by(2) {
        *z = -*z;
    }
}

/// Spectral multiplier for a shift by `a`; the Nyquist bin takes the real part
/// so real functions stay real.
fn nyquist_phase<T: Real>(m: usize, n: usize, k: f64, a: f64) -> C<T> {
    if m == n / 2 {
        C::new(T::lit((k * a).cos()), T::zero())
    } else {
        cis(T::lit(-k * a))
    }
}
