//! Truncated SVD with a randomized range finder for large operands.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{QrlError, Result};
use crate::linalg::{thin_qr, CMat};
use crate::scalar::{Real, C};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvdPolicy {
    pub rel_tolerance: f64,
    pub chi_max: usize,
    pub oversampling: usize,
    pub power_iterations: usize,
    /// Relative singular values below this are grid-resolution noise and are always cut.
    pub noise_floor: f64,
}

impl Default for SvdPolicy {
    fn default() -> Self {
        Self { rel_tolerance: 1e-7, chi_max: 64, oversampling: 8, power_iterations: 2, noise_floor: 0.0 }
    }
}

impl SvdPolicy {
    pub fn with_tolerance(rel_tolerance: f64, chi_max: usize) -> Self {
        Self { rel_tolerance, chi_max, ..Self::default() }
    }

    /// Same policy with the truncation floor raised to `floor`.
    pub fn with_noise_floor(self, floor: f64) -> Self {
        Self { noise_floor: floor, ..self }
    }

    pub fn cut(&self) -> f64 {
        self.rel_tolerance.max(self.noise_floor)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance < 1.0) {
            return Err(QrlError::InvalidParameter(format!(
                "rel_tolerance must lie in (0,1), got {}",
                self.rel_tolerance
            )));
        }
        if !(0.0..1.0).contains(&self.noise_floor) {
            return Err(QrlError::InvalidParameter(format!("noise_floor must lie in [0,1), got {}", self.noise_floor)));
        }
        if self.chi_max < 2 {
            return Err(QrlError::InvalidParameter(format!("chi_max must be >= 2, got {}", self.chi_max)));
        }
        Ok(())
    }
}

/// `m ~ u * diag(s) * vh`, with `u` rows x k and `vh` k x cols.
#[derive(Clone, Debug)]
pub struct SvdResult<T> {
    pub u: CMat<T>,
    pub s: Vec<T>,
    pub vh: CMat<T>,
    pub discarded_weight: f64,
}

impl<T: Real> SvdResult<T> {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn v(&self) -> CMat<T> {
        self.vh.adjoint()
    }
}

/// Below this smaller dimension an exact SVD is cheaper than sketching.
const EXACT_LIMIT: usize = 96;
const INITIAL_SKETCH: usize = 16;

pub fn truncated_rsvd<T: Real, R: Rng + ?Sized>(m: &CMat<T>, policy: &SvdPolicy, rng: &mut R) -> Result<SvdResult<T>> {
    policy.validate()?;
    if !m.is_finite() {
        return Err(QrlError::NonFinite("truncated_rsvd input"));
    }
    let total = m.frob2().as_f64();
    if total == 0.0 || m.rows == 0 || m.cols == 0 {
        return Ok(zero_result(m.rows.max(1), m.cols.max(1)));
    }
    let minmn = m.rows.min(m.cols);
    let (u, s, vh) = if minmn <= EXACT_LIMIT {
        exact(m)
    } else {
        sketched(m, policy, rng)
    };
    Ok(truncate(u, s, vh, total, policy))
}

/// Exact SVD followed by the same truncation rule; the reference oracle.
pub fn exact_svd<T: Real>(m: &CMat<T>, policy: &SvdPolicy) -> Result<SvdResult<T>> {
    policy.validate()?;
    if !m.is_finite() {
        return Err(QrlError::NonFinite("exact_svd input"));
    }
    let total = m.frob2().as_f64();
    if total == 0.0 {
        return Ok(zero_result(m.rows.max(1), m.cols.max(1)));
    }
    let (u, s, vh) = exact(m);
    Ok(truncate(u, s, vh, total, policy))
}

fn zero_result<T: Real>(rows: usize, cols: usize) -> SvdResult<T> {
    let mut u = CMat::zeros(rows, 1);
    *u.at_mut(0, 0) = C::new(T::one(), T::zero());
    let mut vh = CMat::zeros(1, cols);
    *vh.at_mut(0, 0) = C::new(T::one(), T::zero());
    SvdResult { u, s: vec![T::zero()], vh, discarded_weight: 0.0 }
}

fn exact<T: Real>(m: &CMat<T>) -> (CMat<T>, Vec<T>, CMat<T>) {
    let d = T::dense_svd(m.rows, m.cols, &m.data);
    (CMat::from_vec(m.rows, d.k, d.u), d.s, CMat::from_vec(d.k, m.cols, d.vh))
}

fn gaussian<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat<T> {
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C::new(T::lit(re), T::lit(im))
        })
        .collect();
    CMat::from_vec(rows, cols, data)
}

fn sketched<T: Real, R: Rng + ?Sized>(m: &CMat<T>, policy: &SvdPolicy, rng: &mut R) -> (CMat<T>, Vec<T>, CMat<T>) {
    let minmn = m.rows.min(m.cols);
    let mh = m.adjoint();
    let tol = T::lit(policy.cut());
    let cap = (policy.chi_max + policy.oversampling).min(minmn);
    let mut width = (INITIAL_SKETCH.min(policy.chi_max) + policy.oversampling).min(cap);
    loop {
        let omega = gaussian::<T, R>(m.cols, width, rng);
        let (mut q, _) = thin_qr(&m.matmul(&omega));
        for _ in 0..policy.power_iterations {
            let (z, _) = thin_qr(&mh.matmul(&q));
            q = thin_qr(&m.matmul(&z)).0;
        }
        let b = q.adjoint().matmul(m);
        let (ub, s, vh) = exact(&b);
        let smallest = s.last().copied().unwrap_or(T::zero());
        let resolved = s.is_empty() || smallest < tol * s[0] || q.cols < width;
        if resolved || width >= cap {
            return (q.matmul(&ub), s, vh);
        }
        width = (width * 2).min(cap);
    }
}

fn truncate<T: Real>(u: CMat<T>, s: Vec<T>, vh: CMat<T>, total: f64, policy: &SvdPolicy) -> SvdResult<T> {
    let s0 = s.first().copied().unwrap_or(T::zero());
    let cut = T::lit(policy.cut()) * s0;
    let mut k = s.iter().take_while(|&&x| x >= cut).count().min(policy.chi_max).max(1);
    k = k.min(s.len());
    let kept: f64 = s[..k].iter().map(|x| x.as_f64() * x.as_f64()).sum();
    SvdResult {
        u: u.take_cols(k),
        s: s[..k].to_vec(),
        vh: vh.take_rows(k),
        discarded_weight: (total - kept).max(0.0),
    }
}
