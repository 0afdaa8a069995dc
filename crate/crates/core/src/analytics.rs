//! Closed-form noise models, RB fitting and the Grover success model.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{QrlError, Result};
use crate::states::epsilon_from_db;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Probability that a centred Gaussian of std `sigma` rounds to an odd multiple of `spacing`.
pub fn flip_prob(sigma: f64, spacing: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() || !(spacing > 0.0) {
        return Err(QrlError::InvalidParameter(format!("flip_prob needs sigma > 0, got {sigma}")));
    }
    let z = |x: f64| x / sigma;
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    // mass of [ (2n+1) s - s/2, (2n+1) s + s/2 ] for n >= 0, doubled by symmetry
    let mut total = 0.0;
    for n in 0.. {
        let c = (2 * n + 1) as f64 * spacing;
        let lo = z(c - spacing / 2.0);
        let hi = z(c + spacing / 2.0);
        let term = std.sf(lo) - std.sf(hi);
        total += 2.0 * term;
        if std.sf(lo) < 1e-15 || n > 1_000_000 {
            break;
        }
    }
    Ok(total.min(0.5))
}

/// Gaussian noise model of a gadget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    /// Per-quadrature variance in units of `tanh(eps/2)`: two ancilla teeth.
    pub variance_factor: f64,
    /// Variance multiplier on one quadrature for P, Pdg and CZ.
    pub amplification: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self { variance_factor: 2.0, amplification: 2.0 }
    }
}

impl NoiseModel {
    /// Decoded-displacement std per quadrature at squeezing `s_db`.
    pub fn sigma(&self, s_db: f64) -> Result<f64> {
        let eps = epsilon_from_db(s_db)?;
        Ok((self.variance_factor * (eps.value() / 2.0).tanh()).sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticRates {
    /// I, H and SWAP.
    pub r_low: f64,
    /// P and CZ.
    pub r_high: f64,
    pub r_mean: f64,
    /// Set when `s_db` lies outside [5, 15] dB.
    pub out_of_range: bool,
}

/// Average gate infidelity `2/3 * (1 - (1 - p_x)(1 - p_z))` of independent X and Z flips.
pub fn analytic_error_rates(s_db: f64) -> Result<AnalyticRates> {
    analytic_error_rates_with(s_db, &NoiseModel::default())
}

pub fn analytic_error_rates_with(s_db: f64, model: &NoiseModel) -> Result<AnalyticRates> {
    let sigma = model.sigma(s_db)?;
    let p = flip_prob(sigma, SQRT_PI)?;
    let p_amp = flip_prob(sigma * model.amplification.sqrt(), SQRT_PI)?;
    let infid = |px: f64, pz: f64| 2.0 / 3.0 * (1.0 - (1.0 - px) * (1.0 - pz));
    let r_low = infid(p, p);
    let r_high = infid(p, p_amp);
    Ok(AnalyticRates { r_low, r_high, r_mean: 0.5 * (r_low + r_high), out_of_range: !(5.0..=15.0).contains(&s_db) })
}

// ------------------------------------------------------------------ RB

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RbPoint {
    pub depth: usize,
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl RbPoint {
    /// Mean and standard error of the mean of `samples`.
    pub fn from_samples(depth: usize, samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n.max(1) as f64;
        let var = if n > 1 { samples.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        Self { depth, mean_fidelity: mean, std_error: (var / n.max(1) as f64).sqrt(), n_samples: n }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RbFit {
    pub a: f64,
    pub p: f64,
    pub b: f64,
    pub r: f64,
    pub n_qubits: usize,
    /// Covariance of the free parameters: (A, p), or (A, p, B) when B was fitted.
    pub covariance: Vec<Vec<f64>>,
    pub b_free: bool,
    /// Reason the fit should not be trusted.
    pub flag: Option<String>,
}

impl RbFit {
    pub fn sigma_p(&self) -> f64 {
        self.covariance[1][1].max(0.0).sqrt()
    }

    pub fn sigma_r(&self) -> f64 {
        self.sigma_p() * (1.0 - 0.5f64.powi(self.n_qubits as i32))
    }
}

/// `r = (1 - p)(1 - 2^-N)`.
pub fn error_rate_from_p(p: f64, n_qubits: usize) -> f64 {
    (1.0 - p) * (1.0 - 0.5f64.powi(n_qubits as i32))
}

/// Smallest depth admitted by [`fit_rb`].
pub const MIN_RB_DEPTH: usize = 7;

/// Weighted least squares fit of `F(m) = A p^m + B` with `B = 2^-N` fixed.
pub fn fit_rb(points: &[RbPoint], n_qubits: usize) -> Result<RbFit> {
    fit_rb_with(points, n_qubits, MIN_RB_DEPTH, false)
}

/// As [`fit_rb`] but with `B` a free parameter.
pub fn fit_rb_free_b(points: &[RbPoint], n_qubits: usize) -> Result<RbFit> {
    fit_rb_with(points, n_qubits, MIN_RB_DEPTH, true)
}

pub fn fit_rb_with(points: &[RbPoint], n_qubits: usize, min_depth: usize, free_b: bool) -> Result<RbFit> {
    let pts: Vec<&RbPoint> = points.iter().filter(|p| p.depth >= min_depth).collect();
    let mut depths: Vec<usize> = pts.iter().map(|p| p.depth).collect();
    depths.sort_unstable();
    depths.dedup();
    let need = if free_b { 4 } else { 3 };
    if depths.len() < need {
        return Err(QrlError::InsufficientData(format!("{} distinct depths >= {min_depth}, need {need}", depths.len())));
    }
    if pts.iter().any(|p| !p.mean_fidelity.is_finite()) {
        return Err(QrlError::NonFinite("RB point"));
    }
    let weighted = pts.iter().all(|p| p.std_error > 0.0);
    let w: Vec<f64> = pts.iter().map(|p| if weighted { 1.0 / (p.std_error * p.std_error) } else { 1.0 }).collect();
    let m: Vec<f64> = pts.iter().map(|p| p.depth as f64).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.mean_fidelity).collect();
    let b0 = 0.5f64.powi(n_qubits as i32);

    // start from a log-linear fit on points above the asymptote
    let (mut a, mut p) = {
        let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..y.len() {
            let d = y[i] - b0;
            if d > 1e-12 {
                let (x, l) = (m[i], d.ln());
                sw += 1.0;
                sx += x;
                sy += l;
                sxx += x * x;
                sxy += x * l;
            }
        }
        let den = sw * sxx - sx * sx;
        if sw >= 2.0 && den.abs() > 1e-12 {
            let slope = (sw * sxy - sx * sy) / den;
            let icpt = (sy - slope * sx) / sw;
            (icpt.exp(), slope.exp().clamp(1e-6, 1.0))
        } else {
            (0.0, 0.9)
        }
    };
    let mut b = b0;
    let k = if free_b { 3 } else { 2 };
    let model = |a: f64, p: f64, b: f64, x: f64| a * p.powf(x) + b;
    let chi2 = |a: f64, p: f64, b: f64| -> f64 { (0..y.len()).map(|i| w[i] * (y[i] - model(a, p, b, m[i])).powi(2)).sum() };

    // Levenberg-Marquardt
    let mut lambda = 1e-3;
    let mut cur = chi2(a, p, b);
    let mut converged = false;
    for _ in 0..500 {
        let mut jtj = nalgebra::DMatrix::<f64>::zeros(k, k);
        let mut jtr = nalgebra::DVector::<f64>::zeros(k);
        for i in 0..y.len() {
            let pm = p.powf(m[i]);
            let mut j = vec![pm, if p > 0.0 { a * m[i] * p.powf(m[i] - 1.0) } else { 0.0 }];
            if free_b {
                j.push(1.0);
            }
            let r = y[i] - model(a, p, b, m[i]);
            for u in 0..k {
                jtr[u] += w[i] * j[u] * r;
                for v in 0..k {
                    jtj[(u, v)] += w[i] * j[u] * j[v];
                }
            }
        }
        let mut damped = jtj.clone();
        for u in 0..k {
            damped[(u, u)] += lambda * jtj[(u, u)].max(1e-300);
        }
        let Some(step) = damped.lu().solve(&jtr) else { break };
        let (na, np) = (a + step[0], p + step[1]);
        let nb = if free_b { b + step[2] } else { b };
        let next = chi2(na, np, nb);
        if next.is_finite() && next <= cur {
            let rel = (cur - next) / cur.max(1e-300);
            a = na;
            p = np;
            b = nb;
            cur = next;
            lambda = (lambda * 0.3).max(1e-12);
            if rel < 1e-15 || step.norm() < 1e-14 {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                converged = true;
                break;
            }
        }
    }

    // covariance at the optimum
    let mut jtj = nalgebra::DMatrix::<f64>::zeros(k, k);
    for i in 0..y.len() {
        let mut j = vec![p.powf(m[i]), a * m[i] * p.powf(m[i] - 1.0)];
        if free_b {
            j.push(1.0);
        }
        for u in 0..k {
            for v in 0..k {
                jtj[(u, v)] += w[i] * j[u] * j[v];
            }
        }
    }
    let dof = (y.len() as f64 - k as f64).max(1.0);
    let scale = if weighted { 1.0 } else { cur / dof };
    let cov = jtj.clone().try_inverse().map(|c| c * scale);
    let covariance = match &cov {
        Some(c) => (0..k).map(|u| (0..k).map(|v| c[(u, v)]).collect()).collect(),
        None => vec![vec![f64::INFINITY; k]; k],
    };
    let mut flag = None;
    if !converged {
        flag = Some("fit did not converge".to_string());
    }
    if !(p > 0.0 && p <= 1.0) {
        flag = Some(format!("p = {p} outside (0, 1]"));
    }
    let sigma_a = covariance[0][0].sqrt();
    if a.abs() < 1e-6 || !(a.abs() > 2.0 * sigma_a) || cov.is_none() {
        flag = Some("decay amplitude unidentifiable".to_string());
    }
    Ok(RbFit { a, p, b, r: error_rate_from_p(p, n_qubits), n_qubits, covariance, b_free: free_b, flag })
}

// ------------------------------------------------------------------ Grover

/// `p^{N d} p_true + (1 - p^{N d}) k / 2^N` with `p = 1 - 4 r / 3`.
pub fn grover_success_estimate(r: f64, n_qubits: usize, depth: usize, solutions: usize, p_true: f64) -> Result<f64> {
    if !(0.0..=0.75).contains(&r) || !(0.0..=1.0).contains(&p_true) {
        return Err(QrlError::InvalidParameter(format!("r = {r}, p_true = {p_true}")));
    }
    let p = 1.0 - 4.0 * r / 3.0;
    let surv = p.powi((n_qubits * depth) as i32);
    Ok(surv * p_true + (1.0 - surv) * solutions as f64 / (1u64 << n_qubits) as f64)
}

/// Classical search success with two solutions among eight and two queries.
pub const CLASSICAL_SUCCESS: f64 = 13.0 / 28.0;
/// Fully depolarized success with two solutions among eight.
pub const RANDOM_SUCCESS: f64 = 0.25;

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let ph = successes as f64 / nf;
    let z2 = z * z;
    let den = 1.0 + z2 / nf;
    let centre = (ph + z2 / (2.0 * nf)) / den;
    let half = z * (ph * (1.0 - ph) / nf + z2 / (4.0 * nf * nf)).sqrt() / den;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// 1.96, the two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_brackets_the_estimate() {
        let (lo, hi) = wilson_interval(60, 100, Z95);
        assert!(lo < 0.6 && hi > 0.6 && lo > 0.49 && hi < 0.7);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
    }
}
