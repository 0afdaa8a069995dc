//! Photon-damped GKP states and Bell pairs.

use std::f64::consts::PI;

use statrs::function::erf::erfc;

use crate::error::{QrlError, Result};
use crate::fmps::{FmpsState, Site};
use crate::grid::GridSpec;
use crate::scalar::{Real, C};
use crate::svd::SvdPolicy;

/// Damping strength `eps` of `exp(-eps n)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct DampingParam(f64);

impl DampingParam {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(QrlError::InvalidParameter(format!("damping must be positive and finite, got {eps}")));
        }
        Ok(Self(eps))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// GKP squeezing in dB: `-10 log10(tanh(eps/2) / (1/2))`.
pub fn squeezing_db(eps: DampingParam) -> f64 {
    -10.0 * ((eps.0 / 2.0).tanh() / 0.5).log10()
}

pub fn epsilon_from_db(s: f64) -> Result<DampingParam> {
    if !s.is_finite() {
        return Err(QrlError::NonFinite("squeezing"));
    }
    let t = 0.5 * 10f64.powf(-s / 10.0);
    if t >= 1.0 {
        return Err(QrlError::InvalidParameter(format!("squeezing {s} dB has no damping equivalent")));
    }
    DampingParam::new(2.0 * t.atanh())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GkpLabel {
    ZeroL,
    OneL,
    Qunaught,
    PlusL,
}

impl GkpLabel {
    /// (tooth period, offset of tooth 0)
    pub fn comb(self) -> (f64, f64) {
        let sp = PI.sqrt();
        match self {
            GkpLabel::ZeroL => (2.0 * sp, 0.0),
            GkpLabel::OneL => (2.0 * sp, sp),
            GkpLabel::Qunaught => ((2.0 * PI).sqrt(), 0.0),
            GkpLabel::PlusL => (sp, 0.0),
        }
    }
}

/// Half width needed so the damped envelope leaves < 1e-10 mass outside.
pub fn required_half_width(eps: DampingParam) -> f64 {
    const Z: f64 = 4.572824967389486; // erfc(Z) = 1e-10
    Z / ((2.0 * eps.0).sinh() / 2.0).sqrt()
}

/// Relative amplitude a damped tooth leaves beyond the grid's Nyquist momentum,
/// `exp(-(pi n / 2) tanh(eps / 2))`. Structure below roughly this level is aliasing.
pub fn aliasing_floor(eps: DampingParam, grid: GridSpec) -> f64 {
    (-(std::f64::consts::PI * grid.n_points as f64 / 2.0) * (eps.value() / 2.0).tanh()).exp()
}

/// Truncation floor for gadget simulations: ten times the aliasing level.
pub fn resolution_floor(eps: DampingParam, grid: GridSpec) -> f64 {
    (10.0 * aliasing_floor(eps, grid)).min(1e-2)
}

pub fn check_envelope(eps: DampingParam, grid: GridSpec) -> Result<()> {
    let z = grid.half_width * ((2.0 * eps.0).sinh() / 2.0).sqrt();
    if erfc(z) >= 1e-10 {
        return Err(QrlError::EnvelopeTooWide { required: required_half_width(eps), available: grid.half_width });
    }
    Ok(())
}

/// Unnormalized `exp(-eps n)` applied to a position-eigenstate comb, sampled
/// on the grid with a label-independent scale (closed-form Mehler kernel).
pub fn damped_comb(label: GkpLabel, eps: DampingParam, grid: GridSpec) -> Vec<f64> {
    let e = eps.0;
    let (period, offset) = label.comb();
    let (ch, th, cth) = (e.cosh(), e.tanh(), 1.0 / e.tanh());
    let width = 1.0 / cth.sqrt();
    let ymax = (2.0 * 41.5 / th).sqrt();
    let kmax = ((ymax + offset.abs()) / period).ceil() as i64 + 1;
    let d = grid.spacing;
    let mut psi = vec![0.0; grid.n_points];
    for k in -kmax..=kmax {
        let y = offset + k as f64 * period;
        let env = -th * y * y / 2.0;
        if env < -41.5 {
            continue;
        }
        let x0 = y / ch;
        let lo = ((x0 - 40.0 * width + grid.half_width) / d).floor().max(0.0) as usize;
        let hi = (((x0 + 40.0 * width + grid.half_width) / d).ceil() as usize).min(grid.n_points);
        for (j, slot) in psi.iter_mut().enumerate().take(hi).skip(lo) {
            let x = grid.x(j);
            *slot += (env - cth * (x - x0).powi(2) / 2.0).exp();
        }
    }
    psi.iter_mut().for_each(|v| *v *= d.sqrt());
    psi
}

fn normalized<T: Real>(v: impl IntoIterator<Item = C<f64>>) -> Vec<C<T>> {
    let v: Vec<C<f64>> = v.into_iter().collect();
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| C::new(T::lit(z.re / nrm), T::lit(z.im / nrm))).collect()
}

/// Normalized grid samples of `exp(-eps n)|label>`.
pub fn build_state<T: Real>(label: GkpLabel, eps: DampingParam, grid: GridSpec) -> Result<Vec<C<T>>> {
    check_envelope(eps, grid)?;
    Ok(normalized(damped_comb(label, eps, grid).into_iter().map(|v| C::new(v, 0.0))))
}

/// Damped logical state `alpha |0> + beta |1>`, normalized.
pub fn build_logical<T: Real>(alpha: C<f64>, beta: C<f64>, eps: DampingParam, grid: GridSpec) -> Result<Vec<C<T>>> {
    check_envelope(eps, grid)?;
    let z = damped_comb(GkpLabel::ZeroL, eps, grid);
    let o = damped_comb(GkpLabel::OneL, eps, grid);
    Ok(normalized(z.iter().zip(&o).map(|(&a, &b)| alpha * a + beta * b)))
}

/// The six logical Pauli eigenstates used as fixtures and calibration inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LogicalInput {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl LogicalInput {
    pub const INFORMATIONALLY_COMPLETE: [LogicalInput; 4] =
        [LogicalInput::Zero, LogicalInput::One, LogicalInput::Plus, LogicalInput::PlusI];

    pub fn amplitudes(self) -> [C<f64>; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (one, i) = (C::new(h, 0.0), C::new(0.0, h));
        match self {
            LogicalInput::Zero => [C::new(1.0, 0.0), C::new(0.0, 0.0)],
            LogicalInput::One => [C::new(0.0, 0.0), C::new(1.0, 0.0)],
            LogicalInput::Plus => [one, one],
            LogicalInput::Minus => [one, -one],
            LogicalInput::PlusI => [one, i],
            LogicalInput::MinusI => [one, -i],
        }
    }

    pub fn build<T: Real>(self, eps: DampingParam, grid: GridSpec) -> Result<Vec<C<T>>> {
        let [a, b] = self.amplitudes();
        build_logical(a, b, eps, grid)
    }
}

// ------------------------------------------------------------- Fock oracle

/// Hermite functions phi_0..phi_{nmax} at `x`, via the normalized recurrence
/// with running rescaling to avoid underflow far from the origin.
pub fn hermite_functions(x: f64, nmax: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    let mut log_scale = -x * x / 2.0;
    let mut prev = 0.0f64;
    let mut cur = PI.powf(-0.25);
    let mut pending: Vec<f64> = Vec::with_capacity(nmax + 1);
    pending.push(cur);
    for n in 0..nmax {
        let next = (2.0 / (n as f64 + 1.0)).sqrt() * x * cur - (n as f64 / (n as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        pending.push(cur);
        if cur.abs() > 1e150 {
            let f = cur.abs();
            out.extend(pending.drain(..).map(|v| scaled(v, log_scale)));
            prev /= f;
            cur /= f;
            log_scale += f.ln();
        }
    }
    out.extend(pending.drain(..).map(|v| scaled(v, log_scale)));
    out
}

fn scaled(v: f64, log_scale: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum() * (v.abs().ln() + log_scale).exp()
    }
}

/// Number-basis cutoff for the Fock oracle.
pub fn fock_cutoff(eps: DampingParam) -> usize {
    (25.0 / eps.0 + 50.0).ceil() as usize
}

/// `exp(-eps n)|label>` computed in the number basis: the comb restricted to
/// the grid domain is expanded in Hermite functions, damped, and resummed.
pub fn build_state_fock(label: GkpLabel, eps: DampingParam, grid: GridSpec) -> Result<Vec<C<f64>>> {
    check_envelope(eps, grid)?;
    let nmax = fock_cutoff(eps);
    let (period, offset) = label.comb();
    let mut coef = vec![0.0f64; nmax + 1];
    let kmax = (grid.half_width / period).ceil() as i64 + 1;
    for k in -kmax..=kmax {
        let y = offset + k as f64 * period;
        if y.abs() >= grid.half_width {
            continue;
        }
        for (c, h) in coef.iter_mut().zip(hermite_functions(y, nmax)) {
            *c += h;
        }
    }
    let damp: Vec<f64> = (0..=nmax).map(|n| (-eps.0 * n as f64).exp()).collect();
    let psi = (0..grid.n_points).map(|j| {
        let h = hermite_functions(grid.x(j), nmax);
        let v: f64 = h.iter().zip(&coef).zip(&damp).map(|((h, c), d)| h * c * d).sum();
        C::new(v, 0.0)
    });
    Ok(normalized(psi))
}

// ------------------------------------------------------------- Bell pairs

/// Two-mode damped Bell pair `sum_mu A_mu (x) A_mu` with inner bond 2.
#[derive(Clone, Debug)]
pub struct BellPairMps<T: Real> {
    pub state: FmpsState<T>,
    pub magic: bool,
    pub eps: DampingParam,
}

pub fn bell_pair<T: Real>(eps: DampingParam, magic: bool, grid: GridSpec) -> Result<BellPairMps<T>> {
    bell_pair_with_policy(eps, magic, grid, SvdPolicy::default())
}

pub fn bell_pair_with_policy<T: Real>(
    eps: DampingParam,
    magic: bool,
    grid: GridSpec,
    policy: SvdPolicy,
) -> Result<BellPairMps<T>> {
    check_envelope(eps, grid)?;
    let n = grid.n_points;
    let a = [damped_comb(GkpLabel::ZeroL, eps, grid), damped_comb(GkpLabel::OneL, eps, grid)];
    let phase = [C::new(1.0, 0.0), if magic { C::from_polar(1.0, PI / 8.0) } else { C::new(1.0, 0.0) }];
    let lit = |z: C<f64>| C::new(T::lit(z.re), T::lit(z.im));
    let mut p1 = Vec::with_capacity(2 * n);
    for x in 0..n {
        for mu in 0..2 {
            p1.push(lit(phase[mu] * a[mu][x]));
        }
    }
    let mut p2 = Vec::with_capacity(2 * n);
    for mu in 0..2 {
        for x in 0..n {
            p2.push(lit(phase[mu] * a[mu][x]));
        }
    }
    let sites = vec![Site::new(1, n, 2, p1), Site::new(2, n, 1, p2)];
    let mut state = FmpsState::from_sites(grid, sites, policy, 0)?;
    state.normalize();
    Ok(BellPairMps { state, magic, eps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squeezing_conversion_examples() {
        let e = DampingParam::new(0.1).unwrap();
        assert!((squeezing_db(e) - 10.0036).abs() < 1e-4);
        let e0 = DampingParam::new(2.0 * 0.5f64.atanh()).unwrap();
        assert!(squeezing_db(e0).abs() < 1e-12);
        let e10 = epsilon_from_db(10.0).unwrap();
        assert!((e10.value() - 2.0 * 0.05f64.atanh()).abs() < 1e-15);
        assert!((e10.value() - 0.1000834).abs() < 1e-7);
        let e15 = epsilon_from_db(15.0).unwrap();
        assert!((e15.value() - 2.0 * (10f64.powf(-1.5) / 2.0).atanh()).abs() < 1e-15);
        assert!((e15.value() / 0.031623 - 1.0).abs() < 1e-3);
        assert!(DampingParam::new(0.0).is_err());
        for s in [-2.0, 0.0, 3.3, 10.5, 14.0, 20.0] {
            let back = squeezing_db(epsilon_from_db(s).unwrap());
            assert!((back - s).abs() <= 1e-10 * s.abs().max(1.0));
        }
    }

    #[test]
    fn hermite_functions_are_orthonormal_on_fine_grid() {
        let h = 0.01;
        let xs: Vec<f64> = (-1500..=1500).map(|i| i as f64 * h).collect();
        let tab: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_functions(x, 60)).collect();
        for (a, b) in [(0, 0), (5, 5), (60, 60), (3, 7), (10, 59)] {
            let ip: f64 = tab.iter().map(|t| t[a] * t[b]).sum::<f64>() * h;
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((ip - want).abs() < 1e-9, "{a},{b}: {ip}");
        }
    }

    #[test]
    fn hermite_functions_survive_large_arguments() {
        let far = hermite_functions(38.0, 900);
        assert!(far.iter().all(|v| v.is_finite()));
        assert!(far[0] == 0.0 || far[0] < 1e-300);
        assert!(far[900].abs() > 0.0);
    }

    #[test]
    fn envelope_check_rejects_narrow_grids() {
        let e14 = epsilon_from_db(14.0).unwrap();
        assert!(check_envelope(e14, GridSpec::new(256).unwrap()).is_err());
        assert!(check_envelope(e14, GridSpec::new(512).unwrap()).is_ok());
        assert!(check_envelope(epsilon_from_db(10.0).unwrap(), GridSpec::new(256).unwrap()).is_ok());
    }
}
