//! Logical decoding of CV states and a small qubit statevector oracle.
//!
//! Basis index convention: qubit 0 is the most significant bit, so `|011>`
//! has qubit 0 in `|0>` and index 3.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::circuit::{Gate, GateLabel};
use crate::error::{QrlError, Result};
use crate::fmps::{FmpsState, Site};
use crate::scalar::Real;

pub const MAX_DECODED_QUBITS: usize = 4;
pub const MAX_DV_QUBITS: usize = 6;
/// Negativity above this is reported as suspicious.
pub const NEGATIVITY_WARNING: f64 = 1e-3;

type Z = Complex64;

fn z(re: f64, im: f64) -> Z {
    Z::new(re, im)
}

/// How the CV Pauli observables are formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PauliDecoding {
    /// Sign of the tooth parity: `sgn cos(sqrt(pi) q)`, `sgn cos(sqrt(pi) p)` and
    /// `sgn cos(sqrt(2 pi) (q - p)/sqrt2)`. Matches homodyne bin statistics.
    #[default]
    Binned,
    /// Raw displacement operators `X_CV`, `Z_CV`, `Y_CV = i X_CV Z_CV`.
    Displacement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalDensityMatrix {
    pub n_qubits: usize,
    /// Row-major `2^N x 2^N`.
    pub data: Vec<Z>,
    /// Total weight of negative eigenvalues removed after decoding.
    pub clipped_negativity: f64,
}

impl LogicalDensityMatrix {
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn at(&self, r: usize, c: usize) -> Z {
        self.data[r * self.dim() + c]
    }

    pub fn from_pure(psi: &DvState) -> Self {
        let d = psi.amps.len();
        let mut data = vec![z(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                data[r * d + c] = psi.amps[r] * psi.amps[c].conj();
            }
        }
        Self { n_qubits: psi.n_qubits, data, clipped_negativity: 0.0 }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        let mut data = vec![z(0.0, 0.0); d * d];
        for i in 0..d {
            data[i * d + i] = z(1.0 / d as f64, 0.0);
        }
        Self { n_qubits, data, clipped_negativity: 0.0 }
    }

    /// Convex combination `sum w_k rho_k` (weights need not be normalized).
    pub fn mixture(parts: &[(f64, &LogicalDensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| QrlError::InsufficientData("empty mixture".into()))?.1;
        let total: f64 = parts.iter().map(|p| p.0).sum();
        let mut data = vec![z(0.0, 0.0); first.data.len()];
        for (w, rho) in parts {
            if rho.n_qubits != first.n_qubits {
                return Err(QrlError::DimensionMismatch("mixture of different widths".into()));
            }
            for (d, s) in data.iter_mut().zip(&rho.data) {
                *d += s * (*w / total);
            }
        }
        Ok(Self { n_qubits: first.n_qubits, data, clipped_negativity: 0.0 })
    }

    /// `rho = 2^-N sum_s <s> s` over Pauli strings `s` (qubit 0 the leading digit, I=0 X=1 Y=2 Z=3).
    pub fn from_pauli_expectations(n_qubits: usize, expectations: &[f64]) -> Result<Self> {
        if expectations.len() != 1 << (2 * n_qubits) {
            return Err(QrlError::DimensionMismatch(format!(
                "{} expectations for {} qubits",
                expectations.len(),
                n_qubits
            )));
        }
        let d = 1usize << n_qubits;
        let mut data = vec![z(0.0, 0.0); d * d];
        for (s, &e) in expectations.iter().enumerate() {
            if e == 0.0 {
                continue;
            }
            let digits: Vec<usize> = (0..n_qubits).map(|k| (s >> (2 * (n_qubits - 1 - k))) & 3).collect();
            for r in 0..d {
                // each Pauli string has exactly one non-zero per row
                let mut c = 0usize;
                let mut v = z(1.0, 0.0);
                for (k, &p) in digits.iter().enumerate() {
                    let bit = (r >> (n_qubits - 1 - k)) & 1;
                    let (cb, val) = pauli_entry(p, bit);
                    c |= cb << (n_qubits - 1 - k);
                    v *= val;
                }
                data[r * d + c] += v * e;
            }
        }
        let scale = 1.0 / d as f64;
        data.iter_mut().for_each(|x| *x *= scale);
        Ok(Self { n_qubits, data, clipped_negativity: 0.0 })
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.at(i, i).re).sum()
    }

    pub fn purity(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    /// `<psi| rho |psi>`.
    pub fn fidelity(&self, target: &DvState) -> Result<f64> {
        if target.n_qubits != self.n_qubits {
            return Err(QrlError::DimensionMismatch(format!(
                "{}-qubit state vs {}-qubit target",
                self.n_qubits, target.n_qubits
            )));
        }
        let d = self.dim();
        let mut acc = z(0.0, 0.0);
        for r in 0..d {
            for c in 0..d {
                acc += target.amps[r].conj() * self.data[r * d + c] * target.amps[c];
            }
        }
        Ok(acc.re)
    }

    /// Computational-basis populations.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.at(i, i).re.max(0.0)).collect()
    }

    /// `P rho P` for the Pauli with the given bit masks (bit k of a mask is qubit k).
    pub fn conjugate_pauli(&self, x_bits: &[bool], z_bits: &[bool]) -> Self {
        let n = self.n_qubits;
        let mask = |bits: &[bool]| {
            bits.iter().enumerate().filter(|(_, &b)| b).fold(0usize, |m, (k, _)| m | 1 << (n - 1 - k))
        };
        let (xm, zm) = (mask(x_bits), mask(z_bits));
        let d = self.dim();
        let mut data = vec![z(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                let sign = ((r ^ xm) & zm).count_ones() + ((c ^ xm) & zm).count_ones();
                let v = self.data[(r ^ xm) * d + (c ^ xm)];
                data[r * d + c] = if sign % 2 == 1 { -v } else { v };
            }
        }
        Self { n_qubits: n, data, clipped_negativity: self.clipped_negativity }
    }

    /// Make Hermitian, drop negative eigenvalues, renormalize the trace.
    fn clip(mut self) -> Self {
        let d = self.dim();
        let mut m = DMatrix::<Z>::from_row_slice(d, d, &self.data);
        m = (&m + m.adjoint()) * z(0.5, 0.0);
        let eig = m.clone().symmetric_eigen();
        let negativity: f64 = eig.eigenvalues.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
        if negativity > 0.0 {
            let vals = eig.eigenvalues.map(|v| z(v.max(0.0), 0.0));
            m = &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.adjoint();
        }
        let tr: f64 = (0..d).map(|i| m[(i, i)].re).sum();
        for r in 0..d {
            for c in 0..d {
                self.data[r * d + c] = m[(r, c)] / tr;
            }
        }
        self.clipped_negativity = negativity;
        self
    }

    pub fn negativity_suspect(&self) -> bool {
        self.clipped_negativity > NEGATIVITY_WARNING
    }
}

/// Row `bit` of a single-qubit Pauli: (column, value).
fn pauli_entry(p: usize, bit: usize) -> (usize, Z) {
    match (p, bit) {
        (0, b) => (b, z(1.0, 0.0)),
        (1, b) => (1 - b, z(1.0, 0.0)),
        (2, 0) => (1, z(0.0, -1.0)),
        (2, _) => (0, z(0.0, 1.0)),
        (_, 0) => (0, z(1.0, 0.0)),
        (_, _) => (1, z(-1.0, 0.0)),
    }
}

fn parity_sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// The X, Y, Z operator variants of one site.
fn pauli_sites<T: Real>(state: &FmpsState<T>, mode: usize, decoding: PauliDecoding) -> [Site<T>; 3] {
    let kern = state.kernels().clone();
    let sp = std::f64::consts::PI.sqrt();
    match decoding {
        PauliDecoding::Binned => {
            let tooth = |s: f64| -> Vec<T> { kern.x.iter().map(|x| T::lit(parity_sign((s * x.as_f64()).cos()))).collect() };
            let fz = tooth(sp);
            let fy = tooth((2.0 * std::f64::consts::PI).sqrt());
            let mul = |line: &mut [crate::scalar::C<T>], f: &[T]| {
                line.iter_mut().zip(f).for_each(|(z, s)| *z = *z * *s);
            };
            let x = state.mapped_site(mode, |line| {
                kern.dft(line);
                mul(line, &fz);
                kern.idft(line);
            });
            let y = state.mapped_site(mode, |line| {
                kern.rotate(line, -std::f64::consts::FRAC_PI_4);
                mul(line, &fy);
                kern.rotate(line, std::f64::consts::FRAC_PI_4);
            });
            let zs = state.mapped_site(mode, |line| mul(line, &fz));
            [x, y, zs]
        }
        PauliDecoding::Displacement => {
            let h = (std::f64::consts::PI / 2.0).sqrt();
            let op = |a: Z| crate::fmps::displacement_op(&kern, a);
            [
                state.mapped_site(mode, op(z(h, 0.0))),
                state.mapped_site(mode, op(z(h, h))),
                state.mapped_site(mode, op(z(0.0, h))),
            ]
        }
    }
}

/// Decode the logical state carried by `qubit_modes` (qubit k on mode `qubit_modes[k]`).
pub fn logical_dm<T: Real>(state: &FmpsState<T>, qubit_modes: &[usize]) -> Result<LogicalDensityMatrix> {
    logical_dm_with(state, qubit_modes, PauliDecoding::Binned)
}

pub fn logical_dm_with<T: Real>(
    state: &FmpsState<T>,
    qubit_modes: &[usize],
    decoding: PauliDecoding,
) -> Result<LogicalDensityMatrix> {
    let n = qubit_modes.len();
    if n == 0 {
        return Err(QrlError::InvalidParameter("no qubit modes".into()));
    }
    if n > MAX_DECODED_QUBITS {
        return Err(QrlError::TooManyQubits { got: n, max: MAX_DECODED_QUBITS });
    }
    for (k, &m) in qubit_modes.iter().enumerate() {
        if m >= state.n_modes() {
            return Err(QrlError::ModeOutOfRange { index: m, len: state.n_modes() });
        }
        if qubit_modes[..k].contains(&m) {
            return Err(QrlError::InvalidParameter(format!("mode {m} listed twice")));
        }
    }
    let variants: Vec<[Site<T>; 3]> = qubit_modes.iter().map(|&m| pauli_sites(state, m, decoding)).collect();
    let norm = state.norm_sqr();
    let mut exps = vec![0.0; 1 << (2 * n)];
    let mut replaced: Vec<Option<Site<T>>> = vec![None; state.n_modes()];
    for (s, e) in exps.iter_mut().enumerate() {
        for (k, &m) in qubit_modes.iter().enumerate() {
            let p = (s >> (2 * (n - 1 - k))) & 3;
            replaced[m] = if p == 0 { None } else { Some(variants[k][p - 1].clone()) };
        }
        *e = state.expectation_with(&replaced).re / norm;
    }
    Ok(LogicalDensityMatrix::from_pauli_expectations(n, &exps)?.clip())
}

// ------------------------------------------------------------------ DV oracle

#[derive(Clone, Debug, PartialEq)]
pub struct DvState {
    pub n_qubits: usize,
    pub amps: Vec<Z>,
}

impl DvState {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_DV_QUBITS {
            return Err(QrlError::TooManyQubits { got: n_qubits, max: MAX_DV_QUBITS });
        }
        let mut amps = vec![z(0.0, 0.0); 1 << n_qubits];
        amps[0] = z(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        s.amps[0] = z(0.0, 0.0);
        *s.amps.get_mut(index).ok_or(QrlError::ModeOutOfRange { index, len: 1 << n_qubits })? = z(1.0, 0.0);
        Ok(s)
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(amps: Vec<Z>) -> Result<Self> {
        let d = amps.len();
        if !d.is_power_of_two() || d < 2 {
            return Err(QrlError::DimensionMismatch(format!("{d} amplitudes")));
        }
        let n_qubits = d.trailing_zeros() as usize;
        if n_qubits > MAX_DV_QUBITS {
            return Err(QrlError::TooManyQubits { got: n_qubits, max: MAX_DV_QUBITS });
        }
        let nrm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(nrm > 0.0 && nrm.is_finite()) {
            return Err(QrlError::NonFinite("amplitudes"));
        }
        Ok(Self { n_qubits, amps: amps.into_iter().map(|a| a / nrm).collect() })
    }

    /// Tensor product of single-qubit states, qubit 0 first.
    pub fn product(qubits: &[[Z; 2]]) -> Result<Self> {
        let mut amps = vec![z(1.0, 0.0)];
        for q in qubits {
            amps = amps.iter().flat_map(|a| [a * q[0], a * q[1]]).collect();
        }
        Self::from_amplitudes(amps)
    }

    pub fn inner(&self, other: &DvState) -> Z {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn bit(&self, q: usize) -> usize {
        self.n_qubits - 1 - q
    }

    fn apply_1q(&mut self, q: usize, m: [[Z; 2]; 2]) {
        let b = 1 << self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | b] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (o, l) = (z(0.0, 0.0), z(1.0, 0.0));
        let w = &gate.wires;
        match gate.label {
            GateLabel::I => {}
            GateLabel::H => self.apply_1q(w[0], [[z(h, 0.0), z(h, 0.0)], [z(h, 0.0), z(-h, 0.0)]]),
            GateLabel::P => self.apply_1q(w[0], [[l, o], [o, z(0.0, 1.0)]]),
            GateLabel::Pdg => self.apply_1q(w[0], [[l, o], [o, z(0.0, -1.0)]]),
            GateLabel::T => self.apply_1q(w[0], [[l, o], [o, Z::from_polar(1.0, std::f64::consts::FRAC_PI_4)]]),
            GateLabel::Tdg => self.apply_1q(w[0], [[l, o], [o, Z::from_polar(1.0, -std::f64::consts::FRAC_PI_4)]]),
            GateLabel::X => self.apply_1q(w[0], [[o, l], [l, o]]),
            GateLabel::Y => self.apply_1q(w[0], [[o, z(0.0, -1.0)], [z(0.0, 1.0), o]]),
            GateLabel::Z => self.apply_1q(w[0], [[l, o], [o, -l]]),
            GateLabel::CZ => {
                let (a, b) = (1 << self.bit(w[0]), 1 << self.bit(w[1]));
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & a != 0 && i & b != 0 {
                        *amp = -*amp;
                    }
                }
            }
            GateLabel::CX => {
                let (c, t) = (1 << self.bit(w[0]), 1 << self.bit(w[1]));
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            GateLabel::SWAP => {
                let (a, b) = (1 << self.bit(w[0]), 1 << self.bit(w[1]));
                for i in 0..self.amps.len() {
                    if i & a != 0 && i & b == 0 {
                        self.amps.swap(i, (i & !a) | b);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Run `circuit` on `|0...0>`.
pub fn dv_simulate(circuit: &[Gate], n_qubits: usize) -> Result<DvState> {
    dv_simulate_from(DvState::zero(n_qubits)?, circuit)
}

pub fn dv_simulate_from(mut state: DvState, circuit: &[Gate]) -> Result<DvState> {
    for g in circuit {
        state.apply(g)?;
    }
    Ok(state)
}

/// Column-major unitary of a circuit (column k = image of basis state k).
pub fn dv_unitary(circuit: &[Gate], n_qubits: usize) -> Result<Vec<Vec<Z>>> {
    (0..1usize << n_qubits)
        .map(|k| dv_simulate_from(DvState::basis(n_qubits, k)?, circuit).map(|s| s.amps))
        .collect()
}

/// Largest entry deviation between two unitaries after removing the global phase.
pub fn unitary_distance_up_to_phase(a: &[Vec<Z>], b: &[Vec<Z>]) -> f64 {
    let mut ip = z(0.0, 0.0);
    for (ca, cb) in a.iter().zip(b) {
        for (x, y) in ca.iter().zip(cb) {
            ip += x.conj() * y;
        }
    }
    let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { z(1.0, 0.0) };
    a.iter()
        .zip(b)
        .flat_map(|(ca, cb)| ca.iter().zip(cb).map(move |(x, y)| (x * phase - y).norm()))
        .fold(0.0, f64::max)
}
