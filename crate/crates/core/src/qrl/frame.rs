//! Software Pauli frame.

use crate::circuit::{Gate, GateLabel};
use crate::error::{QrlError, Result};

use super::decode::Syndrome;

/// Accumulated Pauli `prod_k X_k^{x_k} Z_k^{z_k}` (phases untracked) that
/// separates the physical state from the ideal one: `actual = F * ideal`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl PauliFrame {
    pub fn identity(n_qubits: usize) -> Self {
        Self { x: vec![false; n_qubits], z: vec![false; n_qubits] }
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn is_identity(&self) -> bool {
        !self.x.iter().chain(&self.z).any(|&b| b)
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.x.len() {
            return Err(QrlError::ModeOutOfRange { index: q, len: self.x.len() });
        }
        Ok(())
    }

    /// Multiply a Pauli error into the frame.
    pub fn toggle(&mut self, q: usize, x: bool, z: bool) -> Result<()> {
        self.check(q)?;
        self.x[q] ^= x;
        self.z[q] ^= z;
        Ok(())
    }

    pub fn absorb_syndrome(&mut self, q: usize, s: &Syndrome) -> Result<()> {
        self.toggle(q, s.x_bit == 1, s.z_bit == 1)
    }

    /// Conjugate the frame through a Clifford (or fold in a Pauli) acting on the ideal state.
    pub fn update_clifford(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits())?;
        let w = &gate.wires;
        match gate.label {
            GateLabel::I => {}
            GateLabel::H => {
                let q = w[0];
                std::mem::swap(&mut self.x[q], &mut self.z[q]);
            }
            GateLabel::P | GateLabel::Pdg => {
                let q = w[0];
                self.z[q] ^= self.x[q];
            }
            GateLabel::CZ => {
                let (a, b) = (w[0], w[1]);
                let (xa, xb) = (self.x[a], self.x[b]);
                self.z[a] ^= xb;
                self.z[b] ^= xa;
            }
            GateLabel::CX => {
                let (c, t) = (w[0], w[1]);
                self.x[t] ^= self.x[c];
                self.z[c] ^= self.z[t];
            }
            GateLabel::SWAP => {
                let (a, b) = (w[0], w[1]);
                self.x.swap(a, b);
                self.z.swap(a, b);
            }
            GateLabel::X => self.x[w[0]] ^= true,
            GateLabel::Z => self.z[w[0]] ^= true,
            GateLabel::Y => {
                self.x[w[0]] ^= true;
                self.z[w[0]] ^= true;
            }
            GateLabel::T | GateLabel::Tdg => {
                return Err(QrlError::InvalidParameter(format!("{} is not a Clifford", gate.label)));
            }
        }
        Ok(())
    }
}

/// Functional form of [`PauliFrame::update_clifford`].
pub fn frame_update_clifford(frame: &PauliFrame, gate: &Gate) -> Result<PauliFrame> {
    let mut f = frame.clone();
    f.update_clifford(gate)?;
    Ok(f)
}

/// T on the ideal state is realised as T-dagger on the physical one when the frame holds X.
pub fn resolve_t_variant(frame: &PauliFrame, q: usize) -> GateLabel {
    if frame.x.get(q).copied().unwrap_or(false) {
        GateLabel::Tdg
    } else {
        GateLabel::T
    }
}
