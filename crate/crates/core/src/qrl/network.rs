//! Ideal-EPR linear model of a gadget network.
//!
//! Each measured rail starts either as an input wire or as the measured half of a
//! Bell pair whose other half becomes an output wire. With infinitely squeezed
//! pairs `q_m = q_o`, `p_m = -p_o`, and the homodyne outcomes fix
//! `x_out = L x_in + K m`. The pre-gate displacement `L^{-1} K m` is what the
//! decoder rounds.

use nalgebra::DMatrix;

use crate::error::{QrlError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Input(usize),
    /// Measured half of the pair whose free half is output wire `w`.
    BellHalf(usize),
}

/// A passive network on measured rails followed by homodyne detection.
#[derive(Clone, Debug)]
pub struct LinearNetwork {
    pub n_wires: usize,
    pub rails: Vec<Source>,
    /// Beam splitters `(i, j, convention)` in application order; rail `i` is the first port.
    pub beamsplitters: Vec<(usize, usize, i32)>,
    pub angles: Vec<f64>,
    /// Quarter turns applied to each wire before the network and to each output after it.
    pub turns_in: Vec<i32>,
    pub turns_out: Vec<i32>,
}

/// Symplectic action and decoder of a network.
#[derive(Clone, Debug)]
pub struct NetworkModel {
    /// `x_out = l * x_in + k * m`, quadratures ordered `(q0, p0, q1, p1, ...)`.
    pub l: DMatrix<f64>,
    pub k: DMatrix<f64>,
    /// Pre-gate displacement `d = decoder * m`.
    pub decoder: DMatrix<f64>,
}

fn rotation(n_wires: usize, turns: &[i32]) -> DMatrix<f64> {
    let mut r = DMatrix::identity(2 * n_wires, 2 * n_wires);
    for (w, &t) in turns.iter().enumerate() {
        let th = t as f64 * std::f64::consts::FRAC_PI_2;
        let (c, s) = (th.cos().round(), th.sin().round());
        // e^{i th n}: q -> q cos - p sin, p -> q sin + p cos
        r[(2 * w, 2 * w)] = c;
        r[(2 * w, 2 * w + 1)] = -s;
        r[(2 * w + 1, 2 * w)] = s;
        r[(2 * w + 1, 2 * w + 1)] = c;
    }
    r
}

impl LinearNetwork {
    pub fn analyse(&self) -> Result<NetworkModel> {
        let k = self.rails.len();
        let nw = self.n_wires;
        if self.angles.len() != k || 2 * nw != k || self.turns_in.len() != nw || self.turns_out.len() != nw {
            return Err(QrlError::DimensionMismatch("linear network shape".into()));
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut o = DMatrix::<f64>::identity(k, k);
        for &(i, j, conv) in &self.beamsplitters {
            if i >= k || j >= k || i == j {
                return Err(QrlError::InvalidParameter(format!("beam splitter ({i},{j})")));
            }
            let mut b = DMatrix::<f64>::identity(k, k);
            let s = if conv >= 0 { 1.0 } else { -1.0 };
            b[(i, i)] = h;
            b[(i, j)] = s * h;
            b[(j, i)] = -s * h;
            b[(j, j)] = h;
            o = b * o;
        }
        // columns: inputs (2 nw) | outputs (2 nw)
        let mut a = DMatrix::<f64>::zeros(k, 4 * nw);
        for row in 0..k {
            let (c, s) = (self.angles[row].cos(), self.angles[row].sin());
            for (src, rail) in self.rails.iter().enumerate() {
                let w = o[(row, src)];
                let (iq, ip, sp) = match *rail {
                    Source::Input(x) => (2 * x, 2 * x + 1, 1.0),
                    Source::BellHalf(x) => (2 * nw + 2 * x, 2 * nw + 2 * x + 1, -1.0),
                };
                a[(row, iq)] += c * w;
                a[(row, ip)] += s * w * sp;
            }
        }
        let ai = a.columns(0, 2 * nw).into_owned();
        let ao = a.columns(2 * nw, 2 * nw).into_owned();
        let ao_inv = ao
            .try_inverse()
            .filter(|m| m.iter().all(|v| v.is_finite()) && m.amax() < 1e9)
            .ok_or(QrlError::UndecodableGadget(0.0))?;
        let l = -(&ao_inv * ai);
        let l_inv = l.clone().try_inverse().ok_or(QrlError::UndecodableGadget(0.0))?;
        let r_in = rotation(nw, &self.turns_in);
        let r_out = rotation(nw, &self.turns_out);
        let decoder = r_in.transpose() * &l_inv * &ao_inv;
        Ok(NetworkModel { l: &r_out * l * r_in, k: r_out * ao_inv, decoder })
    }

    /// Single-mode gadget: input wire and the measured pair half, beam splitter `conv`.
    pub fn single(theta_a: f64, theta_b: f64) -> Self {
        Self {
            n_wires: 1,
            rails: vec![Source::Input(0), Source::BellHalf(0)],
            beamsplitters: vec![(0, 1, 1)],
            angles: vec![theta_a, theta_b],
            turns_in: vec![0],
            turns_out: vec![0],
        }
    }

    /// Two-mode gadget on rails `(A_m, X, Y, C_m)`.
    pub fn two_mode(angles: [f64; 4], conventions: [i32; 4], turns_in: [i32; 2], turns_out: [i32; 2]) -> Self {
        Self {
            n_wires: 2,
            rails: vec![Source::BellHalf(0), Source::Input(0), Source::Input(1), Source::BellHalf(1)],
            beamsplitters: vec![(0, 1, conventions[0]), (2, 3, conventions[1]), (1, 2, conventions[2]), (0, 3, conventions[3])],
            angles: angles.to_vec(),
            turns_in: turns_in.to_vec(),
            turns_out: turns_out.to_vec(),
        }
    }
}

impl NetworkModel {
    /// Integer matrix with entries in {-1, 0, 1}, if `l` is one.
    pub fn integer_action(&self) -> Option<DMatrix<i32>> {
        let mut out = DMatrix::<i32>::zeros(self.l.nrows(), self.l.ncols());
        for (o, v) in out.iter_mut().zip(self.l.iter()) {
            let r = v.round();
            if (v - r).abs() > 1e-9 || r.abs() > 1.0 {
                return None;
            }
            *o = r as i32;
        }
        Some(out)
    }

    /// Pre-gate displacement per wire.
    pub fn decode(&self, m: &[f64]) -> Vec<(f64, f64)> {
        let d = &self.decoder * DMatrix::from_column_slice(m.len(), 1, m);
        (0..d.nrows() / 2).map(|w| (d[2 * w], d[2 * w + 1])).collect()
    }

    /// Frobenius norm of the decoder; smaller means less amplified measurement noise.
    pub fn noise_gain(&self) -> f64 {
        self.decoder.norm()
    }
}
