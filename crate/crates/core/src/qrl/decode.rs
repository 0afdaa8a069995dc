//! Displacement decoding and GKP syndrome bits.

use crate::error::{QrlError, Result};

/// `|sin(theta_a - theta_b)|` below this makes a gadget undecodable.
pub const DEGENERACY: f64 = 1e-9;

/// Displacement `(s1, s2)` of a single-mode gadget from its two homodyne outcomes:
/// `mu = i (m_a e^{i theta_b} + m_b e^{i theta_a}) / sin(theta_a - theta_b)`,
/// `s = sqrt2 (Re mu, Im mu)`.
pub fn decode_displacement(m_a: f64, m_b: f64, theta_a: f64, theta_b: f64) -> Result<(f64, f64)> {
    if ![m_a, m_b, theta_a, theta_b].iter().all(|v| v.is_finite()) {
        return Err(QrlError::NonFinite("gadget outcome"));
    }
    let d = (theta_a - theta_b).sin();
    if d.abs() < DEGENERACY {
        return Err(QrlError::UndecodableGadget(d));
    }
    // i (m_a (cos b + i sin b) + m_b (cos a + i sin a))
    let re = -(m_a * theta_b.sin() + m_b * theta_a.sin()) / d;
    let im = (m_a * theta_b.cos() + m_b * theta_a.cos()) / d;
    Ok((std::f64::consts::SQRT_2 * re, std::f64::consts::SQRT_2 * im))
}

/// `round(s / sqrt(pi)) mod 2`.
pub fn syndrome_bits(s: f64) -> u8 {
    let k = (s / std::f64::consts::PI.sqrt()).round();
    k.rem_euclid(2.0) as u8
}

/// X and Z syndromes of one decoded displacement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Syndrome {
    pub x_bit: u8,
    pub z_bit: u8,
    pub raw: (f64, f64),
}

impl Syndrome {
    pub fn from_displacement(s1: f64, s2: f64) -> Self {
        Self { x_bit: syndrome_bits(s1), z_bit: syndrome_bits(s2), raw: (s1, s2) }
    }

    pub fn trivial() -> Self {
        Self { x_bit: 0, z_bit: 0, raw: (0.0, 0.0) }
    }

    /// Distance of the raw displacement from the nearest sqrt(pi) lattice point.
    pub fn residual(&self) -> f64 {
        let sp = std::f64::consts::PI.sqrt();
        let r = |s: f64| s - (s / sp).round() * sp;
        r(self.raw.0).hypot(r(self.raw.1))
    }
}
