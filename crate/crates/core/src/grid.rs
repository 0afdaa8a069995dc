use crate::error::{QrlError, Result};

/// Uniform self-dual quadrature grid shared by every mode.
///
/// Sample `j` sits at `(j - n/2) * spacing`, so the domain is `[-L, L)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub n_points: usize,
    pub spacing: f64,
    pub half_width: f64,
}

impl GridSpec {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(QrlError::InvalidParameter(format!(
                "grid size must be a power of two >= 8, got {n_points}"
            )));
        }
        let spacing = (2.0 * std::f64::consts::PI / n_points as f64).sqrt();
        Ok(Self { n_points, spacing, half_width: spacing * n_points as f64 / 2.0 })
    }

    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - (self.n_points / 2) as f64) * self.spacing
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Index of the grid point nearest to `x`, wrapped into the domain.
    pub fn nearest_index(&self, x: f64) -> usize {
        let n = self.n_points as i64;
        let j = (x / self.spacing).round() as i64 + n / 2;
        j.rem_euclid(n) as usize
    }
}
