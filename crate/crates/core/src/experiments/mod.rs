//! Experiment drivers: randomized benchmarking and three-qubit Grover search.

mod grover;
mod rb;

pub use grover::*;
pub use rb::*;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::GridSpec;
use crate::qrl::{run_policy, PairSource};
use crate::states::{check_envelope, epsilon_from_db, DampingParam};
use crate::svd::SvdPolicy;

/// Independent 64-bit seed for task `(stream, index)` of a run seeded with `base`.
pub fn task_seed(base: u64, stream: u64, index: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Physical simulation knobs shared by the drivers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Physical {
    pub squeezing_db: f64,
    pub grid_points: usize,
    pub chi_max: usize,
}

/// Resolved resources for one squeezing value.
pub struct Prepared {
    pub eps: DampingParam,
    pub grid: GridSpec,
    pub policy: SvdPolicy,
    pub pairs: PairSource<f64>,
}

impl Physical {
    pub fn prepare(&self, with_magic: bool) -> Result<Prepared> {
        let eps = epsilon_from_db(self.squeezing_db)?;
        let grid = GridSpec::new(self.grid_points)?;
        check_envelope(eps, grid)?;
        let base = SvdPolicy { chi_max: self.chi_max, ..SvdPolicy::default() };
        base.validate()?;
        let policy = run_policy(base, eps, grid);
        let pairs = PairSource::new(eps, grid, policy, with_magic)?;
        Ok(Prepared { eps, grid, policy, pairs })
    }
}
