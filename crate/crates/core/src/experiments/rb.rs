use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{fit_rb_with, RbFit, RbPoint, MIN_RB_DEPTH};
use crate::circuit::{Gate, GateLabel};
use crate::error::{QrlError, Result};
use crate::fmps::FmpsState;
use crate::logical::{dv_simulate, logical_dm};
use crate::qrl::{compile, run_schedule, AngleTable};
use crate::states::LogicalInput;

use super::{task_seed, Physical};

const SINGLE: [GateLabel; 4] = [GateLabel::I, GateLabel::H, GateLabel::P, GateLabel::Pdg];
const PAIR: [GateLabel; 2] = [GateLabel::CZ, GateLabel::SWAP];

/// Probability that an adjacent disjoint pair receives a two-qubit generator.
pub const PAIR_PROBABILITY: f64 = 1.0 / 3.0;

/// `m` layers of random Clifford generators on `n` wires.
///
/// Each layer tiles the wires into adjacent disjoint pairs, starting at wire 0, or
/// at wire 0 or 1 with equal odds when `n >= 3`. Each pair independently gets CZ
/// or SWAP (uniform) with probability 1/3; every other wire gets one of
/// I, H, P, Pdg uniformly.
pub fn random_clifford_circuit(n: usize, m: usize, rng: &mut (impl Rng + ?Sized)) -> Vec<Gate> {
    let mut out = Vec::new();
    for _ in 0..m {
        let offset = if n >= 3 { rng.random_range(0..2) } else { 0 };
        let mut w = 0;
        while w < n {
            if w >= offset && w + 1 < n && (w - offset) % 2 == 0 && rng.random_bool(PAIR_PROBABILITY) {
                out.push(Gate::two(PAIR[rng.random_range(0..2)], w, w + 1));
                w += 2;
                continue;
            }
            out.push(Gate::one(SINGLE[rng.random_range(0..4)], w));
            // the partner of an unpaired pair is drawn on the next iteration
            w += 1;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RbConfig {
    pub n_qubits: usize,
    pub depths: Vec<usize>,
    pub sequences_per_depth: usize,
    pub shots_per_sequence: usize,
    pub squeezing_db: f64,
    pub seed: u64,
    pub grid_points: usize,
    pub chi_max: usize,
    pub min_depth: usize,
}

impl Default for RbConfig {
    fn default() -> Self {
        Self {
            n_qubits: 2,
            depths: vec![7, 9, 12, 16],
            sequences_per_depth: 50,
            shots_per_sequence: 4,
            squeezing_db: 10.5,
            seed: 1,
            grid_points: 512,
            chi_max: 64,
            min_depth: MIN_RB_DEPTH,
        }
    }
}

impl RbConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(QrlError::InvalidParameter(m));
        if !(1..=6).contains(&self.n_qubits) {
            return bad(format!("n_qubits {} outside 1..=6", self.n_qubits));
        }
        if self.depths.is_empty() || self.depths.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("depths {:?} must be non-empty and strictly ascending", self.depths));
        }
        if self.depths[0] < self.min_depth.max(1) {
            return bad(format!("depth {} below the coverage floor {}", self.depths[0], self.min_depth));
        }
        if self.sequences_per_depth == 0 || self.shots_per_sequence == 0 {
            return bad("sequences and shots must be positive".into());
        }
        Ok(())
    }

    pub fn physical(&self) -> Physical {
        Physical { squeezing_db: self.squeezing_db, grid_points: self.grid_points, chi_max: self.chi_max }
    }
}

/// One random sequence, averaged over its shots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbSample {
    pub depth: usize,
    pub sequence: usize,
    pub fidelity: f64,
    pub purity: f64,
}

/// Simulate every (depth, sequence) task from `|0...0>`.
pub fn rb_samples(config: &RbConfig, table: &AngleTable) -> Result<Vec<RbSample>> {
    config.validate()?;
    let prep = config.physical().prepare(false)?;
    let n = config.n_qubits;
    let zero = LogicalInput::Zero.build::<f64>(prep.eps, prep.grid)?;
    let wires: Vec<usize> = (0..n).collect();
    let tasks: Vec<(usize, usize)> =
        config.depths.iter().flat_map(|&d| (0..config.sequences_per_depth).map(move |s| (d, s))).collect();
    tasks
        .into_par_iter()
        .map(|(depth, sequence)| {
            let id = ((depth as u64) << 32) | sequence as u64;
            let mut crng = ChaCha8Rng::seed_from_u64(task_seed(config.seed, 0, id));
            let circuit = random_clifford_circuit(n, depth, &mut crng);
            let schedule = compile(&circuit, n)?;
            let ideal = dv_simulate(&circuit, n)?;
            let (mut f, mut p) = (0.0, 0.0);
            for shot in 0..config.shots_per_sequence {
                let seed = task_seed(config.seed, 1 + shot as u64, id);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut st = FmpsState::product(prep.grid, vec![zero.clone(); n], prep.policy, seed)?;
                let run = run_schedule(&mut st, &schedule, table, &prep.pairs, &mut rng)?;
                let rho = logical_dm(&st, &wires)?.conjugate_pauli(&run.frame.x, &run.frame.z);
                f += rho.fidelity(&ideal)?;
                p += rho.purity();
            }
            let k = config.shots_per_sequence as f64;
            Ok(RbSample { depth, sequence, fidelity: f / k, purity: p / k })
        })
        .collect()
}

/// Per-depth means and standard errors, ascending in depth.
pub fn aggregate_rb(samples: &[RbSample]) -> Vec<RbPoint> {
    let mut depths: Vec<usize> = samples.iter().map(|s| s.depth).collect();
    depths.sort_unstable();
    depths.dedup();
    depths
        .into_iter()
        .map(|d| {
            let f: Vec<f64> = samples.iter().filter(|s| s.depth == d).map(|s| s.fidelity).collect();
            RbPoint::from_samples(d, &f)
        })
        .collect()
}

/// Mean purity per depth, ascending in depth.
pub fn mean_purity(samples: &[RbSample]) -> Vec<(usize, f64)> {
    let mut depths: Vec<usize> = samples.iter().map(|s| s.depth).collect();
    depths.sort_unstable();
    depths.dedup();
    depths
        .into_iter()
        .map(|d| {
            let p: Vec<f64> = samples.iter().filter(|s| s.depth == d).map(|s| s.purity).collect();
            (d, p.iter().sum::<f64>() / p.len() as f64)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct RbRun {
    pub samples: Vec<RbSample>,
    pub points: Vec<RbPoint>,
    pub fit: RbFit,
    /// Fit with the asymptote free; `None` with fewer than four depths.
    pub fit_free_b: Option<RbFit>,
}

pub fn run_rb(config: &RbConfig, table: &AngleTable) -> Result<RbRun> {
    let samples = rb_samples(config, table)?;
    let points = aggregate_rb(&samples);
    let fit = fit_rb_with(&points, config.n_qubits, config.min_depth, false)?;
    let fit_free_b = fit_rb_with(&points, config.n_qubits, config.min_depth, true).ok();
    Ok(RbRun { samples, points, fit, fit_free_b })
}
