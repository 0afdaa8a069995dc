use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{wilson_interval, Z95};
use crate::circuit::{Gate, GateLabel::*};
use crate::error::{QrlError, Result};
use crate::fmps::FmpsState;
use crate::qrl::{compile, run_schedule, syndrome_bits, AngleTable};
use crate::states::LogicalInput;

use super::{task_seed, Physical};

pub const GROVER_QUBITS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleId {
    A,
    B,
    C,
}

impl OracleId {
    pub const ALL: [OracleId; 3] = [OracleId::A, OracleId::B, OracleId::C];

    /// Marked basis states, qubit 0 as the most significant bit.
    pub fn solutions(self) -> [usize; 2] {
        match self {
            OracleId::A => [0b011, 0b110],
            OracleId::B => [0b000, 0b100],
            OracleId::C => [0b010, 0b111],
        }
    }

    /// Phase oracle up to a global phase.
    pub fn gates(self) -> Vec<Gate> {
        match self {
            OracleId::A => vec![Gate::two(CZ, 0, 1), Gate::two(CZ, 1, 2)],
            OracleId::B => vec![Gate::one(Z, 1), Gate::one(Z, 2), Gate::two(CZ, 1, 2)],
            OracleId::C => vec![Gate::one(Z, 1), Gate::two(CZ, 0, 1), Gate::two(CZ, 1, 2)],
        }
    }
}

impl fmt::Display for OracleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleId::A => "a",
            OracleId::B => "b",
            OracleId::C => "c",
        })
    }
}

impl FromStr for OracleId {
    type Err = QrlError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(OracleId::A),
            "b" => Ok(OracleId::B),
            "c" => Ok(OracleId::C),
            _ => Err(QrlError::Parse(format!("unknown oracle '{s}'"))),
        }
    }
}

/// Nearest-neighbour Clifford+T CCZ on wires 0, 1, 2 with wire 1 as the CX target.
/// The two SWAPs carry wire 2 next to wire 0 and back.
pub fn ccz_block() -> Vec<Gate> {
    vec![
        Gate::two(CX, 2, 1),
        Gate::one(Tdg, 1),
        Gate::two(CX, 0, 1),
        Gate::one(T, 1),
        Gate::two(CX, 2, 1),
        Gate::one(Tdg, 1),
        Gate::two(CX, 0, 1),
        Gate::one(T, 1),
        Gate::one(T, 2),
        Gate::two(SWAP, 1, 2),
        Gate::two(CX, 0, 1),
        Gate::one(Tdg, 1),
        Gate::one(T, 0),
        Gate::two(CX, 0, 1),
        Gate::two(SWAP, 1, 2),
    ]
}

/// Initial H layer, oracle, then one diffusion step.
pub fn grover_circuit(oracle: OracleId) -> Vec<Gate> {
    let layer = |l| (0..GROVER_QUBITS).map(move |q| Gate::one(l, q));
    let mut c: Vec<Gate> = layer(H).collect();
    c.extend(oracle.gates());
    c.extend(layer(H));
    c.extend(layer(X));
    c.extend(ccz_block());
    c.extend(layer(X));
    c.extend(layer(H));
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroverConfig {
    pub oracle: OracleId,
    pub squeezing_db: f64,
    pub shots: usize,
    pub seed: u64,
    pub grid_points: usize,
    pub chi_max: usize,
}

impl Default for GroverConfig {
    fn default() -> Self {
        Self { oracle: OracleId::A, squeezing_db: 12.0, shots: 200, seed: 1, grid_points: 512, chi_max: 64 }
    }
}

impl GroverConfig {
    pub fn physical(&self) -> Physical {
        Physical { squeezing_db: self.squeezing_db, grid_points: self.grid_points, chi_max: self.chi_max }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    /// Frame-corrected readout, qubit 0 first.
    pub outcome: String,
    pub gadgets: usize,
    pub x_syndromes: usize,
    pub z_syndromes: usize,
    pub discarded_weight: f64,
    pub success: bool,
}

#[derive(Clone, Debug)]
pub struct GroverRun {
    pub success_prob: f64,
    pub ci95: (f64, f64),
    pub shots: Vec<ShotRecord>,
}

impl GroverRun {
    pub fn successes(&self) -> usize {
        self.shots.iter().filter(|s| s.success).count()
    }
}

/// Success rate and Wilson 95% interval of a set of shots.
pub fn summarize_shots(shots: Vec<ShotRecord>) -> GroverRun {
    let k = shots.iter().filter(|s| s.success).count();
    let n = shots.len();
    GroverRun { success_prob: if n == 0 { 0.0 } else { k as f64 / n as f64 }, ci95: wilson_interval(k, n, Z95), shots }
}

/// Shots of the compiled circuit from `|000>`, read out by q-homodyne parity.
pub fn run_grover(config: &GroverConfig, table: &AngleTable) -> Result<GroverRun> {
    if config.shots == 0 {
        return Err(QrlError::InvalidParameter("zero shots".into()));
    }
    let prep = config.physical().prepare(true)?;
    let schedule = compile(&grover_circuit(config.oracle), GROVER_QUBITS)?;
    let zero = LogicalInput::Zero.build::<f64>(prep.eps, prep.grid)?;
    let solutions = config.oracle.solutions();
    let shots = (0..config.shots)
        .into_par_iter()
        .map(|shot| {
            let seed = task_seed(config.seed, 0, shot as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut st = FmpsState::product(prep.grid, vec![zero.clone(); GROVER_QUBITS], prep.policy, seed)?;
            let run = run_schedule(&mut st, &schedule, table, &prep.pairs, &mut rng)?;
            let mut value = 0usize;
            let mut outcome = String::with_capacity(GROVER_QUBITS);
            for q in 0..GROVER_QUBITS {
                // each measurement removes the leading mode
                let m = st.measure_homodyne(0, 0.0, &mut rng)?;
                let bit = syndrome_bits(m) ^ u8::from(run.frame.x[q]);
                value = (value << 1) | bit as usize;
                outcome.push(if bit == 1 { '1' } else { '0' });
            }
            Ok(ShotRecord {
                outcome,
                gadgets: run.syndromes.len(),
                x_syndromes: run.syndromes.iter().filter(|s| s.syndrome.x_bit == 1).count(),
                z_syndromes: run.syndromes.iter().filter(|s| s.syndrome.z_bit == 1).count(),
                discarded_weight: st.discarded_weight,
                success: solutions.contains(&value),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_shots(shots))
}
