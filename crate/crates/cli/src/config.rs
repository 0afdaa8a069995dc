use std::path::{Path, PathBuf};

use qrlsim_core::circuit::GateLabel;
use qrlsim_core::experiments::{OracleId, RbConfig};
use qrlsim_core::qrl::{default_candidates, CALIBRATED_GATES};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const GRIDS: [usize; 3] = [256, 512, 1024];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    /// Angle table read by `rb` and `grover`.
    pub table: Option<PathBuf>,
    pub calibration: CalibrationSection,
    pub rb: RbSection,
    pub grover: GroverSection,
    pub demo: DemoSection,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 1,
            table: None,
            calibration: CalibrationSection::default(),
            rb: RbSection::default(),
            grover: GroverSection::default(),
            demo: DemoSection::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    pub squeezing_db: f64,
    pub grid_points: usize,
    pub chi_max: usize,
    pub shots_per_input: usize,
    pub threshold: f64,
    pub max_simulated: usize,
    pub gates: Vec<String>,
    /// Homodyne angles in radians.
    pub candidates: Vec<f64>,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        Self {
            squeezing_db: 14.0,
            grid_points: 512,
            chi_max: 64,
            shots_per_input: 4,
            threshold: 0.99,
            max_simulated: 8,
            gates: CALIBRATED_GATES.iter().map(|g| g.name().to_string()).collect(),
            candidates: default_candidates(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbSection {
    pub squeezing_db: Vec<f64>,
    pub n_qubits: usize,
    pub depths: Vec<usize>,
    pub sequences_per_depth: usize,
    pub shots_per_sequence: usize,
    pub grid_points: usize,
    pub chi_max: usize,
    pub min_depth: usize,
    /// Analytic curve sampling range and step in dB.
    pub curve_from: f64,
    pub curve_to: f64,
    pub curve_step: f64,
}

impl Default for RbSection {
    fn default() -> Self {
        let d = RbConfig::default();
        Self {
            squeezing_db: vec![d.squeezing_db],
            n_qubits: d.n_qubits,
            depths: d.depths,
            sequences_per_depth: d.sequences_per_depth,
            shots_per_sequence: d.shots_per_sequence,
            grid_points: d.grid_points,
            chi_max: d.chi_max,
            min_depth: d.min_depth,
            curve_from: 5.0,
            curve_to: 15.0,
            curve_step: 0.5,
        }
    }
}

impl RbSection {
    pub fn rb_config(&self, squeezing_db: f64, seed: u64) -> RbConfig {
        RbConfig {
            n_qubits: self.n_qubits,
            depths: self.depths.clone(),
            sequences_per_depth: self.sequences_per_depth,
            shots_per_sequence: self.shots_per_sequence,
            squeezing_db,
            seed,
            grid_points: self.grid_points,
            chi_max: self.chi_max,
            min_depth: self.min_depth,
        }
    }

    pub fn curve(&self) -> Vec<f64> {
        let n = ((self.curve_to - self.curve_from) / self.curve_step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.curve_from + k as f64 * self.curve_step).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroverSection {
    pub oracles: Vec<OracleId>,
    pub squeezing_db: Vec<f64>,
    pub shots: usize,
    pub grid_points: usize,
    pub chi_max: usize,
}

impl Default for GroverSection {
    fn default() -> Self {
        Self { oracles: OracleId::ALL.to_vec(), squeezing_db: vec![12.0], shots: 200, grid_points: 512, chi_max: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoSection {
    pub squeezing_db: f64,
    pub grid_points: usize,
    /// One of zero, one, plus, minus, plus_i, minus_i.
    pub input: String,
}

impl Default for DemoSection {
    fn default() -> Self {
        Self { squeezing_db: 12.0, grid_points: 256, input: "plus".into() }
    }
}

fn bad<T>(msg: String) -> CliResult<T> {
    Err(CliError::Config(msg))
}

fn check_grid(what: &str, n: usize) -> CliResult<()> {
    if GRIDS.contains(&n) {
        Ok(())
    } else {
        bad(format!("{what}.grid_points = {n}, expected one of {GRIDS:?}"))
    }
}

fn check_db(what: &str, v: &[f64]) -> CliResult<()> {
    if v.is_empty() || v.iter().any(|s| !s.is_finite() || *s <= 0.0) {
        return bad(format!("{what}.squeezing_db must be a non-empty list of positive values"));
    }
    Ok(())
}

impl Config {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let cfg = match path {
            None => Config::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
        };
        Ok(cfg)
    }

    /// Command-line overrides of seed, grid and bond cap.
    pub fn apply_overrides(&mut self, seed: Option<u64>, grid: Option<usize>, chi_max: Option<usize>) {
        if let Some(s) = seed {
            self.seed = s;
        }
        if let Some(g) = grid {
            self.calibration.grid_points = g;
            self.rb.grid_points = g;
            self.grover.grid_points = g;
            self.demo.grid_points = g;
        }
        if let Some(c) = chi_max {
            self.calibration.chi_max = c;
            self.rb.chi_max = c;
            self.grover.chi_max = c;
        }
    }

    pub fn gates(&self) -> CliResult<Vec<GateLabel>> {
        self.calibration
            .gates
            .iter()
            .map(|g| {
                let l: GateLabel = g.parse().map_err(|e: qrlsim_core::error::QrlError| CliError::Config(e.to_string()))?;
                if !CALIBRATED_GATES.contains(&l) {
                    return bad(format!("gate {l} cannot be calibrated"));
                }
                Ok(l)
            })
            .collect()
    }

    pub fn validate(&self) -> CliResult<()> {
        let c = &self.calibration;
        check_grid("calibration", c.grid_points)?;
        check_grid("rb", self.rb.grid_points)?;
        check_grid("grover", self.grover.grid_points)?;
        check_grid("demo", self.demo.grid_points)?;
        check_db("calibration", &[c.squeezing_db])?;
        check_db("rb", &self.rb.squeezing_db)?;
        check_db("grover", &self.grover.squeezing_db)?;
        check_db("demo", &[self.demo.squeezing_db])?;
        for chi in [c.chi_max, self.rb.chi_max, self.grover.chi_max] {
            if chi < 2 {
                return bad(format!("chi_max = {chi} must be at least 2"));
            }
        }
        if c.shots_per_input == 0 || !(0.0..=1.0).contains(&c.threshold) {
            return bad("calibration needs shots_per_input > 0 and threshold in [0, 1]".into());
        }
        if c.candidates.iter().any(|a| !a.is_finite()) {
            return bad("calibration.candidates must be finite".into());
        }
        self.gates()?;
        self.rb.rb_config(self.rb.squeezing_db[0], self.seed).validate().map_err(|e| CliError::Config(format!("rb: {e}")))?;
        if !(self.rb.curve_step > 0.0 && self.rb.curve_from <= self.rb.curve_to) {
            return bad("rb curve range must be increasing with a positive step".into());
        }
        if self.grover.shots == 0 || self.grover.oracles.is_empty() {
            return bad("grover needs shots > 0 and at least one oracle".into());
        }
        demo_input(&self.demo.input)?;
        Ok(())
    }
}

pub fn demo_input(name: &str) -> CliResult<qrlsim_core::states::LogicalInput> {
    use qrlsim_core::states::LogicalInput::*;
    Ok(match name {
        "zero" => Zero,
        "one" => One,
        "plus" => Plus,
        "minus" => Minus,
        "plus_i" => PlusI,
        "minus_i" => MinusI,
        other => return bad(format!("unknown demo input '{other}'")),
    })
}
