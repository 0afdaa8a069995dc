//! Angle programs and the calibrated table.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::GateLabel;
use crate::error::{QrlError, Result};

use super::network::{LinearNetwork, NetworkModel};

pub const TABLE_VERSION: u32 = 1;

/// Round to 12 significant digits so that stored and in-memory values agree.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Homodyne angles of a single-mode gadget (input rail, then pair rail).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleProgram {
    pub theta_a: f64,
    pub theta_b: f64,
}

impl AngleProgram {
    pub fn new(theta_a: f64, theta_b: f64) -> Self {
        Self { theta_a: round_sig12(theta_a), theta_b: round_sig12(theta_b) }
    }

    pub fn model(&self) -> Result<NetworkModel> {
        LinearNetwork::single(self.theta_a, self.theta_b).analyse()
    }
}

/// Angles and beam-splitter conventions of the two-mode gadget, rails `(A_m, X, Y, C_m)`.
/// With `route_target`, the target wire gets a quarter turn before and after.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoModeProgram {
    pub angles: [f64; 4],
    pub conventions: [i32; 4],
    pub route_target: bool,
}

impl TwoModeProgram {
    pub fn new(angles: [f64; 4], conventions: [i32; 4], route_target: bool) -> Self {
        Self { angles: angles.map(round_sig12), conventions, route_target }
    }

    /// Quarter turns (in, out) per local wire when `target` (0 or 1) is the routed wire.
    pub fn turns(&self, target: usize) -> ([i32; 2], [i32; 2]) {
        let mut tin = [0; 2];
        let mut tout = [0; 2];
        if self.route_target {
            tin[target] = 1;
            tout[target] = -1;
        }
        (tin, tout)
    }

    pub fn model(&self, target: usize) -> Result<NetworkModel> {
        let (tin, tout) = self.turns(target);
        LinearNetwork::two_mode(self.angles, self.conventions, tin, tout).analyse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Program {
    Single(AngleProgram),
    Two(TwoModeProgram),
}

impl std::fmt::Display for Program {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Program::Single(p) => write!(f, "({:.6}, {:.6})", p.theta_a, p.theta_b),
            Program::Two(p) => write!(
                f,
                "({:.6}, {:.6}, {:.6}, {:.6}) conv {:?}{}",
                p.angles[0],
                p.angles[1],
                p.angles[2],
                p.angles[3],
                p.conventions,
                if p.route_target { " routed" } else { "" }
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub program: Program,
    /// Worst-case mean fidelity over the validation inputs, once simulated.
    pub worst_fidelity: Option<f64>,
}

/// Calibrated programs keyed by gate name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleTable {
    pub version: u32,
    pub squeezing_db: f64,
    pub grid_points: usize,
    pub entries: BTreeMap<String, TableEntry>,
}

impl AngleTable {
    pub fn new(squeezing_db: f64, grid_points: usize) -> Self {
        Self { version: TABLE_VERSION, squeezing_db, grid_points, entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, gate: GateLabel, program: Program, worst_fidelity: Option<f64>) {
        self.entries.insert(gate.name().to_string(), TableEntry { program, worst_fidelity: worst_fidelity.map(round_sig12) });
    }

    pub fn get(&self, gate: GateLabel) -> Result<&Program> {
        self.entries.get(gate.name()).map(|e| &e.program).ok_or_else(|| QrlError::MissingProgram(gate.name().into()))
    }

    pub fn single(&self, gate: GateLabel) -> Result<AngleProgram> {
        match self.get(gate)? {
            Program::Single(p) => Ok(*p),
            Program::Two(_) => Err(QrlError::MissingProgram(format!("{gate} (single-mode)"))),
        }
    }

    pub fn two(&self, gate: GateLabel) -> Result<TwoModeProgram> {
        match self.get(gate)? {
            Program::Two(p) => Ok(*p),
            Program::Single(_) => Err(QrlError::MissingProgram(format!("{gate} (two-mode)"))),
        }
    }

    /// The I, P and Pdg programs used by the magic gadget; they must share `theta_a`
    /// with `sin(theta_a) = 0` so the X syndrome is known before `theta_b` is chosen.
    pub fn magic_programs(&self) -> Result<[AngleProgram; 3]> {
        let progs = [self.single(GateLabel::I)?, self.single(GateLabel::P)?, self.single(GateLabel::Pdg)?];
        let a = progs[0].theta_a;
        if progs.iter().any(|p| (p.theta_a - a).abs() > 1e-12) || a.sin().abs() > 1e-12 {
            return Err(QrlError::MissingProgram("feed-forward compatible I/P/Pdg programs".into()));
        }
        Ok(progs)
    }

    /// Built-in programs found by the symplectic analysis; simulation-validated by `calibrate`.
    pub fn analytic_default() -> Self {
        let at2 = 2f64.atan();
        let q = std::f64::consts::FRAC_PI_4;
        let h = std::f64::consts::FRAC_PI_2;
        let mut t = Self::new(14.0, 512);
        t.insert(GateLabel::I, Program::Single(AngleProgram::new(0.0, h)), None);
        t.insert(GateLabel::H, Program::Single(AngleProgram::new(q, -q)), None);
        t.insert(GateLabel::P, Program::Single(AngleProgram::new(0.0, at2)), None);
        t.insert(GateLabel::Pdg, Program::Single(AngleProgram::new(0.0, -at2)), None);
        let cz = TwoModeProgram::new([-at2, 0.0, 0.0, at2], [1; 4], false);
        t.insert(GateLabel::CZ, Program::Two(cz), None);
        t.insert(GateLabel::CX, Program::Two(TwoModeProgram { route_target: true, ..cz }), None);
        t.insert(GateLabel::SWAP, Program::Two(TwoModeProgram::new([0.0, 0.0, h, h], [1; 4], false)), None);
        t
    }

    /// TOML text; angles carry 12 significant digits.
    pub fn to_text(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| QrlError::Parse(e.to_string()))
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let t: Self = toml::from_str(s).map_err(|e| QrlError::Parse(e.to_string()))?;
        if t.version != TABLE_VERSION {
            return Err(QrlError::Parse(format!("angle table version {} (expected {TABLE_VERSION})", t.version)));
        }
        Ok(t)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()?).map_err(|e| QrlError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| QrlError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_text(&s)
    }
}
