//! Logical gate vocabulary shared by the DV oracle, the compiler and the drivers.

use std::fmt;
use std::str::FromStr;

use crate::error::{QrlError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateLabel {
    I,
    H,
    P,
    Pdg,
    CZ,
    SWAP,
    /// Controlled-X; wires are (control, target).
    CX,
    T,
    Tdg,
    X,
    Y,
    Z,
}

impl GateLabel {
    pub const ALL: [GateLabel; 12] = [
        GateLabel::I,
        GateLabel::H,
        GateLabel::P,
        GateLabel::Pdg,
        GateLabel::CZ,
        GateLabel::SWAP,
        GateLabel::CX,
        GateLabel::T,
        GateLabel::Tdg,
        GateLabel::X,
        GateLabel::Y,
        GateLabel::Z,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateLabel::CZ | GateLabel::SWAP | GateLabel::CX => 2,
            _ => 1,
        }
    }

    pub fn is_pauli(self) -> bool {
        matches!(self, GateLabel::X | GateLabel::Y | GateLabel::Z)
    }

    pub fn is_magic(self) -> bool {
        matches!(self, GateLabel::T | GateLabel::Tdg)
    }

    pub fn is_single_gadget(self) -> bool {
        matches!(self, GateLabel::I | GateLabel::H | GateLabel::P | GateLabel::Pdg)
    }

    pub fn is_two_mode(self) -> bool {
        self.arity() == 2
    }

    pub fn name(self) -> &'static str {
        match self {
            GateLabel::I => "I",
            GateLabel::H => "H",
            GateLabel::P => "P",
            GateLabel::Pdg => "Pdg",
            GateLabel::CZ => "CZ",
            GateLabel::SWAP => "SWAP",
            GateLabel::CX => "CX",
            GateLabel::T => "T",
            GateLabel::Tdg => "Tdg",
            GateLabel::X => "X",
            GateLabel::Y => "Y",
            GateLabel::Z => "Z",
        }
    }
}

impl fmt::Display for GateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateLabel {
    type Err = QrlError;

    fn from_str(s: &str) -> Result<Self> {
        GateLabel::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| QrlError::Parse(format!("unknown gate '{s}'")))
    }
}

/// A gate on explicit wires. Two-qubit gates list (first, second) or (control, target).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    pub label: GateLabel,
    pub wires: Vec<usize>,
}

impl Gate {
    pub fn one(label: GateLabel, q: usize) -> Self {
        Self { label, wires: vec![q] }
    }

    pub fn two(label: GateLabel, a: usize, b: usize) -> Self {
        Self { label, wires: vec![a, b] }
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        if self.wires.len() != self.label.arity() {
            return Err(QrlError::Arity { gate: self.label.name().to_string(), expected: self.label.arity(), got: self.wires.len() });
        }
        if let Some(&w) = self.wires.iter().find(|&&w| w >= width) {
            return Err(QrlError::ModeOutOfRange { index: w, len: width });
        }
        if self.wires.len() == 2 && self.wires[0] == self.wires[1] {
            return Err(QrlError::InvalidParameter(format!("{} on a repeated wire", self.label)));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.wires.iter().map(|w| w.to_string()).collect();
        write!(f, "{}({})", self.label, w.join(","))
    }
}

pub type Circuit = Vec<Gate>;
