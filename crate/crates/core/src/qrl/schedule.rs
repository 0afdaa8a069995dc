//! ASAP compilation of circuits into gadget layers and their execution.

use std::fmt::Write as _;

use rand::Rng;

use crate::circuit::{Gate, GateLabel};
use crate::error::{QrlError, Result};
use crate::fmps::FmpsState;
use crate::scalar::Real;
use crate::grid::GridSpec;
use crate::states::{bell_pair_with_policy, resolution_floor, BellPairMps, DampingParam};
use crate::svd::SvdPolicy;

use super::decode::Syndrome;
use super::frame::{resolve_t_variant, PauliFrame};
use super::gadgets::{execute_single_gadget, execute_t_gadget, execute_two_mode_gadget};
use super::program::AngleTable;

/// One QRL layer: every wire is consumed by exactly one gadget.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Layer {
    /// Paulis folded into the frame before this layer.
    pub paulis_before: Vec<Gate>,
    pub ops: Vec<Gate>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QrlSchedule {
    pub width: usize,
    pub layers: Vec<Layer>,
    /// Paulis after the last layer.
    pub trailing_paulis: Vec<Gate>,
}

impl QrlSchedule {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// One Bell pair per wire per layer.
    pub fn bell_pairs(&self) -> usize {
        self.layers.iter().map(|l| l.ops.iter().map(|g| g.wires.len()).sum::<usize>()).sum()
    }

    pub fn magic_pairs(&self) -> usize {
        self.layers.iter().flat_map(|l| &l.ops).filter(|g| g.label.is_magic()).count()
    }

    pub fn physical_modes(&self) -> usize {
        2 * self.bell_pairs()
    }

    /// Plain-text listing, one line per layer.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# width {} depth {} bell_pairs {} magic {}", self.width, self.depth(), self.bell_pairs(), self.magic_pairs());
        let join = |v: &[Gate]| v.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ");
        for (k, l) in self.layers.iter().enumerate() {
            if !l.paulis_before.is_empty() {
                let _ = writeln!(s, "frame {k}: {}", join(&l.paulis_before));
            }
            let _ = writeln!(s, "layer {k}: {}", join(&l.ops));
        }
        if !self.trailing_paulis.is_empty() {
            let _ = writeln!(s, "frame {}: {}", self.depth(), join(&self.trailing_paulis));
        }
        s
    }
}

/// Greedy as-soon-as-possible layering. Paulis become frame updates, idle wires
/// get identity gadgets, and two-qubit gates must act on adjacent wires.
pub fn compile(circuit: &[Gate], width: usize) -> Result<QrlSchedule> {
    if width == 0 {
        return Err(QrlError::InvalidParameter("zero-width circuit".into()));
    }
    let mut free = vec![0usize; width];
    let mut placed: Vec<Vec<Option<Gate>>> = Vec::new();
    let mut paulis: Vec<(usize, Gate)> = Vec::new();
    for g in circuit {
        g.validate(width)?;
        if g.label.is_pauli() {
            paulis.push((free[g.wires[0]], g.clone()));
            continue;
        }
        if g.wires.len() == 2 && g.wires[0].abs_diff(g.wires[1]) != 1 {
            return Err(QrlError::RoutingRequired(g.wires[0], g.wires[1]));
        }
        let layer = g.wires.iter().map(|&w| free[w]).max().unwrap_or(0);
        while placed.len() <= layer {
            placed.push(vec![None; width]);
        }
        placed[layer][*g.wires.iter().min().unwrap_or(&0)] = Some(g.clone());
        for &w in &g.wires {
            free[w] = layer + 1;
        }
    }
    let depth = placed.len();
    let mut layers: Vec<Layer> = placed
        .into_iter()
        .map(|row| {
            let mut ops = Vec::new();
            let mut w = 0;
            while w < width {
                match &row[w] {
                    Some(g) => {
                        w += g.wires.len();
                        ops.push(g.clone());
                    }
                    None => {
                        ops.push(Gate::one(GateLabel::I, w));
                        w += 1;
                    }
                }
            }
            Layer { paulis_before: Vec::new(), ops }
        })
        .collect();
    let mut trailing_paulis = Vec::new();
    for (at, g) in paulis {
        if at < depth {
            layers[at].paulis_before.push(g);
        } else {
            trailing_paulis.push(g);
        }
    }
    Ok(QrlSchedule { width, layers, trailing_paulis })
}

/// `policy` with its floor raised to the grid's resolution floor at this damping.
pub fn run_policy(policy: SvdPolicy, eps: DampingParam, grid: GridSpec) -> SvdPolicy {
    policy.with_noise_floor(policy.noise_floor.max(resolution_floor(eps, grid)))
}

/// Plain and magic resource states for one run.
#[derive(Clone, Debug)]
pub struct PairSource<T: Real> {
    pub plain: BellPairMps<T>,
    pub magic: Option<BellPairMps<T>>,
}

impl<T: Real> PairSource<T> {
    pub fn new(eps: DampingParam, grid: GridSpec, policy: SvdPolicy, with_magic: bool) -> Result<Self> {
        Ok(Self {
            plain: bell_pair_with_policy(eps, false, grid, policy)?,
            magic: if with_magic { Some(bell_pair_with_policy(eps, true, grid, policy)?) } else { None },
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyndromeRecord {
    pub layer: usize,
    pub gate: Gate,
    pub wire: usize,
    pub syndrome: Syndrome,
    /// Adaptive Clifford of a magic gadget.
    pub correction: Option<GateLabel>,
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub frame: PauliFrame,
    pub syndromes: Vec<SyndromeRecord>,
}

/// Execute a schedule on `state` (one mode per wire, wire order). The returned
/// frame relates the final physical state to the ideal one.
pub fn run_schedule<T: Real>(
    state: &mut FmpsState<T>,
    schedule: &QrlSchedule,
    table: &AngleTable,
    pairs: &PairSource<T>,
    rng: &mut (impl Rng + ?Sized),
) -> Result<RunRecord> {
    run_schedule_from(state, schedule, table, pairs, PauliFrame::identity(schedule.width), rng)
}

/// As [`run_schedule`], for a state that already differs from the ideal input by `frame`.
pub fn run_schedule_from<T: Real>(
    state: &mut FmpsState<T>,
    schedule: &QrlSchedule,
    table: &AngleTable,
    pairs: &PairSource<T>,
    mut frame: PauliFrame,
    rng: &mut (impl Rng + ?Sized),
) -> Result<RunRecord> {
    if state.n_modes() != schedule.width || frame.n_qubits() != schedule.width {
        return Err(QrlError::DimensionMismatch(format!("{} modes for width {}", state.n_modes(), schedule.width)));
    }
    let mut log = Vec::new();
    for (k, layer) in schedule.layers.iter().enumerate() {
        for p in &layer.paulis_before {
            frame.update_clifford(p)?;
        }
        for g in &layer.ops {
            execute_gate(state, g, table, pairs, &mut frame, rng, |wire, syndrome, correction| {
                log.push(SyndromeRecord { layer: k, gate: g.clone(), wire, syndrome, correction })
            })?;
        }
    }
    for p in &schedule.trailing_paulis {
        frame.update_clifford(p)?;
    }
    Ok(RunRecord { frame, syndromes: log })
}

/// Run one gadget and fold its syndromes into `frame`.
pub fn execute_gate<T: Real>(
    state: &mut FmpsState<T>,
    g: &Gate,
    table: &AngleTable,
    pairs: &PairSource<T>,
    frame: &mut PauliFrame,
    rng: &mut (impl Rng + ?Sized),
    mut record: impl FnMut(usize, Syndrome, Option<GateLabel>),
) -> Result<()> {
    g.validate(frame.n_qubits())?;
    match g.label {
        l if l.is_single_gadget() => {
            let out = execute_single_gadget(state, g.wires[0], &table.single(l)?, &pairs.plain, rng)?;
            frame.absorb_syndrome(g.wires[0], &out.syndrome)?;
            frame.update_clifford(g)?;
            record(g.wires[0], out.syndrome, None);
        }
        l if l.is_magic() => {
            let q = g.wires[0];
            let magic = pairs.magic.as_ref().ok_or_else(|| QrlError::MissingProgram("magic Bell pair".into()))?;
            let variant = resolve_t_variant(frame, q);
            let variant = if l == GateLabel::Tdg { flip_t(variant) } else { variant };
            let out = execute_t_gadget(state, q, variant, &table.magic_programs()?, magic, rng)?;
            let x = out.syndrome.x_bit == 1;
            let z = (out.syndrome.z_bit == 1) ^ (x && out.correction != GateLabel::I);
            frame.toggle(q, x, z)?;
            record(q, out.syndrome, Some(out.correction));
        }
        l if l.is_two_mode() => {
            let (a, b) = (g.wires[0], g.wires[1]);
            let lower = a.min(b);
            // routed wire: the CX target
            let target = usize::from(b > a);
            let out = execute_two_mode_gadget(state, lower, &table.two(l)?, target, &pairs.plain, rng)?;
            frame.absorb_syndrome(lower, &out.syndromes[0])?;
            frame.absorb_syndrome(lower + 1, &out.syndromes[1])?;
            frame.update_clifford(g)?;
            record(lower, out.syndromes[0], None);
            record(lower + 1, out.syndromes[1], None);
        }
        _ => frame.update_clifford(g)?,
    }
    Ok(())
}

fn flip_t(v: GateLabel) -> GateLabel {
    if v == GateLabel::T {
        GateLabel::Tdg
    } else {
        GateLabel::T
    }
}
