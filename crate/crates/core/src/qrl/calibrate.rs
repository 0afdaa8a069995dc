//! Angle calibration: symplectic screening, then simulated validation.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{Gate, GateLabel};
use crate::error::{QrlError, Result};
use crate::fmps::FmpsState;
use crate::grid::GridSpec;
use crate::logical::{dv_simulate_from, logical_dm, DvState};
use crate::states::{epsilon_from_db, LogicalInput};
use crate::svd::SvdPolicy;

use super::frame::PauliFrame;
use super::program::{AngleProgram, AngleTable, Program, TwoModeProgram};
use super::schedule::{execute_gate, run_policy, PairSource};

/// `{0, pi/4, -pi/4, pi/2}` together with `±atan 2` and `±atan(1/2)`, all modulo pi.
pub fn default_candidates() -> Vec<f64> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    vec![0.0, FRAC_PI_4, -FRAC_PI_4, FRAC_PI_2, 2f64.atan(), -(2f64.atan()), 0.5f64.atan(), -(0.5f64.atan())]
}

#[derive(Clone, Debug)]
pub struct CalibrationSettings {
    pub squeezing_db: f64,
    pub grid: GridSpec,
    pub policy: SvdPolicy,
    pub shots_per_input: usize,
    pub threshold: f64,
    pub seed: u64,
    /// Screened candidates simulated before giving up.
    pub max_simulated: usize,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            squeezing_db: 14.0,
            grid: GridSpec::new(512).expect("power of two"),
            policy: SvdPolicy::default(),
            shots_per_input: 4,
            threshold: 0.99,
            seed: 1,
            max_simulated: 8,
        }
    }
}

/// Binary symplectic matrix of a Clifford, columns indexed `(x0, z0, x1, z1, ...)`.
pub fn target_class(gate: GateLabel) -> Result<DMatrix<i32>> {
    let n = gate.arity();
    let g = if n == 1 { Gate::one(gate, 0) } else { Gate::two(gate, 0, 1) };
    let mut m = DMatrix::<i32>::zeros(2 * n, 2 * n);
    for j in 0..2 * n {
        let mut f = PauliFrame::identity(n);
        f.toggle(j / 2, j % 2 == 0, j % 2 == 1)?;
        f.update_clifford(&g)?;
        for w in 0..n {
            m[(2 * w, j)] = f.x[w] as i32;
            m[(2 * w + 1, j)] = f.z[w] as i32;
        }
    }
    Ok(m)
}

fn matches_class(l: &DMatrix<i32>, class: &DMatrix<i32>) -> bool {
    l.iter().zip(class.iter()).all(|(a, b)| a.rem_euclid(2) == *b)
}

/// Programs whose ideal action is an integer symplectic map in the gate's Clifford
/// class, ordered by decoder noise gain (stable, so candidate order breaks ties).
pub fn screen_candidates(gate: GateLabel, candidates: &[f64]) -> Result<Vec<(Program, f64)>> {
    if gate.is_magic() || gate.is_pauli() {
        return Err(QrlError::InvalidParameter(format!("{gate} is not calibrated")));
    }
    let class = target_class(gate)?;
    let mut out = Vec::new();
    if gate.arity() == 1 {
        for &a in candidates {
            for &b in candidates {
                let p = AngleProgram::new(a, b);
                if let Ok(m) = p.model() {
                    if m.integer_action().is_some_and(|l| matches_class(&l, &class)) {
                        out.push((Program::Single(p), m.noise_gain()));
                    }
                }
            }
        }
    } else {
        let route = gate == GateLabel::CX;
        let k = candidates.len();
        for idx in 0..k.pow(4) {
            let angles = [candidates[idx / (k * k * k)], candidates[(idx / (k * k)) % k], candidates[(idx / k) % k], candidates[idx % k]];
            for cbits in 0..16u32 {
                let conv = [0, 1, 2, 3].map(|b| if cbits >> (3 - b) & 1 == 0 { 1 } else { -1 });
                let p = TwoModeProgram::new(angles, conv, route);
                if let Ok(m) = p.model(1) {
                    if m.integer_action().is_some_and(|l| matches_class(&l, &class)) {
                        out.push((Program::Two(p), m.noise_gain()));
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| (a.1 * 1e9).round().total_cmp(&(b.1 * 1e9).round()));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputFidelity {
    pub input: String,
    pub fidelity: f64,
}

fn input_sets(arity: usize) -> Vec<Vec<LogicalInput>> {
    let ic = LogicalInput::INFORMATIONALLY_COMPLETE;
    if arity == 1 {
        ic.iter().map(|&a| vec![a]).collect()
    } else {
        ic.iter().flat_map(|&a| ic.iter().map(move |&b| vec![a, b])).collect()
    }
}

/// Mean fidelity per input of the frame-corrected decoded output with the ideal
/// gate action, over `shots_per_input` shots; gate on wires 0 (and 1).
pub fn validate_gate(gate: GateLabel, table: &AngleTable, settings: &CalibrationSettings) -> Result<Vec<InputFidelity>> {
    let eps = epsilon_from_db(settings.squeezing_db)?;
    let g = settings.grid;
    let policy = run_policy(settings.policy, eps, g);
    let pairs = PairSource::<f64>::new(eps, g, policy, gate.is_magic())?;
    let n = gate.arity();
    let op = if n == 1 { Gate::one(gate, 0) } else { Gate::two(gate, 0, 1) };
    input_sets(n)
        .into_par_iter()
        .enumerate()
        .map(|(k, inputs)| {
            let modes = inputs.iter().map(|i| i.build::<f64>(eps, g)).collect::<Result<Vec<_>>>()?;
            let dv_in = DvState::product(&inputs.iter().map(|i| i.amplitudes()).collect::<Vec<_>>())?;
            let ideal = dv_simulate_from(dv_in, std::slice::from_ref(&op))?;
            let mut total = 0.0;
            for shot in 0..settings.shots_per_input {
                let seed = settings.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((k as u64) << 32 | shot as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut st = FmpsState::product(g, modes.clone(), policy, seed)?;
                let mut frame = PauliFrame::identity(n);
                execute_gate(&mut st, &op, table, &pairs, &mut frame, &mut rng, |_, _, _| {})?;
                let rho = logical_dm(&st, &(0..n).collect::<Vec<_>>())?.conjugate_pauli(&frame.x, &frame.z);
                total += rho.fidelity(&ideal)?;
            }
            let name = inputs.iter().map(|i| format!("{i:?}")).collect::<Vec<_>>().join("x");
            Ok(InputFidelity { input: name, fidelity: total / settings.shots_per_input.max(1) as f64 })
        })
        .collect()
}

pub fn worst(f: &[InputFidelity]) -> f64 {
    f.iter().map(|x| x.fidelity).fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug)]
pub struct CalibrationReport {
    pub gate: GateLabel,
    pub program: Program,
    pub worst_fidelity: f64,
    pub per_input: Vec<InputFidelity>,
    pub screened: usize,
    /// Every simulated candidate with its worst-case fidelity, in order.
    pub simulated: Vec<(Program, f64)>,
}

/// First screened program (lowest noise gain, then candidate order) whose
/// simulated worst-case fidelity reaches the threshold. With `prefer_theta_a`,
/// single-mode programs sharing that first angle are tried first.
pub fn calibrate_angles(
    gate: GateLabel,
    candidates: &[f64],
    settings: &CalibrationSettings,
    prefer_theta_a: Option<f64>,
) -> Result<CalibrationReport> {
    let mut screened = screen_candidates(gate, candidates)?;
    if let Some(a) = prefer_theta_a {
        screened.sort_by_key(|(p, _)| !matches!(p, Program::Single(q) if (q.theta_a - a).abs() < 1e-12));
    }
    let mut simulated = Vec::new();
    for (prog, _) in screened.iter().take(settings.max_simulated) {
        let mut table = AngleTable::new(settings.squeezing_db, settings.grid.n_points);
        table.insert(gate, *prog, None);
        let per_input = validate_gate(gate, &table, settings)?;
        let w = worst(&per_input);
        simulated.push((*prog, w));
        if w >= settings.threshold {
            return Ok(CalibrationReport { gate, program: *prog, worst_fidelity: w, per_input, screened: screened.len(), simulated });
        }
    }
    let best = simulated.iter().max_by(|a, b| a.1.total_cmp(&b.1));
    Err(QrlError::Calibration {
        gate: gate.name().into(),
        best_fidelity: best.map_or(f64::NAN, |b| b.1),
        best_program: best.map_or("none".into(), |b| b.0.to_string()),
    })
}

/// Gates with a calibrated program, in calibration order.
pub const CALIBRATED_GATES: [GateLabel; 7] =
    [GateLabel::I, GateLabel::H, GateLabel::P, GateLabel::Pdg, GateLabel::CZ, GateLabel::SWAP, GateLabel::CX];

/// Calibrate `gates` into a table. P and Pdg prefer the identity's first angle so
/// the magic gadget can choose among I, P and Pdg after the first outcome.
pub fn calibrate_table(
    gates: &[GateLabel],
    candidates: &[f64],
    settings: &CalibrationSettings,
) -> Result<(AngleTable, Vec<CalibrationReport>)> {
    let mut table = AngleTable::new(settings.squeezing_db, settings.grid.n_points);
    let mut reports = Vec::new();
    let mut anchor = None;
    for &g in gates {
        let prefer = if matches!(g, GateLabel::P | GateLabel::Pdg) { anchor } else { None };
        let r = calibrate_angles(g, candidates, settings, prefer)?;
        if g == GateLabel::I {
            if let Program::Single(p) = r.program {
                anchor = Some(p.theta_a);
            }
        }
        table.insert(g, r.program, Some(r.worst_fidelity));
        reports.push(r);
    }
    Ok((table, reports))
}
