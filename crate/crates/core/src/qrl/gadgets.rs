//! Teleportation gadgets executed on the functional MPS.

use rand::Rng;

use crate::circuit::GateLabel;
use crate::error::{QrlError, Result};
use crate::fmps::FmpsState;
use crate::scalar::Real;
use crate::states::BellPairMps;

use super::decode::{decode_displacement, Syndrome};
use super::program::{AngleProgram, TwoModeProgram};

/// Beam-splitter convention of the single-mode gadget.
pub const SINGLE_CONVENTION: i32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct SingleOutcome {
    pub m_a: f64,
    pub m_b: f64,
    pub syndrome: Syndrome,
}

fn check_pair<T: Real>(state: &FmpsState<T>, pair: &BellPairMps<T>, magic: bool) -> Result<()> {
    if pair.magic != magic {
        return Err(QrlError::InvalidParameter(format!("gadget needs a {} pair", if magic { "magic" } else { "plain" })));
    }
    if pair.state.grid().n_points != state.grid().n_points {
        return Err(QrlError::GridMismatch(pair.state.grid().n_points, state.grid().n_points));
    }
    Ok(())
}

fn teleport<T: Real>(
    state: &mut FmpsState<T>,
    wire: usize,
    pair: &BellPairMps<T>,
    theta_a: f64,
    choose_b: impl FnOnce(f64) -> f64,
    rng: &mut (impl Rng + ?Sized),
) -> Result<(f64, f64, f64)> {
    if wire >= state.n_modes() {
        return Err(QrlError::ModeOutOfRange { index: wire, len: state.n_modes() });
    }
    state.insert_two_mode(wire + 1, &pair.state)?;
    let out = state.beamsplit_measure_pair(wire, SINGLE_CONVENTION, theta_a, choose_b, rng)?;
    Ok((out.m_a, out.m_b, out.theta_b))
}

/// Teleport `wire` through a plain Bell pair with a fixed program. The output rail
/// takes the input's place; the syndrome is the pre-gate Pauli.
pub fn execute_single_gadget<T: Real>(
    state: &mut FmpsState<T>,
    wire: usize,
    program: &AngleProgram,
    pair: &BellPairMps<T>,
    rng: &mut (impl Rng + ?Sized),
) -> Result<SingleOutcome> {
    check_pair(state, pair, false)?;
    // validate before consuming the pair
    decode_displacement(0.0, 0.0, program.theta_a, program.theta_b)?;
    let (m_a, m_b, _) = teleport(state, wire, pair, program.theta_a, |_| program.theta_b, rng)?;
    let (s1, s2) = decode_displacement(m_a, m_b, program.theta_a, program.theta_b)?;
    Ok(SingleOutcome { m_a, m_b, syndrome: Syndrome::from_displacement(s1, s2) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MagicOutcome {
    pub m_a: f64,
    pub m_b: f64,
    pub syndrome: Syndrome,
    /// Clifford realised by the adaptive second angle: I, P or Pdg.
    pub correction: GateLabel,
}

/// Magic-pair gadget applying `variant` (T or Tdg) to the physical state.
///
/// The pair supplies T after the programmed Clifford C, so the output is
/// `T C E |in>`. With `sin(theta_a) = 0` the X syndrome of E is fixed by `m_a`
/// alone; C is then chosen so that `T C E = E' variant` for a Pauli
/// `E' = C E C^dagger`.
pub fn execute_t_gadget<T: Real>(
    state: &mut FmpsState<T>,
    wire: usize,
    variant: GateLabel,
    programs: &[AngleProgram; 3],
    pair: &BellPairMps<T>,
    rng: &mut (impl Rng + ?Sized),
) -> Result<MagicOutcome> {
    check_pair(state, pair, true)?;
    if !variant.is_magic() {
        return Err(QrlError::InvalidParameter(format!("{variant} is not a magic gate")));
    }
    let [id, p, pdg] = *programs;
    let theta_a = id.theta_a;
    if programs.iter().any(|q| q.theta_a != theta_a) || theta_a.sin().abs() > 1e-12 {
        return Err(QrlError::MissingProgram("feed-forward compatible I/P/Pdg programs".into()));
    }
    for q in programs {
        decode_displacement(0.0, 0.0, q.theta_a, q.theta_b)?;
    }
    let mut chosen = (GateLabel::I, id);
    let (m_a, m_b, _) = teleport(
        state,
        wire,
        pair,
        theta_a,
        |m_a| {
            // the X component does not depend on m_b or on theta_b
            let x = decode_displacement(m_a, 0.0, theta_a, id.theta_b).map(|(s1, _)| Syndrome::from_displacement(s1, 0.0).x_bit);
            let x = x.unwrap_or(0) == 1;
            chosen = match (variant, x) {
                (GateLabel::T, false) => (GateLabel::I, id),
                (GateLabel::T, true) => (GateLabel::P, p),
                (_, false) => (GateLabel::Pdg, pdg),
                (_, true) => (GateLabel::I, id),
            };
            chosen.1.theta_b
        },
        rng,
    )?;
    let (s1, s2) = decode_displacement(m_a, m_b, theta_a, chosen.1.theta_b)?;
    Ok(MagicOutcome { m_a, m_b, syndrome: Syndrome::from_displacement(s1, s2), correction: chosen.0 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeOutcome {
    /// Outcomes on rails `(A_m, X, Y, C_m)`.
    pub outcomes: [f64; 4],
    /// Pre-gate syndromes of the lower and upper wire.
    pub syndromes: [Syndrome; 2],
}

/// Two-mode gadget on adjacent wires `(lower, lower + 1)`. `target` selects the
/// routed wire (0 = lower, 1 = upper) when the program routes.
///
/// Chain during the gadget: `[A_o, A_m, X, Y, C_m, C_o]`; the four middle rails are
/// measured and `A_o`, `C_o` take the place of the inputs.
pub fn execute_two_mode_gadget<T: Real>(
    state: &mut FmpsState<T>,
    lower: usize,
    program: &TwoModeProgram,
    target: usize,
    pair: &BellPairMps<T>,
    rng: &mut (impl Rng + ?Sized),
) -> Result<TwoModeOutcome> {
    check_pair(state, pair, false)?;
    if lower + 1 >= state.n_modes() {
        return Err(QrlError::ModeOutOfRange { index: lower + 1, len: state.n_modes() });
    }
    if target > 1 {
        return Err(QrlError::InvalidParameter(format!("routed wire {target}")));
    }
    let model = program.model(target)?;
    let quarter = std::f64::consts::FRAC_PI_2;
    let (tin, tout) = program.turns(target);
    for w in 0..2 {
        if tin[w] != 0 {
            state.apply_rotation(lower + w, tin[w] as f64 * quarter)?;
        }
    }
    let [a_m, x, y, c_m] = program.angles;
    let c = program.conventions;
    let i = lower;
    state.insert_two_mode(i, &pair.state)?;
    state.insert_two_mode(i + 4, &pair.state)?;
    state.apply_beamsplitter(i + 1, c[0])?;
    state.apply_beamsplitter(i + 3, c[1])?;
    let xy = state.beamsplit_measure_pair(i + 2, c[2], x, |_| y, rng)?;
    let ac = state.beamsplit_measure_pair(i + 1, c[3], a_m, |_| c_m, rng)?;
    for w in 0..2 {
        if tout[w] != 0 {
            state.apply_rotation(lower + w, tout[w] as f64 * quarter)?;
        }
    }
    let outcomes = [ac.m_a, xy.m_a, xy.m_b, ac.m_b];
    let d = model.decode(&outcomes);
    let syndromes = [Syndrome::from_displacement(d[0].0, d[0].1), Syndrome::from_displacement(d[1].0, d[1].1)];
    Ok(TwoModeOutcome { outcomes, syndromes })
}
