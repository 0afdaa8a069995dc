use num_complex::Complex64 as Z;
use qrlsim_core::circuit::{Gate, GateLabel::*};
use qrlsim_core::fmps::FmpsState;
use qrlsim_core::grid::GridSpec;
use qrlsim_core::logical::*;
use qrlsim_core::states::*;
use qrlsim_core::svd::SvdPolicy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SQRT_PI: f64 = 1.772_453_850_905_516;

fn single(input: LogicalInput, db: f64, n: usize) -> FmpsState<f64> {
    let g = GridSpec::new(n).unwrap();
    let v = input.build::<f64>(epsilon_from_db(db).unwrap(), g).unwrap();
    FmpsState::product(g, vec![v], SvdPolicy::default(), 0).unwrap()
}

fn target(input: LogicalInput) -> DvState {
    let [a, b] = input.amplitudes();
    DvState::from_amplitudes(vec![a, b]).unwrap()
}

fn expect(rho: &LogicalDensityMatrix, p: usize) -> f64 {
    let mut e = vec![0.0; 4];
    e[p] = 1.0;
    let op = LogicalDensityMatrix::from_pauli_expectations(1, &e).unwrap();
    // Tr(rho sigma) = 2 Tr(rho (sigma/2))
    2.0 * rho.data.iter().zip(&op.data).map(|(a, b)| (a * b.conj()).re).sum::<f64>()
}

#[test]
fn basis_and_plus_states_decode_cleanly() {
    let rho = logical_dm(&single(LogicalInput::Zero, 12.0, 256), &[0]).unwrap();
    assert!(expect(&rho, 3) >= 0.98);
    let rho = logical_dm(&single(LogicalInput::Plus, 12.0, 256), &[0]).unwrap();
    assert!(expect(&rho, 1) >= 0.98);
    assert!(expect(&rho, 3).abs() <= 0.05);
    assert!((rho.trace() - 1.0).abs() < 1e-12);
}

#[test]
fn y_sign_convention_matches_plus_i() {
    for input in [LogicalInput::PlusI, LogicalInput::MinusI, LogicalInput::One, LogicalInput::Minus] {
        let rho = logical_dm(&single(input, 14.0, 512), &[0]).unwrap();
        let f = rho.fidelity(&target(input)).unwrap();
        assert!(f >= 0.99, "{input:?}: {f}");
    }
}

#[test]
fn displacement_decoding_is_envelope_suppressed() {
    let st = single(LogicalInput::Plus, 12.0, 256);
    let h = (std::f64::consts::PI / 2.0).sqrt();
    let x = st.expect_displacement(&[Z::new(h, 0.0)]).unwrap();
    let z = st.expect_displacement(&[Z::new(0.0, h)]).unwrap();
    assert!(x.re >= 0.9 && x.re < 1.0, "{x}");
    assert!(z.norm() <= 0.1, "{z}");
    let rho = logical_dm_with(&st, &[0], PauliDecoding::Displacement).unwrap();
    assert!((expect(&rho, 1) - x.re).abs() < 1e-9);
}

#[test]
fn mixture_of_basis_states_is_half_pure() {
    let r0 = logical_dm(&single(LogicalInput::Zero, 12.0, 256), &[0]).unwrap();
    let r1 = logical_dm(&single(LogicalInput::One, 12.0, 256), &[0]).unwrap();
    let mix = LogicalDensityMatrix::mixture(&[(1.0, &r0), (1.0, &r1)]).unwrap();
    assert!((mix.purity() - 0.5).abs() < 0.02);
}

#[test]
fn purity_and_fidelity_arithmetic() {
    let zero = DvState::zero(1).unwrap();
    let pure = LogicalDensityMatrix::from_pure(&zero);
    assert!((pure.purity() - 1.0).abs() < 1e-15);
    assert!((LogicalDensityMatrix::maximally_mixed(1).purity() - 0.5).abs() < 1e-15);
    let one = LogicalDensityMatrix::from_pure(&DvState::basis(1, 1).unwrap());
    let r = LogicalDensityMatrix::mixture(&[(0.9, &pure), (0.1, &one)]).unwrap();
    assert!((r.purity() - 0.82).abs() < 1e-12);

    let t = DvState::zero(2).unwrap();
    assert!((LogicalDensityMatrix::maximally_mixed(2).fidelity(&t).unwrap() - 0.25).abs() < 1e-15);
    let r = LogicalDensityMatrix::mixture(&[
        (0.8, &LogicalDensityMatrix::from_pure(&t)),
        (0.2, &LogicalDensityMatrix::maximally_mixed(2)),
    ])
    .unwrap();
    assert!((r.fidelity(&t).unwrap() - 0.85).abs() < 1e-12);
    assert!((LogicalDensityMatrix::from_pure(&t).fidelity(&t).unwrap() - 1.0).abs() < 1e-15);
    assert!(r.fidelity(&zero).is_err());
}

#[test]
fn product_decoding_factorizes() {
    let g = GridSpec::new(256).unwrap();
    let e = epsilon_from_db(12.0).unwrap();
    let a = LogicalInput::Zero.build::<f64>(e, g).unwrap();
    let b = LogicalInput::Plus.build::<f64>(e, g).unwrap();
    let st = FmpsState::product(g, vec![a.clone(), b.clone()], SvdPolicy::default(), 0).unwrap();
    let joint = logical_dm(&st, &[0, 1]).unwrap();
    let ra = logical_dm(&FmpsState::product(g, vec![a], SvdPolicy::default(), 0).unwrap(), &[0]).unwrap();
    let rb = logical_dm(&FmpsState::product(g, vec![b], SvdPolicy::default(), 0).unwrap(), &[0]).unwrap();
    let mut dist = 0.0f64;
    for r in 0..4 {
        for c in 0..4 {
            let kron = ra.at(r >> 1, c >> 1) * rb.at(r & 1, c & 1);
            dist = dist.max((joint.at(r, c) - kron).norm());
        }
    }
    // entrywise bound implies trace distance <= 4 * dist / 2
    assert!(2.0 * dist <= 0.02, "{dist}");
    let swapped = logical_dm(&st, &[1, 0]).unwrap();
    assert!((swapped.at(1, 1).re - joint.at(2, 2).re).abs() < 1e-12);
}

#[test]
fn magic_pair_carries_the_t_phase() {
    let g = GridSpec::new(512).unwrap();
    let pair = bell_pair::<f64>(epsilon_from_db(14.0).unwrap(), true, g).unwrap();
    let rho = logical_dm(&pair.state, &[0, 1]).unwrap();
    let phase = rho.at(0, 3).arg();
    assert!((phase + std::f64::consts::FRAC_PI_4).abs() < 0.05, "{phase}");
    let plain = bell_pair::<f64>(epsilon_from_db(14.0).unwrap(), false, g).unwrap();
    let rho = logical_dm(&plain.state, &[0, 1]).unwrap();
    let phi = DvState::from_amplitudes(vec![Z::new(1.0, 0.0), Z::new(0.0, 0.0), Z::new(0.0, 0.0), Z::new(1.0, 0.0)]).unwrap();
    assert!(rho.fidelity(&phi).unwrap() >= 0.98);
}

#[test]
fn decoded_populations_match_homodyne_bins() {
    let g = GridSpec::new(256).unwrap();
    let e = epsilon_from_db(10.0).unwrap();
    let amp = (0.3f64.sqrt(), 0.7f64.sqrt());
    let v = build_logical::<f64>(Z::new(amp.0, 0.0), Z::new(0.0, amp.1), e, g).unwrap();
    let st = FmpsState::product(g, vec![v], SvdPolicy::default(), 0).unwrap();
    let p1 = logical_dm(&st, &[0]).unwrap().at(1, 1).re;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let shots = 1000;
    let ones = (0..shots)
        .filter(|_| {
            let m = st.clone().measure_homodyne(0, 0.0, &mut rng).unwrap();
            (m / SQRT_PI).round().rem_euclid(2.0) == 1.0
        })
        .count();
    let freq = ones as f64 / shots as f64;
    let sigma = (p1 * (1.0 - p1) / shots as f64).sqrt();
    assert!((freq - p1).abs() <= 3.0 * sigma, "{freq} vs {p1}");
}

#[test]
fn pauli_conjugation_moves_populations() {
    let rho = LogicalDensityMatrix::from_pure(&DvState::zero(2).unwrap());
    let flipped = rho.conjugate_pauli(&[false, true], &[true, true]);
    assert!((flipped.at(1, 1).re - 1.0).abs() < 1e-15);
}

#[test]
fn too_many_modes_rejected() {
    let g = GridSpec::new(64).unwrap();
    let v = vec![Z::new(1.0, 0.0); 64];
    let st = FmpsState::product(g, vec![v; 5], SvdPolicy::default(), 0).unwrap();
    assert!(logical_dm(&st, &[0, 1, 2, 3, 4]).is_err());
    assert!(logical_dm(&st, &[0, 0]).is_err());
}

#[test]
fn dv_oracle_gates() {
    let s = dv_simulate(&[Gate::one(H, 0)], 1).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((s.amps[0] - Z::new(h, 0.0)).norm() < 1e-15 && (s.amps[1] - Z::new(h, 0.0)).norm() < 1e-15);

    let cx = dv_unitary(&[Gate::two(CX, 0, 1)], 2).unwrap();
    let hczh = dv_unitary(&[Gate::one(H, 1), Gate::two(CZ, 0, 1), Gate::one(H, 1)], 2).unwrap();
    assert!(unitary_distance_up_to_phase(&cx, &hczh) < 1e-12);

    let swap = dv_unitary(&[Gate::two(SWAP, 0, 1)], 2).unwrap();
    let three_cx = dv_unitary(&[Gate::two(CX, 0, 1), Gate::two(CX, 1, 0), Gate::two(CX, 0, 1)], 2).unwrap();
    assert!(unitary_distance_up_to_phase(&swap, &three_cx) < 1e-12);

    let tt = dv_unitary(&[Gate::one(T, 0), Gate::one(T, 0)], 1).unwrap();
    let p = dv_unitary(&[Gate::one(P, 0)], 1).unwrap();
    assert!(unitary_distance_up_to_phase(&tt, &p) < 1e-12);
    let y = dv_unitary(&[Gate::one(Y, 0)], 1).unwrap();
    let izx = dv_unitary(&[Gate::one(X, 0), Gate::one(Z, 0)], 1).unwrap();
    assert!(unitary_distance_up_to_phase(&y, &izx) < 1e-12);

    let s = dv_simulate(&[Gate::one(X, 1)], 3).unwrap();
    assert_eq!(s.probabilities()[0b010], 1.0);
    assert!(dv_simulate(&[Gate::two(CZ, 0, 0)], 2).is_err());
    assert!(DvState::zero(7).is_err());
}
