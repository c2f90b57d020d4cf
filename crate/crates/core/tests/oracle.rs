//! Matrix-free propagation checked against the dense reference integrator
//! and against closed-form single-qubit results.

use std::f64::consts::PI;

use decouple_core::engine::{
    evolve, evolve_oracle, gate_fidelity_avg, FidelityConvention, GateTarget, PropagatorSettings, StateVector,
};
use decouple_core::model::{build_static_hamiltonian, ChainConfig};
use decouple_core::pauli::PauliSum;
use decouple_core::pulses::{Family, PulseShape};
use decouple_core::sequencer::{compile_cns, compile_dcg, compile_ghz, compile_iswap, Rotation, Schedule, Segment};
use decouple_core::Complex64;
use proptest::prelude::*;

fn detuned(n: usize) -> PauliSum {
    let d = (0..n).map(|i| 0.3 - 0.2 * i as f64).collect();
    build_static_hamiltonian(&ChainConfig::with_detunings(n, d)).unwrap()
}

fn superposition(n: usize) -> StateVector {
    let dim = 1 << n;
    let amps: Vec<Complex64> = (0..dim).map(|k| Complex64::new(1.0 + k as f64, 0.5 * k as f64 - 1.0)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

#[test]
fn compiled_gates_match_oracle_on_four_qubits() {
    let t_p = PI / 32.0;
    let h = detuned(4);
    let psi = superposition(4);
    for s in [
        compile_iswap(4, (1, 2), t_p, Family::Gaussian).unwrap(),
        compile_dcg(4, Rotation::ry(-PI / 2.0), 2, t_p, Family::Sine).unwrap(),
        compile_cns(4, 2, 1, t_p, Family::Gaussian).unwrap(),
    ] {
        let a = evolve(&s, &h, &psi, &PropagatorSettings::default()).unwrap();
        let b = evolve_oracle(&s, &h, &psi, t_p / 200.0).unwrap();
        let d = a.max_abs_diff(&b).unwrap();
        assert!(d < 1e-8, "{}: {d:.2e}", s.label);
    }
}

#[test]
fn oracle_converges_under_step_halving() {
    let t_p = PI / 16.0;
    let h = detuned(3);
    let s = compile_dcg(3, Rotation::rx(PI / 2.0), 1, t_p, Family::Gaussian).unwrap();
    let psi = superposition(3);
    let a = evolve_oracle(&s, &h, &psi, t_p / 200.0).unwrap();
    let b = evolve_oracle(&s, &h, &psi, t_p / 400.0).unwrap();
    assert!(a.max_abs_diff(&b).unwrap() < 1e-9);
}

#[test]
fn midpoint_rule_converges_to_oracle() {
    let t_p = PI / 16.0;
    let h = detuned(2);
    let s = compile_iswap(2, (0, 1), t_p, Family::Gaussian).unwrap();
    let psi = superposition(2);
    let exact = evolve_oracle(&s, &h, &psi, t_p / 200.0).unwrap();
    let err = |n| evolve(&s, &h, &psi, &PropagatorSettings::midpoint(n)).unwrap().max_abs_diff(&exact).unwrap();
    let (coarse, fine) = (err(64), err(128));
    assert!(fine < 1e-4);
    assert!(coarse / fine > 3.0, "{coarse:.2e} -> {fine:.2e}");
}

#[test]
fn translation_invariance() {
    let t_p = PI / 32.0;
    let h = detuned(3);
    let s = compile_dcg(3, Rotation::rx(PI / 2.0), 0, t_p, Family::Gaussian).unwrap();
    let dt = 0.37;
    let psi = superposition(3);
    let settings = PropagatorSettings::default();
    let shifted = evolve(&s.shifted(dt), &h, &psi, &settings).unwrap();
    let idle_first = evolve(&Schedule::idle(3, dt), &h, &psi, &settings).unwrap();
    let direct = evolve(&s, &h, &idle_first, &settings).unwrap();
    assert!(shifted.max_abs_diff(&direct).unwrap() < 1e-12);
}

#[test]
fn free_evolution_conserves_parity() {
    let h = detuned(4);
    let psi = superposition(4);
    let out = evolve(&Schedule::idle(4, 3.7), &h, &psi, &PropagatorSettings::default()).unwrap();
    let parity = |s: &StateVector| -> f64 {
        s.amplitudes()
            .iter()
            .enumerate()
            .map(|(k, a)| if k.count_ones() % 2 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    };
    assert!((parity(&out) - parity(&psi)).abs() < 1e-9);
    assert!((out.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn long_ghz_schedule_preserves_norm() {
    let s = compile_ghz(9, PI / 32.0, Family::Gaussian).unwrap();
    let h = build_static_hamiltonian(&ChainConfig::resonant(9)).unwrap();
    let out = evolve(&s, &h, &StateVector::zero(9), &PropagatorSettings::default()).unwrap();
    assert!((out.norm() - 1.0).abs() < 1e-9, "{}", out.norm());
}

#[test]
fn faulty_identity_and_half_scaled_gate_on_isolated_qubit() {
    let t_q = PI / 16.0;
    let run = |shape: PulseShape, phase: f64, psi: &StateVector| {
        let s = Schedule {
            n_qubits: 1,
            total_duration: shape.duration(),
            segments: vec![Segment { qubit: 0, start: 0.0, shape, axis_phase: phase }],
            label: String::new(),
            blocks: Vec::new(),
        };
        evolve_oracle(&s, &PauliSum::new(1), psi, t_q / 400.0).unwrap()
    };
    let psi = superposition(1);
    let gate = PulseShape::gaussian(t_q, PI / 2.0).unwrap();
    let identity = run(gate.negative_reverse(), 0.0, &psi);
    assert!(identity.max_abs_diff(&psi).unwrap() < 1e-10);
    let direct = run(gate.clone(), PI / 2.0, &psi);
    let stretched = run(gate.half_scaled(), PI / 2.0, &psi);
    assert!(direct.max_abs_diff(&stretched).unwrap() < 1e-10);
}

#[test]
fn ideal_pulses_without_coupling_give_exact_gates() {
    let settings = PropagatorSettings::ideal();
    let h = PauliSum::new(3);
    for (s, target) in [
        (
            compile_dcg(3, Rotation::ry(PI / 2.0), 1, PI / 16.0, Family::Gaussian).unwrap(),
            GateTarget::rotation(1, &Rotation::ry(PI / 2.0)).unwrap(),
        ),
        (
            compile_dcg(3, Rotation::x(), 2, PI / 32.0, Family::Sine).unwrap(),
            GateTarget::rotation(2, &Rotation::x()).unwrap(),
        ),
    ] {
        let f = gate_fidelity_avg(&s, &h, &target, &settings, FidelityConvention::Overlap).unwrap();
        assert!((f - 1.0).abs() < 1e-12, "{}: {f}", s.label);
    }
}

fn random_schedule() -> impl Strategy<Value = Schedule> {
    let seg = (0usize..3, 0u32..6, prop_oneof![Just(Family::Gaussian), Just(Family::Sine)], -4.0f64..4.0, 0.0f64..6.3);
    proptest::collection::vec(seg, 1..5).prop_map(|raw| {
        let t_p = PI / 16.0;
        let mut segments: Vec<Segment> = Vec::new();
        for (qubit, slot, family, area, phase) in raw {
            let start = slot as f64 * t_p;
            if segments.iter().any(|s| s.qubit == qubit && (s.start - start).abs() < t_p) {
                continue;
            }
            let shape = PulseShape::new(family, t_p, area).unwrap();
            segments.push(Segment { qubit, start, shape, axis_phase: phase });
        }
        Schedule { n_qubits: 3, total_duration: 7.0 * PI / 16.0, segments, label: String::new(), blocks: Vec::new() }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_schedules_match_oracle(s in random_schedule()) {
        s.validate().unwrap();
        let h = detuned(3);
        let psi = superposition(3);
        let a = evolve(&s, &h, &psi, &PropagatorSettings::default()).unwrap();
        let b = evolve_oracle(&s, &h, &psi, PI / 16.0 / 200.0).unwrap();
        prop_assert!(a.max_abs_diff(&b).unwrap() < 1e-8);
        prop_assert!((a.norm() - 1.0).abs() < 1e-9);
    }
}
