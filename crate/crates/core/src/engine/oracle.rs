//! Dense reference propagator. Builds the full `2^N x 2^N` Hamiltonian on
//! every sub-step and exponentiates it directly; meant for small chains in
//! tests.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::propagate::{check_inputs, pieces, CF4_A1, CF4_A2, GAUSS_HI, GAUSS_LO};
use super::StateVector;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::sequencer::Schedule;

/// Dense matrix of a Pauli string, including its phase.
pub fn pauli_matrix(p: &PauliString) -> DMatrix<Complex64> {
    let dim = 1usize << p.len();
    let (x, z, ny) = p.masks();
    let phase = p.phase().to_complex() * Complex64::i().powu(ny);
    let mut m = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        m[(b ^ x, b)] = phase * sign;
    }
    m
}

pub fn dense_hamiltonian(h: &PauliSum) -> DMatrix<Complex64> {
    let dim = 1usize << h.n_qubits();
    let mut m = DMatrix::zeros(dim, dim);
    for (s, c) in h.iter() {
        m += pauli_matrix(&s) * Complex64::new(c, 0.0);
    }
    m
}

/// `ax X_q + ay Y_q` for the qubit at `bit`.
fn add_drive(m: &mut DMatrix<Complex64>, bit: usize, ax: f64, ay: f64) {
    let up = Complex64::new(ax, ay);
    for b in 0..m.nrows() {
        m[(b ^ bit, b)] += if b & bit == 0 { up } else { up.conj() };
    }
}

fn propagator(h: &DMatrix<Complex64>, tau: f64) -> DMatrix<Complex64> {
    (h * Complex64::new(0.0, -tau)).exp()
}

/// Reference propagation with sub-steps of at most `fine_step` inside
/// pulses (fourth-order commutator-free Magnus, dense exponentials) and one
/// exact exponential per pulse-free interval.
pub fn evolve_oracle(
    schedule: &Schedule,
    h_static: &PauliSum,
    psi0: &StateVector,
    fine_step: f64,
) -> Result<StateVector> {
    check_inputs(schedule, h_static, psi0)?;
    if !(fine_step > 0.0) {
        return Err(Error::Invalid(format!("fine_step must be positive, got {fine_step}")));
    }
    let n = schedule.n_qubits;
    let h0 = dense_hamiltonian(h_static);
    let mut psi = DVector::from_column_slice(psi0.amplitudes());
    let hamiltonian_at = |active: &[usize], weights: [(f64, f64); 2]| {
        let mut m = &h0 * Complex64::new(weights[0].0 + weights[1].0, 0.0);
        for &i in active {
            let s = &schedule.segments[i];
            let f: f64 = weights.iter().map(|&(w, t)| w * s.shape.amplitude_at(t - s.start)).sum();
            add_drive(&mut m, 1 << (n - 1 - s.qubit), f / 2.0 * s.axis_phase.cos(), f / 2.0 * s.axis_phase.sin());
        }
        m
    };
    for piece in pieces(schedule) {
        let len = piece.end - piece.start;
        if piece.active.is_empty() {
            psi = propagator(&h0, len) * psi;
            continue;
        }
        let steps = (len / fine_step - 1e-9).ceil().max(1.0) as usize;
        let h = len / steps as f64;
        for k in 0..steps {
            let t0 = piece.start + k as f64 * h;
            let (t1, t2) = (t0 + GAUSS_LO * h, t0 + GAUSS_HI * h);
            let first = hamiltonian_at(&piece.active, [(CF4_A2, t1), (CF4_A1, t2)]);
            let second = hamiltonian_at(&piece.active, [(CF4_A1, t1), (CF4_A2, t2)]);
            psi = propagator(&second, h) * (propagator(&first, h) * psi);
        }
        if psi.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Numerical { time: piece.end, reason: "non-finite amplitude in oracle".into() });
        }
    }
    StateVector::from_amplitudes(psi.iter().copied().collect())
}
