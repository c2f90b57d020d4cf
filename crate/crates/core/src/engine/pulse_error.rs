//! Lowest-order Magnus error of finite-width pulses:
//! `Phi = int_0^{t_p} U_p(t)^dag H U_p(t) dt` with `U_p` the pulse
//! propagator alone.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::oracle::{dense_hamiltonian, pauli_matrix};
use super::propagate::rotation_matrix;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::pulses::{Family, PulseShape};
use crate::sequencer::{axis_assignment, layer_scheme, EdgePolicy};

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664_0, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664_0, 0.236_926_885_056_189_1),
];

fn apply_rotation_to_columns(m: &mut DMatrix<Complex64>, n: usize, qubit: usize, u: &[[Complex64; 2]; 2]) {
    let bit = 1usize << (n - 1 - qubit);
    for col in 0..m.ncols() {
        for b0 in 0..m.nrows() {
            if b0 & bit == 0 {
                let (a0, a1) = (m[(b0, col)], m[(b0 | bit, col)]);
                m[(b0, col)] = u[0][0] * a0 + u[0][1] * a1;
                m[(b0 | bit, col)] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }
}

/// Error operator of a single pulse on `qubit` about the axis at
/// `axis_phase`.
pub fn pulse_error_zeroth(shape: &PulseShape, h_static: &PauliSum, qubit: usize, axis_phase: f64) -> Result<DMatrix<Complex64>> {
    simultaneous_pulse_error(h_static, &[(qubit, shape, axis_phase)])
}

/// Error operator of pulses starting together on distinct qubits, integrated
/// over the longest pulse. The pulse propagator uses the closed-form
/// cumulative area of each envelope; the integral is evaluated by composite
/// Gauss-Legendre quadrature, doubling the panel count until converged.
pub fn simultaneous_pulse_error(h_static: &PauliSum, pulses: &[(usize, &PulseShape, f64)]) -> Result<DMatrix<Complex64>> {
    let n = h_static.n_qubits();
    for (i, &(q, _, _)) in pulses.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits: n });
        }
        if pulses[..i].iter().any(|p| p.0 == q) {
            return Err(Error::Invalid(format!("two simultaneous pulses on qubit {q}")));
        }
    }
    let h = dense_hamiltonian(h_static);
    let dim = h.nrows();
    let t_end = pulses.iter().map(|p| p.1.duration()).fold(0.0, f64::max);
    if h.camax() == 0.0 || t_end == 0.0 {
        return Ok(DMatrix::zeros(dim, dim));
    }
    let mut cuts = vec![0.0, t_end];
    for &(_, shape, _) in pulses {
        cuts.push(shape.duration());
        cuts.extend(shape.breakpoints());
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|b, a| *b - *a <= 1e-14 * t_end);

    let integrand = |t: f64| {
        let mut u = DMatrix::<Complex64>::identity(dim, dim);
        for &(q, shape, phase) in pulses {
            apply_rotation_to_columns(&mut u, n, q, &rotation_matrix(shape.cumulative_area(t), phase));
        }
        u.adjoint() * &h * u
    };
    let rule = |panels: usize| {
        let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
        for w in cuts.windows(2) {
            let width = (w[1] - w[0]) / panels as f64;
            for p in 0..panels {
                let mid = w[0] + (p as f64 + 0.5) * width;
                for &(x, wt) in &GL5 {
                    acc += integrand(mid + 0.5 * width * x) * Complex64::new(0.5 * width * wt, 0.0);
                }
            }
        }
        acc
    };
    let mut panels = 2;
    let mut prev = rule(panels);
    while panels < 1 << 12 {
        panels *= 2;
        let next = rule(panels);
        let change = (&next - &prev).camax();
        if change <= 1e-12 * (1.0 + next.camax()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numerical { time: t_end, reason: "pulse-error quadrature did not converge".into() })
}

/// Expands a Hermitian matrix in Pauli strings, dropping coefficients below
/// `tol`.
pub fn pauli_decompose(m: &DMatrix<Complex64>, tol: f64) -> Result<PauliSum> {
    let dim = m.nrows();
    if dim != m.ncols() || !dim.is_power_of_two() || dim < 2 {
        return Err(Error::Invalid(format!("cannot decompose a {}x{} matrix", m.nrows(), m.ncols())));
    }
    let n = dim.trailing_zeros() as usize;
    let mut out = PauliSum::new(n);
    for word in 0..(1usize << (2 * n)) {
        let axes: Vec<Pauli> = (0..n)
            .map(|k| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][word >> (2 * (n - 1 - k)) & 3])
            .collect();
        let p = PauliString::new(axes)?;
        let c = (pauli_matrix(&p) * m).trace() / dim as f64;
        if c.im.abs() > tol.max(1e-9 * m.camax()) {
            return Err(Error::NonHermitian);
        }
        if c.re.abs() > tol {
            out.add(&p, c.re)?;
        }
    }
    Ok(out)
}

/// Lowest-order pulse error of one decoupling layer: the error operators of
/// its eight simultaneous pulse rounds, each taken in the toggling frame of
/// the ideal pulses before it, minus what instantaneous pulses would give
/// over the same windows, summed and expanded in Pauli strings.
pub fn layer_pulse_error(policy: &EdgePolicy, t_p: f64, family: Family, h_static: &PauliSum) -> Result<PauliSum> {
    let n = policy.n_qubits();
    if h_static.n_qubits() != n {
        return Err(Error::LengthMismatch { left: n, right: h_static.n_qubits() });
    }
    let orders = axis_assignment(policy);
    let scheme = layer_scheme(policy)?;
    let shape = PulseShape::new(family, t_p, std::f64::consts::PI)?;
    let dim = 1usize << n;
    let mut frame = DMatrix::<Complex64>::identity(dim, dim);
    let h = dense_hamiltonian(h_static) * Complex64::new(t_p, 0.0);
    let mut total = DMatrix::<Complex64>::zeros(dim, dim);
    for (j, pulse) in scheme.pulses().iter().enumerate() {
        let round: Vec<(usize, &PulseShape, f64)> =
            orders.iter().enumerate().map(|(q, o)| (q, &shape, o.axis(j).phase())).collect();
        let phi = simultaneous_pulse_error(h_static, &round)? - &h;
        total += frame.adjoint() * phi * &frame;
        frame = pauli_matrix(pulse) * frame;
    }
    pauli_decompose(&total, 1e-10 * t_p)
}
