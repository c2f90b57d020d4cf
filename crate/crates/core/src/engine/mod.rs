//! State-vector propagation of a pulse schedule, reduced states and
//! fidelity measures.
//!
//! Qubit `k` of an `N`-qubit chain is bit `N - 1 - k` of a basis index, so
//! qubit 0 is the leftmost tensor factor.

mod oracle;
mod propagate;
mod pulse_error;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sequencer::Schedule;
use crate::pauli::PauliSum;

pub use oracle::{dense_hamiltonian, evolve_oracle, pauli_matrix};
pub use propagate::{evolve, Method, PropagatorSettings, PulseModel};
pub use pulse_error::{layer_pulse_error, pauli_decompose, pulse_error_zeroth, simultaneous_pulse_error};

const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amplitudes }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if index >= 1 << n_qubits {
            return Err(Error::Invalid(format!("basis index {index} out of range for {n_qubits} qubits")));
        }
        let mut s = Self::zero(n_qubits);
        s.amplitudes[0] = Complex64::new(0.0, 0.0);
        s.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Computational basis state from per-qubit bits, qubit 0 first.
    pub fn from_bits(bits: &[bool]) -> Self {
        let n = bits.len();
        let index = bits.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| 1 << (n - 1 - k)).sum();
        Self::basis(n, index).expect("index in range")
    }

    /// `(|0...0> + |1...1>)/sqrt(2)`.
    pub fn ghz(n_qubits: usize) -> Self {
        let mut s = Self::zero(n_qubits);
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        s.amplitudes[0] = a;
        *s.amplitudes.last_mut().unwrap() = a;
        s
    }

    /// Wraps amplitudes whose length is a power of two and whose norm is 1
    /// within `1e-9`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Invalid(format!("state length {len} is not a power of two >= 2")));
        }
        let s = StateVector { n_qubits: len.trailing_zeros() as usize, amplitudes };
        if (s.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::Invalid(format!("state norm {} differs from 1", s.norm())));
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dim(other)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Largest `|a_i - b_i|`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    fn check_dim(&self, other: &StateVector) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::LengthMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(())
    }

    /// Applies a 2x2 unitary (row-major) to `qubit`.
    pub fn apply_single(&mut self, qubit: usize, u: &[[Complex64; 2]; 2]) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange { qubit, n_qubits: self.n_qubits });
        }
        let bit = 1usize << (self.n_qubits - 1 - qubit);
        for b0 in 0..self.amplitudes.len() {
            if b0 & bit == 0 {
                let (a0, a1) = (self.amplitudes[b0], self.amplitudes[b0 | bit]);
                self.amplitudes[b0] = u[0][0] * a0 + u[0][1] * a1;
                self.amplitudes[b0 | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Ok(())
    }
}

/// Density matrix of a subset of qubits, listed in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensity {
    pub qubits: Vec<usize>,
    pub matrix: DMatrix<Complex64>,
}

impl ReducedDensity {
    pub fn pure(state: &StateVector) -> Self {
        let v = DMatrix::from_column_slice(state.dim(), 1, state.amplitudes());
        ReducedDensity {
            qubits: (0..state.n_qubits()).collect(),
            matrix: &v * v.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint()).camax() <= tol
    }
}

/// Traces out every qubit not in `keep`. The result lists the kept qubits
/// in ascending order regardless of the order given.
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<ReducedDensity> {
    let n = state.n_qubits();
    if keep.is_empty() {
        return Err(Error::Invalid("partial trace needs at least one kept qubit".into()));
    }
    let mut qubits = keep.to_vec();
    qubits.sort_unstable();
    for w in qubits.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Invalid(format!("qubit {} listed twice", w[0])));
        }
    }
    if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
        return Err(Error::QubitOutOfRange { qubit: q, n_qubits: n });
    }
    let k = qubits.len();
    let kept_bits: Vec<usize> = qubits.iter().map(|&q| n - 1 - q).collect();
    let env_bits: Vec<usize> = (0..n).rev().filter(|b| !kept_bits.contains(b)).collect();
    let gather = |b: usize, bits: &[usize]| -> usize {
        bits.iter().fold(0, |acc, &bit| (acc << 1) | (b >> bit & 1))
    };
    let mut a = DMatrix::<Complex64>::zeros(1 << k, 1 << (n - k));
    for (b, &amp) in state.amplitudes().iter().enumerate() {
        a[(gather(b, &kept_bits), gather(b, &env_bits))] = amp;
    }
    Ok(ReducedDensity { qubits, matrix: &a * a.adjoint() })
}

/// `|<target|rho|target>|`, clamped to `[0, 1]`.
pub fn state_fidelity(rho: &ReducedDensity, target: &StateVector) -> Result<f64> {
    if rho.dim() != target.dim() {
        return Err(Error::LengthMismatch { left: rho.qubits.len(), right: target.n_qubits() });
    }
    let t = DMatrix::from_column_slice(target.dim(), 1, target.amplitudes());
    let v = (t.adjoint() * &rho.matrix * &t)[(0, 0)];
    Ok(v.norm().min(1.0))
}

/// `|<GHZ|psi>|`.
pub fn ghz_overlap(state: &StateVector) -> f64 {
    let a = state.amplitudes();
    ((a[0] + a[a.len() - 1]) * std::f64::consts::FRAC_1_SQRT_2).norm().min(1.0)
}

/// How a reduced-state overlap `<t|rho|t>` is reported as a fidelity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FidelityConvention {
    /// `|<t|rho|t>|`.
    Overlap,
    /// `sqrt(<t|rho|t>)`, the Uhlmann fidelity against a pure target. For a
    /// pure `rho = |psi><psi|` this is `|<t|psi>|`, the measure used for GHZ
    /// states.
    #[default]
    Root,
}

impl FidelityConvention {
    pub fn apply(self, overlap: f64) -> f64 {
        match self {
            FidelityConvention::Overlap => overlap,
            FidelityConvention::Root => overlap.sqrt(),
        }
    }
}

/// A target unitary on `qubits` (ascending), indexed with the first listed
/// qubit as the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct GateTarget {
    pub qubits: Vec<usize>,
    pub unitary: DMatrix<Complex64>,
}

impl GateTarget {
    pub fn new(qubits: Vec<usize>, unitary: DMatrix<Complex64>) -> Result<Self> {
        if qubits.is_empty() || qubits.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(format!("gate qubits {qubits:?} must be ascending and distinct")));
        }
        let dim = 1 << qubits.len();
        if unitary.nrows() != dim || unitary.ncols() != dim {
            return Err(Error::Invalid(format!(
                "gate matrix is {}x{}, expected {dim}x{dim}",
                unitary.nrows(),
                unitary.ncols()
            )));
        }
        let defect = (unitary.adjoint() * &unitary - DMatrix::identity(dim, dim)).camax();
        if defect > 1e-9 {
            return Err(Error::Invalid(format!("gate matrix is not unitary (defect {defect:e})")));
        }
        Ok(GateTarget { qubits, unitary })
    }

    /// `exp(i pi/4 (XX + YY))`: `|01> -> i|10>`, `|10> -> i|01>`.
    pub fn iswap(a: usize, b: usize) -> Result<Self> {
        let (o, z, i) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0));
        let m = DMatrix::from_row_slice(4, 4, &[o, z, z, z, z, z, i, z, z, i, z, z, z, z, z, o]);
        Self::new(vec![a.min(b), a.max(b)], m)
    }

    pub fn rotation(qubit: usize, rotation: &crate::sequencer::Rotation) -> Result<Self> {
        let u = rotation.matrix();
        Self::new(vec![qubit], DMatrix::from_row_slice(2, 2, &[u[0][0], u[0][1], u[1][0], u[1][1]]))
    }

    /// CNOT from `control` to `target` followed by SWAP of the pair.
    pub fn cns(control: usize, target: usize) -> Result<Self> {
        // Basis (control, target): 00->00, 01->10, 10->11, 11->01.
        let map = [0usize, 2, 3, 1];
        let perm = |m: &[usize; 4]| {
            let mut u = DMatrix::<Complex64>::zeros(4, 4);
            for (col, &row) in m.iter().enumerate() {
                u[(row, col)] = Complex64::new(1.0, 0.0);
            }
            u
        };
        let mut u = perm(&map);
        if control > target {
            let swap = perm(&[0, 2, 1, 3]);
            u = &swap * u * &swap;
        }
        Self::new(vec![control.min(target), control.max(target)], u)
    }
}

/// Per-input fidelities of `schedule` against `target`. Each basis state of
/// the gate qubits is prepared with all other qubits in `|0>`, propagated,
/// reduced to the gate qubits and compared with the ideal output.
pub fn gate_fidelities(
    schedule: &Schedule,
    h_static: &PauliSum,
    target: &GateTarget,
    settings: &PropagatorSettings,
    convention: FidelityConvention,
) -> Result<Vec<f64>> {
    let n = schedule.n_qubits;
    if let Some(&q) = target.qubits.iter().find(|&&q| q >= n) {
        return Err(Error::QubitOutOfRange { qubit: q, n_qubits: n });
    }
    let k = target.qubits.len();
    (0..1usize << k)
        .map(|input| {
            let mut bits = vec![false; n];
            for (j, &q) in target.qubits.iter().enumerate() {
                bits[q] = input >> (k - 1 - j) & 1 == 1;
            }
            let out = evolve(schedule, h_static, &StateVector::from_bits(&bits), settings)?;
            let rho = partial_trace(&out, &target.qubits)?;
            let ideal = StateVector::from_amplitudes(target.unitary.column(input).iter().copied().collect())?;
            Ok(convention.apply(state_fidelity(&rho, &ideal)?))
        })
        .collect()
}

/// Arithmetic mean of [`gate_fidelities`].
pub fn gate_fidelity_avg(
    schedule: &Schedule,
    h_static: &PauliSum,
    target: &GateTarget,
    settings: &PropagatorSettings,
    convention: FidelityConvention,
) -> Result<f64> {
    let f = gate_fidelities(schedule, h_static, target, settings, convention)?;
    Ok(f.iter().sum::<f64>() / f.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_state_reduction() {
        let psi = [c(0.6, 0.0), c(0.0, 0.8)];
        let mut amps = vec![c(0.0, 0.0); 8];
        // |0> (x) |0> (x) psi
        amps[0] = psi[0];
        amps[1] = psi[1];
        let s = StateVector::from_amplitudes(amps).unwrap();
        let rho = partial_trace(&s, &[2]).unwrap();
        let target = StateVector::from_amplitudes(psi.to_vec()).unwrap();
        assert!((&rho.matrix - ReducedDensity::pure(&target).matrix).camax() < 1e-15);
        assert!((state_fidelity(&rho, &target).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bell_reduction_is_mixed() {
        let s = StateVector::ghz(2);
        for q in 0..2 {
            let rho = partial_trace(&s, &[q]).unwrap();
            assert!((&rho.matrix - DMatrix::identity(2, 2).map(|x: Complex64| x * 0.5)).camax() < 1e-15);
            for t in [StateVector::zero(1), StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).unwrap()] {
                assert!((state_fidelity(&rho, &t).unwrap() - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ghz3_two_qubit_marginal() {
        let rho = partial_trace(&StateVector::ghz(3), &[2, 1]).unwrap();
        assert_eq!(rho.qubits, vec![1, 2]);
        let mut expected = DMatrix::<Complex64>::zeros(4, 4);
        expected[(0, 0)] = c(0.5, 0.0);
        expected[(3, 3)] = c(0.5, 0.0);
        assert!((&rho.matrix - expected).camax() < 1e-15);
    }

    #[test]
    fn partial_trace_ordering() {
        // |q0 q1 q2> = |1 0 0>; keeping qubit 0 must see |1>.
        let s = StateVector::from_bits(&[true, false, false]);
        let rho = partial_trace(&s, &[0]).unwrap();
        assert_eq!(rho.matrix[(1, 1)], c(1.0, 0.0));
        let rho = partial_trace(&s, &[0, 2]).unwrap();
        assert_eq!(rho.matrix[(2, 2)], c(1.0, 0.0));
    }

    #[test]
    fn partial_trace_errors() {
        let s = StateVector::zero(3);
        assert!(partial_trace(&s, &[]).is_err());
        assert!(partial_trace(&s, &[1, 1]).is_err());
        assert!(matches!(partial_trace(&s, &[3]), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn fidelity_edge_cases() {
        let one = StateVector::basis(1, 1).unwrap();
        let rho = ReducedDensity::pure(&StateVector::zero(1));
        assert_eq!(state_fidelity(&rho, &one).unwrap(), 0.0);
        assert!(state_fidelity(&rho, &StateVector::zero(2)).is_err());
    }

    #[test]
    fn ghz_overlaps() {
        assert!((ghz_overlap(&StateVector::ghz(5)) - 1.0).abs() < 1e-15);
        assert!((ghz_overlap(&StateVector::zero(4)) - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn conventions() {
        assert_eq!(FidelityConvention::Overlap.apply(0.81), 0.81);
        assert!((FidelityConvention::Root.apply(0.81) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn state_constructors() {
        assert!(StateVector::from_amplitudes(vec![c(1.0, 0.0); 3]).is_err());
        assert!(StateVector::from_amplitudes(vec![c(1.0, 0.0); 2]).is_err());
        assert_eq!(StateVector::from_bits(&[false, true]).amplitudes()[1], c(1.0, 0.0));
        assert!(StateVector::basis(2, 4).is_err());
    }

    #[test]
    fn gate_targets_are_unitary() {
        GateTarget::iswap(2, 1).unwrap();
        let t = GateTarget::cns(2, 1).unwrap();
        assert_eq!(t.qubits, vec![1, 2]);
        // control is qubit 2 (low bit): |q1 q2> = |01> -> CNOT |11> -> SWAP |11>.
        assert_eq!(t.unitary[(3, 1)], c(1.0, 0.0));
        assert!(GateTarget::new(vec![1, 0], DMatrix::identity(4, 4)).is_err());
        assert!(GateTarget::new(vec![0], DMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn reduced_density_properties() {
        let s = StateVector::from_amplitudes(vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)]).unwrap();
        let rho = partial_trace(&s, &[1]).unwrap();
        assert!(rho.is_hermitian(1e-15));
        assert!((rho.trace() - c(1.0, 0.0)).norm() < 1e-15);
        assert!(rho.eigenvalues().iter().all(|&e| e > -1e-12));
    }
}
