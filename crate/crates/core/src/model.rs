//! Rotating-frame chain Hamiltonian, local control terms and detuning
//! disorder.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub n_qubits: usize,
    /// Coupling strength, the energy unit (default 1).
    pub coupling_g: f64,
    /// Per-qubit detunings `Delta_i` in units of `g`.
    pub detunings: Vec<f64>,
}

impl ChainConfig {
    /// Resonant chain (`Delta_i = 0`) with `g = 1`.
    pub fn resonant(n_qubits: usize) -> Self {
        ChainConfig {
            n_qubits,
            coupling_g: 1.0,
            detunings: vec![0.0; n_qubits],
        }
    }

    pub fn with_detunings(n_qubits: usize, detunings: Vec<f64>) -> Self {
        ChainConfig {
            n_qubits,
            coupling_g: 1.0,
            detunings,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(Error::Invalid(format!(
                "chain needs at least 2 qubits, got {}",
                self.n_qubits
            )));
        }
        if !(self.coupling_g > 0.0) {
            return Err(Error::Invalid(format!(
                "coupling must be positive, got {}",
                self.coupling_g
            )));
        }
        if self.detunings.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                left: self.n_qubits,
                right: self.detunings.len(),
            });
        }
        Ok(())
    }
}

/// `sum_i (Delta_i/2) Z_i - (g/2) sum_i (X_i X_{i+1} + Y_i Y_{i+1})`.
pub fn build_static_hamiltonian(cfg: &ChainConfig) -> Result<PauliSum> {
    cfg.validate()?;
    let n = cfg.n_qubits;
    let mut h = PauliSum::new(n);
    for (q, &delta) in cfg.detunings.iter().enumerate() {
        h.add(&PauliString::single(n, q, Pauli::Z)?, delta / 2.0)?;
    }
    for q in 0..n - 1 {
        for p in [Pauli::X, Pauli::Y] {
            h.add(
                &PauliString::from_sites(n, &[(q, p), (q + 1, p)])?,
                -cfg.coupling_g / 2.0,
            )?;
        }
    }
    Ok(h)
}

/// `(f/2)(cos(phi) X_q + sin(phi) Y_q)`.
pub fn control_term(n_qubits: usize, qubit: usize, amplitude: f64, phase: f64) -> Result<PauliSum> {
    if qubit >= n_qubits {
        return Err(Error::QubitOutOfRange { qubit, n_qubits });
    }
    let mut h = PauliSum::new(n_qubits);
    h.add(&PauliString::single(n_qubits, qubit, Pauli::X)?, amplitude / 2.0 * phase.cos())?;
    h.add(&PauliString::single(n_qubits, qubit, Pauli::Y)?, amplitude / 2.0 * phase.sin())?;
    Ok(h)
}

/// Quasi-static Gaussian detuning disorder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisorderSpec {
    /// Standard deviation of each `Delta_i`, units of `g`.
    pub sigma: f64,
    pub seed: u64,
    pub n_runs: usize,
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::Invalid(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if self.n_runs == 0 {
            return Err(Error::Invalid("n_runs must be >= 1".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finaliser, used to derive independent stream seeds.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Detunings of a single run. Run `r` draws from a `ChaCha8Rng` seeded with
/// `mix_seed(spec.seed, r)`; entry `i` is the `i`-th `Normal(0, sigma)` draw
/// of that stream. This mapping is part of the public contract.
pub fn sample_run(spec: &DisorderSpec, n_qubits: usize, run: usize) -> Vec<f64> {
    if spec.sigma == 0.0 {
        return vec![0.0; n_qubits];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, run as u64));
    let normal = Normal::new(0.0, spec.sigma).expect("sigma validated");
    (0..n_qubits).map(|_| normal.sample(&mut rng)).collect()
}

/// `n_runs` detuning vectors of length `n_qubits`, i.i.d. `Normal(0, sigma^2)`.
pub fn sample_detunings(spec: &DisorderSpec, n_qubits: usize) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    Ok((0..spec.n_runs).map(|r| sample_run(spec, n_qubits, r)).collect())
}
