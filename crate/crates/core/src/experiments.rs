//! Fidelity experiments on a resonant or detuned chain: iSWAP, single-qubit
//! dynamically corrected gates, CNS and GHZ preparation.
//!
//! Gate placement on an `N`-qubit chain: the iSWAP acts on
//! `((N-2)/2, (N-2)/2 + 1)`, a single-qubit gate on `(N-1)/2` and the CNS
//! uses control `(N-2)/2` with the target to its right (integer division).

use crate::engine::{
    evolve, gate_fidelity_avg, ghz_overlap, FidelityConvention, GateTarget, PropagatorSettings, StateVector,
};
use crate::error::{Error, Result};
use crate::model::{build_static_hamiltonian, mix_seed, sample_run, ChainConfig, DisorderSpec};
use crate::pulses::Family;
use crate::sequencer::config::{ExperimentKind, SweepPoint};
use crate::sequencer::{compile_cns, compile_dcg, compile_ghz, compile_iswap, Rotation};

/// Shared evaluation options.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct EvalOptions {
    pub settings: PropagatorSettings,
    pub convention: FidelityConvention,
}

fn chain(n_qubits: usize, detunings: Option<&[f64]>) -> Result<ChainConfig> {
    Ok(match detunings {
        Some(d) => ChainConfig::with_detunings(n_qubits, d.to_vec()),
        None => ChainConfig::resonant(n_qubits),
    })
}

pub fn iswap_pair(n_qubits: usize) -> (usize, usize) {
    let a = n_qubits.saturating_sub(2) / 2;
    (a, a + 1)
}

pub fn single_gate_qubit(n_qubits: usize) -> usize {
    n_qubits.saturating_sub(1) / 2
}

pub fn cns_pair(n_qubits: usize) -> (usize, usize) {
    iswap_pair(n_qubits)
}

pub fn iswap_fidelity(
    n_qubits: usize,
    t_p: f64,
    family: Family,
    detunings: Option<&[f64]>,
    opts: &EvalOptions,
) -> Result<f64> {
    let h = build_static_hamiltonian(&chain(n_qubits, detunings)?)?;
    let (a, b) = iswap_pair(n_qubits);
    let s = compile_iswap(n_qubits, (a, b), t_p, family)?;
    gate_fidelity_avg(&s, &h, &GateTarget::iswap(a, b)?, &opts.settings, opts.convention)
}

pub fn single_gate_fidelity(
    n_qubits: usize,
    gate: Rotation,
    t_p: f64,
    family: Family,
    detunings: Option<&[f64]>,
    opts: &EvalOptions,
) -> Result<f64> {
    let h = build_static_hamiltonian(&chain(n_qubits, detunings)?)?;
    let q = single_gate_qubit(n_qubits);
    let s = compile_dcg(n_qubits, gate, q, t_p, family)?;
    gate_fidelity_avg(&s, &h, &GateTarget::rotation(q, &gate)?, &opts.settings, opts.convention)
}

pub fn cns_fidelity(
    n_qubits: usize,
    t_p: f64,
    family: Family,
    detunings: Option<&[f64]>,
    opts: &EvalOptions,
) -> Result<f64> {
    let h = build_static_hamiltonian(&chain(n_qubits, detunings)?)?;
    let (c, t) = cns_pair(n_qubits);
    let s = compile_cns(n_qubits, c, t, t_p, family)?;
    gate_fidelity_avg(&s, &h, &GateTarget::cns(c, t)?, &opts.settings, opts.convention)
}

/// `|<GHZ|psi(T)>|` after the compiled GHZ schedule acting on `|0...0>`.
pub fn ghz_fidelity(
    n_qubits: usize,
    t_p: f64,
    family: Family,
    detunings: Option<&[f64]>,
    settings: &PropagatorSettings,
) -> Result<f64> {
    let h = build_static_hamiltonian(&chain(n_qubits, detunings)?)?;
    let s = compile_ghz(n_qubits, t_p, family)?;
    let out = evolve(&s, &h, &StateVector::zero(n_qubits), settings)?;
    Ok(ghz_overlap(&out))
}

/// Seed of the disorder stream for the `index`-th sigma of a sweep. Runs
/// with the same `(seed, index, run)` see the same detunings at every `t_p`.
pub fn sigma_seed(seed: u64, index: usize) -> u64 {
    mix_seed(seed, index as u64)
}

/// Detunings used by run `run` of a disorder sweep point.
pub fn disorder_detunings(n_qubits: usize, sigma: f64, seed: u64, sigma_index: usize, run: usize) -> Result<Vec<f64>> {
    let spec = DisorderSpec { sigma, seed: sigma_seed(seed, sigma_index), n_runs: run + 1 };
    spec.validate()?;
    Ok(sample_run(&spec, n_qubits, run))
}

/// Number of independent evaluations behind a sweep point.
pub fn point_runs(point: &SweepPoint) -> usize {
    point.disorder.map_or(1, |d| d.runs)
}

/// Evaluates one sweep point. Disorder points need the run index and
/// evaluate a single disorder realisation.
pub fn evaluate(point: &SweepPoint, run: Option<usize>, opts: &EvalOptions) -> Result<f64> {
    let n = point.n_qubits;
    let det = point.detunings.as_deref();
    match point.kind {
        ExperimentKind::Iswap => iswap_fidelity(n, point.t_p, point.shape, det, opts),
        ExperimentKind::SingleGate => {
            let gate = point.gate.unwrap_or(Rotation::rx(std::f64::consts::FRAC_PI_2));
            single_gate_fidelity(n, gate, point.t_p, point.shape, det, opts)
        }
        ExperimentKind::Cns => cns_fidelity(n, point.t_p, point.shape, det, opts),
        ExperimentKind::Ghz => ghz_fidelity(n, point.t_p, point.shape, det, &opts.settings),
        ExperimentKind::GhzDisorder => {
            let d = point
                .disorder
                .ok_or_else(|| Error::Invalid("ghz_disorder point without sigma".into()))?;
            let run = run.ok_or_else(|| Error::Invalid("ghz_disorder evaluation needs a run index".into()))?;
            if run >= d.runs {
                return Err(Error::Invalid(format!("run {run} out of range for {} runs", d.runs)));
            }
            let det = disorder_detunings(n, d.sigma, d.seed, d.index, run)?;
            ghz_fidelity(n, point.t_p, point.shape, Some(&det), &opts.settings)
        }
    }
}
