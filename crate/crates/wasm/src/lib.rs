//! Browser bindings: pulse envelopes, compiled schedules and gate
//! fidelities for small chains.

use decouple_core::experiments::{
    cns_fidelity, cns_pair, ghz_fidelity, iswap_fidelity, iswap_pair, single_gate_fidelity, single_gate_qubit,
    EvalOptions,
};
use decouple_core::pulses::{Family, PulseShape};
use decouple_core::sequencer::json::to_json;
use decouple_core::sequencer::{compile_cns, compile_dcg, compile_ghz, compile_iswap, Rotation};
use decouple_core::Error;
use wasm_bindgen::prelude::*;

/// Largest chain the page will simulate; the state vector has `2^N` entries.
const MAX_BROWSER_QUBITS: usize = 8;

fn js(e: Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn family(name: &str) -> Result<Family, JsValue> {
    match name {
        "gaussian" => Ok(Family::Gaussian),
        "sine" => Ok(Family::Sine),
        other => Err(JsValue::from_str(&format!("unknown shape {other:?}"))),
    }
}

fn check_size(n_qubits: usize) -> Result<(), JsValue> {
    if (2..=MAX_BROWSER_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(JsValue::from_str(&format!("n_qubits must be between 2 and {MAX_BROWSER_QUBITS}")))
    }
}

/// `samples` evenly spaced values of a pi-pulse envelope of duration
/// `pi / tp_denominator`, endpoints included. Returns `[t_0, f_0, t_1, f_1, ...]`.
#[wasm_bindgen]
pub fn pulse_envelope(shape: &str, tp_denominator: f64, samples: usize) -> Result<Vec<f64>, JsValue> {
    let t_p = std::f64::consts::PI / tp_denominator;
    let p = PulseShape::new(family(shape)?, t_p, std::f64::consts::PI).map_err(js)?;
    let samples = samples.max(2);
    Ok((0..samples)
        .flat_map(|k| {
            let t = t_p * k as f64 / (samples - 1) as f64;
            [t, p.amplitude_at(t)]
        })
        .collect())
}

/// Peak amplitude (units of g) of a pi-pulse of duration `pi / tp_denominator`.
#[wasm_bindgen]
pub fn peak_amplitude(shape: &str, tp_denominator: f64) -> Result<f64, JsValue> {
    let p = PulseShape::new(family(shape)?, std::f64::consts::PI / tp_denominator, std::f64::consts::PI).map_err(js)?;
    Ok(p.peak_amplitude())
}

/// Schedule JSON for `gate` (`iswap`, `cns`, `ghz` or a rotation such as
/// `rx(pi/2)`) on an `n_qubits` chain.
#[wasm_bindgen]
pub fn schedule_json(gate: &str, n_qubits: usize, tp_denominator: f64, shape: &str) -> Result<String, JsValue> {
    check_size(n_qubits)?;
    let t_p = std::f64::consts::PI / tp_denominator;
    let f = family(shape)?;
    let s = match gate {
        "iswap" => compile_iswap(n_qubits, iswap_pair(n_qubits), t_p, f),
        "cns" => {
            let (c, t) = cns_pair(n_qubits);
            compile_cns(n_qubits, c, t, t_p, f)
        }
        "ghz" => compile_ghz(n_qubits, t_p, f),
        other => other
            .parse::<Rotation>()
            .and_then(|r| compile_dcg(n_qubits, r, single_gate_qubit(n_qubits), t_p, f)),
    }
    .map_err(js)?;
    to_json(&s).map_err(js)
}

/// Simulated fidelity of `gate` on a resonant chain, as in the CLI tables.
#[wasm_bindgen]
pub fn fidelity(gate: &str, n_qubits: usize, tp_denominator: f64, shape: &str) -> Result<f64, JsValue> {
    check_size(n_qubits)?;
    let t_p = std::f64::consts::PI / tp_denominator;
    let f = family(shape)?;
    let opts = EvalOptions::default();
    match gate {
        "iswap" => iswap_fidelity(n_qubits, t_p, f, None, &opts),
        "cns" => cns_fidelity(n_qubits, t_p, f, None, &opts),
        "ghz" => ghz_fidelity(n_qubits, t_p, f, None, &opts.settings),
        other => other
            .parse::<Rotation>()
            .and_then(|r| single_gate_fidelity(n_qubits, r, t_p, f, None, &opts)),
    }
    .map_err(js)
}
