//! Compiles a single gate from a config into a schedule.

use decouple_core::experiments::{cns_pair, iswap_pair, single_gate_qubit};
use decouple_core::sequencer::config::ExperimentFile;
use decouple_core::sequencer::{compile_cns, compile_dcg, compile_ghz, compile_iswap, Rotation, Schedule};
use decouple_core::{Error, Result};

/// Compiles `gate` on the chain of the first experiment in `file`, using its
/// first `n_qubits` and `t_p` values and its shape.
///
/// Gate labels: `iswap`, `cns`, `ghz`, or a rotation (`x`, `rx(pi/2)`,
/// `ry(-pi/2)`, ...) compiled as a corrected single-qubit gate. Placement
/// follows the experiments: the iSWAP and CNS act on the middle pair, a
/// rotation on the middle qubit.
pub fn compile_gate(file: &ExperimentFile, gate: &str) -> Result<Schedule> {
    let e = file
        .experiments
        .first()
        .ok_or_else(|| Error::Invalid("config holds no experiment".into()))?;
    let (n, t_p) = match (e.n_qubits.first(), e.t_p.first()) {
        (Some(&n), Some(&t)) => (n, t),
        _ => return Err(Error::Invalid("experiment needs n_qubits and t_p".into())),
    };
    match gate.trim().to_ascii_lowercase().as_str() {
        "iswap" => compile_iswap(n, iswap_pair(n), t_p, e.shape),
        "cns" => {
            let (c, t) = cns_pair(n);
            compile_cns(n, c, t, t_p, e.shape)
        }
        "ghz" => compile_ghz(n, t_p, e.shape),
        other => {
            let rotation: Rotation = other.parse()?;
            compile_dcg(n, rotation, single_gate_qubit(n), t_p, e.shape)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use decouple_core::sequencer::config::parse_experiment;
    use std::f64::consts::PI;

    fn file(n: usize) -> ExperimentFile {
        parse_experiment(&format!("experiment = iswap\nn_qubits = {n}\nt_p = pi/32, pi/16\n")).unwrap()
    }

    #[test]
    fn gate_labels() {
        assert_eq!(compile_gate(&file(2), "iswap").unwrap().segments.len(), 16);
        let cns = compile_gate(&file(2), "CNS").unwrap();
        assert!((cns.total_duration - (PI / 2.0 + 112.0 * PI / 32.0)).abs() < 1e-12);
        let dcg = compile_gate(&file(3), "rx(pi/2)").unwrap();
        assert_eq!(dcg.segments_on(1).count(), 12);
        assert!(compile_gate(&file(3), "ghz").is_ok());
        assert!(matches!(compile_gate(&file(3), "rz(pi)"), Err(Error::UnsupportedGate(_))));
    }
}
