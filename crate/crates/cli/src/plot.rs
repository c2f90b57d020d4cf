//! gnuplot data for averaged disorder sweeps.

use std::fmt::Write as _;

use decouple_core::sequencer::config::format_pi_multiple;

use crate::sweep::ResultRecord;

/// One data block per `(n_qubits, t_p)` holding `sigma fidelity` pairs of
/// the averaged disorder rows, blocks separated by two blank lines so that
/// gnuplot addresses them with `index`. Blocks keep their order of first
/// appearance.
pub fn disorder_data(records: &[ResultRecord]) -> String {
    let mut keys: Vec<(usize, u64)> = Vec::new();
    for r in records.iter().filter(|r| r.sigma.is_some() && r.run_index.is_none()) {
        let key = (r.n_qubits, r.t_p.to_bits());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut s = String::new();
    for (i, &(n, t_bits)) in keys.iter().enumerate() {
        if i > 0 {
            s.push_str("\n\n");
        }
        let t_p = f64::from_bits(t_bits);
        writeln!(s, "# n_qubits={n} t_p={}", format_pi_multiple(t_p)).unwrap();
        writeln!(s, "# sigma fidelity").unwrap();
        for r in records {
            if r.n_qubits == n && r.t_p.to_bits() == t_bits && r.run_index.is_none() {
                if let Some(sigma) = r.sigma {
                    writeln!(s, "{sigma} {}", r.fidelity).unwrap();
                }
            }
        }
    }
    s
}

/// gnuplot script drawing every block of `data_path`.
pub fn gnuplot_script(records: &[ResultRecord], data_path: &str) -> String {
    let mut titles: Vec<String> = Vec::new();
    for r in records.iter().filter(|r| r.sigma.is_some() && r.run_index.is_none()) {
        let t = format!("N={} t_p={}", r.n_qubits, format_pi_multiple(r.t_p));
        if !titles.contains(&t) {
            titles.push(t);
        }
    }
    let mut s = String::from("set xlabel 'sigma / g'\nset ylabel 'averaged GHZ fidelity'\nset key bottom left\nplot ");
    let parts: Vec<String> = titles
        .iter()
        .enumerate()
        .map(|(i, t)| format!("'{data_path}' index {i} using 1:2 with linespoints title '{t}'"))
        .collect();
    s.push_str(&parts.join(", \\\n     "));
    s.push('\n');
    s
}
