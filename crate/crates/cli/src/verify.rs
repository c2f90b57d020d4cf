//! Exact zeroth-order checks of the decoupling schemes.

use std::f64::consts::PI;
use std::fmt::Write as _;

use decouple_core::engine::layer_pulse_error;
use decouple_core::model::{build_static_hamiltonian, ChainConfig};
use decouple_core::pauli::{average_hamiltonian_zeroth, verify_chain_scheme, DecouplingScheme, PauliString, PauliSum};
use decouple_core::pulses::Family;
use decouple_core::sequencer::{layer_scheme, EdgePolicy};
use decouple_core::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Failure details, empty on success.
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Check { name: name.into(), passed, detail }
    }
}

/// Deliberately broken inputs used to exercise the failure path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Injection {
    #[default]
    None,
    /// Every chain policy is checked against the keep-everything layer.
    WrongChainScheme,
}

fn detuned_chain(n: usize) -> Result<PauliSum> {
    let detunings = (0..n).map(|i| 0.1 * (i as f64 + 1.0)).collect();
    build_static_hamiltonian(&ChainConfig::with_detunings(n, detunings))
}

fn annihilator_check() -> Result<Check> {
    let scheme = DecouplingScheme::annihilator();
    let mut detail = String::new();
    for p in ["X", "Y", "Z"] {
        let h = PauliSum::new(1).with_term(&p.parse::<PauliString>()?, 1.0)?;
        let avg = average_hamiltonian_zeroth(&scheme, &h)?;
        if !avg.is_empty() {
            writeln!(detail, "  {p} survives as {avg}").unwrap();
        }
    }
    Ok(Check::new("annihilator removes every traceless single-qubit term", detail.is_empty(), detail))
}

fn euler_check() -> Result<Check> {
    let scheme = DecouplingScheme::euler_single();
    let counts = scheme.frame_counts();
    let mut detail = String::new();
    if !scheme.is_cyclic() {
        detail.push_str("  pulses do not compose to the identity\n");
    }
    if !scheme.is_consistent() {
        detail.push_str("  frames and pulses disagree\n");
    }
    if counts.len() != 4 || counts.values().any(|&c| c != 2) {
        writeln!(detail, "  frame visits {counts:?}, expected each of I, X, Y, Z twice").unwrap();
    }
    Ok(Check::new("euler cycle is cyclic and visits every frame twice", detail.is_empty(), detail))
}

fn pair_checks() -> Result<Vec<Check>> {
    let h = build_static_hamiltonian(&ChainConfig::resonant(2))?;
    let keep = verify_chain_scheme(&DecouplingScheme::pair_keep(), &h, &[(0, 1)])?;
    let keep_ok = keep.passed() && keep.average == h;
    let elim = average_hamiltonian_zeroth(&DecouplingScheme::pair_eliminate(), &h)?;
    Ok(vec![
        Check::new("pair keep scheme preserves the coupling", keep_ok, if keep_ok { String::new() } else { keep.to_string() }),
        Check::new(
            "pair eliminate scheme removes the coupling",
            elim.is_empty(),
            if elim.is_empty() { String::new() } else { format!("  surviving {elim}\n") },
        ),
    ])
}

fn chain_check(n: usize, inject: Injection) -> Result<Check> {
    let h = detuned_chain(n)?;
    let edges = n - 1;
    let all_keep = EdgePolicy::from_bits(n, (1u64 << edges) - 1);
    let mut detail = String::new();
    let mut failures = 0;
    for bits in 0..(1u64 << edges) {
        let policy = EdgePolicy::from_bits(n, bits);
        let scheme = match inject {
            Injection::None => layer_scheme(&policy)?,
            Injection::WrongChainScheme => layer_scheme(&all_keep)?,
        };
        let report = verify_chain_scheme(&scheme, &h, &policy.kept_edges())?;
        if !report.passed() || !scheme.is_cyclic() {
            failures += 1;
            if failures <= 3 {
                writeln!(detail, "  policy {:?}: {}", policy.edges(), report.to_string().trim_end()).unwrap();
            }
        }
    }
    if failures > 3 {
        writeln!(detail, "  ... {} more failing policies", failures - 3).unwrap();
    }
    Ok(Check::new(
        format!("chain selectivity n={n} ({} edge policies)", 1u64 << edges),
        failures == 0,
        detail,
    ))
}

/// All scheme checks for chains of 2 up to `n_max` qubits.
pub fn scheme_checks(n_max: usize, inject: Injection) -> Result<Vec<Check>> {
    let mut out = vec![annihilator_check()?, euler_check()?];
    out.extend(pair_checks()?);
    for n in 2..=n_max {
        out.push(chain_check(n, inject)?);
    }
    Ok(out)
}

pub fn format_checks(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        writeln!(s, "{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name).unwrap();
        s.push_str(&c.detail);
    }
    s
}

/// Lowest-order pulse-error terms left after one decoupling layer with
/// finite Gaussian pulses at `t_p = pi/16`, for the eliminate-all policy
/// and a single kept pair. Informational only.
pub fn pulse_error_listing(n_max: usize) -> Result<String> {
    let mut s = String::new();
    let t_p = PI / 16.0;
    for n in 2..=n_max {
        let h = build_static_hamiltonian(&ChainConfig::resonant(n))?;
        let pair = ((n - 2) / 2, (n - 2) / 2 + 1);
        for (label, policy) in [
            ("eliminate all".to_string(), EdgePolicy::eliminate_all(n)),
            (format!("keep ({},{})", pair.0, pair.1), EdgePolicy::keep_pairs(n, &[pair])?),
        ] {
            let residual = layer_pulse_error(&policy, t_p, Family::Gaussian, &h)?;
            writeln!(s, "n={n} {label}: {} terms", residual.len()).unwrap();
            let mut terms: Vec<(PauliString, f64)> = residual.iter().collect();
            terms.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
            for (p, c) in terms {
                writeln!(s, "  {p} {c:+.3e}").unwrap();
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass_up_to_nine() {
        let checks = scheme_checks(9, Injection::None).unwrap();
        assert_eq!(checks.len(), 4 + 8);
        for c in &checks {
            assert!(c.passed, "{}\n{}", c.name, c.detail);
        }
    }

    #[test]
    fn injected_scheme_fails_with_surviving_terms() {
        let checks = scheme_checks(3, Injection::WrongChainScheme).unwrap();
        let chain: Vec<_> = checks.iter().filter(|c| c.name.starts_with("chain")).collect();
        assert!(chain.iter().all(|c| !c.passed));
        assert!(chain[0].detail.contains("surviving"), "{}", chain[0].detail);
    }

    #[test]
    fn pulse_error_listing_is_small_and_nonempty() {
        let text = pulse_error_listing(2).unwrap();
        assert!(text.starts_with("n=2 eliminate all"));
    }
}
