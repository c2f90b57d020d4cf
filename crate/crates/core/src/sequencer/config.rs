//! Line-oriented experiment configuration.
//!
//! ```text
//! # Table of iSWAP fidelities
//! [iswap-n4]
//! experiment = iswap
//! n_qubits = 4
//! t_p = pi/16, pi/32, pi/48, pi/64, pi/96
//! shape = gaussian
//! ```
//!
//! A file holds one or more experiments. `[name]` starts a new experiment;
//! keys before the first header form an unnamed one. `#` starts a comment.
//!
//! | key         | value                                             | applies to     |
//! |-------------|---------------------------------------------------|----------------|
//! | `experiment`| `iswap`, `single_gate`, `cns`, `ghz`, `ghz_disorder` | all (required) |
//! | `n_qubits`  | integers and inclusive ranges, e.g. `3..9, 12`    | all (required) |
//! | `t_p`       | multiples of pi, e.g. `pi/16, pi/(32g), 0.05`     | all (required) |
//! | `shape`     | `gaussian` (default) or `sine`                    | all            |
//! | `detuning`  | one value per qubit, units of g (default 0)       | all but `ghz_disorder` |
//! | `gate`      | `rx(<angle>)`, `ry(<angle>)` or `x` (default `rx(pi/2)`) | `single_gate` |
//! | `sigma`     | list of detuning standard deviations, units of g  | `ghz_disorder` (required) |
//! | `runs`      | runs per sigma (default 100)                      | `ghz_disorder` |
//! | `seed`      | unsigned 64-bit seed (default 0)                  | `ghz_disorder` |
//! | `emit_runs` | `true` to report every run instead of the mean    | `ghz_disorder` |

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::pulses::Family;
use crate::sequencer::{Rotation, SLOT};

/// Largest chain the dense propagator is meant for.
pub const MAX_QUBITS: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Iswap,
    SingleGate,
    Cns,
    Ghz,
    GhzDisorder,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Iswap => "iswap",
            ExperimentKind::SingleGate => "single_gate",
            ExperimentKind::Cns => "cns",
            ExperimentKind::Ghz => "ghz",
            ExperimentKind::GhzDisorder => "ghz_disorder",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "iswap" => ExperimentKind::Iswap,
            "single_gate" => ExperimentKind::SingleGate,
            "cns" => ExperimentKind::Cns,
            "ghz" => ExperimentKind::Ghz,
            "ghz_disorder" => ExperimentKind::GhzDisorder,
            _ => return None,
        })
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisorderSweep {
    pub sigmas: Vec<f64>,
    pub runs: usize,
    pub seed: u64,
    pub emit_runs: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: Option<String>,
    pub kind: ExperimentKind,
    pub n_qubits: Vec<usize>,
    pub t_p: Vec<f64>,
    pub shape: Family,
    /// Static detunings; `None` means resonant.
    pub detunings: Option<Vec<f64>>,
    pub gate: Option<Rotation>,
    pub disorder: Option<DisorderSweep>,
}

/// One `(n_qubits, t_p[, sigma])` point of an experiment sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub kind: ExperimentKind,
    pub n_qubits: usize,
    pub t_p: f64,
    pub shape: Family,
    pub detunings: Option<Vec<f64>>,
    pub gate: Option<Rotation>,
    pub disorder: Option<DisorderPoint>,
}

/// Disorder parameters of one sweep point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisorderPoint {
    /// Position in the `sigma` list.
    pub index: usize,
    pub sigma: f64,
    pub runs: usize,
    pub seed: u64,
    pub emit_runs: bool,
}

impl ExperimentConfig {
    /// Sweep points in config order: `n_qubits` outermost, then `sigma`,
    /// then `t_p`.
    pub fn points(&self) -> Vec<SweepPoint> {
        let sigmas: Vec<Option<DisorderPoint>> = match &self.disorder {
            Some(d) => d
                .sigmas
                .iter()
                .enumerate()
                .map(|(index, &sigma)| {
                    Some(DisorderPoint { index, sigma, runs: d.runs, seed: d.seed, emit_runs: d.emit_runs })
                })
                .collect(),
            None => vec![None],
        };
        let mut out = Vec::new();
        for &n in &self.n_qubits {
            for &disorder in &sigmas {
                for &t_p in &self.t_p {
                    out.push(SweepPoint {
                        kind: self.kind,
                        n_qubits: n,
                        t_p,
                        shape: self.shape,
                        detunings: self.detunings.clone(),
                        gate: self.gate,
                        disorder,
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ExperimentFile {
    pub experiments: Vec<ExperimentConfig>,
}

impl ExperimentFile {
    pub fn points(&self) -> Vec<SweepPoint> {
        self.experiments.iter().flat_map(|e| e.points()).collect()
    }
}

/// Parses `[+-][coeff][*]pi[/denom][g]` (parentheses allowed around the
/// denominator, e.g. `pi/(16g)`) or a plain decimal.
pub fn parse_pi_expr(s: &str) -> std::result::Result<f64, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace() && *c != '(' && *c != ')').collect();
    if compact.is_empty() {
        return Err("empty value".into());
    }
    let body = compact.strip_suffix('g').unwrap_or(&compact);
    let Some(idx) = body.find("pi") else {
        return body.parse::<f64>().map_err(|_| format!("cannot read {s:?} as a number"));
    };
    let (head, tail) = (&body[..idx], &body[idx + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| format!("bad coefficient {h:?} in {s:?}"))?,
    };
    let denom = match tail {
        "" => 1.0,
        t => {
            let d = t
                .strip_prefix('/')
                .ok_or_else(|| format!("unexpected {t:?} after pi in {s:?}"))?;
            let d: f64 = d.parse().map_err(|_| format!("bad denominator {d:?} in {s:?}"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            d
        }
    };
    Ok(coeff * PI / denom)
}

/// Renders `x` as `[-][p]pi[/q]` when it is a small rational multiple of pi,
/// otherwise as a decimal.
pub fn format_pi_multiple(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    for q in 1..=128i64 {
        let p = (x / PI * q as f64).round();
        if p != 0.0 && (p * PI / q as f64 - x).abs() <= 1e-12 * x.abs() {
            let p = p as i64;
            if num_gcd(p.unsigned_abs(), q as u64) != 1 {
                continue;
            }
            let sign = if p < 0 { "-" } else { "" };
            let num = if p.abs() == 1 { String::new() } else { p.abs().to_string() };
            return if q == 1 { format!("{sign}{num}pi") } else { format!("{sign}{num}pi/{q}") };
        }
    }
    format!("{x}")
}

fn num_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

struct Entry {
    line: usize,
    column: usize,
    value: String,
}

struct Section {
    name: Option<String>,
    line: usize,
    entries: HashMap<String, Entry>,
}

const KNOWN_KEYS: &[&str] = &[
    "experiment", "n_qubits", "t_p", "shape", "detuning", "gate", "sigma", "runs", "seed", "emit_runs",
];

/// Parses and validates an experiment file. All problems are collected and
/// reported together as [`Error::Parse`].
pub fn parse_experiment(text: &str) -> Result<ExperimentFile> {
    let mut diags = Vec::new();
    let mut sections: Vec<Section> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            match rest.strip_suffix(']') {
                Some(name) if !name.trim().is_empty() => sections.push(Section {
                    name: Some(name.trim().to_string()),
                    line: line_no,
                    entries: HashMap::new(),
                }),
                _ => diags.push(Diagnostic {
                    line: line_no,
                    column: indent + 1,
                    message: format!("malformed section header {trimmed:?}"),
                }),
            }
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            diags.push(Diagnostic {
                line: line_no,
                column: indent + 1,
                message: format!("expected `key = value`, found {trimmed:?}"),
            });
            continue;
        };
        let key_col = indent + 1;
        let value_col = key.len() + 1 + (value.len() - value.trim_start().len()) + 1;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            diags.push(Diagnostic { line: line_no, column: key_col, message: format!("unknown key `{key}`") });
            continue;
        }
        if sections.is_empty() {
            sections.push(Section { name: None, line: line_no, entries: HashMap::new() });
        }
        let section = sections.last_mut().unwrap();
        if let Some(prev) = section.entries.get(&key) {
            diags.push(Diagnostic {
                line: line_no,
                column: key_col,
                message: format!("duplicate key `{key}` (first set on line {})", prev.line),
            });
            continue;
        }
        section.entries.insert(key, Entry { line: line_no, column: value_col, value });
    }

    if sections.is_empty() && diags.is_empty() {
        diags.push(Diagnostic { line: 1, column: 1, message: "no experiment defined".into() });
    }

    let mut experiments = Vec::new();
    for section in &sections {
        if let Some(exp) = validate_section(section, &mut diags) {
            experiments.push(exp);
        }
    }
    if diags.is_empty() {
        Ok(ExperimentFile { experiments })
    } else {
        Err(Error::Parse(diags))
    }
}

fn validate_section(section: &Section, diags: &mut Vec<Diagnostic>) -> Option<ExperimentConfig> {
    let start = diags.len();
    let err = |e: &Entry, msg: String| Diagnostic { line: e.line, column: e.column, message: msg };
    let missing = |key: &str| Diagnostic {
        line: section.line,
        column: 1,
        message: match &section.name {
            Some(n) => format!("experiment [{n}] is missing required key `{key}`"),
            None => format!("missing required key `{key}`"),
        },
    };
    let get = |k: &str| section.entries.get(k);

    let kind = match get("experiment") {
        None => {
            diags.push(missing("experiment"));
            None
        }
        Some(e) => match ExperimentKind::parse(&e.value) {
            Some(k) => Some(k),
            None => {
                diags.push(err(
                    e,
                    format!(
                        "unknown experiment kind {:?} (expected iswap, single_gate, cns, ghz or ghz_disorder)",
                        e.value
                    ),
                ));
                None
            }
        },
    };

    let mut n_qubits = Vec::new();
    match get("n_qubits") {
        None => diags.push(missing("n_qubits")),
        Some(e) => match parse_int_list(&e.value) {
            Ok(list) => {
                for &n in &list {
                    if !(2..=MAX_QUBITS).contains(&n) {
                        diags.push(err(e, format!("n_qubits = {n} outside supported range 2..={MAX_QUBITS}")));
                    }
                }
                n_qubits = list;
            }
            Err(m) => diags.push(err(e, m)),
        },
    }

    let mut t_p = Vec::new();
    match get("t_p") {
        None => diags.push(missing("t_p")),
        Some(e) => {
            for item in split_list(&e.value) {
                match parse_pi_expr(item) {
                    Ok(v) if !(v > 0.0) => diags.push(err(e, format!("t_p = {item} must be positive"))),
                    Ok(v) if v > SLOT * (1.0 + 1e-12) => diags.push(err(
                        e,
                        format!(
                            "t_p = {item} exceeds the upper limit pi/(16g): eight pulses must fit into the iSWAP time pi/(2g)"
                        ),
                    )),
                    Ok(v) => t_p.push(v),
                    Err(m) => diags.push(err(e, m)),
                }
            }
            if t_p.is_empty() && diags.len() == start {
                diags.push(err(e, "t_p list is empty".into()));
            }
        }
    }

    let shape = match get("shape") {
        None => Family::Gaussian,
        Some(e) => match e.value.parse::<Family>() {
            Ok(f) => f,
            Err(_) => {
                diags.push(err(e, format!("unknown shape {:?} (expected gaussian or sine)", e.value)));
                Family::Gaussian
            }
        },
    };

    let detunings = get("detuning").and_then(|e| {
        if kind == Some(ExperimentKind::GhzDisorder) {
            diags.push(err(e, "`detuning` cannot be combined with ghz_disorder; use `sigma`".into()));
            return None;
        }
        match parse_float_list(&e.value) {
            Ok(list) => {
                if n_qubits.len() != 1 || list.len() != n_qubits[0] {
                    diags.push(err(e, "`detuning` needs a single n_qubits value and one entry per qubit".into()));
                }
                Some(list)
            }
            Err(m) => {
                diags.push(err(e, m));
                None
            }
        }
    });

    let gate = match (kind, get("gate")) {
        (Some(ExperimentKind::SingleGate), None) => Some(Rotation::rx(PI / 2.0)),
        (Some(ExperimentKind::SingleGate), Some(e)) => match e.value.parse::<Rotation>() {
            Ok(r) => Some(r),
            Err(m) => {
                diags.push(err(e, m.to_string()));
                None
            }
        },
        (Some(_), Some(e)) => {
            diags.push(err(e, "`gate` only applies to single_gate experiments".into()));
            None
        }
        _ => None,
    };

    let disorder = if kind == Some(ExperimentKind::GhzDisorder) {
        let sigmas = match get("sigma") {
            None => {
                diags.push(missing("sigma"));
                Vec::new()
            }
            Some(e) => match parse_float_list(&e.value) {
                Ok(list) => {
                    if list.iter().any(|s| !(*s >= 0.0)) {
                        diags.push(err(e, "sigma values must be >= 0".into()));
                    }
                    list
                }
                Err(m) => {
                    diags.push(err(e, m));
                    Vec::new()
                }
            },
        };
        let runs = match get("runs") {
            None => 100,
            Some(e) => match e.value.parse::<usize>() {
                Ok(r) if r >= 1 => r,
                _ => {
                    diags.push(err(e, format!("runs must be a positive integer, got {:?}", e.value)));
                    1
                }
            },
        };
        let seed = match get("seed") {
            None => 0,
            Some(e) => e.value.parse::<u64>().unwrap_or_else(|_| {
                diags.push(err(e, format!("seed must be an unsigned 64-bit integer, got {:?}", e.value)));
                0
            }),
        };
        let emit_runs = match get("emit_runs") {
            None => false,
            Some(e) => match e.value.as_str() {
                "true" => true,
                "false" => false,
                v => {
                    diags.push(err(e, format!("emit_runs must be true or false, got {v:?}")));
                    false
                }
            },
        };
        Some(DisorderSweep { sigmas, runs, seed, emit_runs })
    } else {
        for key in ["sigma", "runs", "seed", "emit_runs"] {
            if let Some(e) = get(key) {
                diags.push(err(e, format!("`{key}` only applies to ghz_disorder experiments")));
            }
        }
        None
    };

    if diags.len() > start {
        return None;
    }
    Some(ExperimentConfig {
        name: section.name.clone(),
        kind: kind?,
        n_qubits,
        t_p,
        shape,
        detunings,
        gate,
        disorder,
    })
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_int_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in split_list(s) {
        if let Some((a, b)) = item.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range {item:?}"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad range {item:?}"))?;
            if a > b {
                return Err(format!("empty range {item:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(item.parse().map_err(|_| format!("expected an integer, found {item:?}"))?);
        }
    }
    if out.is_empty() {
        return Err("empty integer list".into());
    }
    Ok(out)
}

fn parse_float_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let out: Vec<f64> = split_list(s)
        .map(|x| x.parse::<f64>().map_err(|_| format!("expected a number, found {x:?}")))
        .collect::<std::result::Result<_, _>>()?;
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}
