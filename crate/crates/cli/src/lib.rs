//! Command-line front end for the decoupled chain simulator.
//!
//! Exit status: 0 on success, 1 for unreadable or invalid input (config
//! syntax, bad flags, I/O), 2 when a simulation fails numerically and 3 when
//! `verify` finds a failing check.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use decouple_core::engine::{FidelityConvention, PropagatorSettings};
use decouple_core::experiments::EvalOptions;
use decouple_core::sequencer::config::{parse_experiment, ExperimentFile};
use decouple_core::sequencer::json::to_json;
use decouple_core::Error;

pub mod export;
pub mod plot;
pub mod sweep;
pub mod verify;

pub use sweep::{run_sweep, Format, ResultRecord, RunOptions, CSV_HEADER};

/// Overrides the disorder seed of every experiment in a config.
pub const SEED_ENV: &str = "DECOUPLE_SEED_OVERRIDE";

#[derive(Parser, Debug)]
#[command(name = "decouple", version, about = "Selective dynamical decoupling on an XX-coupled qubit chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run every sweep point of a config and write the fidelities.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Worker threads (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Write 0 for wall_time_ms so repeated runs give identical files.
        #[arg(long)]
        no_timing: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Magnus4)]
        method: MethodArg,
        /// Integration sub-steps per pulse duration.
        #[arg(long, default_value_t = PropagatorSettings::default().substeps_per_pulse)]
        substeps: u32,
        /// Map from the overlap <t|rho|t> to the reported fidelity.
        #[arg(long, value_enum, default_value_t = ConventionArg::Root)]
        fidelity: ConventionArg,
    },
    /// Check the decoupling schemes exactly at zeroth order.
    Verify {
        #[arg(long, default_value_t = 9)]
        n_max: usize,
        /// Also list the lowest-order pulse-error terms left by one layer.
        #[arg(long)]
        pulse_errors: bool,
        #[arg(long, hide = true)]
        inject_wrong_scheme: bool,
    },
    /// Compile one gate and write its schedule as JSON.
    ExportSchedule {
        #[arg(long)]
        config: PathBuf,
        /// `iswap`, `cns`, `ghz`, `x`, `rx(<angle>)` or `ry(<angle>)`.
        #[arg(long)]
        gate: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn averaged disorder rows of a result CSV into gnuplot data.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a gnuplot script reading `--out`.
        #[arg(long)]
        script: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Magnus4,
    Midpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Root,
    Overlap,
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numerical(String),
    VerifyFailed,
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::VerifyFailed => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

pub fn load_config(path: &Path, seed_override: Option<&str>) -> Result<ExperimentFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut file = parse_experiment(&text).map_err(|e| match e {
        Error::Parse(diags) => Failure::Input(
            diags
                .iter()
                .map(|d| format!("{}: {d}", path.display()))
                .collect::<Vec<_>>()
                .join("\n"),
        ),
        other => Failure::Input(format!("{}: {other}", path.display())),
    })?;
    if let Some(raw) = seed_override {
        let seed = raw
            .trim()
            .parse::<u64>()
            .map_err(|_| Failure::Input(format!("{SEED_ENV}={raw:?} is not an unsigned 64-bit integer")))?;
        sweep::override_seed(&mut file, seed);
    }
    Ok(file)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

/// Executes a parsed command. `seed_override` is the raw value of
/// [`SEED_ENV`], if set. Reports go to `stdout`.
pub fn execute(cli: Cli, seed_override: Option<&str>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config, out, format, jobs, no_timing, method, substeps, fidelity } => {
            let file = load_config(&config, seed_override)?;
            let settings = match method {
                MethodArg::Magnus4 => PropagatorSettings::magnus4(substeps),
                MethodArg::Midpoint => PropagatorSettings::midpoint(substeps),
            };
            settings.validate()?;
            let convention = match fidelity {
                ConventionArg::Root => FidelityConvention::Root,
                ConventionArg::Overlap => FidelityConvention::Overlap,
            };
            let opts = RunOptions {
                eval: EvalOptions { settings, convention },
                jobs: jobs.unwrap_or(0),
                timing: !no_timing,
            };
            let records = run_sweep(&file, &opts)?;
            let format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            let mut w = create(&out)?;
            sweep::write_records(&records, format, &mut w).map_err(|e| io_err(&out, e))?;
            w.flush().map_err(|e| io_err(&out, e))?;
            writeln!(stdout, "wrote {} rows to {}", records.len(), out.display()).ok();
            Ok(())
        }
        Command::Verify { n_max, pulse_errors, inject_wrong_scheme } => {
            if n_max < 2 {
                return Err(Failure::Input(format!("--n-max must be at least 2, got {n_max}")));
            }
            let inject = if inject_wrong_scheme { verify::Injection::WrongChainScheme } else { verify::Injection::None };
            let checks = verify::scheme_checks(n_max, inject)?;
            write!(stdout, "{}", verify::format_checks(&checks)).ok();
            if pulse_errors {
                writeln!(stdout, "pulse-error residuals, t_p = pi/16, gaussian:").ok();
                write!(stdout, "{}", verify::pulse_error_listing(n_max.min(4))?).ok();
            }
            if checks.iter().all(|c| c.passed) {
                Ok(())
            } else {
                Err(Failure::VerifyFailed)
            }
        }
        Command::ExportSchedule { config, gate, out } => {
            let file = load_config(&config, seed_override)?;
            let schedule = export::compile_gate(&file, &gate)?;
            let json = to_json(&schedule)?;
            fs::write(&out, json + "\n").map_err(|e| io_err(&out, e))?;
            writeln!(
                stdout,
                "wrote {} segments, total duration {} to {}",
                schedule.segments.len(),
                schedule.total_duration,
                out.display()
            )
            .ok();
            Ok(())
        }
        Command::Plot { input, out, script } => {
            let f = File::open(&input).map_err(|e| io_err(&input, e))?;
            let records = sweep::read_csv(f).map_err(|e| io_err(&input, e))?;
            let data = plot::disorder_data(&records);
            if data.is_empty() {
                return Err(Failure::Input(format!("{}: no averaged disorder rows", input.display())));
            }
            fs::write(&out, data).map_err(|e| io_err(&out, e))?;
            if let Some(path) = script {
                let text = plot::gnuplot_script(&records, &out.to_string_lossy());
                fs::write(&path, text).map_err(|e| io_err(&path, e))?;
            }
            Ok(())
        }
    }
}

/// Parses `args` and runs the command, returning the process exit status.
pub fn main_with<I, T>(args: I, seed_override: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().ok();
            return code;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(cli, seed_override, &mut stdout) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
                Failure::VerifyFailed => eprintln!("verify: at least one check failed"),
            }
            f.code()
        }
    }
}
