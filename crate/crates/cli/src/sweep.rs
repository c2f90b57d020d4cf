//! Sweep execution and result records.

use std::io::Write;
use std::time::Instant;

use decouple_core::experiments::{evaluate, point_runs, EvalOptions};
use decouple_core::sequencer::config::{ExperimentFile, SweepPoint};
use decouple_core::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One output row. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub n_qubits: usize,
    pub t_p: f64,
    pub shape: String,
    pub sigma: Option<f64>,
    pub run_index: Option<usize>,
    pub fidelity: f64,
    pub wall_time_ms: u64,
}

pub const CSV_HEADER: &str = "experiment,n_qubits,t_p,shape,sigma,run_index,fidelity,wall_time_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub eval: EvalOptions,
    /// Worker threads; 0 picks the number of available cores.
    pub jobs: usize,
    /// Record measured wall time; when false every `wall_time_ms` is 0 so
    /// that repeated runs produce identical files.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { eval: EvalOptions::default(), jobs: 0, timing: true }
    }
}

/// Replaces the disorder seed of every experiment.
pub fn override_seed(file: &mut ExperimentFile, seed: u64) {
    for e in &mut file.experiments {
        if let Some(d) = e.disorder.as_mut() {
            d.seed = seed;
        }
    }
}

struct Task {
    point: usize,
    run: Option<usize>,
}

/// Evaluates every point of `file`. Work is spread over a thread pool; the
/// returned rows follow config order and do not depend on `jobs`.
pub fn run_sweep(file: &ExperimentFile, opts: &RunOptions) -> Result<Vec<ResultRecord>> {
    let points = file.points();
    run_points(&points, opts)
}

pub fn run_points(points: &[SweepPoint], opts: &RunOptions) -> Result<Vec<ResultRecord>> {
    let mut tasks = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if p.disorder.is_some() {
            tasks.extend((0..point_runs(p)).map(|r| Task { point: i, run: Some(r) }));
        } else {
            tasks.push(Task { point: i, run: None });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start worker pool: {e}")))?;
    let results: Vec<(f64, u64)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let clock = Instant::now();
                let f = evaluate(&points[t.point], t.run, &opts.eval)?;
                if !f.is_finite() {
                    return Err(Error::Numerical { time: 0.0, reason: "non-finite fidelity".into() });
                }
                let ms = if opts.timing { clock.elapsed().as_millis() as u64 } else { 0 };
                Ok((f.clamp(0.0, 1.0), ms))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut out = Vec::new();
    let mut k = 0;
    for p in points {
        let record = |sigma, run_index, fidelity, wall_time_ms| ResultRecord {
            experiment: p.kind.name().to_string(),
            n_qubits: p.n_qubits,
            t_p: p.t_p,
            shape: p.shape.name().to_string(),
            sigma,
            run_index,
            fidelity,
            wall_time_ms,
        };
        match p.disorder {
            None => {
                let (f, ms) = results[k];
                k += 1;
                out.push(record(None, None, f, ms));
            }
            Some(d) => {
                let runs = &results[k..k + d.runs];
                k += d.runs;
                if d.emit_runs {
                    for (r, &(f, ms)) in runs.iter().enumerate() {
                        out.push(record(Some(d.sigma), Some(r), f, ms));
                    }
                }
                let mean = runs.iter().map(|r| r.0).sum::<f64>() / d.runs as f64;
                let ms = runs.iter().map(|r| r.1).sum();
                out.push(record(Some(d.sigma), None, mean, ms));
            }
        }
    }
    Ok(out)
}

pub fn write_records(records: &[ResultRecord], format: Format, out: impl Write) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(r)?;
            }
            if records.is_empty() {
                w.write_record(CSV_HEADER.split(','))?;
            }
            w.flush()
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, records)?;
            writeln!(out)
        }
    }
}

pub fn read_csv(input: impl std::io::Read) -> std::result::Result<Vec<ResultRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
