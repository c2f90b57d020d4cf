//! Matrix-free propagation of a schedule.
//!
//! The time axis is cut at every segment boundary and envelope breakpoint.
//! Pieces without an active pulse evolve under the static Hamiltonian
//! exactly. Pulse pieces are divided into sub-steps; each sub-step applies
//! the exponential of the sampled Hamiltonian, computed by a Taylor series on
//! norm-bounded sub-intervals.

use num_complex::Complex64;

use super::StateVector;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::sequencer::{Schedule, Segment};

/// Sub-step rule inside pulses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// One exponential of the midpoint-sampled Hamiltonian per sub-step
    /// (second order).
    Midpoint,
    /// Fourth-order commutator-free Magnus: two exponentials per sub-step
    /// built from Gauss-Legendre samples.
    Magnus4,
}

/// How segments enter the dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PulseModel {
    /// Time-resolved envelopes.
    Shaped,
    /// Each segment is replaced by an instantaneous rotation by its net area
    /// at the segment centre.
    Ideal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorSettings {
    /// Sub-steps per base pulse duration `t_p`; the step inside a pulse is
    /// at most `t_p / substeps_per_pulse`.
    pub substeps_per_pulse: u32,
    pub method: Method,
    pub pulse_model: PulseModel,
}

impl Default for PropagatorSettings {
    fn default() -> Self {
        PropagatorSettings { substeps_per_pulse: 96, method: Method::Magnus4, pulse_model: PulseModel::Shaped }
    }
}

impl PropagatorSettings {
    pub fn midpoint(substeps_per_pulse: u32) -> Self {
        PropagatorSettings { substeps_per_pulse, method: Method::Midpoint, ..Default::default() }
    }

    pub fn magnus4(substeps_per_pulse: u32) -> Self {
        PropagatorSettings { substeps_per_pulse, method: Method::Magnus4, ..Default::default() }
    }

    pub fn ideal() -> Self {
        PropagatorSettings { pulse_model: PulseModel::Ideal, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.substeps_per_pulse == 0 {
            return Err(Error::Invalid("substeps_per_pulse must be positive".into()));
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes on `[0, 1]` and the CF4 weights.
pub(crate) const GAUSS_LO: f64 = 0.5 - 0.288_675_134_594_812_9;
pub(crate) const GAUSS_HI: f64 = 0.5 + 0.288_675_134_594_812_9;
pub(crate) const CF4_A1: f64 = (3.0 - 2.0 * 1.732_050_807_568_877_2) / 12.0;
pub(crate) const CF4_A2: f64 = (3.0 + 2.0 * 1.732_050_807_568_877_2) / 12.0;

/// A time interval with the indices of the segments active throughout.
pub(crate) struct Piece {
    pub start: f64,
    pub end: f64,
    pub active: Vec<usize>,
}

/// Splits `[0, total_duration]` at every segment boundary and envelope
/// breakpoint. Zero-envelope segments are never active.
pub(crate) fn pieces(schedule: &Schedule) -> Vec<Piece> {
    let total = schedule.total_duration;
    let tol = 1e-12 * total.max(1.0);
    let mut cuts = vec![0.0, total];
    for s in &schedule.segments {
        cuts.push(s.start);
        cuts.push(s.end());
        cuts.extend(s.shape.breakpoints().iter().map(|b| s.start + b));
    }
    cuts.retain(|&t| (0.0..=total).contains(&t));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|b, a| *b - *a <= tol);
    if let Some(last) = cuts.last_mut() {
        *last = total;
    }

    let mut order: Vec<usize> = (0..schedule.segments.len())
        .filter(|&i| !schedule.segments[i].shape.is_zero())
        .collect();
    order.sort_by(|&a, &b| schedule.segments[a].start.total_cmp(&schedule.segments[b].start));
    let mut next = 0;
    let mut live: Vec<usize> = Vec::new();
    let mut out = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= tol {
            continue;
        }
        while next < order.len() && schedule.segments[order[next]].start <= a + tol {
            live.push(order[next]);
            next += 1;
        }
        live.retain(|&i| schedule.segments[i].end() > a + tol);
        out.push(Piece { start: a, end: b, active: live.clone() });
    }
    out
}

/// Static Hamiltonian grouped by bit-flip mask: `H|b> = sum_x d_x[b] |b ^ x>`.
pub(crate) struct StaticOperator {
    groups: Vec<(usize, Vec<Complex64>)>,
    norm: f64,
}

impl StaticOperator {
    pub fn new(h: &PauliSum) -> Self {
        let dim = 1usize << h.n_qubits();
        let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
        for (string, coeff) in h.iter() {
            let (x, z, ny) = string.masks();
            let phase = string.phase().to_complex() * Complex64::i().powu(ny) * coeff;
            let idx = match groups.iter().position(|g| g.0 == x) {
                Some(i) => i,
                None => {
                    groups.push((x, vec![Complex64::new(0.0, 0.0); dim]));
                    groups.len() - 1
                }
            };
            let d = &mut groups[idx].1;
            for (b, v) in d.iter_mut().enumerate() {
                if (b & z).count_ones() % 2 == 0 {
                    *v += phase;
                } else {
                    *v -= phase;
                }
            }
        }
        groups.retain(|(_, d)| d.iter().any(|v| v.norm() > 0.0));
        let norm = groups.iter().map(|(_, d)| d.iter().map(|v| v.norm()).fold(0.0, f64::max)).sum();
        StaticOperator { groups, norm }
    }
}

/// Single-qubit drive `ax X + ay Y` on the qubit at `bit`, stored as the
/// matrix element `<b^bit|H|b> = ax + i ay` for `b` with the bit clear.
#[derive(Clone, Copy)]
struct Drive {
    bit: usize,
    coeff: Complex64,
}

/// Scratch buffers for the Taylor exponential.
struct Workspace {
    term: Vec<Complex64>,
    next: Vec<Complex64>,
    acc: Vec<Complex64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Workspace { term: z.clone(), next: z.clone(), acc: z }
    }
}

fn apply(op: &StaticOperator, scale: f64, drives: &[Drive], src: &[Complex64], dst: &mut [Complex64]) {
    dst.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    for (x, d) in &op.groups {
        for (b, (&a, &c)) in src.iter().zip(d).enumerate() {
            dst[b ^ x] += c * a * scale;
        }
    }
    for drive in drives {
        let (up, down) = (drive.coeff, drive.coeff.conj());
        for (b, &a) in src.iter().enumerate() {
            let c = if b & drive.bit == 0 { up } else { down };
            dst[b ^ drive.bit] += c * a;
        }
    }
}

/// `psi <- exp(-i tau (scale H_static + drives)) psi`.
fn expmv(
    psi: &mut [Complex64],
    tau: f64,
    op: &StaticOperator,
    scale: f64,
    drives: &[Drive],
    ws: &mut Workspace,
    time: f64,
) -> Result<()> {
    let bound = scale.abs() * op.norm + drives.iter().map(|d| d.coeff.norm()).sum::<f64>();
    if !(bound * tau).is_finite() {
        return Err(Error::Numerical { time, reason: format!("non-finite Hamiltonian norm bound {bound}") });
    }
    if bound * tau == 0.0 {
        return Ok(());
    }
    let pieces = (bound * tau).ceil().max(1.0) as usize;
    let dt = tau / pieces as f64;
    for _ in 0..pieces {
        ws.term.copy_from_slice(psi);
        ws.acc.copy_from_slice(psi);
        let mut converged = false;
        for k in 1..=60 {
            apply(op, scale, drives, &ws.term, &mut ws.next);
            let f = Complex64::new(0.0, -dt / k as f64);
            let mut size = 0.0;
            for (t, (&n, a)) in ws.term.iter_mut().zip(ws.next.iter().zip(ws.acc.iter_mut())) {
                *t = n * f;
                *a += *t;
                size += t.norm_sqr();
            }
            if size < 1e-34 {
                converged = true;
                break;
            }
            if !size.is_finite() {
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical {
                time,
                reason: format!("Taylor series did not converge (norm bound {bound}, step {dt})"),
            });
        }
        psi.copy_from_slice(&ws.acc);
    }
    Ok(())
}

fn drives_at(schedule: &Schedule, active: &[usize], weights: &[(f64, f64)]) -> Vec<Drive> {
    let n = schedule.n_qubits;
    let mut out: Vec<Drive> = Vec::with_capacity(active.len());
    for &i in active {
        let s: &Segment = &schedule.segments[i];
        let f: f64 = weights.iter().map(|&(w, t)| w * s.shape.amplitude_at(t - s.start)).sum();
        let (sin, cos) = s.axis_phase.sin_cos();
        let coeff = Complex64::new(f / 2.0 * cos, f / 2.0 * sin);
        let bit = 1usize << (n - 1 - s.qubit);
        match out.iter_mut().find(|d| d.bit == bit) {
            Some(d) => d.coeff += coeff,
            None => out.push(Drive { bit, coeff }),
        }
    }
    out
}

fn check_finite(psi: &[Complex64], time: f64) -> Result<()> {
    if psi.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical { time, reason: "non-finite amplitude".into() })
    }
}

pub(crate) fn check_inputs(schedule: &Schedule, h_static: &PauliSum, psi0: &StateVector) -> Result<()> {
    schedule.validate()?;
    if h_static.n_qubits() != schedule.n_qubits {
        return Err(Error::LengthMismatch { left: schedule.n_qubits, right: h_static.n_qubits() });
    }
    if psi0.n_qubits() != schedule.n_qubits {
        return Err(Error::LengthMismatch { left: schedule.n_qubits, right: psi0.n_qubits() });
    }
    Ok(())
}

/// Propagates `psi0` through `schedule` under `h_static` plus the control
/// terms `(f/2)(cos(phi) X + sin(phi) Y)` of every segment.
pub fn evolve(
    schedule: &Schedule,
    h_static: &PauliSum,
    psi0: &StateVector,
    settings: &PropagatorSettings,
) -> Result<StateVector> {
    check_inputs(schedule, h_static, psi0)?;
    settings.validate()?;
    let op = StaticOperator::new(h_static);
    let mut psi = psi0.clone();
    let mut ws = Workspace::new(psi.dim());
    match settings.pulse_model {
        PulseModel::Shaped => evolve_shaped(schedule, &op, psi.amplitudes_mut(), settings, &mut ws)?,
        PulseModel::Ideal => evolve_ideal(schedule, &op, &mut psi, &mut ws)?,
    }
    Ok(psi)
}

fn evolve_shaped(
    schedule: &Schedule,
    op: &StaticOperator,
    psi: &mut [Complex64],
    settings: &PropagatorSettings,
    ws: &mut Workspace,
) -> Result<()> {
    for piece in pieces(schedule) {
        let len = piece.end - piece.start;
        if piece.active.is_empty() {
            expmv(psi, len, op, 1.0, &[], ws, piece.start)?;
            check_finite(psi, piece.end)?;
            continue;
        }
        let h_max = piece
            .active
            .iter()
            .map(|&i| schedule.segments[i].shape.base_duration())
            .fold(f64::INFINITY, f64::min)
            / settings.substeps_per_pulse as f64;
        let steps = ((len / h_max) - 1e-9).ceil().max(1.0) as usize;
        let h = len / steps as f64;
        for k in 0..steps {
            let t0 = piece.start + k as f64 * h;
            match settings.method {
                Method::Midpoint => {
                    let d = drives_at(schedule, &piece.active, &[(1.0, t0 + 0.5 * h)]);
                    expmv(psi, h, op, 1.0, &d, ws, t0)?;
                }
                Method::Magnus4 => {
                    let (t1, t2) = (t0 + GAUSS_LO * h, t0 + GAUSS_HI * h);
                    let first = drives_at(schedule, &piece.active, &[(CF4_A2, t1), (CF4_A1, t2)]);
                    expmv(psi, h, op, CF4_A1 + CF4_A2, &first, ws, t0)?;
                    let second = drives_at(schedule, &piece.active, &[(CF4_A1, t1), (CF4_A2, t2)]);
                    expmv(psi, h, op, CF4_A1 + CF4_A2, &second, ws, t0)?;
                }
            }
        }
        check_finite(psi, piece.end)?;
    }
    Ok(())
}

/// Instantaneous rotations `(time, qubit, angle, phase)` of the ideal-pulse
/// model, in time order.
pub(crate) fn ideal_events(schedule: &Schedule) -> Vec<(f64, usize, f64, f64)> {
    let mut ev: Vec<(f64, usize, f64, f64)> = schedule
        .segments
        .iter()
        .filter(|s| s.shape.area() != 0.0)
        .map(|s| (s.start + 0.5 * s.duration(), s.qubit, s.shape.area(), s.axis_phase))
        .collect();
    ev.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    ev
}

/// `exp(-i angle/2 (cos(phase) X + sin(phase) Y))`.
pub(crate) fn rotation_matrix(angle: f64, phase: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (angle / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, phase);
    let mi_s = Complex64::new(0.0, -s);
    [[Complex64::new(c, 0.0), mi_s * e.conj()], [mi_s * e, Complex64::new(c, 0.0)]]
}

fn evolve_ideal(schedule: &Schedule, op: &StaticOperator, psi: &mut StateVector, ws: &mut Workspace) -> Result<()> {
    let mut now = 0.0;
    for (t, q, angle, phase) in ideal_events(schedule) {
        if t > now {
            expmv(psi.amplitudes_mut(), t - now, op, 1.0, &[], ws, now)?;
            now = t;
        }
        psi.apply_single(q, &rotation_matrix(angle, phase))?;
    }
    if schedule.total_duration > now {
        expmv(psi.amplitudes_mut(), schedule.total_duration - now, op, 1.0, &[], ws, now)?;
    }
    check_finite(psi.amplitudes(), schedule.total_duration)
}
