//! Decoupling layers and gate compilation into per-qubit pulse schedules.
//!
//! All times are in units of `1/g` with `g = 1`. A decoupling layer lasts
//! `pi/2` and is divided into eight slots of `pi/16`; each slot carries one
//! pi-pulse per qubit, centred in the slot. Dynamically corrected single-qubit
//! gates last `16 t_p`: eight back-to-back pi-pulses with four `2 t_p` loops
//! (three faulty identities and the half-scaled gate) on the gate qubit.

pub mod config;
pub mod json;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{DecouplingScheme, Pauli, PauliString};
use crate::pulses::{Family, PulseShape};

/// Slot length of a decoupling layer and upper bound on `t_p`.
pub const SLOT: f64 = PI / 16.0;
/// Duration of one decoupling layer, the natural iSWAP time `pi/(2g)`.
pub const LAYER_DURATION: f64 = PI / 2.0;
/// Length of a dynamically corrected gate in units of `t_p`.
pub const DCG_PULSE_UNITS: u32 = 16;

const TIME_EPS: f64 = 1e-12;

/// Control axis of a pulse: `X` uses phase 0, `Y` phase `pi/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn phase(self) -> f64 {
        match self {
            Axis::X => 0.0,
            Axis::Y => PI / 2.0,
        }
    }

    pub fn swapped(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }

    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
        }
    }
}

/// Per-qubit order of the alternating pi-pulses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisOrder {
    XY,
    YX,
}

impl AxisOrder {
    fn swapped(self) -> AxisOrder {
        match self {
            AxisOrder::XY => AxisOrder::YX,
            AxisOrder::YX => AxisOrder::XY,
        }
    }

    /// Axis of the `j`-th pulse (0-based) of the eight-pulse Euler cycle
    /// `X Y X Y Y X Y X`, swapped for `YX`.
    pub fn axis(self, j: usize) -> Axis {
        const EULER: [Axis; 8] = [Axis::X, Axis::Y, Axis::X, Axis::Y, Axis::Y, Axis::X, Axis::Y, Axis::X];
        let a = EULER[j % 8];
        match self {
            AxisOrder::XY => a,
            AxisOrder::YX => a.swapped(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeAction {
    Keep,
    Eliminate,
}

/// Keep/eliminate decision for each nearest-neighbour edge `(i, i+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePolicy {
    edges: Vec<EdgeAction>,
}

impl EdgePolicy {
    pub fn new(n_qubits: usize, edges: Vec<EdgeAction>) -> Result<Self> {
        if n_qubits < 1 || edges.len() + 1 != n_qubits {
            return Err(Error::Invalid(format!(
                "edge policy for {n_qubits} qubits needs {} edges, got {}",
                n_qubits.saturating_sub(1),
                edges.len()
            )));
        }
        Ok(EdgePolicy { edges })
    }

    pub fn eliminate_all(n_qubits: usize) -> Self {
        EdgePolicy {
            edges: vec![EdgeAction::Eliminate; n_qubits.saturating_sub(1)],
        }
    }

    /// Keeps the listed neighbour pairs, eliminates every other edge. Pairs
    /// must not share a qubit.
    pub fn keep_pairs(n_qubits: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut policy = Self::eliminate_all(n_qubits);
        let mut used = vec![false; n_qubits];
        for &(a, b) in pairs {
            let lo = neighbour_edge(n_qubits, a, b)?;
            if used[lo] || used[lo + 1] {
                return Err(Error::Constraint(format!(
                    "pair ({a}, {b}) shares a qubit with another gate in the same layer"
                )));
            }
            used[lo] = true;
            used[lo + 1] = true;
            policy.edges[lo] = EdgeAction::Keep;
        }
        Ok(policy)
    }

    /// Policy from a bit pattern: bit `e` set keeps edge `e`.
    pub fn from_bits(n_qubits: usize, bits: u64) -> Self {
        EdgePolicy {
            edges: (0..n_qubits.saturating_sub(1))
                .map(|e| if bits >> e & 1 == 1 { EdgeAction::Keep } else { EdgeAction::Eliminate })
                .collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.edges.len() + 1
    }

    pub fn edges(&self) -> &[EdgeAction] {
        &self.edges
    }

    pub fn kept_edges(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == EdgeAction::Keep)
            .map(|(e, _)| (e, e + 1))
            .collect()
    }
}

/// Returns the lower index of the edge joining `a` and `b`.
fn neighbour_edge(n_qubits: usize, a: usize, b: usize) -> Result<usize> {
    for q in [a, b] {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
        }
    }
    if a.abs_diff(b) != 1 {
        return Err(Error::NotNeighbours(a, b));
    }
    Ok(a.min(b))
}

/// Qubit 0 starts with `XY`; each next qubit copies its left neighbour's
/// order across a kept edge and swaps it across an eliminated one.
pub fn axis_assignment(policy: &EdgePolicy) -> Vec<AxisOrder> {
    let mut orders = vec![AxisOrder::XY];
    for &edge in policy.edges() {
        let prev = *orders.last().unwrap();
        orders.push(match edge {
            EdgeAction::Keep => prev,
            EdgeAction::Eliminate => prev.swapped(),
        });
    }
    orders
}

/// The ideal-pulse decoupling scheme realised by one layer under `policy`.
pub fn layer_scheme(policy: &EdgePolicy) -> Result<DecouplingScheme> {
    let orders = axis_assignment(policy);
    let n = orders.len();
    let pulses = (0..8)
        .map(|j| {
            let sites: Vec<(usize, Pauli)> =
                orders.iter().enumerate().map(|(q, o)| (q, o.axis(j).pauli())).collect();
            PauliString::from_sites(n, &sites)
        })
        .collect::<Result<Vec<_>>>()?;
    DecouplingScheme::from_pulses(pulses)
}

/// Single-qubit rotation `exp(-i angle sigma_axis / 2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    pub axis: Axis,
    pub angle: f64,
}

impl Rotation {
    pub fn rx(angle: f64) -> Self {
        Rotation { axis: Axis::X, angle }
    }

    pub fn ry(angle: f64) -> Self {
        Rotation { axis: Axis::Y, angle }
    }

    /// The X flip, realised as `R_x(pi)` (equal up to global phase).
    pub fn x() -> Self {
        Self::rx(PI)
    }

    /// Row-major 2x2 unitary.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let c = Complex64::new((self.angle / 2.0).cos(), 0.0);
        let s = (self.angle / 2.0).sin();
        match self.axis {
            Axis::X => [
                [c, Complex64::new(0.0, -s)],
                [Complex64::new(0.0, -s), c],
            ],
            Axis::Y => [
                [c, Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), c],
            ],
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.axis {
            Axis::X => "rx",
            Axis::Y => "ry",
        };
        write!(f, "{name}({})", config::format_pi_multiple(self.angle))
    }
}

impl FromStr for Rotation {
    type Err = Error;

    /// `x`, `rx(<angle>)` or `ry(<angle>)` with angles such as `pi/2`,
    /// `-pi/2` or `1.5708`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "x" {
            return Ok(Rotation::x());
        }
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::UnsupportedGate(s.clone()))?;
        let arg = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::UnsupportedGate(s.clone()))?;
        let axis = match name.trim() {
            "rx" => Axis::X,
            "ry" => Axis::Y,
            _ => return Err(Error::UnsupportedGate(s.clone())),
        };
        let angle = config::parse_pi_expr(arg)
            .map_err(|e| Error::UnsupportedGate(format!("{s}: {e}")))?;
        Ok(Rotation { axis, angle })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub qubit: usize,
    pub start: f64,
    pub shape: PulseShape,
    pub axis_phase: f64,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.shape.duration()
    }

    pub fn end(&self) -> f64 {
        self.start + self.shape.duration()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Dcg,
    Iswap,
    Cns,
    Hadamard,
}

/// Annotation of a time span in a schedule. Spans of different kinds may
/// nest (a CNS block contains DCG and iSWAP blocks).
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub kind: BlockKind,
    pub label: String,
    pub start: f64,
    pub duration: f64,
}

/// Per-qubit piecewise pulse program on `[0, total_duration]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub n_qubits: usize,
    pub total_duration: f64,
    pub segments: Vec<Segment>,
    pub label: String,
    pub blocks: Vec<Block>,
}

impl Schedule {
    /// A schedule with no pulses: free evolution for `duration`.
    pub fn idle(n_qubits: usize, duration: f64) -> Self {
        Schedule {
            n_qubits,
            total_duration: duration,
            segments: Vec::new(),
            label: "idle".into(),
            blocks: Vec::new(),
        }
    }

    pub fn segments_on(&self, qubit: usize) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(move |s| s.qubit == qubit)
    }

    pub fn blocks_of(&self, kind: BlockKind) -> impl Iterator<Item = &Block> {
        self.blocks.iter().filter(move |b| b.kind == kind)
    }

    /// Checks window containment and per-qubit non-overlap.
    pub fn validate(&self) -> Result<()> {
        let tol = TIME_EPS * self.total_duration.max(1.0);
        if !(self.total_duration >= 0.0) || !self.total_duration.is_finite() {
            return Err(Error::Invalid(format!("bad schedule duration {}", self.total_duration)));
        }
        for s in &self.segments {
            if s.qubit >= self.n_qubits {
                return Err(Error::QubitOutOfRange { qubit: s.qubit, n_qubits: self.n_qubits });
            }
            if s.start < -tol || s.end() > self.total_duration + tol {
                return Err(Error::Constraint(format!(
                    "segment on qubit {} at [{}, {}] leaves the window [0, {}]",
                    s.qubit,
                    s.start,
                    s.end(),
                    self.total_duration
                )));
            }
        }
        for q in 0..self.n_qubits {
            let mut spans: Vec<(f64, f64)> = self.segments_on(q).map(|s| (s.start, s.end())).collect();
            spans.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in spans.windows(2) {
                if w[1].0 < w[0].1 - tol {
                    return Err(Error::Constraint(format!(
                        "overlapping segments on qubit {q} at t = {}",
                        w[1].0
                    )));
                }
            }
        }
        Ok(())
    }

    /// The same program delayed by `dt`, with the window extended by `dt`.
    pub fn shifted(&self, dt: f64) -> Schedule {
        let mut out = self.clone();
        out.total_duration += dt;
        for s in &mut out.segments {
            s.start += dt;
        }
        for b in &mut out.blocks {
            b.start += dt;
        }
        out
    }
}

/// Exact time bookkeeping: every schedule time is `a * t_p + b * SLOT` with
/// integer `a`, `b`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Clock {
    tp_units: u32,
    slots: u32,
}

impl Clock {
    fn time(self, t_p: f64) -> f64 {
        self.tp_units as f64 * t_p + self.slots as f64 * SLOT
    }
}

fn check_pulse_time(t_p: f64) -> Result<()> {
    if !(t_p > 0.0) || !t_p.is_finite() {
        return Err(Error::Invalid(format!("pulse time must be positive, got {t_p}")));
    }
    if t_p > SLOT * (1.0 + TIME_EPS) {
        return Err(Error::Constraint(format!(
            "t_p = {t_p} exceeds the upper limit pi/16 = {SLOT} (eight pulses must fit in pi/(2g))"
        )));
    }
    Ok(())
}

/// Incremental schedule construction with exact clock arithmetic.
struct Builder {
    n_qubits: usize,
    t_p: f64,
    family: Family,
    clock: Clock,
    segments: Vec<Segment>,
    blocks: Vec<Block>,
}

impl Builder {
    fn new(n_qubits: usize, t_p: f64, family: Family) -> Result<Self> {
        if n_qubits < 1 {
            return Err(Error::Invalid("schedule needs at least one qubit".into()));
        }
        check_pulse_time(t_p)?;
        Ok(Builder {
            n_qubits,
            t_p,
            family,
            clock: Clock::default(),
            segments: Vec::new(),
            blocks: Vec::new(),
        })
    }

    fn now(&self) -> f64 {
        self.clock.time(self.t_p)
    }

    fn pi_pulse(&self) -> PulseShape {
        PulseShape::new(self.family, self.t_p, PI).expect("validated pulse time")
    }

    /// One eight-slot decoupling layer under `policy`.
    fn layer(&mut self, policy: &EdgePolicy, kind: BlockKind, label: String) {
        let start = self.now();
        let orders = axis_assignment(policy);
        let pulse = self.pi_pulse();
        let offset = (SLOT - self.t_p) / 2.0;
        for j in 0..8u32 {
            let slot_start = Clock { slots: self.clock.slots + j, ..self.clock }.time(self.t_p);
            for (q, order) in orders.iter().enumerate() {
                self.segments.push(Segment {
                    qubit: q,
                    start: slot_start + offset,
                    shape: pulse.clone(),
                    axis_phase: order.axis(j as usize).phase(),
                });
            }
        }
        self.clock.slots += 8;
        self.blocks.push(Block { kind, label, start, duration: self.now() - start });
    }

    /// One dynamically corrected gate slot. `gates` act on pairwise
    /// non-adjacent qubits; all qubits carry the eliminate-everywhere
    /// pi-pulse skeleton.
    fn dcg(&mut self, gates: &[(usize, Rotation)]) -> Result<()> {
        for (i, &(q, _)) in gates.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits: self.n_qubits });
            }
            if gates[..i].iter().any(|&(p, _)| p.abs_diff(q) <= 1) {
                return Err(Error::Constraint(format!(
                    "single-qubit gates on qubit {q} and a neighbour cannot share a slot"
                )));
            }
        }
        let start = self.now();
        let orders = axis_assignment(&EdgePolicy::eliminate_all(self.n_qubits));
        let pulse = self.pi_pulse();
        let mut units = 0u32;
        let at = |units: u32, clock: Clock, t_p: f64| {
            Clock { tp_units: clock.tp_units + units, ..clock }.time(t_p)
        };
        for j in 0..8usize {
            let t = at(units, self.clock, self.t_p);
            for (q, order) in orders.iter().enumerate() {
                self.segments.push(Segment {
                    qubit: q,
                    start: t,
                    shape: pulse.clone(),
                    axis_phase: order.axis(j).phase(),
                });
            }
            units += 1;
            // Loops at the first visits of the three non-identity frames and
            // the gate itself on the final return to the identity.
            let loop_kind = match j {
                0..=2 => Some(false),
                7 => Some(true),
                _ => None,
            };
            if let Some(is_gate) = loop_kind {
                let t = at(units, self.clock, self.t_p);
                for &(q, rot) in gates {
                    let base = PulseShape::new(self.family, self.t_p, rot.angle)?;
                    let shape = if is_gate { base.half_scaled() } else { base.negative_reverse() };
                    self.segments.push(Segment {
                        qubit: q,
                        start: t,
                        shape,
                        axis_phase: rot.axis.phase(),
                    });
                }
                units += 2;
            }
        }
        debug_assert_eq!(units, DCG_PULSE_UNITS);
        self.clock.tp_units += DCG_PULSE_UNITS;
        let label = gates
            .iter()
            .map(|(q, r)| format!("{r}@{q}"))
            .collect::<Vec<_>>()
            .join(" ");
        self.blocks.push(Block {
            kind: BlockKind::Dcg,
            label: format!("dcg[{label}]"),
            start,
            duration: self.now() - start,
        });
        Ok(())
    }

    fn finish(self, label: String) -> Schedule {
        let total_duration = self.now();
        Schedule {
            n_qubits: self.n_qubits,
            total_duration,
            segments: self.segments,
            label,
            blocks: self.blocks,
        }
    }
}

/// One `pi/2` decoupling layer with the pulse axes chosen by `policy`.
pub fn decoupling_layer(policy: &EdgePolicy, t_p: f64, family: Family) -> Result<Schedule> {
    let mut b = Builder::new(policy.n_qubits(), t_p, family)?;
    b.layer(policy, BlockKind::Iswap, "layer".into());
    Ok(b.finish("decoupling layer".into()))
}

/// iSWAP on the neighbour pair `pair`, every other coupling decoupled.
pub fn compile_iswap(n_qubits: usize, pair: (usize, usize), t_p: f64, family: Family) -> Result<Schedule> {
    compile_parallel_iswaps(n_qubits, &[pair], t_p, family)
}

/// Several iSWAPs on disjoint neighbour pairs in one layer.
pub fn compile_parallel_iswaps(
    n_qubits: usize,
    pairs: &[(usize, usize)],
    t_p: f64,
    family: Family,
) -> Result<Schedule> {
    let policy = EdgePolicy::keep_pairs(n_qubits, pairs)?;
    let mut b = Builder::new(n_qubits, t_p, family)?;
    let label = iswap_label(pairs);
    b.layer(&policy, BlockKind::Iswap, label.clone());
    Ok(b.finish(label))
}

fn iswap_label(pairs: &[(usize, usize)]) -> String {
    let p: Vec<String> = pairs.iter().map(|(a, b)| format!("{a},{b}")).collect();
    format!("iswap[{}]", p.join(" "))
}

/// Dynamically corrected single-qubit rotation on `qubit`, `16 t_p` long.
pub fn compile_dcg(n_qubits: usize, gate: Rotation, qubit: usize, t_p: f64, family: Family) -> Result<Schedule> {
    let mut b = Builder::new(n_qubits, t_p, family)?;
    b.dcg(&[(qubit, gate)])?;
    Ok(b.finish(format!("dcg {gate} on {qubit}")))
}

/// The seven single-qubit rotations and the iSWAP that realise
/// CNOT-then-SWAP on `(control, target)`, split around the iSWAP.
pub fn cns_rotations(control: usize, target: usize) -> (Vec<(usize, Rotation)>, Vec<(usize, Rotation)>) {
    let h = PI / 2.0;
    let before = vec![
        (control, Rotation::rx(h)),
        (target, Rotation::rx(h)),
        (control, Rotation::ry(h)),
        (target, Rotation::ry(-h)),
        (control, Rotation::rx(-h)),
    ];
    let after = vec![(control, Rotation::x()), (control, Rotation::ry(-h))];
    (before, after)
}

/// CNS gate (CNOT then SWAP) with `control` driving the adjacent `target`.
/// Duration `pi/2 + 112 t_p`.
pub fn compile_cns(n_qubits: usize, control: usize, target: usize, t_p: f64, family: Family) -> Result<Schedule> {
    neighbour_edge(n_qubits, control, target)?;
    let mut b = Builder::new(n_qubits, t_p, family)?;
    cns_layer(&mut b, &[(control, target)])?;
    Ok(b.finish(format!("cns {control}->{target}")))
}

/// Greedy packing of per-gate DCG sequences into shared slots: each sequence
/// keeps its own order and a slot never holds gates on adjacent qubits.
fn stagger(sequences: &[Vec<(usize, Rotation)>]) -> Vec<Vec<(usize, Rotation)>> {
    let mut next = vec![0usize; sequences.len()];
    let mut slots = Vec::new();
    while next.iter().zip(sequences).any(|(&i, s)| i < s.len()) {
        let mut slot: Vec<(usize, Rotation)> = Vec::new();
        for (k, seq) in sequences.iter().enumerate() {
            if let Some(&(q, r)) = seq.get(next[k]) {
                if slot.iter().all(|&(p, _)| p.abs_diff(q) > 1) {
                    slot.push((q, r));
                    next[k] += 1;
                }
            }
        }
        slots.push(slot);
    }
    slots
}

/// Parallel CNS gates on disjoint pairs: DCG blocks staggered to respect the
/// adjacency rule, a single shared iSWAP layer.
fn cns_layer(b: &mut Builder, pairs: &[(usize, usize)]) -> Result<()> {
    let start = b.now();
    let (before, after): (Vec<_>, Vec<_>) = pairs.iter().map(|&(c, t)| cns_rotations(c, t)).unzip();
    for slot in stagger(&before) {
        b.dcg(&slot)?;
    }
    let policy = EdgePolicy::keep_pairs(b.n_qubits, pairs)?;
    b.layer(&policy, BlockKind::Iswap, iswap_label(pairs));
    for slot in stagger(&after) {
        b.dcg(&slot)?;
    }
    let duration = b.now() - start;
    for &(c, t) in pairs {
        b.blocks.push(Block {
            kind: BlockKind::Cns,
            label: format!("cns({c}->{t})"),
            start,
            duration,
        });
    }
    Ok(())
}

/// Gate-level GHZ preparation: a Hadamard on the centre qubit followed by
/// CNS layers spreading outwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhzPlan {
    pub n_qubits: usize,
    pub start_qubit: usize,
    /// Each layer holds at most one leftward and one rightward CNS as
    /// `(control, target)`.
    pub layers: Vec<Vec<(usize, usize)>>,
}

impl GhzPlan {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::Invalid(format!("GHZ needs at least 2 qubits, got {n_qubits}")));
        }
        let m = n_qubits.div_ceil(2) - 1;
        let mut layers = vec![vec![(m, m + 1)]];
        let (mut left, mut right) = (m, m + 1);
        while left > 0 || right + 1 < n_qubits {
            let mut layer = Vec::new();
            if left > 0 {
                layer.push((left, left - 1));
                left -= 1;
            }
            if right + 1 < n_qubits {
                layer.push((right, right + 1));
                right += 1;
            }
            layers.push(layer);
        }
        Ok(GhzPlan { n_qubits, start_qubit: m, layers })
    }

    pub fn cns_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }
}

/// Hadamard (`X` then `R_y(-pi/2)`) on the centre qubit, then the CNS
/// layers of [`GhzPlan`].
pub fn compile_ghz(n_qubits: usize, t_p: f64, family: Family) -> Result<Schedule> {
    let plan = GhzPlan::new(n_qubits)?;
    let mut b = Builder::new(n_qubits, t_p, family)?;
    let m = plan.start_qubit;
    let start = b.now();
    b.dcg(&[(m, Rotation::x())])?;
    b.dcg(&[(m, Rotation::ry(-PI / 2.0))])?;
    b.blocks.push(Block {
        kind: BlockKind::Hadamard,
        label: format!("h({m})"),
        start,
        duration: b.now() - start,
    });
    for layer in &plan.layers {
        cns_layer(&mut b, layer)?;
    }
    Ok(b.finish(format!("ghz n={n_qubits}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_static_hamiltonian, ChainConfig};
    use crate::pauli::verify_chain_scheme;

    use EdgeAction::{Eliminate as E, Keep as K};

    #[test]
    fn five_qubit_selective_orders() {
        let policy = EdgePolicy::new(5, vec![K, E, E, K]).unwrap();
        let orders = axis_assignment(&policy);
        use AxisOrder::*;
        assert_eq!(orders, vec![XY, XY, YX, XY, XY]);
        let scheme = layer_scheme(&policy).unwrap();
        assert_eq!(scheme.pulses()[0], "XXYXX".parse().unwrap());
        assert_eq!(scheme.pulses()[1], "YYXYY".parse().unwrap());
    }

    #[test]
    fn small_orders() {
        use AxisOrder::*;
        assert_eq!(axis_assignment(&EdgePolicy::new(2, vec![K]).unwrap()), vec![XY, XY]);
        assert_eq!(axis_assignment(&EdgePolicy::eliminate_all(3)), vec![XY, YX, XY]);
    }

    #[test]
    fn policy_validation() {
        assert!(EdgePolicy::new(3, vec![K]).is_err());
        assert!(matches!(EdgePolicy::keep_pairs(4, &[(0, 2)]), Err(Error::NotNeighbours(0, 2))));
        assert!(EdgePolicy::keep_pairs(4, &[(0, 1), (1, 2)]).is_err());
        assert!(EdgePolicy::keep_pairs(4, &[(3, 4)]).is_err());
        let p = EdgePolicy::keep_pairs(4, &[(1, 0), (2, 3)]).unwrap();
        assert_eq!(p.edges(), &[K, E, K]);
    }

    #[test]
    fn every_policy_is_selective() {
        for n in 2..=6usize {
            let mut cfg = ChainConfig::resonant(n);
            cfg.detunings = (0..n).map(|i| 0.1 * (i as f64 + 1.0)).collect();
            let h = build_static_hamiltonian(&cfg).unwrap();
            for bits in 0..(1u64 << (n - 1)) {
                let policy = EdgePolicy::from_bits(n, bits);
                let scheme = layer_scheme(&policy).unwrap();
                let report = verify_chain_scheme(&scheme, &h, &policy.kept_edges()).unwrap();
                assert!(report.passed(), "n={n} bits={bits:b}\n{report}");
            }
        }
    }

    #[test]
    fn full_slot_layer() {
        let s = compile_iswap(2, (0, 1), SLOT, Family::Gaussian).unwrap();
        assert_eq!(s.segments.len(), 16);
        assert_eq!(s.total_duration, PI / 2.0);
        s.validate().unwrap();
        for q in 0..2 {
            let mut spans: Vec<(f64, f64)> = s.segments_on(q).map(|x| (x.start, x.end())).collect();
            spans.sort_by(|a, b| a.0.total_cmp(&b.0));
            assert!(spans[0].0.abs() < 1e-15);
            for w in spans.windows(2) {
                assert!((w[1].0 - w[0].1).abs() < 1e-14, "idle gap {:?}", w);
            }
        }
        let p0: Vec<f64> = s.segments_on(0).map(|x| x.axis_phase).collect();
        let p1: Vec<f64> = s.segments_on(1).map(|x| x.axis_phase).collect();
        assert_eq!(p0, p1);
    }

    #[test]
    fn eliminated_neighbour_swaps_axes() {
        let policy = EdgePolicy::new(5, vec![K, E, E, K]).unwrap();
        let s = decoupling_layer(&policy, PI / 32.0, Family::Gaussian).unwrap();
        let q1: Vec<f64> = s.segments_on(1).map(|x| x.axis_phase).collect();
        let q2: Vec<f64> = s.segments_on(2).map(|x| x.axis_phase).collect();
        for (a, b) in q1.iter().zip(&q2) {
            assert_ne!(a, b);
        }
    }

    #[test]
    fn layer_axis_multiset() {
        for bits in 0..8u64 {
            let s = decoupling_layer(&EdgePolicy::from_bits(4, bits), PI / 48.0, Family::Sine).unwrap();
            for q in 0..4 {
                let xs = s.segments_on(q).filter(|x| x.axis_phase == 0.0).count();
                let ys = s.segments_on(q).filter(|x| x.axis_phase == PI / 2.0).count();
                assert_eq!((xs, ys), (4, 4));
            }
        }
    }

    #[test]
    fn pulse_time_bound() {
        let err = compile_iswap(2, (0, 1), PI / 8.0, Family::Gaussian).unwrap_err();
        assert!(matches!(err, Error::Constraint(_)));
        assert!(err.to_string().contains("pi/16"));
    }

    #[test]
    fn iswap_in_middle_of_chain() {
        let s = compile_iswap(4, (1, 2), PI / 16.0, Family::Gaussian).unwrap();
        assert_eq!(s.total_duration, PI / 2.0);
        let phase = |q: usize| -> Vec<f64> { s.segments_on(q).map(|x| x.axis_phase).collect() };
        assert_eq!(phase(1), phase(2));
        assert_ne!(phase(0), phase(1));
        assert_ne!(phase(2), phase(3));
        assert!(matches!(
            compile_iswap(4, (1, 3), PI / 16.0, Family::Gaussian),
            Err(Error::NotNeighbours(1, 3))
        ));
    }

    #[test]
    fn parallel_iswaps() {
        let s = compile_parallel_iswaps(4, &[(0, 1), (2, 3)], PI / 32.0, Family::Gaussian).unwrap();
        s.validate().unwrap();
        assert_eq!(s.segments.len(), 32);
    }

    #[test]
    fn dcg_structure() {
        let tp = PI / 16.0;
        let s = compile_dcg(3, Rotation::rx(PI / 2.0), 1, tp, Family::Gaussian).unwrap();
        s.validate().unwrap();
        assert_eq!(s.total_duration, 16.0 * tp);
        assert!((s.total_duration - PI).abs() < 1e-15);
        let gate: Vec<&Segment> = s.segments_on(1).collect();
        assert_eq!(gate.len(), 12);
        let loops: Vec<&&Segment> = gate.iter().filter(|x| x.duration() > 1.5 * tp).collect();
        assert_eq!(loops.len(), 4);
        for l in &loops[..3] {
            assert!(matches!(l.shape, PulseShape::NegativeReverse(_)));
            assert_eq!(l.shape.area(), 0.0);
        }
        assert!(matches!(loops[3].shape, PulseShape::HalfScaled(_)));
        assert_eq!(loops[3].shape.area(), PI / 2.0);
        assert!((loops[3].end() - 16.0 * tp).abs() < 1e-14);
        assert_eq!(s.segments_on(0).count(), 8);
        assert_eq!(s.segments_on(2).count(), 8);
    }

    #[test]
    fn dcg_rejects_adjacent_parallel_gates() {
        let mut b = Builder::new(4, PI / 16.0, Family::Gaussian).unwrap();
        assert!(b.dcg(&[(1, Rotation::x()), (2, Rotation::x())]).is_err());
        assert!(b.dcg(&[(0, Rotation::x()), (2, Rotation::x())]).is_ok());
    }

    #[test]
    fn cns_duration_exact() {
        for k in [16.0, 24.0, 32.0, 48.0, 64.0, 96.0] {
            let tp = PI / k;
            let s = compile_cns(3, 1, 2, tp, Family::Gaussian).unwrap();
            assert_eq!(s.total_duration, PI / 2.0 + 112.0 * tp, "k = {k}");
            s.validate().unwrap();
        }
        let s = compile_cns(2, 0, 1, PI / 32.0, Family::Gaussian).unwrap();
        assert_eq!(s.total_duration, PI / 2.0 + 3.5 * PI);
        assert!(matches!(compile_cns(4, 0, 2, PI / 32.0, Family::Gaussian), Err(Error::NotNeighbours(0, 2))));
    }

    #[test]
    fn ghz_plans() {
        let p = GhzPlan::new(6).unwrap();
        assert_eq!(p.start_qubit, 2);
        assert_eq!(p.layers, vec![vec![(2, 3)], vec![(2, 1), (3, 4)], vec![(1, 0), (4, 5)]]);
        let p = GhzPlan::new(2).unwrap();
        assert_eq!((p.start_qubit, p.layers.clone()), (0, vec![vec![(0, 1)]]));
        for n in 2..=12 {
            assert_eq!(GhzPlan::new(n).unwrap().cns_count(), n - 1);
        }
        assert!(GhzPlan::new(1).is_err());
    }

    #[test]
    fn ghz_schedule_blocks() {
        for n in 2..=9 {
            let s = compile_ghz(n, PI / 32.0, Family::Gaussian).unwrap();
            s.validate().unwrap();
            assert_eq!(s.blocks_of(BlockKind::Cns).count(), n - 1);
            assert_eq!(s.blocks[0].kind, BlockKind::Dcg);
            assert_eq!(s.blocks[1].kind, BlockKind::Dcg);
            assert_eq!(s.blocks[0].label, format!("dcg[rx(pi)@{}]", n.div_ceil(2) - 1));
        }
    }

    #[test]
    fn stagger_respects_adjacency() {
        let (a, _) = cns_rotations(2, 1);
        let (b, _) = cns_rotations(3, 4);
        let slots = stagger(&[a, b]);
        assert_eq!(slots.len(), 6);
        for slot in &slots {
            for (i, x) in slot.iter().enumerate() {
                for y in &slot[..i] {
                    assert!(x.0.abs_diff(y.0) > 1);
                }
            }
        }
        assert_eq!(slots.iter().map(Vec::len).sum::<usize>(), 10);
    }

    #[test]
    fn rotation_parsing() {
        assert_eq!("rx(pi/2)".parse::<Rotation>().unwrap(), Rotation::rx(PI / 2.0));
        assert_eq!("ry(-pi/2)".parse::<Rotation>().unwrap(), Rotation::ry(-PI / 2.0));
        assert_eq!("x".parse::<Rotation>().unwrap(), Rotation::x());
        assert!(matches!("rz(pi/2)".parse::<Rotation>(), Err(Error::UnsupportedGate(_))));
        assert!(matches!("h".parse::<Rotation>(), Err(Error::UnsupportedGate(_))));
        assert_eq!(Rotation::ry(-PI / 2.0).to_string(), "ry(-pi/2)");
    }

    #[test]
    fn shifted_keeps_structure() {
        let s = compile_dcg(2, Rotation::x(), 0, PI / 32.0, Family::Gaussian).unwrap();
        let t = s.shifted(0.7);
        t.validate().unwrap();
        assert!((t.total_duration - s.total_duration - 0.7).abs() < 1e-15);
        assert_eq!(t.segments.len(), s.segments.len());
    }
}
