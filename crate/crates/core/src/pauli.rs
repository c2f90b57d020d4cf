//! Exact symbolic algebra of N-qubit Pauli strings.
//!
//! Everything here is sign arithmetic: phases are quartic roots of unity
//! tracked as integers mod 4, and conjugating a Pauli string by another one
//! only ever flips its sign. Average Hamiltonians are accumulated as integer
//! sign counts per term, so a decoupled term comes out as an exact `0.0`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Product `self * other` as `(phase, label)`.
    pub fn mul(self, other: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (Phase::ONE, p),
            (a, b) if a == b => (Phase::ONE, I),
            (X, Y) => (Phase::I, Z),
            (Y, Z) => (Phase::I, X),
            (Z, X) => (Phase::I, Y),
            (Y, X) => (Phase::MINUS_I, Z),
            (Z, Y) => (Phase::MINUS_I, X),
            (X, Z) => (Phase::MINUS_I, Y),
            _ => unreachable!(),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Pauli> {
        match c {
            'I' | 'i' | '1' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A power of `i`: one of `{+1, +i, -1, -i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    /// `Some(+-1.0)` for a real phase, `None` for `+-i`.
    pub fn as_real(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

/// Signed N-qubit Pauli word. Qubit 0 is the leftmost factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: Phase,
    axes: Vec<Pauli>,
}

impl PauliString {
    pub fn new(axes: Vec<Pauli>) -> Result<Self> {
        Self::with_phase(Phase::ONE, axes)
    }

    pub fn with_phase(phase: Phase, axes: Vec<Pauli>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Invalid("Pauli string needs at least one qubit".into()));
        }
        Ok(PauliString { phase, axes })
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliString {
            phase: Phase::ONE,
            axes: vec![Pauli::I; n_qubits.max(1)],
        }
    }

    /// `p` on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Result<Self> {
        Self::from_sites(n_qubits, &[(qubit, p)])
    }

    pub fn from_sites(n_qubits: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n_qubits);
        for &(q, p) in sites {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
            s.axes[q] = p;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn axes(&self) -> &[Pauli] {
        &self.axes
    }

    pub fn axis(&self, qubit: usize) -> Pauli {
        self.axes[qubit]
    }

    pub fn negate(&self) -> Self {
        PauliString {
            phase: self.phase * Phase::MINUS_ONE,
            axes: self.axes.clone(),
        }
    }

    /// Same word with phase `+1`.
    pub fn word(&self) -> Self {
        PauliString {
            phase: Phase::ONE,
            axes: self.axes.clone(),
        }
    }

    pub fn is_identity_word(&self) -> bool {
        self.axes.iter().all(|&p| p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.axes.iter().filter(|&&p| p != Pauli::I).count()
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// Group product `self * other`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_len(other)?;
        let mut phase = self.phase * other.phase;
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(&a, &b)| {
                let (ph, p) = a.mul(b);
                phase = phase * ph;
                p
            })
            .collect();
        Ok(PauliString { phase, axes })
    }

    pub fn adjoint(&self) -> PauliString {
        PauliString {
            phase: self.phase.conj(),
            axes: self.axes.clone(),
        }
    }

    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        let anti = self
            .axes
            .iter()
            .zip(&other.axes)
            .filter(|(a, b)| a.anticommutes(**b))
            .count();
        Ok(anti % 2 == 0)
    }

    /// `g^dagger * p * g` for unitary `g`; the phase of `g` drops out.
    pub fn conjugate(g: &PauliString, p: &PauliString) -> Result<PauliString> {
        if g.commutes_with(p)? {
            Ok(p.clone())
        } else {
            Ok(p.negate())
        }
    }

    /// Bit masks for matrix-free application. Qubit `k` maps to bit
    /// `n - 1 - k` of the computational basis index. Returns
    /// `(x_mask, z_mask, y_count)` with `P = phase * i^y_count * X^x Z^z`.
    pub fn masks(&self) -> (usize, usize, u32) {
        let n = self.len();
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for (k, &p) in self.axes.iter().enumerate() {
            let bit = 1usize << (n - 1 - k);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        (x, z, ny)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase)?;
        for p in &self.axes {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional sign prefix (`+`, `-`, `+i`, `-i`, `i`) followed by
    /// the labels `I`, `X`, `Y`, `Z`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (Phase::I, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::ONE, rest)
        } else {
            (Phase::ONE, s)
        };
        let axes = body
            .chars()
            .map(|c| {
                Pauli::from_symbol(c)
                    .ok_or_else(|| Error::Invalid(format!("bad Pauli label {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::with_phase(phase, axes)
    }
}

/// Real-weighted sum of phase-free Pauli words. Phases are folded into the
/// coefficients on insertion, which keeps every stored sum Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<Vec<Pauli>, f64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff * s`. Fails for an imaginary phase on `s`.
    pub fn add(&mut self, s: &PauliString, coeff: f64) -> Result<()> {
        if s.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                left: self.n_qubits,
                right: s.len(),
            });
        }
        let sign = s.phase().as_real().ok_or(Error::NonHermitian)?;
        self.add_word(s.axes().to_vec(), sign * coeff);
        Ok(())
    }

    pub(crate) fn add_word(&mut self, word: Vec<Pauli>, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(word) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn with_term(mut self, s: &PauliString, coeff: f64) -> Result<Self> {
        self.add(s, coeff)?;
        Ok(self)
    }

    /// Coefficient of the phase-free word of `s` (zero if absent).
    pub fn coefficient(&self, s: &PauliString) -> f64 {
        self.terms.get(s.axes()).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliString, f64)> + '_ {
        self.terms.iter().map(|(w, &c)| {
            (
                PauliString {
                    phase: Phase::ONE,
                    axes: w.clone(),
                },
                c,
            )
        })
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        let mut out = PauliSum::new(self.n_qubits);
        for (w, &c) in &self.terms {
            out.add_word(w.clone(), c * factor);
        }
        out
    }

    pub fn plus(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::LengthMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_word(w.clone(), c);
        }
        Ok(out)
    }

    /// Keeps only the terms for which `keep` returns true.
    pub fn filtered(&self, mut keep: impl FnMut(&[Pauli]) -> bool) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| keep(w))
                .map(|(w, &c)| (w.clone(), c))
                .collect(),
        }
    }

    /// Sum of absolute coefficients, an upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Conjugates every term by `g`.
    pub fn conjugated(&self, g: &PauliString) -> Result<PauliSum> {
        let mut out = PauliSum::new(self.n_qubits);
        for (s, c) in self.iter() {
            out.add(&PauliString::conjugate(g, &s)?, c)?;
        }
        Ok(out)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (s, c)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let word: String = s.axes().iter().map(|p| p.symbol()).collect();
            write!(f, "{c:+}*{word}")?;
        }
        Ok(())
    }
}

/// Ordered toggling-frame operators `g_j` together with the pulses that step
/// between them (`p_j * g_{j-1} = g_j` up to phase, `g_M = g_0 = 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct DecouplingScheme {
    operators: Vec<PauliString>,
    pulses: Vec<PauliString>,
}

impl DecouplingScheme {
    /// Builds the frames generated by applying `pulses` in order from the
    /// identity. The product of all pulses must be the identity up to phase.
    pub fn from_pulses(pulses: Vec<PauliString>) -> Result<Self> {
        let n = pulses
            .first()
            .ok_or_else(|| Error::Invalid("empty pulse list".into()))?
            .len();
        let mut g = PauliString::identity(n);
        let mut operators = Vec::with_capacity(pulses.len());
        for p in &pulses {
            operators.push(g.clone());
            g = p.multiply(&g)?;
        }
        if !g.is_identity_word() {
            return Err(Error::Constraint(format!(
                "pulse sequence is not cyclic: net operator {g}"
            )));
        }
        Ok(DecouplingScheme { operators, pulses })
    }

    /// Builds the scheme from its frame operators; the pulses are
    /// `g_j * g_{j-1}^dagger`, closing back onto `g_0`.
    pub fn from_operators(operators: Vec<PauliString>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::Invalid("empty scheme".into()))?;
        if !first.is_identity_word() {
            return Err(Error::Constraint("scheme must start at the identity".into()));
        }
        let m = operators.len();
        let pulses = (0..m)
            .map(|j| operators[(j + 1) % m].word().multiply(&operators[j].adjoint()))
            .collect::<Result<Vec<_>>>()?;
        Ok(DecouplingScheme {
            operators: operators.into_iter().map(|g| g.word()).collect(),
            pulses,
        })
    }

    /// The single-qubit annihilator `{1, X, Z, Y}`.
    pub fn annihilator() -> Self {
        Self::single_qubit_frames(&[Pauli::I, Pauli::X, Pauli::Z, Pauli::Y])
    }

    /// Eight-pulse Euler cycle `X Y X Y Y X Y X` on one qubit.
    pub fn euler_single() -> Self {
        use Pauli::*;
        let pulses = [X, Y, X, Y, Y, X, Y, X]
            .iter()
            .map(|&p| PauliString::single(1, 0, p).unwrap())
            .collect();
        Self::from_pulses(pulses).expect("Euler cycle closes")
    }

    /// Two-qubit scheme `{II, XX, YY, ZZ}` that keeps the XX+YY coupling.
    pub fn pair_keep() -> Self {
        use Pauli::*;
        Self::pair_frames(&[(I, I), (X, X), (Y, Y), (Z, Z)])
    }

    /// Two-qubit scheme `{II, XY, YX, ZZ}` that removes the XX+YY coupling.
    pub fn pair_eliminate() -> Self {
        use Pauli::*;
        Self::pair_frames(&[(I, I), (X, Y), (Y, X), (Z, Z)])
    }

    fn single_qubit_frames(frames: &[Pauli]) -> Self {
        let ops = frames
            .iter()
            .map(|&p| PauliString::single(1, 0, p).unwrap())
            .collect();
        Self::from_operators(ops).unwrap()
    }

    fn pair_frames(frames: &[(Pauli, Pauli)]) -> Self {
        let ops = frames
            .iter()
            .map(|&(a, b)| PauliString::new(vec![a, b]).unwrap())
            .collect();
        Self::from_operators(ops).unwrap()
    }

    pub fn n_qubits(&self) -> usize {
        self.operators[0].len()
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operators(&self) -> &[PauliString] {
        &self.operators
    }

    pub fn pulses(&self) -> &[PauliString] {
        &self.pulses
    }

    /// Product of all pulses, which equals the identity up to phase for a
    /// valid scheme.
    pub fn net_operator(&self) -> Result<PauliString> {
        let mut g = PauliString::identity(self.n_qubits());
        for p in &self.pulses {
            g = p.multiply(&g)?;
        }
        Ok(g)
    }

    pub fn is_cyclic(&self) -> bool {
        self.net_operator().map(|g| g.is_identity_word()).unwrap_or(false)
    }

    /// Checks `p_j * g_{j-1} = g_j` up to phase for every step, including the
    /// closing step back to `g_0`.
    pub fn is_consistent(&self) -> bool {
        let m = self.len();
        (0..m).all(|j| {
            self.pulses[j]
                .multiply(&self.operators[j])
                .map(|g| g.axes() == self.operators[(j + 1) % m].axes())
                .unwrap_or(false)
        })
    }

    /// How often each phase-free frame occurs.
    pub fn frame_counts(&self) -> BTreeMap<Vec<Pauli>, usize> {
        let mut counts = BTreeMap::new();
        for g in &self.operators {
            *counts.entry(g.axes().to_vec()).or_insert(0) += 1;
        }
        counts
    }
}

/// Zeroth-order average Hamiltonian `(1/M) sum_j g_j^dagger H g_j` for ideal
/// instantaneous pulses.
pub fn average_hamiltonian_zeroth(scheme: &DecouplingScheme, h: &PauliSum) -> Result<PauliSum> {
    if scheme.n_qubits() != h.n_qubits() {
        return Err(Error::LengthMismatch {
            left: scheme.n_qubits(),
            right: h.n_qubits(),
        });
    }
    let m = scheme.len() as f64;
    let mut out = PauliSum::new(h.n_qubits());
    for (term, coeff) in h.iter() {
        let mut signs: i64 = 0;
        for g in scheme.operators() {
            signs += if g.commutes_with(&term)? { 1 } else { -1 };
        }
        if signs != 0 {
            out.add_word(term.axes().to_vec(), coeff * signs as f64 / m);
        }
    }
    Ok(out)
}

/// Outcome of checking a chain scheme against the intended set of kept
/// couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    /// The zeroth-order average Hamiltonian.
    pub average: PauliSum,
    /// Coupling terms of kept edges that survive with unchanged coefficient.
    pub kept: Vec<(PauliString, f64)>,
    /// Coupling terms of kept edges that were lost or rescaled:
    /// `(term, expected, found)`.
    pub missing: Vec<(PauliString, f64, f64)>,
    /// Terms of `H` that should vanish but survive.
    pub surviving: Vec<(PauliString, f64)>,
    /// Terms of `H` that were removed as intended.
    pub eliminated: Vec<PauliString>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.surviving.is_empty()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })?;
        writeln!(f, "  average: {}", self.average)?;
        for (s, c) in &self.kept {
            writeln!(f, "  kept      {s} {c:+}")?;
        }
        for (s, want, got) in &self.missing {
            writeln!(f, "  missing   {s} expected {want:+} found {got:+}")?;
        }
        for (s, c) in &self.surviving {
            writeln!(f, "  surviving {s} {c:+}")?;
        }
        Ok(())
    }
}

/// Checks that the scheme keeps exactly the XX and YY coupling terms of
/// `keep_edges` with their original coefficients and removes everything else
/// in `h` (detunings and the other couplings).
pub fn verify_chain_scheme(
    scheme: &DecouplingScheme,
    h: &PauliSum,
    keep_edges: &[(usize, usize)],
) -> Result<VerificationReport> {
    let n = h.n_qubits();
    let mut wanted: Vec<PauliString> = Vec::new();
    for &(a, b) in keep_edges {
        let (lo, hi) = (a.min(b), a.max(b));
        if hi >= n {
            return Err(Error::QubitOutOfRange { qubit: hi, n_qubits: n });
        }
        if hi != lo + 1 {
            return Err(Error::NotNeighbours(a, b));
        }
        for p in [Pauli::X, Pauli::Y] {
            wanted.push(PauliString::from_sites(n, &[(lo, p), (hi, p)])?);
        }
    }

    let average = average_hamiltonian_zeroth(scheme, h)?;
    let mut report = VerificationReport {
        average: average.clone(),
        kept: Vec::new(),
        missing: Vec::new(),
        surviving: Vec::new(),
        eliminated: Vec::new(),
    };
    for w in &wanted {
        let expected = h.coefficient(w);
        let found = average.coefficient(w);
        if expected != 0.0 && found == expected {
            report.kept.push((w.clone(), found));
        } else {
            report.missing.push((w.clone(), expected, found));
        }
    }
    for (term, coeff) in average.iter() {
        if !wanted.iter().any(|w| w.axes() == term.axes()) {
            report.surviving.push((term, coeff));
        }
    }
    for (term, _) in h.iter() {
        let is_wanted = wanted.iter().any(|w| w.axes() == term.axes());
        if !is_wanted && average.coefficient(&term) == 0.0 {
            report.eliminated.push(term);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn products() {
        assert_eq!(ps("X").multiply(&ps("Y")).unwrap(), ps("+iZ"));
        assert_eq!(ps("X").multiply(&ps("X")).unwrap(), ps("I"));
        assert_eq!(ps("XI").multiply(&ps("IY")).unwrap(), ps("XY"));
        assert_eq!(ps("Y").multiply(&ps("X")).unwrap(), ps("-iZ"));
    }

    #[test]
    fn length_mismatch_is_structural() {
        assert!(matches!(
            ps("XX").multiply(&ps("X")),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
        assert!(PauliString::conjugate(&ps("X"), &ps("ZZ")).is_err());
    }

    #[test]
    fn conjugation_signs() {
        assert_eq!(PauliString::conjugate(&ps("X"), &ps("Z")).unwrap(), ps("-Z"));
        assert_eq!(PauliString::conjugate(&ps("X"), &ps("X")).unwrap(), ps("X"));
        assert_eq!(
            PauliString::conjugate(&ps("XY"), &ps("XX")).unwrap(),
            ps("-XX")
        );
        // phase of g is irrelevant
        assert_eq!(
            PauliString::conjugate(&ps("-iXY"), &ps("XX")).unwrap(),
            ps("-XX")
        );
    }

    #[test]
    fn imaginary_terms_rejected() {
        let mut h = PauliSum::new(1);
        assert!(matches!(h.add(&ps("+iX"), 1.0), Err(Error::NonHermitian)));
        h.add(&ps("-X"), 0.5).unwrap();
        assert_eq!(h.coefficient(&ps("X")), -0.5);
    }

    #[test]
    fn cancelled_terms_are_dropped() {
        let mut h = PauliSum::new(2);
        h.add(&ps("XX"), 0.3).unwrap();
        h.add(&ps("ZI"), 1.0).unwrap();
        h.add(&ps("-XX"), 0.3).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.coefficient(&ps("ZI")), 1.0);
    }

    #[test]
    fn annihilator_kills_detuning() {
        let h = PauliSum::new(1).with_term(&ps("Z"), 0.35).unwrap();
        let avg = average_hamiltonian_zeroth(&DecouplingScheme::annihilator(), &h).unwrap();
        assert!(avg.is_empty());
    }

    #[test]
    fn pair_schemes() {
        let h = PauliSum::new(2)
            .with_term(&ps("XX"), -0.5)
            .unwrap()
            .with_term(&ps("YY"), -0.5)
            .unwrap();
        let keep = average_hamiltonian_zeroth(&DecouplingScheme::pair_keep(), &h).unwrap();
        assert_eq!(keep, h);
        let elim = average_hamiltonian_zeroth(&DecouplingScheme::pair_eliminate(), &h).unwrap();
        assert!(elim.is_empty());
    }

    #[test]
    fn pair_keep_report() {
        let h = PauliSum::new(2)
            .with_term(&ps("XX"), -0.5)
            .unwrap()
            .with_term(&ps("YY"), -0.5)
            .unwrap()
            .with_term(&ps("ZI"), 0.2)
            .unwrap();
        let scheme = DecouplingScheme::pair_keep();
        let report = verify_chain_scheme(&scheme, &h, &[(0, 1)]).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.kept.len(), 2);
        assert_eq!(report.eliminated, vec![ps("ZI")]);

        let report = verify_chain_scheme(&scheme, &h, &[]).unwrap();
        assert!(!report.passed());
        assert_eq!(report.surviving.len(), 2);
    }

    #[test]
    fn non_neighbour_keep_edge_rejected() {
        let h = PauliSum::new(3);
        let scheme = DecouplingScheme::from_pulses(vec![PauliString::identity(3)]).unwrap();
        assert!(matches!(
            verify_chain_scheme(&scheme, &h, &[(0, 2)]),
            Err(Error::NotNeighbours(0, 2))
        ));
    }

    #[test]
    fn euler_cycle_structure() {
        let s = DecouplingScheme::euler_single();
        assert_eq!(s.len(), 8);
        assert!(s.is_cyclic());
        assert!(s.is_consistent());
        let counts = s.frame_counts();
        assert_eq!(counts.len(), 4);
        assert!(counts.values().all(|&c| c == 2));
    }

    #[test]
    fn non_cyclic_pulses_rejected() {
        let r = DecouplingScheme::from_pulses(vec![ps("X"), ps("Y")]);
        assert!(matches!(r, Err(Error::Constraint(_))));
    }

    #[test]
    fn masks_match_labels() {
        let (x, z, ny) = ps("XYZI").masks();
        assert_eq!(x, 0b1100);
        assert_eq!(z, 0b0110);
        assert_eq!(ny, 1);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(ps("-iXZ").to_string(), "-iXZ");
        assert_eq!(ps("YY").to_string(), "+YY");
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }
}
