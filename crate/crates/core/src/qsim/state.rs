use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pauli::{PauliOp, PauliString};
use crate::{Error, Result};

pub const MAX_QUBITS: usize = 22;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub(crate) type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    /// Unitary mapping this basis' eigenvectors onto the computational basis,
    /// preserving the eigenvalue: `V P V† = Z`.
    fn to_z(self) -> Option<Matrix2> {
        match self {
            Basis::Z => None,
            Basis::X => Some(hadamard()),
            // H S†: S† Y S = X, then H X H = Z.
            Basis::Y => Some(mat_mul(hadamard(), [[ONE, ZERO], [ZERO, -I]])),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Basis::X => 'x',
            Basis::Y => 'y',
            Basis::Z => 'z',
        }
    }
}

/// Single-qubit product-state label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Zero,
    One,
    Plus,
    Minus,
}

impl Label {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Label::Zero),
            '1' => Some(Label::One),
            '+' => Some(Label::Plus),
            '-' => Some(Label::Minus),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Label::Zero => '0',
            Label::One => '1',
            Label::Plus => '+',
            Label::Minus => '-',
        }
    }

    fn amplitudes(self) -> [Complex64; 2] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            Label::Zero => [ONE, ZERO],
            Label::One => [ZERO, ONE],
            Label::Plus => [h, h],
            Label::Minus => [h, -h],
        }
    }
}

pub fn parse_labels(s: &str) -> Result<Vec<Label>> {
    s.chars()
        .map(|c| {
            Label::from_char(c)
                .ok_or_else(|| Error::Domain(format!("bad product-state label {c:?} in {s:?}")))
        })
        .collect()
}

pub fn labels_to_string(labels: &[Label]) -> String {
    labels.iter().map(|l| l.as_char()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    /// `exp(iθY/2)`.
    Ry(f64),
    H,
    X,
    Y,
    Z,
    Cnot,
    Cz,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Ry(_) => "ry",
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::Cnot => "cnot",
            GateKind::Cz => "cz",
        }
    }

    pub fn angle(self) -> Option<f64> {
        match self {
            GateKind::Ry(t) => Some(t),
            _ => None,
        }
    }

    pub fn from_name(name: &str, angle: Option<f64>) -> Result<Self> {
        let kind = match (name, angle) {
            ("ry", Some(t)) => GateKind::Ry(t),
            ("h", None) => GateKind::H,
            ("x", None) => GateKind::X,
            ("y", None) => GateKind::Y,
            ("z", None) => GateKind::Z,
            ("cnot", None) => GateKind::Cnot,
            ("cz", None) => GateKind::Cz,
            ("ry", None) => return Err(Error::Validation("ry needs an angle".into())),
            (n, Some(_)) if ["h", "x", "y", "z", "cnot", "cz"].contains(&n) => {
                return Err(Error::Validation(format!("{n} takes no angle")))
            }
            (n, _) => return Err(Error::Validation(format!("unknown gate {n:?}"))),
        };
        Ok(kind)
    }

    pub(crate) fn matrix(self) -> Option<Matrix2> {
        let r = |v: f64| Complex64::new(v, 0.0);
        match self {
            GateKind::Ry(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                // cos(θ/2) I + i sin(θ/2) Y
                Some([[r(c), r(s)], [r(-s), r(c)]])
            }
            GateKind::H => Some(hadamard()),
            _ => None,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Ry(t) => write!(f, "ry({t})"),
            other => f.write_str(other.name()),
        }
    }
}

fn hadamard() -> Matrix2 {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

fn mat_mul(a: Matrix2, b: Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub(crate) fn dagger(m: Matrix2) -> Matrix2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

pub(crate) fn phase_power(k: u8) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

pub(crate) fn check_targets(num_qubits: usize, kind: GateKind, targets: &[usize]) -> Result<()> {
    if targets.len() != kind.arity() {
        return Err(Error::Shape(format!(
            "{} takes {} target(s), got {}",
            kind.name(),
            kind.arity(),
            targets.len()
        )));
    }
    if let Some(&q) = targets.iter().find(|&&q| q >= num_qubits) {
        return Err(Error::Shape(format!(
            "target {q} out of range for {num_qubits} qubits"
        )));
    }
    if targets.len() == 2 && targets[0] == targets[1] {
        return Err(Error::Shape(format!("duplicate target {}", targets[0])));
    }
    Ok(())
}

/// Operations shared by the dense and sparse amplitude stores. Qubit `q` is
/// bit `q` of the basis-state index.
pub trait QuantumState: Clone + Send + Sync {
    fn from_labels(labels: &[Label]) -> Result<Self>;
    fn num_qubits(&self) -> usize;
    fn norm_sqr(&self) -> f64;

    fn apply_gate(&mut self, kind: GateKind, targets: &[usize]) -> Result<()>;
    fn apply_pauli(&mut self, op: &PauliString) -> Result<()>;
    /// `<ψ|op|ψ>`; the imaginary residue must be below 1e-10.
    fn pauli_expectation(&self, op: &PauliString) -> Result<f64>;

    #[doc(hidden)]
    fn apply_matrix(&mut self, qubit: usize, m: Matrix2);
    #[doc(hidden)]
    fn apply_op(&mut self, op: PauliOp);
    /// Probability that `qubit` reads 0 in the computational basis.
    #[doc(hidden)]
    fn zero_probability(&self, qubit: usize) -> f64;
    /// Keeps the `outcome` half of `qubit` and rescales by `scale`.
    #[doc(hidden)]
    fn collapse_z(&mut self, qubit: usize, outcome: bool, scale: f64);

    /// Probability of outcome `false` (eigenvalue +1) for a `basis` measurement.
    fn outcome_probability(&self, qubit: usize, basis: Basis) -> Result<f64> {
        self.check_qubit(qubit)?;
        let p0 = match basis.to_z() {
            None => self.zero_probability(qubit),
            Some(v) => {
                let mut rotated = self.clone();
                rotated.apply_matrix(qubit, v);
                rotated.zero_probability(qubit)
            }
        };
        check_probability(p0)
    }

    /// Projects onto the given outcome and renormalizes. Returns the Born
    /// probability of that outcome; a zero-probability projection leaves the
    /// state untouched and returns 0.
    fn project(&mut self, qubit: usize, basis: Basis, outcome: bool) -> Result<f64> {
        self.check_qubit(qubit)?;
        let v = basis.to_z();
        if let Some(v) = v {
            self.apply_matrix(qubit, v);
        }
        let p0 = check_probability(self.zero_probability(qubit))?;
        let p = if outcome { 1.0 - p0 } else { p0 };
        if p > 0.0 {
            self.collapse_z(qubit, outcome, p.sqrt().recip());
        }
        if let Some(v) = v {
            self.apply_matrix(qubit, dagger(v));
        }
        Ok(p.max(0.0))
    }

    /// Samples an outcome with its Born probability and collapses onto it.
    /// Outcome `true` means eigenvalue -1.
    fn measure<R: Rng + ?Sized>(&mut self, qubit: usize, basis: Basis, rng: &mut R) -> Result<bool> {
        self.check_qubit(qubit)?;
        let v = basis.to_z();
        if let Some(v) = v {
            self.apply_matrix(qubit, v);
        }
        let p0 = check_probability(self.zero_probability(qubit))?;
        let outcome = rng.gen::<f64>() >= p0;
        let p = if outcome { 1.0 - p0 } else { p0 };
        if p <= 0.0 {
            return Err(Error::Numeric(format!(
                "sampled a zero-probability outcome on qubit {qubit}"
            )));
        }
        self.collapse_z(qubit, outcome, p.sqrt().recip());
        if let Some(v) = v {
            self.apply_matrix(qubit, dagger(v));
        }
        Ok(outcome)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits() {
            return Err(Error::Shape(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits()
            )));
        }
        Ok(())
    }

    fn check_op(&self, op: &PauliString) -> Result<()> {
        if op.num_qubits() != self.num_qubits() {
            return Err(Error::Shape(format!(
                "{}-qubit operator on a {}-qubit state",
                op.num_qubits(),
                self.num_qubits()
            )));
        }
        Ok(())
    }
}

fn check_probability(p0: f64) -> Result<f64> {
    if p0.is_nan() {
        return Err(Error::Numeric("NaN amplitude in measurement".into()));
    }
    Ok(p0.clamp(0.0, 1.0))
}

pub(crate) fn check_width(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "state width must be 1..={MAX_QUBITS} qubits, got {num_qubits}"
        )));
    }
    Ok(())
}

pub(crate) fn finish_expectation(value: Complex64) -> Result<f64> {
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Numeric("non-finite expectation value".into()));
    }
    if value.im.abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "expectation has imaginary residue {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Dense amplitude vector of length `2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn product(labels: &[Label]) -> Result<Self> {
        check_width(labels.len())?;
        let n = labels.len();
        let mut amps = vec![ONE];
        // Build from the highest qubit down so qubit q lands on bit q.
        for label in labels.iter().rev() {
            let [a0, a1] = label.amplitudes();
            amps = amps.iter().flat_map(|&a| [a * a0, a * a1]).collect();
        }
        Ok(Self { num_qubits: n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::Shape(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let n = amps.len().trailing_zeros() as usize;
        check_width(n)?;
        Ok(Self { num_qubits: n, amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// `|<self|other>|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::Shape(format!(
                "fidelity between {} and {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        let overlap: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(overlap.norm_sqr())
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Numeric(format!("cannot normalize a state of norm² {n}")));
        }
        let s = n.sqrt().recip();
        self.amps.iter_mut().for_each(|a| *a *= s);
        Ok(())
    }

    /// Multiplies each amplitude by a real per-basis-state factor.
    pub fn scale_diagonal(&mut self, factor: impl Fn(usize) -> f64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= factor(i);
        }
    }
}

/// Convenience: product state from a descriptor like `"++0"`.
pub fn init_state(num_qubits: usize, descriptor: &str) -> Result<StateVector> {
    check_width(num_qubits)?;
    let labels = parse_labels(descriptor)?;
    let labels = match labels.len() {
        1 => vec![labels[0]; num_qubits],
        n if n == num_qubits => labels,
        n => {
            return Err(Error::Shape(format!(
                "descriptor has {n} labels for {num_qubits} qubits"
            )))
        }
    };
    StateVector::product(&labels)
}

impl QuantumState for StateVector {
    fn from_labels(labels: &[Label]) -> Result<Self> {
        Self::product(labels)
    }

    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn apply_gate(&mut self, kind: GateKind, targets: &[usize]) -> Result<()> {
        check_targets(self.num_qubits, kind, targets)?;
        if let Some(m) = kind.matrix() {
            self.apply_matrix(targets[0], m);
            return Ok(());
        }
        match kind {
            GateKind::X | GateKind::Y | GateKind::Z => {
                let letter = match kind {
                    GateKind::X => super::Pauli::X,
                    GateKind::Y => super::Pauli::Y,
                    _ => super::Pauli::Z,
                };
                let op = PauliString::from_sparse(self.num_qubits, [(targets[0], letter)])?;
                self.apply_op(op.to_op()?);
            }
            GateKind::Cnot => {
                let (c, t) = (1usize << targets[0], 1usize << targets[1]);
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            GateKind::Cz => {
                let m = (1usize << targets[0]) | (1usize << targets[1]);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m == m {
                        *a = -*a;
                    }
                }
            }
            GateKind::Ry(_) | GateKind::H => unreachable!("handled by matrix()"),
        }
        Ok(())
    }

    fn apply_pauli(&mut self, op: &PauliString) -> Result<()> {
        self.check_op(op)?;
        self.apply_op(op.to_op()?);
        Ok(())
    }

    fn pauli_expectation(&self, op: &PauliString) -> Result<f64> {
        self.check_op(op)?;
        let PauliOp { x, z, phase } = op.to_op()?;
        let (x, z) = (x as usize, z as usize);
        let mut acc = 0.0f64;
        let mut acc_im = 0.0f64;
        for (j, &a) in self.amps.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let term = self.amps[j ^ x].conj() * a;
            if (j & z).count_ones() % 2 == 1 {
                acc -= term.re;
                acc_im -= term.im;
            } else {
                acc += term.re;
                acc_im += term.im;
            }
        }
        finish_expectation(phase_power(phase) * Complex64::new(acc, acc_im))
    }

    fn apply_matrix(&mut self, qubit: usize, m: Matrix2) {
        let stride = 1usize << qubit;
        for base in (0..self.amps.len()).step_by(2 * stride) {
            for i in base..base + stride {
                let (a0, a1) = (self.amps[i], self.amps[i + stride]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_op(&mut self, op: PauliOp) {
        let (x, z) = (op.x as usize, op.z as usize);
        let ph = phase_power(op.phase);
        let sign = |j: usize| if (j & z).count_ones() % 2 == 1 { -ph } else { ph };
        if x == 0 {
            for (j, a) in self.amps.iter_mut().enumerate() {
                *a *= sign(j);
            }
            return;
        }
        // Pair j with j ^ x, visiting each pair once from its lower member.
        let top = 1usize << (usize::BITS - 1 - x.leading_zeros());
        for j in 0..self.amps.len() {
            if j & top == 0 {
                let k = j ^ x;
                let (aj, ak) = (self.amps[j], self.amps[k]);
                self.amps[k] = sign(j) * aj;
                self.amps[j] = sign(k) * ak;
            }
        }
    }

    fn zero_probability(&self, qubit: usize) -> f64 {
        let bit = 1usize << qubit;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn collapse_z(&mut self, qubit: usize, outcome: bool, scale: f64) {
        let bit = 1usize << qubit;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) == outcome {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
    }
}
