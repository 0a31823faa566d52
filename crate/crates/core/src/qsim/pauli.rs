use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | '_' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }
}

/// Signed tensor product of single-qubit Paulis. The sign is real, so the
/// operator is Hermitian.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    negative: bool,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(phase: i8, letters: Vec<Pauli>) -> Result<Self> {
        let negative = match phase {
            1 => false,
            -1 => true,
            _ => return Err(Error::Domain(format!("Pauli phase must be ±1, got {phase}"))),
        };
        Ok(Self { negative, letters })
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self {
            negative: false,
            letters: vec![Pauli::I; num_qubits],
        }
    }

    /// Same letter on every listed qubit.
    pub fn uniform(num_qubits: usize, letter: Pauli, qubits: &[usize]) -> Result<Self> {
        Self::from_sparse(num_qubits, qubits.iter().map(|&q| (q, letter)))
    }

    pub fn from_sparse(
        num_qubits: usize,
        entries: impl IntoIterator<Item = (usize, Pauli)>,
    ) -> Result<Self> {
        let mut p = Self::identity(num_qubits);
        for (q, letter) in entries {
            if q >= num_qubits {
                return Err(Error::Shape(format!(
                    "qubit {q} out of range for {num_qubits} qubits"
                )));
            }
            if p.letters[q] != Pauli::I {
                return Err(Error::Shape(format!("qubit {q} assigned twice")));
            }
            p.letters[q] = letter;
        }
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn phase(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn letter(&self, q: usize) -> Pauli {
        self.letters[q]
    }

    pub fn negated(&self) -> Self {
        Self {
            negative: !self.negative,
            letters: self.letters.clone(),
        }
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&l| l != Pauli::I).count()
    }

    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    /// Identity-padded copy on `num_qubits >= self.num_qubits()` qubits.
    pub fn padded(&self, num_qubits: usize) -> Result<Self> {
        if num_qubits < self.num_qubits() {
            return Err(Error::Shape(format!(
                "cannot pad a {}-qubit string down to {num_qubits}",
                self.num_qubits()
            )));
        }
        let mut letters = self.letters.clone();
        letters.resize(num_qubits, Pauli::I);
        Ok(Self {
            negative: self.negative,
            letters,
        })
    }

    pub fn x_mask(&self) -> u64 {
        mask(&self.letters, Pauli::has_x)
    }

    pub fn z_mask(&self) -> u64 {
        mask(&self.letters, Pauli::has_z)
    }

    pub fn count_y(&self) -> usize {
        self.letters.iter().filter(|&&l| l == Pauli::Y).count()
    }

    /// True iff the two strings anticommute: an odd number of positions
    /// carry distinct non-identity letters.
    pub fn anticommutes_with(&self, other: &Self) -> Result<bool> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::Shape(format!(
                "{}-qubit vs {}-qubit Pauli strings",
                self.num_qubits(),
                other.num_qubits()
            )));
        }
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        Ok(clashes % 2 == 1)
    }

    #[doc(hidden)]
    pub fn to_op(&self) -> Result<PauliOp> {
        if self.num_qubits() > 64 {
            return Err(Error::ResourceLimit(format!(
                "{} qubits exceed the 64-bit operator mask",
                self.num_qubits()
            )));
        }
        // Y = i X Z, so each Y contributes one power of i.
        let mut phase = (self.count_y() % 4) as u8;
        if self.negative {
            phase = (phase + 2) % 4;
        }
        Ok(PauliOp {
            x: self.x_mask(),
            z: self.z_mask(),
            phase,
        })
    }
}

fn mask(letters: &[Pauli], pred: fn(Pauli) -> bool) -> u64 {
    letters
        .iter()
        .enumerate()
        .filter(|(_, &l)| pred(l))
        .fold(0, |m, (q, _)| m | 1 << q)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = match s.chars().next() {
            Some('-') => (true, &s[1..]),
            Some('+') => (false, &s[1..]),
            _ => (false, s),
        };
        let letters = body
            .chars()
            .map(|c| {
                Pauli::from_char(c)
                    .ok_or_else(|| Error::Domain(format!("bad Pauli letter {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { negative, letters })
    }
}

/// `i^phase · X^x · Z^z` in bit-mask form. Acting on a basis state:
/// `op|j> = i^phase (-1)^popcount(j & z) |j ^ x>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[doc(hidden)]
pub struct PauliOp {
    pub x: u64,
    pub z: u64,
    pub phase: u8,
}

impl PauliOp {
    /// `self · other`.
    pub fn mul(self, other: PauliOp) -> PauliOp {
        // Z^z1 X^x2 = (-1)^|z1 & x2| X^x2 Z^z1
        let swap = (self.z & other.x).count_ones() % 2;
        PauliOp {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: ((self.phase as u32 + other.phase as u32 + 2 * swap) % 4) as u8,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0 && self.phase == 0
    }
}
