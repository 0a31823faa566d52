use num_complex::Complex64;

use super::pauli::{Pauli, PauliOp, PauliString};
use super::state::{
    check_targets, finish_expectation, phase_power, GateKind, Label, Matrix2, QuantumState,
    StateVector,
};
use crate::{Error, Result};

pub const SPARSE_MAX_QUBITS: usize = 63;

/// Amplitudes below this squared magnitude are dropped after each update.
const PRUNE: f64 = 1e-28;

/// Sorted list of nonzero amplitudes. Cheap for states that live on a small
/// subset of the computational basis, e.g. GHZ-like states after parity
/// measurements, where the dense vector would be mostly zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    num_qubits: usize,
    entries: Vec<(u64, Complex64)>,
}

impl SparseState {
    pub fn product(labels: &[Label]) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > SPARSE_MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "sparse state width must be 1..={SPARSE_MAX_QUBITS}, got {n}"
            )));
        }
        let mut state = Self {
            num_qubits: n,
            entries: vec![(0, Complex64::new(1.0, 0.0))],
        };
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (q, label) in labels.iter().enumerate() {
            match label {
                Label::Zero => {}
                Label::One => state.apply_op(PauliOp { x: 1 << q, z: 0, phase: 0 }),
                Label::Plus | Label::Minus => {
                    let s = if *label == Label::Plus { h } else { -h };
                    let r = |v: f64| Complex64::new(v, 0.0);
                    state.apply_matrix(q, [[r(h), r(h)], [r(s), r(-s)]]);
                }
            }
        }
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u64, Complex64)] {
        &self.entries
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        match self.entries.binary_search_by_key(&index, |e| e.0) {
            Ok(k) => self.entries[k].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_dense(&self) -> Result<StateVector> {
        if self.num_qubits > super::state::MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "{} qubits too wide for a dense vector",
                self.num_qubits
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.num_qubits];
        for &(i, a) in &self.entries {
            amps[i as usize] = a;
        }
        StateVector::from_amplitudes(amps)
    }

    pub fn from_dense(state: &StateVector) -> Self {
        let entries = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > PRUNE)
            .map(|(i, &a)| (i as u64, a))
            .collect();
        Self {
            num_qubits: state.num_qubits(),
            entries,
        }
    }

    /// Sorts by index, sums duplicates and drops negligible amplitudes.
    fn canonicalize(&mut self) {
        self.entries.sort_unstable_by_key(|e| e.0);
        let mut out: Vec<(u64, Complex64)> = Vec::with_capacity(self.entries.len());
        for &(i, a) in &self.entries {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += a,
                _ => out.push((i, a)),
            }
        }
        out.retain(|e| e.1.norm_sqr() > PRUNE);
        self.entries = out;
    }
}

impl QuantumState for SparseState {
    fn from_labels(labels: &[Label]) -> Result<Self> {
        Self::product(labels)
    }

    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm_sqr()).sum()
    }

    fn apply_gate(&mut self, kind: GateKind, targets: &[usize]) -> Result<()> {
        check_targets(self.num_qubits, kind, targets)?;
        if let Some(m) = kind.matrix() {
            self.apply_matrix(targets[0], m);
            return Ok(());
        }
        let letter = match kind {
            GateKind::X => Pauli::X,
            GateKind::Y => Pauli::Y,
            GateKind::Z => Pauli::Z,
            GateKind::Cnot => {
                let (c, t) = (1u64 << targets[0], 1u64 << targets[1]);
                for e in &mut self.entries {
                    if e.0 & c != 0 {
                        e.0 ^= t;
                    }
                }
                self.entries.sort_unstable_by_key(|e| e.0);
                return Ok(());
            }
            GateKind::Cz => {
                let m = (1u64 << targets[0]) | (1u64 << targets[1]);
                for e in &mut self.entries {
                    if e.0 & m == m {
                        e.1 = -e.1;
                    }
                }
                return Ok(());
            }
            GateKind::Ry(_) | GateKind::H => unreachable!("handled by matrix()"),
        };
        let op = PauliString::from_sparse(self.num_qubits, [(targets[0], letter)])?;
        self.apply_op(op.to_op()?);
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
        let mut acc = Complex64::new(0.0, 0.0);
        for &(j, a) in &self.entries {
            let b = self.amplitude(j ^ x);
            let term = b.conj() * a;
            if (j & z).count_ones() % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        finish_expectation(phase_power(phase) * acc)
    }

    fn apply_matrix(&mut self, qubit: usize, m: Matrix2) {
        let bit = 1u64 << qubit;
        let mut out = Vec::with_capacity(2 * self.entries.len());
        for &(i, a) in &self.entries {
            let col = usize::from(i & bit != 0);
            let i0 = i & !bit;
            out.push((i0, m[0][col] * a));
            out.push((i0 | bit, m[1][col] * a));
        }
        self.entries = out;
        self.canonicalize();
    }

    fn apply_op(&mut self, op: PauliOp) {
        let ph = phase_power(op.phase);
        for e in &mut self.entries {
            let sign = if (e.0 & op.z).count_ones() % 2 == 1 { -ph } else { ph };
            *e = (e.0 ^ op.x, sign * e.1);
        }
        if op.x != 0 {
            self.entries.sort_unstable_by_key(|e| e.0);
        }
    }

    fn zero_probability(&self, qubit: usize) -> f64 {
        let bit = 1u64 << qubit;
        self.entries
            .iter()
            .filter(|e| e.0 & bit == 0)
            .map(|e| e.1.norm_sqr())
            .sum()
    }

    fn collapse_z(&mut self, qubit: usize, outcome: bool, scale: f64) {
        let bit = 1u64 << qubit;
        self.entries.retain(|e| (e.0 & bit != 0) == outcome);
        self.entries.iter_mut().for_each(|e| e.1 *= scale);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::state::{init_state, parse_labels, Basis};
    use approx::assert_abs_diff_eq;

    #[test]
    fn ghz_stays_sparse() {
        let labels = parse_labels(&format!("+{}", "0".repeat(29))).unwrap();
        let mut s = SparseState::product(&labels).unwrap();
        for q in 1..30 {
            s.apply_gate(GateKind::Cnot, &[0, q]).unwrap();
        }
        assert_eq!(s.len(), 2);
        let all_x = PauliString::uniform(30, Pauli::X, &(0..30).collect::<Vec<_>>()).unwrap();
        assert_abs_diff_eq!(s.pauli_expectation(&all_x).unwrap(), 1.0, epsilon = 1e-14);
        let p = s.project(3, Basis::Z, true).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-14);
        assert_eq!(s.entries()[0].0, (1u64 << 30) - 1);
    }

    #[test]
    fn product_matches_dense() {
        let dense = init_state(4, "+-10").unwrap();
        let sparse = SparseState::product(&parse_labels("+-10").unwrap()).unwrap();
        assert_eq!(sparse.len(), 4);
        let back = sparse.to_dense().unwrap();
        assert_abs_diff_eq!(back.fidelity(&dense).unwrap(), 1.0, epsilon = 1e-14);
        for (a, b) in back.amplitudes().iter().zip(dense.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }
}
