//! Statevector simulation with mid-circuit measurement and classical feedback.
//!
//! Two amplitude stores share the [`QuantumState`] trait: the dense
//! [`StateVector`] (up to 22 qubits) and [`SparseState`], which only keeps
//! nonzero amplitudes and suits GHZ-type circuits whose parity measurements
//! collapse the support quickly.

mod circuit;
mod exec;
mod pauli;
mod sparse;
mod state;

pub use circuit::{Circuit, Instruction};
pub use exec::{
    enumerate_branches, fold_branches, run_circuit, Branch, BRANCH_CUTOFF, MAX_BRANCH_MEASUREMENTS,
};
pub use pauli::{Pauli, PauliString};
#[doc(hidden)]
pub use pauli::PauliOp;
pub use sparse::{SparseState, SPARSE_MAX_QUBITS};
pub use state::{
    init_state, labels_to_string, parse_labels, Basis, GateKind, Label, QuantumState, StateVector,
    MAX_QUBITS,
};

/// Shorthand for [`QuantumState::measure`].
pub fn measure_qubit<S, R>(state: &mut S, qubit: usize, basis: Basis, rng: &mut R) -> crate::Result<bool>
where
    S: QuantumState,
    R: rand::Rng + ?Sized,
{
    state.measure(qubit, basis, rng)
}
