//! Rotated-surface-code geometry and the partial loop operators the players
//! measure.
//!
//! Each team owns an X loop `X̃_i` and a Z loop `Z̃_i` meeting on one mixed
//! qubit, with `X̃_i` anticommuting with `Z̃_j` only for `i = j`. The loops
//! are found on the graph of X checks (qubits are edges): the X loops are
//! the qubits leaving a region, the Z loops edge-disjoint routes out of it.

mod layout;
mod loops;
mod terms;

pub use layout::{
    build_rsc_layout, DualGraph, RscLayout, Side, Stabilizer, StabilizerKind, MAX_DISTANCE,
    MIN_DISTANCE,
};
pub use loops::{
    enlarged_loop_config, general_loop_config, p3_loop_config, region_loop_config, LoopConfig,
    Role, Team,
};
pub use terms::{
    ideal_expectation, input_sign, mermin_terms, symplectic_anticommute, MerminTerm,
    MerminTermSet,
};
