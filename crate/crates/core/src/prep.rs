//! Measurement-and-feedback preparation of deformed GHZ and surface-code
//! states.
//!
//! Every data qubit starts in |+⟩ and is rotated by `Ry(θ)`, which equals
//! `e^{βZ/2}|+⟩` up to normalization when `tan(θ/2) = tanh(β/2)`. The Z
//! checks are then measured through one reused ancilla and every −1 outcome
//! is repaired by an X string. An X on qubit q turns its `e^{βZ/2}` into
//! `e^{-βZ/2}`, so each branch ends in `Π_q e^{β s_q Z_q/2}` applied to the
//! ideal state, with `s_q = -1` on qubits hit an odd number of times.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::{RscLayout, Side, StabilizerKind};
use crate::qsim::{
    fold_branches, Basis, Circuit, GateKind, Label, Pauli, QuantumState, StateVector,
};
use crate::{Error, Result};

pub const MIN_GHZ_QUBITS: usize = 3;
pub const MAX_GHZ_QUBITS: usize = 20;

pub fn theta_from_beta(beta: f64) -> Result<f64> {
    if !(beta >= 0.0) || beta.is_infinite() {
        return Err(Error::Domain(format!("β must be finite and ≥ 0, got {beta}")));
    }
    Ok(2.0 * (beta / 2.0).tanh().atan())
}

pub fn beta_from_theta(theta: f64) -> Result<f64> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain(format!("θ must lie in [0, π/2), got {theta}")));
    }
    Ok(2.0 * (theta / 2.0).tan().atanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationParams {
    pub beta: f64,
    pub theta: f64,
}

impl DeformationParams {
    pub fn from_beta(beta: f64) -> Result<Self> {
        Ok(Self {
            beta,
            theta: theta_from_beta(beta)?,
        })
    }

    pub fn from_theta(theta: f64) -> Result<Self> {
        Ok(Self {
            beta: beta_from_theta(theta)?,
            theta,
        })
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(Error::Domain(format!("θ must lie in [0, π/2), got {theta}")));
    }
    if theta > FRAC_PI_4 {
        log::warn!("θ = {theta:.4} exceeds π/4; proceeding with tan(θ/2) = tanh(β/2)");
    }
    Ok(())
}

/// Per-qubit signs `s_q ∈ {+1, -1}` of the deformation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignConfig {
    pub signs: Vec<i8>,
}

impl SignConfig {
    pub fn uniform(n: usize) -> Self {
        Self { signs: vec![1; n] }
    }

    /// Bit q set where `s_q = -1`.
    pub fn flip_mask(&self) -> u64 {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, &s)| s < 0)
            .fold(0, |m, (q, _)| m | 1 << q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResourceKind {
    Ghz,
    Rsc,
}

/// A preparation circuit plus the bookkeeping needed to interpret its record.
#[derive(Debug, Clone)]
pub struct ResourceCircuit {
    pub kind: ResourceKind,
    pub circuit: Circuit,
    pub num_data: usize,
    pub ancilla: usize,
    pub theta: f64,
    /// Data-qubit mask of the Z check measured into each slot.
    pub checks: Vec<u64>,
    /// Qubits flipped when the outcome in each slot is 1.
    pub corrections: Vec<Vec<usize>>,
}

impl ResourceCircuit {
    pub fn beta(&self) -> f64 {
        beta_from_theta(self.theta).expect("θ validated at build time")
    }

    /// Correction strings applied for a measurement record.
    pub fn applied_corrections(&self, record: &[bool]) -> Vec<Vec<usize>> {
        record
            .iter()
            .zip(&self.corrections)
            .filter(|(&bit, _)| bit)
            .map(|(_, c)| c.clone())
            .collect()
    }

    pub fn signs_for(&self, record: &[bool]) -> SignConfig {
        effective_signs(self.num_data, &self.applied_corrections(record))
    }
}

fn measure_check(
    circuit: &mut Circuit,
    qubits: &[usize],
    ancilla: usize,
) -> Result<usize> {
    for &q in qubits {
        circuit.gate(GateKind::Cnot, &[q, ancilla])?;
    }
    let slot = circuit.measure(ancilla, Basis::Z)?;
    circuit.conditional_string(&[slot], Pauli::X, &[ancilla])?;
    Ok(slot)
}

fn rotated_plus(n: usize, theta: f64) -> Result<Circuit> {
    let mut init = vec![Label::Plus; n];
    init.push(Label::Zero);
    let mut c = Circuit::new(init)?;
    for q in 0..n {
        c.gate(GateKind::Ry(theta), &[q])?;
    }
    Ok(c)
}

/// `|+⟩^N → Ry(θ) → Z_iZ_{i+1}` for `i = 0..N-1` on ancilla `N`; a −1 on
/// pair i is repaired by X on qubits `0..=i`.
pub fn build_deformed_ghz_circuit(n: usize, theta: f64) -> Result<ResourceCircuit> {
    if !(MIN_GHZ_QUBITS..=MAX_GHZ_QUBITS).contains(&n) {
        return Err(Error::ResourceLimit(format!(
            "GHZ size must be in {MIN_GHZ_QUBITS}..={MAX_GHZ_QUBITS}, got {n}"
        )));
    }
    check_theta(theta)?;
    let mut c = rotated_plus(n, theta)?;
    let mut checks = Vec::new();
    for i in 0..n - 1 {
        measure_check(&mut c, &[i, i + 1], n)?;
        checks.push(0b11 << i);
    }
    let corrections: Vec<Vec<usize>> = (0..n - 1).map(|i| (0..=i).collect()).collect();
    for (slot, string) in corrections.iter().enumerate() {
        c.conditional_string(&[slot], Pauli::X, string)?;
    }
    Ok(ResourceCircuit {
        kind: ResourceKind::Ghz,
        circuit: c,
        num_data: n,
        ancilla: n,
        theta,
        checks,
        corrections,
    })
}

pub fn build_deformed_rsc_circuit(layout: &RscLayout, theta: f64) -> Result<ResourceCircuit> {
    let order: Vec<usize> = (0..layout.z_stabilizers().len()).collect();
    build_deformed_rsc_circuit_ordered(layout, theta, &order)
}

/// Same circuit with the Z checks measured in `order` (a permutation of the
/// check indices). Slot k holds check `order[k]`.
pub fn build_deformed_rsc_circuit_ordered(
    layout: &RscLayout,
    theta: f64,
    order: &[usize],
) -> Result<ResourceCircuit> {
    check_theta(theta)?;
    let nz = layout.z_stabilizers().len();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..nz).collect::<Vec<_>>() {
        return Err(Error::Shape(format!("{order:?} is not a permutation of 0..{nz}")));
    }
    let n = layout.num_qubits();
    let paths = correction_paths(layout)?;
    let mut c = rotated_plus(n, theta)?;
    let mut checks = Vec::with_capacity(nz);
    let mut corrections = Vec::with_capacity(nz);
    for &k in order {
        let stab = &layout.z_stabilizers()[k];
        measure_check(&mut c, &stab.qubits, n)?;
        checks.push(stab.mask());
        corrections.push(paths[k].clone());
    }
    for (slot, string) in corrections.iter().enumerate() {
        c.conditional_string(&[slot], Pauli::X, string)?;
    }
    Ok(ResourceCircuit {
        kind: ResourceKind::Rsc,
        circuit: c,
        num_data: n,
        ancilla: n,
        theta,
        checks,
        corrections,
    })
}

/// For each Z check, the X string that flips it alone: the shortest path to
/// the top boundary in the Z-check graph, ties broken by qubit index.
pub fn correction_paths(layout: &RscLayout) -> Result<Vec<Vec<usize>>> {
    let g = layout.dual_graph(StabilizerKind::Z)?;
    let top = g
        .boundary_node(Side::Top)
        .ok_or_else(|| Error::Internal("Z-check graph lacks a top boundary".into()))?;
    (0..g.num_checks())
        .map(|k| {
            let mut path = g
                .shortest_path(k, top)
                .ok_or_else(|| Error::Internal(format!("Z check {k} cannot reach the boundary")))?;
            path.sort_unstable();
            Ok(path)
        })
        .collect()
}

/// X strings repairing `syndrome` (bit k set = check k read −1).
pub fn correction_strings(layout: &RscLayout, syndrome: &[bool]) -> Result<Vec<Vec<usize>>> {
    let nz = layout.z_stabilizers().len();
    if syndrome.len() != nz {
        return Err(Error::Shape(format!("{}-bit syndrome for {nz} checks", syndrome.len())));
    }
    let paths = correction_paths(layout)?;
    Ok(syndrome
        .iter()
        .zip(paths)
        .filter(|(&bit, _)| bit)
        .map(|(_, p)| p)
        .collect())
}

/// Syndrome of an X error pattern: check k flips when it overlaps the pattern
/// on an odd number of qubits.
pub fn syndrome_of(layout: &RscLayout, flips: u64) -> Vec<bool> {
    layout
        .z_stabilizers()
        .iter()
        .map(|s| (s.mask() & flips).count_ones() % 2 == 1)
        .collect()
}

pub fn effective_signs(num_data: usize, corrections: &[Vec<usize>]) -> SignConfig {
    let mut signs = SignConfig::uniform(num_data);
    for string in corrections {
        for &q in string {
            signs.signs[q] = -signs.signs[q];
        }
    }
    signs
}

/// `Π_q e^{β s_q Z_q/2}` applied to the projection of `|+⟩^n` onto the +1
/// eigenspace of every check mask, normalized. With `ancilla` an extra |0⟩
/// qubit is appended, matching the circuit's register.
pub fn deformed_reference_state(
    num_data: usize,
    checks: &[u64],
    beta: f64,
    signs: &SignConfig,
    ancilla: bool,
) -> Result<StateVector> {
    if signs.signs.len() != num_data {
        return Err(Error::Shape(format!(
            "{} signs for {num_data} qubits",
            signs.signs.len()
        )));
    }
    let width = num_data + usize::from(ancilla);
    if width > crate::qsim::MAX_QUBITS {
        return Err(Error::ResourceLimit(format!("{width} qubits too wide for a reference state")));
    }
    let data_mask = (1usize << num_data) - 1;
    let amps = (0..1usize << width)
        .map(|i| {
            if i & !data_mask != 0 || checks.iter().any(|&m| (i as u64 & m).count_ones() % 2 == 1) {
                return Complex64::new(0.0, 0.0);
            }
            let exponent: f64 = signs
                .signs
                .iter()
                .enumerate()
                .map(|(q, &s)| if i >> q & 1 == 1 { -f64::from(s) } else { f64::from(s) })
                .sum();
            Complex64::new((beta * exponent / 2.0).exp(), 0.0)
        })
        .collect();
    let mut state = StateVector::from_amplitudes(amps)?;
    state.normalize()?;
    Ok(state)
}

/// One branch of a preparation circuit, with its induced signs.
#[derive(Debug, Clone)]
pub struct PreparedState<S = StateVector> {
    pub probability: f64,
    pub outcomes: Vec<bool>,
    pub corrections: Vec<Vec<usize>>,
    pub signs: SignConfig,
    pub state: S,
}

pub fn prepare_branches<S: QuantumState>(resource: &ResourceCircuit) -> Result<Vec<PreparedState<S>>> {
    let mut out = Vec::new();
    fold_branches(&resource.circuit, |probability, outcomes: &[bool], state: &S| {
        let corrections = resource.applied_corrections(outcomes);
        out.push(PreparedState {
            probability,
            outcomes: outcomes.to_vec(),
            signs: effective_signs(resource.num_data, &corrections),
            corrections,
            state: state.clone(),
        });
        Ok(())
    })?;
    Ok(out)
}
