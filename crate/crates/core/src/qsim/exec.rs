use rand::Rng;

use super::circuit::{Circuit, Instruction};
use super::state::{QuantumState, StateVector};
use crate::{Error, Result};

pub const MAX_BRANCH_MEASUREMENTS: usize = 16;

/// Branches whose total probability falls to or below this are not explored.
pub const BRANCH_CUTOFF: f64 = 1e-15;

#[derive(Debug, Clone)]
pub struct Branch<S = StateVector> {
    pub probability: f64,
    pub outcomes: Vec<bool>,
    pub state: S,
}

fn conditional_fires(slots: &[usize], record: &[bool]) -> bool {
    slots.iter().filter(|&&s| record[s]).count() % 2 == 1
}

fn apply_unitary<S: QuantumState>(state: &mut S, inst: &Instruction, record: &[bool]) -> Result<()> {
    match inst {
        Instruction::Gate { kind, targets } => state.apply_gate(*kind, targets),
        Instruction::Conditional { slots, pauli } => {
            if conditional_fires(slots, record) {
                state.apply_pauli(pauli)?;
            }
            Ok(())
        }
        Instruction::Measure { .. } => Err(Error::Internal("measurement is not unitary".into())),
    }
}

/// Samples one trajectory. Returns the final state and the outcome record.
pub fn run_circuit<S, R>(circuit: &Circuit, rng: &mut R) -> Result<(S, Vec<bool>)>
where
    S: QuantumState,
    R: Rng + ?Sized,
{
    circuit.validate()?;
    let mut state = S::from_labels(circuit.init())?;
    let mut record = Vec::with_capacity(circuit.num_measurements());
    for inst in circuit.instructions() {
        match inst {
            Instruction::Measure { qubit, basis, .. } => {
                record.push(state.measure(*qubit, *basis, rng)?);
            }
            other => apply_unitary(&mut state, other, &record)?,
        }
    }
    Ok((state, record))
}

/// Depth-first walk over every measurement outcome, outcome 0 first. The
/// visitor sees each surviving leaf once with its Born probability.
pub fn fold_branches<S, F>(circuit: &Circuit, mut visit: F) -> Result<()>
where
    S: QuantumState,
    F: FnMut(f64, &[bool], &S) -> Result<()>,
{
    circuit.validate()?;
    let m = circuit.num_measurements();
    if m > MAX_BRANCH_MEASUREMENTS {
        return Err(Error::ResourceLimit(format!(
            "{m} measurements exceed the branch-enumeration cap of {MAX_BRANCH_MEASUREMENTS}"
        )));
    }
    let state = S::from_labels(circuit.init())?;
    let mut record = Vec::with_capacity(m);
    walk(circuit.instructions(), state, 1.0, &mut record, &mut visit)
}

fn walk<S, F>(
    insts: &[Instruction],
    mut state: S,
    prob: f64,
    record: &mut Vec<bool>,
    visit: &mut F,
) -> Result<()>
where
    S: QuantumState,
    F: FnMut(f64, &[bool], &S) -> Result<()>,
{
    for (pc, inst) in insts.iter().enumerate() {
        let Instruction::Measure { qubit, basis, .. } = inst else {
            apply_unitary(&mut state, inst, record)?;
            continue;
        };
        let p0 = state.outcome_probability(*qubit, *basis)?;
        let viable: Vec<(bool, f64)> = [(false, p0), (true, 1.0 - p0)]
            .into_iter()
            .filter(|&(_, p)| prob * p > BRANCH_CUTOFF)
            .collect();
        let last = viable.len().saturating_sub(1);
        let mut state = Some(state);
        for (k, &(outcome, _)) in viable.iter().enumerate() {
            let mut child = if k == last {
                state.take().expect("state consumed once")
            } else {
                state.as_ref().expect("state present").clone()
            };
            let p = child.project(*qubit, *basis, outcome)?;
            record.push(outcome);
            let result = walk(&insts[pc + 1..], child, prob * p, record, visit);
            record.pop();
            result?;
        }
        return Ok(());
    }
    visit(prob, record, &state)
}

pub fn enumerate_branches<S: QuantumState>(circuit: &Circuit) -> Result<Vec<Branch<S>>> {
    let mut out = Vec::new();
    fold_branches(circuit, |probability, outcomes: &[bool], state: &S| {
        out.push(Branch {
            probability,
            outcomes: outcomes.to_vec(),
            state: state.clone(),
        });
        Ok(())
    })?;
    Ok(out)
}
