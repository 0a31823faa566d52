use serde::{Deserialize, Serialize};

use super::layout::RscLayout;
use super::loops::LoopConfig;
use crate::game::promise_inputs;
use crate::qsim::PauliString;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MerminTerm {
    pub inputs: Vec<bool>,
    /// +1 iff `Σx ≡ 0 (mod 4)`; the players win on this input when the
    /// product of their outcomes equals `sign`.
    pub sign: i8,
    pub operator: PauliString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MerminTermSet {
    pub order: usize,
    pub terms: Vec<MerminTerm>,
}

impl MerminTermSet {
    /// `⟨M⟩ = Σ_x sign_x ⟨T_x⟩` given a per-term expectation oracle.
    pub fn evaluate(&self, mut expectation: impl FnMut(&PauliString) -> Result<f64>) -> Result<f64> {
        self.terms.iter().try_fold(0.0, |acc, t| {
            Ok(acc + f64::from(t.sign) * expectation(&t.operator)?)
        })
    }
}

pub fn input_sign(inputs: &[bool]) -> i8 {
    let weight = inputs.iter().filter(|&&b| b).count();
    if weight % 4 == 0 {
        1
    } else {
        -1
    }
}

/// One term per promise input, in the order of [`promise_inputs`].
pub fn mermin_terms(config: &LoopConfig) -> Result<MerminTermSet> {
    let p = config.num_teams();
    let terms = promise_inputs(p)?
        .into_iter()
        .map(|x| {
            Ok(MerminTerm {
                sign: input_sign(&x),
                operator: config.term_operator(&x)?,
                inputs: x,
            })
        })
        .collect::<Result<_>>()?;
    Ok(MerminTermSet { order: p, terms })
}

pub fn symplectic_anticommute(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.anticommutes_with(b)
}

/// Row-reduced GF(2) span over qubit masks.
struct Span {
    rows: Vec<u64>,
}

impl Span {
    fn new(generators: impl IntoIterator<Item = u64>) -> Self {
        let mut span = Self { rows: Vec::new() };
        for g in generators {
            let r = span.reduce(g);
            if r != 0 {
                span.rows.push(r);
                span.rows.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        span
    }

    fn reduce(&self, mut v: u64) -> u64 {
        for &r in &self.rows {
            let lead = 63 - r.leading_zeros();
            if v >> lead & 1 == 1 {
                v ^= r;
            }
        }
        v
    }

    fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }
}

/// `⟨+̄|op|+̄⟩` on the undeformed code state, computed algebraically: the
/// state is stabilized by every check and by X̄, so a Pauli has expectation
/// `i^(#Y)` (times its sign) when its X part lies in ⟨X checks, X̄⟩ and its
/// Z part in ⟨Z checks⟩, and 0 otherwise.
pub fn ideal_expectation(layout: &RscLayout, op: &PauliString) -> Result<f64> {
    if op.num_qubits() != layout.num_qubits() {
        return Err(Error::Shape(format!(
            "{}-qubit operator on a {}-qubit patch",
            op.num_qubits(),
            layout.num_qubits()
        )));
    }
    let xs = Span::new(
        layout
            .x_stabilizers()
            .iter()
            .map(|s| s.mask())
            .chain(std::iter::once(layout.logical_x().x_mask())),
    );
    let zs = Span::new(layout.z_stabilizers().iter().map(|s| s.mask()));
    let pop = op.to_op()?;
    if !(xs.contains(pop.x) && zs.contains(pop.z)) {
        return Ok(0.0);
    }
    match pop.phase {
        0 => Ok(1.0),
        2 => Ok(-1.0),
        _ => Err(Error::Internal(format!("non-Hermitian stabilizer element {op}"))),
    }
}
