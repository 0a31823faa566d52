use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::pauli::{Pauli, PauliString};
use super::state::{check_targets, labels_to_string, parse_labels, Basis, GateKind, Label};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Gate {
        kind: GateKind,
        targets: Vec<usize>,
    },
    /// Writes the outcome to record slot `slot`; slots are filled in order.
    Measure {
        qubit: usize,
        basis: Basis,
        slot: usize,
    },
    /// Applies `pauli` when the XOR of the listed record slots is 1.
    Conditional {
        slots: Vec<usize>,
        pauli: PauliString,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    init: Vec<Label>,
    instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(init: Vec<Label>) -> Result<Self> {
        if init.is_empty() {
            return Err(Error::Validation("circuit needs at least one qubit".into()));
        }
        Ok(Self {
            init,
            instructions: Vec::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.init.len()
    }

    pub fn init(&self) -> &[Label] {
        &self.init
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn num_measurements(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Measure { .. }))
            .count()
    }

    pub fn gate(&mut self, kind: GateKind, targets: &[usize]) -> Result<&mut Self> {
        check_targets(self.num_qubits(), kind, targets)
            .map_err(|e| Error::Validation(e.to_string()))?;
        self.instructions.push(Instruction::Gate {
            kind,
            targets: targets.to_vec(),
        });
        Ok(self)
    }

    /// Appends a measurement and returns its record slot.
    pub fn measure(&mut self, qubit: usize, basis: Basis) -> Result<usize> {
        if qubit >= self.num_qubits() {
            return Err(Error::Validation(format!("measured qubit {qubit} out of range")));
        }
        let slot = self.num_measurements();
        self.instructions.push(Instruction::Measure { qubit, basis, slot });
        Ok(slot)
    }

    pub fn conditional(&mut self, slots: &[usize], pauli: PauliString) -> Result<&mut Self> {
        let written = self.num_measurements();
        let inst = Instruction::Conditional {
            slots: slots.to_vec(),
            pauli,
        };
        check_conditional(&inst, self.num_qubits(), written)?;
        self.instructions.push(inst);
        Ok(self)
    }

    /// Conditional single-letter Paulis on a set of qubits.
    pub fn conditional_string(
        &mut self,
        slots: &[usize],
        letter: Pauli,
        qubits: &[usize],
    ) -> Result<&mut Self> {
        let pauli = PauliString::uniform(self.num_qubits(), letter, qubits)
            .map_err(|e| Error::Validation(e.to_string()))?;
        self.conditional(slots, pauli)
    }

    /// Checks every structural invariant; used on parsed circuits.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits();
        let mut written = 0;
        for inst in &self.instructions {
            match inst {
                Instruction::Gate { kind, targets } => check_targets(n, *kind, targets)
                    .map_err(|e| Error::Validation(e.to_string()))?,
                Instruction::Measure { qubit, slot, .. } => {
                    if *qubit >= n {
                        return Err(Error::Validation(format!("measured qubit {qubit} out of range")));
                    }
                    if *slot != written {
                        return Err(Error::Validation(format!(
                            "measurement writes slot {slot}, expected {written}"
                        )));
                    }
                    written += 1;
                }
                Instruction::Conditional { .. } => check_conditional(inst, n, written)?,
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn check_conditional(inst: &Instruction, num_qubits: usize, written: usize) -> Result<()> {
    let Instruction::Conditional { slots, pauli } = inst else {
        return Ok(());
    };
    if slots.is_empty() {
        return Err(Error::Validation("condition references no slots".into()));
    }
    if let Some(s) = slots.iter().find(|&&s| s >= written) {
        return Err(Error::Validation(format!(
            "condition reads slot {s} before it is written"
        )));
    }
    if pauli.num_qubits() != num_qubits {
        return Err(Error::Validation(format!(
            "{}-qubit correction in a {num_qubits}-qubit circuit",
            pauli.num_qubits()
        )));
    }
    Ok(())
}

fn join(items: impl IntoIterator<Item = String>) -> String {
    let v: Vec<String> = items.into_iter().collect();
    if v.is_empty() {
        "-".into()
    } else {
        v.join(",")
    }
}

/// Line format: `init <labels>` then one `<name> <angle|-> <targets> <slots|->`
/// per instruction. Corrections list their Paulis as `X2,Z5`.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "init {}", labels_to_string(&self.init))?;
        for inst in &self.instructions {
            let line = match inst {
                Instruction::Gate { kind, targets } => {
                    let angle = kind.angle().map_or("-".to_string(), |t| format!("{t:?}"));
                    format!(
                        "{} {angle} {} -",
                        kind.name(),
                        join(targets.iter().map(|t| t.to_string()))
                    )
                }
                Instruction::Measure { qubit, basis, slot } => {
                    format!("m{} - {qubit} {slot}", basis.letter())
                }
                Instruction::Conditional { slots, pauli } => {
                    let mut ops = String::new();
                    if pauli.phase() < 0 {
                        ops.push('-');
                    }
                    let body = join(pauli.support().into_iter().map(|q| {
                        let mut s = String::new();
                        let _ = write!(s, "{:?}{q}", pauli.letter(q));
                        s
                    }));
                    ops.push_str(&body);
                    format!("pauli - {ops} {}", join(slots.iter().map(|s| s.to_string())))
                }
            };
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn parse_list(field: &str, line: usize) -> Result<Vec<usize>> {
    if field == "-" {
        return Ok(Vec::new());
    }
    field
        .split(',')
        .map(|t| {
            t.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad index {t:?}"),
            })
        })
        .collect()
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut circuit: Option<Circuit> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line, msg };
            let fields: Vec<&str> = content.split_whitespace().collect();
            let Some(c) = circuit.as_mut() else {
                match fields.as_slice() {
                    ["init", labels] => {
                        let labels = parse_labels(labels).map_err(|e| perr(e.to_string()))?;
                        circuit = Some(Circuit::new(labels).map_err(|e| perr(e.to_string()))?);
                        continue;
                    }
                    _ => return Err(perr("first instruction must be `init <labels>`".into())),
                }
            };
            let [name, angle, targets, slots] = fields.as_slice() else {
                return Err(perr(format!("expected 4 fields, got {}", fields.len())));
            };
            let n = c.num_qubits();
            let inst = match *name {
                "mx" | "my" | "mz" => {
                    let basis = match *name {
                        "mx" => Basis::X,
                        "my" => Basis::Y,
                        _ => Basis::Z,
                    };
                    let (q, s) = (parse_list(targets, line)?, parse_list(slots, line)?);
                    if q.len() != 1 || s.len() != 1 || *angle != "-" {
                        return Err(perr("measurement takes `- <qubit> <slot>`".into()));
                    }
                    Instruction::Measure {
                        qubit: q[0],
                        basis,
                        slot: s[0],
                    }
                }
                "pauli" => {
                    let (negative, body) = match targets.strip_prefix('-') {
                        Some(rest) if !rest.is_empty() => (true, rest),
                        _ => (false, *targets),
                    };
                    let mut entries = Vec::new();
                    for item in body.split(',') {
                        let letter = match item.chars().next() {
                            Some('X') => Pauli::X,
                            Some('Y') => Pauli::Y,
                            Some('Z') => Pauli::Z,
                            _ => return Err(perr(format!("bad Pauli factor {item:?}"))),
                        };
                        let q: usize = item[1..]
                            .parse()
                            .map_err(|_| perr(format!("bad Pauli factor {item:?}")))?;
                        entries.push((q, letter));
                    }
                    let mut pauli = PauliString::from_sparse(n, entries)
                        .map_err(|e| perr(e.to_string()))?;
                    if negative {
                        pauli = pauli.negated();
                    }
                    Instruction::Conditional {
                        slots: parse_list(slots, line)?,
                        pauli,
                    }
                }
                gate => {
                    let angle = match *angle {
                        "-" => None,
                        a => Some(a.parse::<f64>().map_err(|_| perr(format!("bad angle {a:?}")))?),
                    };
                    if *slots != "-" {
                        return Err(perr("gates take no slots".into()));
                    }
                    Instruction::Gate {
                        kind: GateKind::from_name(gate, angle).map_err(|e| perr(e.to_string()))?,
                        targets: parse_list(targets, line)?,
                    }
                }
            };
            c.instructions.push(inst);
        }
        let circuit = circuit.ok_or(Error::Parse {
            line: 0,
            msg: "empty circuit text".into(),
        })?;
        circuit.validate()?;
        Ok(circuit)
    }
}
