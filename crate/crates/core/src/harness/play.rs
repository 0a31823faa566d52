use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::game::{brute_force_classical, play_classical, promise_inputs, winning_condition, GameInstance};
use crate::lattice::{build_rsc_layout, general_loop_config, mermin_terms, LoopConfig};
use crate::prep::{build_deformed_ghz_circuit, build_deformed_rsc_circuit, ResourceCircuit};
use crate::qsim::{fold_branches, run_circuit, Basis, QuantumState, SparseState};
use crate::seeds::{derive_seed, stream_rng};
use crate::{Error, Result};

/// Largest total number of stored amplitudes in a branch table before shot
/// sampling falls back to rerunning the circuit every shot.
pub const BRANCH_TABLE_BUDGET: usize = 1 << 22;

/// Per-input win indicators, inputs in [`promise_inputs`] order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub inputs: Vec<Vec<bool>>,
    pub wins: Vec<Vec<bool>>,
}

impl ShotRecord {
    pub fn all_wins(&self) -> Vec<bool> {
        self.wins.concat()
    }

    pub fn num_shots(&self) -> usize {
        self.wins.iter().map(Vec::len).sum()
    }

    pub fn win_rate(&self) -> f64 {
        let n = self.num_shots();
        if n == 0 {
            return 0.0;
        }
        self.wins.iter().flatten().filter(|&&w| w).count() as f64 / n as f64
    }

    pub fn input_win_rate(&self, input: usize) -> f64 {
        let w = &self.wins[input];
        w.iter().filter(|&&x| x).count() as f64 / w.len().max(1) as f64
    }
}

/// Deformed GHZ or surface-code resource together with its team layout.
pub fn build_resource(
    game: super::GameKind,
    size: usize,
    players: usize,
    theta: f64,
) -> Result<(ResourceCircuit, LoopConfig)> {
    match game {
        super::GameKind::Ghz => Ok((build_deformed_ghz_circuit(size, theta)?, LoopConfig::ghz(size, players)?)),
        super::GameKind::Rsc => {
            let layout = build_rsc_layout(size)?;
            Ok((build_deformed_rsc_circuit(&layout, theta)?, general_loop_config(players, &layout)?))
        }
        other => Err(Error::Config(format!("game {other} has no resource circuit"))),
    }
}

fn check_widths(resource: &ResourceCircuit, loops: &LoopConfig) -> Result<()> {
    if loops.num_qubits != resource.num_data {
        return Err(Error::Shape(format!(
            "loop configuration on {} qubits, resource has {} data qubits",
            loops.num_qubits, resource.num_data
        )));
    }
    Ok(())
}

/// Born-averaged `⟨T_x⟩` for every promise input, in [`promise_inputs`] order.
pub fn term_expectations(resource: &ResourceCircuit, loops: &LoopConfig) -> Result<Vec<f64>> {
    term_expectations_with::<SparseState>(resource, loops)
}

pub fn term_expectations_with<S: QuantumState>(resource: &ResourceCircuit, loops: &LoopConfig) -> Result<Vec<f64>> {
    check_widths(resource, loops)?;
    let width = resource.circuit.num_qubits();
    let ops = mermin_terms(loops)?
        .terms
        .iter()
        .map(|t| t.operator.padded(width))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = vec![0.0; ops.len()];
    let mut total = 0.0;
    fold_branches(&resource.circuit, |p, _, state: &S| {
        total += p;
        for (a, op) in acc.iter_mut().zip(&ops) {
            *a += p * state.pauli_expectation(op)?;
        }
        Ok(())
    })?;
    Ok(acc.into_iter().map(|a| a / total).collect())
}

/// `p_q = ½[1 + 2^-(P-1) Σ_x sign_x ⟨T_x⟩]`, averaged over all preparation
/// branches with their Born weights.
pub fn estimate_pq_exact(resource: &ResourceCircuit, loops: &LoopConfig) -> Result<f64> {
    let terms = mermin_terms(loops)?;
    let values = term_expectations(resource, loops)?;
    let m: f64 = terms.terms.iter().zip(&values).map(|(t, v)| f64::from(t.sign) * v).sum();
    Ok(0.5 * (1.0 + m / terms.terms.len() as f64))
}

/// Preparation outcomes sampled either from a precomputed branch table or by
/// rerunning the circuit.
enum Sampler {
    Table { cumulative: Vec<f64>, states: Vec<SparseState> },
    Rerun,
}

impl Sampler {
    fn new(resource: &ResourceCircuit) -> Result<Self> {
        let mut cumulative = Vec::new();
        let mut states = Vec::new();
        let mut stored = 0usize;
        let mut acc = 0.0;
        let built = fold_branches(&resource.circuit, |p, _, state: &SparseState| {
            stored += state.len();
            if stored > BRANCH_TABLE_BUDGET {
                return Err(Error::ResourceLimit("branch table too large".into()));
            }
            acc += p;
            cumulative.push(acc);
            states.push(state.clone());
            Ok(())
        });
        match built {
            Ok(()) => Ok(Sampler::Table { cumulative, states }),
            Err(Error::ResourceLimit(_)) => Ok(Sampler::Rerun),
            Err(e) => Err(e),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, resource: &ResourceCircuit, rng: &mut R) -> Result<SparseState> {
        match self {
            Sampler::Table { cumulative, states } => {
                let u = rng.gen::<f64>() * cumulative.last().copied().unwrap_or(1.0);
                let k = cumulative.partition_point(|&c| c <= u).min(states.len() - 1);
                Ok(states[k].clone())
            }
            Sampler::Rerun => Ok(run_circuit::<SparseState, _>(&resource.circuit, rng)?.0),
        }
    }
}

/// Measures every player's qubit for one round and returns the team outputs.
/// Team `i` measures its X loop on input 0; on input 1 the mixed qubit in Y,
/// the rest of the X loop in X and the rest of the Z loop in Z. Each team
/// answers the parity of its outcomes.
pub fn measure_teams<S: QuantumState, R: Rng + ?Sized>(
    state: &mut S,
    loops: &LoopConfig,
    inputs: &[bool],
    rng: &mut R,
) -> Result<Vec<bool>> {
    if inputs.len() != loops.num_teams() {
        return Err(Error::Shape(format!("{} inputs for {} teams", inputs.len(), loops.num_teams())));
    }
    loops
        .teams
        .iter()
        .zip(inputs)
        .map(|(team, &x)| {
            let mut y = false;
            for &q in &team.x_support {
                let basis = if x && q == team.mixed { Basis::Y } else { Basis::X };
                y ^= state.measure(q, basis, rng)?;
            }
            if x {
                for &q in team.z_support.iter().filter(|&&q| q != team.mixed) {
                    y ^= state.measure(q, Basis::Z, rng)?;
                }
            }
            Ok(y)
        })
        .collect()
}

/// Plays `shots_per_input` rounds for each promise input. Shot `k` of input
/// `i` draws from its own stream derived from `(seed, i, k)`, so the record
/// does not depend on thread scheduling.
pub fn play_shots(
    resource: &ResourceCircuit,
    loops: &LoopConfig,
    shots_per_input: usize,
    seed: u64,
) -> Result<ShotRecord> {
    check_widths(resource, loops)?;
    let inputs = promise_inputs(loops.num_teams())?;
    let sampler = Sampler::new(resource)?;
    let wins = inputs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            (0..shots_per_input)
                .into_par_iter()
                .map(|k| {
                    let mut rng = stream_rng(derive_seed(seed, &[i as u64, k as u64]), 0);
                    let mut state = sampler.draw(resource, &mut rng)?;
                    let y = measure_teams(&mut state, loops, x, &mut rng)?;
                    winning_condition(x, &y)
                })
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<_>>()?;
    Ok(ShotRecord { inputs, wins })
}

/// The optimal deterministic strategy against uniformly drawn promise inputs.
pub fn play_classical_shots(players: usize, shots: usize, seed: u64) -> Result<ShotRecord> {
    let (strategy, _) = brute_force_classical(players)?;
    let inputs = promise_inputs(players)?;
    let mut wins = vec![Vec::new(); inputs.len()];
    let draws = (0..shots)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(derive_seed(seed, &[k as u64]), 0);
            let i = rng.gen_range(0..inputs.len());
            let out = play_classical(&strategy, &GameInstance::new(inputs[i].clone())?)?;
            Ok((i, out.won))
        })
        .collect::<Result<Vec<_>>>()?;
    for (i, w) in draws {
        wins[i].push(w);
    }
    Ok(ShotRecord { inputs, wins })
}
