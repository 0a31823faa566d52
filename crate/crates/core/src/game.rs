//! The P-player parity game.
//!
//! Players receive bits `x_i` with even total weight (the promise) and win when
//! the parity of their outputs equals `(Σ x_i / 2) mod 2`. Inputs are drawn
//! uniformly from the `2^(P-1)` promise-satisfying strings.
//!
//! The classical optimum is searched over deterministic local strategies only.
//! Shared randomness is a convex mixture of deterministic strategies, so it
//! cannot beat the best of them on a linear objective.

use num_rational::Ratio;

use crate::{Error, Result};

pub const MIN_PLAYERS: usize = 3;
/// Largest P for the exhaustive classical search (4^P strategies).
pub const MAX_BRUTE_FORCE_PLAYERS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameInstance {
    inputs: Vec<bool>,
}

impl GameInstance {
    pub fn new(inputs: Vec<bool>) -> Result<Self> {
        if !check_promise(&inputs)? {
            return Err(Error::InvalidInstance(format!(
                "input {} violates the even-parity promise",
                bits_to_string(&inputs)
            )));
        }
        Ok(Self { inputs })
    }

    pub fn num_players(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[bool] {
        &self.inputs
    }
}

/// Deterministic local responses: `tables[i][x]` is player i's output on input x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalStrategy {
    tables: Vec<[bool; 2]>,
}

impl ClassicalStrategy {
    pub fn new(tables: Vec<[bool; 2]>) -> Result<Self> {
        if tables.len() < MIN_PLAYERS {
            return Err(Error::InvalidInstance(format!(
                "strategy needs at least {MIN_PLAYERS} players, got {}",
                tables.len()
            )));
        }
        Ok(Self { tables })
    }

    pub fn num_players(&self) -> usize {
        self.tables.len()
    }

    pub fn tables(&self) -> &[[bool; 2]] {
        &self.tables
    }

    pub fn respond(&self, player: usize, input: bool) -> bool {
        self.tables[player][input as usize]
    }

    fn from_code(code: u64, players: usize) -> Self {
        let tables = (0..players)
            .map(|i| {
                let t = (code >> (2 * i)) & 3;
                [t & 1 == 1, t & 2 == 2]
            })
            .collect();
        Self { tables }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameOutcome {
    pub outputs: Vec<bool>,
    pub won: bool,
}

pub fn check_promise(x: &[bool]) -> Result<bool> {
    if x.len() < MIN_PLAYERS {
        return Err(Error::InvalidInstance(format!(
            "need at least {MIN_PLAYERS} players, got {}",
            x.len()
        )));
    }
    Ok(x.iter().filter(|&&b| b).count() % 2 == 0)
}

pub fn winning_condition(x: &[bool], y: &[bool]) -> Result<bool> {
    if !check_promise(x)? {
        return Err(Error::InvalidInstance(format!(
            "input {} violates the even-parity promise",
            bits_to_string(x)
        )));
    }
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "{} inputs but {} outputs",
            x.len(),
            y.len()
        )));
    }
    let half = x.iter().filter(|&&b| b).count() / 2;
    let out = y.iter().filter(|&&b| b).count();
    Ok(out % 2 == half % 2)
}

/// `1/2 + 1/2^ceil(P/2)`.
pub fn classical_optimal_prob(players: usize) -> Result<Ratio<u64>> {
    if players < MIN_PLAYERS {
        return Err(Error::InvalidInstance(format!(
            "need at least {MIN_PLAYERS} players, got {players}"
        )));
    }
    if players > 120 {
        return Err(Error::ResourceLimit(format!(
            "P={players} overflows the exact rational"
        )));
    }
    let denom = 1u64 << players.div_ceil(2);
    Ok(Ratio::new(1, 2) + Ratio::new(1, denom))
}

/// All promise-satisfying inputs, in increasing order of their bit-mask value
/// (player i is bit i).
pub fn promise_inputs(players: usize) -> Result<Vec<Vec<bool>>> {
    if players < MIN_PLAYERS {
        return Err(Error::InvalidInstance(format!(
            "need at least {MIN_PLAYERS} players, got {players}"
        )));
    }
    if players > 24 {
        return Err(Error::ResourceLimit(format!(
            "2^{} promise inputs is too many to list",
            players - 1
        )));
    }
    Ok(promise_masks(players)
        .map(|m| mask_to_bits(m, players))
        .collect())
}

fn promise_masks(players: usize) -> impl Iterator<Item = u64> {
    (0u64..1 << players).filter(|m| m.count_ones() % 2 == 0)
}

fn mask_to_bits(mask: u64, players: usize) -> Vec<bool> {
    (0..players).map(|i| mask >> i & 1 == 1).collect()
}

/// Exhaustive search over all 4^P deterministic strategies. Returns the first
/// maximizer in enumeration order and its exact win probability under the
/// uniform promise distribution.
pub fn brute_force_classical(players: usize) -> Result<(ClassicalStrategy, Ratio<u64>)> {
    if !(MIN_PLAYERS..=MAX_BRUTE_FORCE_PLAYERS).contains(&players) {
        return Err(Error::ResourceLimit(format!(
            "brute-force search supports {MIN_PLAYERS}..={MAX_BRUTE_FORCE_PLAYERS} players, got {players}"
        )));
    }
    let inputs: Vec<(u64, u32)> = promise_masks(players)
        .map(|m| (m, (m.count_ones() / 2) & 1))
        .collect();
    let n_inputs = inputs.len() as u64;

    let mut best = (0u64, 0u64);
    for code in 0u64..1 << (2 * players) {
        // Split the per-player 2-bit tables into f(0) and f(1) masks.
        let (mut on_zero, mut on_one) = (0u64, 0u64);
        for i in 0..players {
            let t = code >> (2 * i);
            on_zero |= (t & 1) << i;
            on_one |= ((t >> 1) & 1) << i;
        }
        let wins = inputs
            .iter()
            .filter(|&&(x, target)| {
                let parity = ((on_zero & !x).count_ones() + (on_one & x).count_ones()) & 1;
                parity == target
            })
            .count() as u64;
        if wins > best.1 {
            best = (code, wins);
        }
    }
    Ok((
        ClassicalStrategy::from_code(best.0, players),
        Ratio::new(best.1, n_inputs),
    ))
}

/// `½[1 + 2^-(P-1) <M_P>]`.
pub fn victory_from_mermin(mermin_expectation: f64, players: usize) -> Result<f64> {
    if players < MIN_PLAYERS {
        return Err(Error::InvalidInstance(format!(
            "need at least {MIN_PLAYERS} players, got {players}"
        )));
    }
    if !mermin_expectation.is_finite() {
        return Err(Error::Domain(format!(
            "Mermin expectation {mermin_expectation} is not finite"
        )));
    }
    let bound = 2f64.powi(players as i32 - 1);
    if mermin_expectation.abs() > bound * (1.0 + 1e-9) {
        return Err(Error::Domain(format!(
            "|<M_{players}>| = {} exceeds the algebraic bound {bound}",
            mermin_expectation.abs()
        )));
    }
    Ok((0.5 * (1.0 + mermin_expectation / bound)).clamp(0.0, 1.0))
}

pub fn play_classical(strategy: &ClassicalStrategy, instance: &GameInstance) -> Result<GameOutcome> {
    if strategy.num_players() != instance.num_players() {
        return Err(Error::Shape(format!(
            "strategy for {} players used on a {}-player instance",
            strategy.num_players(),
            instance.num_players()
        )));
    }
    let outputs: Vec<bool> = instance
        .inputs()
        .iter()
        .enumerate()
        .map(|(i, &x)| strategy.respond(i, x))
        .collect();
    let won = winning_condition(instance.inputs(), &outputs)?;
    Ok(GameOutcome { outputs, won })
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
