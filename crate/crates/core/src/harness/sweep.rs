use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Estimator, ExperimentConfig, GameKind};
use super::play::{build_resource, estimate_pq_exact, play_classical_shots, play_shots};
use super::stats::{bootstrap_ci, Interval};
use crate::game::{classical_optimal_prob, promise_inputs};
use crate::lattice::{build_rsc_layout, general_loop_config};
use crate::prep::{build_deformed_rsc_circuit, theta_from_beta};
use crate::rbim::{collapse_transform, pq_ghz, pq_toric, surface_code_graph, EstimateMethod, Lattice, pq_on_graph};
use crate::seeds::{derive_seed, stream_rng};
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 13] = [
    "game",
    "size",
    "players",
    "beta",
    "theta",
    "estimator",
    "shots",
    "pq",
    "pq_err_lo",
    "pq_err_hi",
    "p_classical",
    "advantage",
    "seed",
];

/// One sweep point. `pq_err_lo` and `pq_err_hi` are the ends of the one-σ
/// interval; `shots` counts game rounds, or disorder samples for Ising rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub game: GameKind,
    pub size: usize,
    pub players: usize,
    pub beta: f64,
    pub theta: f64,
    pub estimator: Estimator,
    pub shots: usize,
    pub pq: f64,
    pub pq_err_lo: f64,
    pub pq_err_hi: f64,
    pub p_classical: f64,
    pub advantage: bool,
    pub seed: u64,
}

impl ResultRow {
    pub fn interval(&self) -> Interval {
        Interval {
            mean: self.pq,
            lo: self.pq_err_lo,
            hi: self.pq_err_hi,
        }
    }
}

fn clamp_unit(x: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&x) {
        return Err(Error::Numeric(format!("victory probability {x} outside [0, 1]")));
    }
    Ok(x.clamp(0.0, 1.0))
}

fn rbim_method(config: &ExperimentConfig) -> EstimateMethod {
    match config.estimator {
        Estimator::RbimMc => EstimateMethod::Metropolis(config.mc),
        _ => EstimateMethod::ExactThermal,
    }
}

/// Evaluates one `(size, β)` point of `config`.
pub fn evaluate_point(config: &ExperimentConfig, size: usize, beta: f64, seed: u64) -> Result<ResultRow> {
    let players = config.players;
    let p_classical = {
        let r = classical_optimal_prob(players)?;
        *r.numer() as f64 / *r.denom() as f64
    };
    let theta = theta_from_beta(beta)?;
    let n_inputs = promise_inputs(players)?.len();
    let (interval, shots) = match (config.game, config.estimator) {
        (GameKind::Classical, Estimator::Shots) => {
            let rec = play_classical_shots(players, config.shots * n_inputs, seed)?;
            let mut rng = stream_rng(seed, 1);
            (bootstrap_ci(&rec.all_wins(), config.bootstrap_resamples, &mut rng)?, rec.num_shots())
        }
        (GameKind::Classical, Estimator::ExactBranches) => (Interval::exact(p_classical), 0),
        (GameKind::Ghz | GameKind::Rsc, Estimator::Shots) => {
            let (resource, loops) = build_resource(config.game, size, players, theta)?;
            let rec = play_shots(&resource, &loops, config.shots, seed)?;
            let mut rng = stream_rng(seed, 1);
            (bootstrap_ci(&rec.all_wins(), config.bootstrap_resamples, &mut rng)?, rec.num_shots())
        }
        (GameKind::Ghz | GameKind::Rsc, Estimator::ExactBranches) => {
            let (resource, loops) = build_resource(config.game, size, players, theta)?;
            (Interval::exact(clamp_unit(estimate_pq_exact(&resource, &loops)?)?), 0)
        }
        (GameKind::Ghz, Estimator::RbimExact) => (Interval::exact(pq_ghz(beta, size)?), 0),
        (GameKind::Rsc, Estimator::RbimExact | Estimator::RbimMc) => {
            let layout = build_rsc_layout(size)?;
            let graph = surface_code_graph(&layout)?;
            let loops = general_loop_config(players, &layout)?;
            if loops.region != [graph.center()] {
                return Err(Error::Config(format!(
                    "the Ising path covers loops around one bulk check; {players} players use region {:?}",
                    loops.region
                )));
            }
            let method = match config.estimator {
                Estimator::RbimExact => EstimateMethod::Exact,
                _ => rbim_method(config),
            };
            let est = pq_on_graph(beta, graph, config.disorder_samples, method, seed)?;
            let n = if config.estimator == Estimator::RbimExact { 0 } else { est.sample_count };
            (Interval::symmetric(est.mean, est.standard_error), n)
        }
        (GameKind::Toric, Estimator::RbimExact | Estimator::RbimMc) => {
            let lattice = Lattice::square(size, config.boundary);
            let est = pq_toric(beta, &lattice, config.disorder_samples, rbim_method(config), seed)?;
            (Interval::symmetric(est.mean, est.standard_error), est.sample_count)
        }
        (game, est) => {
            return Err(Error::Config(format!("estimator {est} does not apply to game {game}")))
        }
    };
    Ok(ResultRow {
        game: config.game,
        size,
        players,
        beta,
        theta,
        estimator: config.estimator,
        shots,
        pq: interval.mean,
        pq_err_lo: interval.lo,
        pq_err_hi: interval.hi,
        p_classical,
        advantage: interval.lo > p_classical,
        seed,
    })
}

/// Seed for the `k`-th β of size `size`.
pub fn point_seed(master: u64, size: usize, k: usize) -> u64 {
    derive_seed(master, &[size as u64, k as u64])
}

/// Every `(size, β)` point of the config in order, then the CSV and plot
/// when paths are set.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let betas = config.beta_values()?;
    let mut rows = Vec::with_capacity(betas.len() * config.sizes.len());
    for &size in &config.sizes {
        for (k, &beta) in betas.iter().enumerate() {
            let row = evaluate_point(config, size, beta, point_seed(config.seed, size, k))?;
            log::info!(
                "{} size={} β={:.3} pq={:.6} [{:.6}, {:.6}]",
                row.game,
                size,
                beta,
                row.pq,
                row.pq_err_lo,
                row.pq_err_hi
            );
            rows.push(row);
        }
    }
    if let Some(path) = &config.out {
        write_csv(&rows, path)?;
    }
    if let Some(path) = &config.plot {
        super::plot::plot_rows(&rows, path)?;
    }
    Ok(rows)
}

/// Writes to a temporary file next to `path` and renames it into place.
fn atomic_csv(path: &Path, body: impl FnOnce(&mut csv::Writer<&mut fs::File>) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = csv::Writer::from_writer(tmp.as_file_mut());
        body(&mut w)?;
        w.flush()?;
    }
    tmp.as_file_mut().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// The header is written even when there are no rows.
pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    atomic_csv(path, |w| {
        if rows.is_empty() {
            w.write_record(CSV_HEADER)?;
        }
        for r in rows {
            w.serialize(r)?;
        }
        Ok(())
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| Ok(row?)).collect()
}

/// First downward crossing of `level`, by linear interpolation.
pub fn find_crossing(betas: &[f64], values: &[f64], level: f64) -> Option<f64> {
    betas
        .windows(2)
        .zip(values.windows(2))
        .find(|(_, v)| v[0] >= level && v[1] < level)
        .map(|(b, v)| b[0] + (v[0] - level) / (v[0] - v[1]) * (b[1] - b[0]))
}

/// A crossing with the one-σ spread propagated from the bracketing points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub size: usize,
    pub beta: f64,
    pub sigma: f64,
}

/// Downward crossing of `p_classical` for each size in `rows`.
pub fn advantage_loss(rows: &[ResultRow]) -> Vec<(usize, Option<Crossing>)> {
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.size).collect();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|size| {
            let pts: Vec<&ResultRow> = rows.iter().filter(|r| r.size == size).collect();
            let level = pts.first().map_or(0.75, |r| r.p_classical);
            let crossing = pts.windows(2).find(|w| w[0].pq >= level && w[1].pq < level).map(|w| {
                let (a, b) = (w[0], w[1]);
                let t = (a.pq - level) / (a.pq - b.pq);
                let slope = (a.pq - b.pq) / (b.beta - a.beta);
                let (sa, sb) = (a.interval().half_width(), b.interval().half_width());
                let spq = ((1.0 - t).powi(2) * sa * sa + t * t * sb * sb).sqrt();
                Crossing {
                    size,
                    beta: a.beta + t * (b.beta - a.beta),
                    sigma: spq / slope,
                }
            });
            (size, crossing)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub circuit: f64,
    pub rbim: f64,
    pub discrepancy: f64,
}

/// Circuit-path and Ising-path `p_q` for the three-team game on a distance-`d`
/// patch, both exact.
pub fn cross_validate(d: usize, beta: f64) -> Result<CrossValidation> {
    let layout = build_rsc_layout(d)?;
    let resource = build_deformed_rsc_circuit(&layout, theta_from_beta(beta)?)?;
    let loops = general_loop_config(3, &layout)?;
    let circuit = estimate_pq_exact(&resource, &loops)?;
    let rbim = pq_toric(beta, &Lattice::surface_code(d), 1, EstimateMethod::Exact, 0)?.mean;
    Ok(CrossValidation {
        circuit,
        rbim,
        discrepancy: (circuit - rbim).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapsePoint {
    pub n: usize,
    pub beta: f64,
    pub x: f64,
    pub y: f64,
    /// `exp(-x²/2)`.
    pub gaussian: f64,
}

/// The GHZ curves in the scaled coordinates `(β√N, 2p_q − 1)`.
pub fn collapse_points(sizes: &[usize], betas: &[f64]) -> Result<Vec<CollapsePoint>> {
    let mut out = Vec::new();
    for &n in sizes {
        for &beta in betas {
            let (x, y) = collapse_transform(beta, n, pq_ghz(beta, n)?)?;
            out.push(CollapsePoint {
                n,
                beta,
                x,
                y,
                gaussian: (-0.5 * x * x).exp(),
            });
        }
    }
    Ok(out)
}

/// Spread of the scaled GHZ curves across `sizes` at fixed `x = β√N`.
pub fn collapse_spread(x: f64, sizes: &[usize]) -> Result<f64> {
    let ys = sizes
        .iter()
        .map(|&n| {
            let beta = x / (n as f64).sqrt();
            Ok(collapse_transform(beta, n, pq_ghz(beta, n)?)?.1)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max = ys.iter().copied().fold(f64::MIN, f64::max);
    let min = ys.iter().copied().fold(f64::MAX, f64::min);
    Ok(max - min)
}

pub fn write_collapse_csv(points: &[CollapsePoint], path: &Path) -> Result<()> {
    atomic_csv(path, |w| {
        for p in points {
            w.serialize(p)?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_interpolation() {
        let b = [0.0, 0.5, 1.0];
        assert_eq!(find_crossing(&b, &[1.0, 0.8, 0.6], 0.75), Some(0.625));
        assert_eq!(find_crossing(&b, &[1.0, 0.9, 0.8], 0.75), None);
    }

    #[test]
    fn cross_validation_at_zero() {
        let cv = cross_validate(3, 0.0).unwrap();
        assert!(cv.discrepancy < 1e-10);
        assert!((cv.circuit - 1.0).abs() < 1e-10);
    }

    #[test]
    fn collapse_examples() {
        let pts = collapse_points(&[4, 9], &[0.0]).unwrap();
        assert!(pts.iter().all(|p| p.x == 0.0 && p.y == 1.0));
        let lhs = 0.2f64.cosh().recip().powi(16);
        assert!((lhs - (-16.0 * 0.02f64).exp()).abs() < 0.01);
    }
}
