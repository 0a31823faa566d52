//! Random-bond Ising model on the Nishimori line.
//!
//! A deformed code state with signs `s` has amplitudes `∝ e^{β/2 Σ s σσ'}`
//! over spin configurations, so its plaquette expectation is the thermal
//! average of `exp(-β Σ_{b ∋ p} σ s σ')` at inverse temperature β, and the
//! measurement record draws `s` from `P(s = +1) = 1/(1 + e^{-2β})`.

mod lattice;
mod metropolis;

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seeds::stream_rng;
use crate::{Error, Result};

pub use lattice::{surface_code_graph, BondGraph, Boundary, Lattice};
pub use metropolis::{metropolis_local_weight, MetropolisParams};

/// Largest spin count for exhaustive thermal sums.
pub const MAX_EXACT_SPINS: usize = 25;
/// Largest bond count for exhaustive disorder sums.
pub const MAX_EXACT_BONDS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct RbimInstance {
    graph: Arc<BondGraph>,
    signs: Vec<i8>,
    beta: f64,
}

impl RbimInstance {
    pub fn new(graph: Arc<BondGraph>, signs: Vec<i8>, beta: f64) -> Result<Self> {
        if signs.len() != graph.num_bonds() {
            return Err(Error::Shape(format!(
                "{} signs for {} bonds",
                signs.len(),
                graph.num_bonds()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("bond signs must be ±1".into()));
        }
        check_beta(beta)?;
        Ok(Self { graph, signs, beta })
    }

    pub fn graph(&self) -> &BondGraph {
        &self.graph
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || beta.is_infinite() {
        return Err(Error::Domain(format!("β must be finite and ≥ 0, got {beta}")));
    }
    Ok(())
}

pub fn nishimori_plus_probability(beta: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * beta).exp())
}

pub fn sample_nishimori_signs<R: Rng + ?Sized>(beta: f64, num_bonds: usize, rng: &mut R) -> Result<Vec<i8>> {
    check_beta(beta)?;
    let p = nishimori_plus_probability(beta);
    Ok((0..num_bonds)
        .map(|_| if rng.gen::<f64>() < p { 1 } else { -1 })
        .collect())
}

/// Reproducible disorder: realization `index` depends only on `(seed, index)`.
/// The same uniforms are reused at every β, so larger β only removes
/// negative bonds.
#[derive(Debug, Clone)]
pub struct DisorderEnsemble {
    pub graph: Arc<BondGraph>,
    pub seed: u64,
    pub count: usize,
}

impl DisorderEnsemble {
    pub fn new(graph: BondGraph, seed: u64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Domain("need at least one disorder realization".into()));
        }
        Ok(Self {
            graph: Arc::new(graph),
            seed,
            count,
        })
    }

    pub fn realization(&self, index: usize, beta: f64) -> Result<RbimInstance> {
        let mut rng = stream_rng(self.seed, index as u64);
        let signs = sample_nishimori_signs(beta, self.graph.num_bonds(), &mut rng)?;
        RbimInstance::new(Arc::clone(&self.graph), signs, beta)
    }

    /// Thermal-stream seed for realization `index`, disjoint from the
    /// disorder stream.
    pub fn thermal_seed(&self, index: usize) -> u64 {
        crate::seeds::derive_seed(self.seed, &[0x7468_6572_6d, index as u64])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodTag {
    Exact,
    ExactThermal,
    Metropolis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub mean: f64,
    pub standard_error: f64,
    pub sample_count: usize,
    pub method: MethodTag,
}

/// How to evaluate the disorder-averaged victory probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateMethod {
    /// Exhaustive over both spins and bond signs (each sign pattern weighted
    /// by its Nishimori probability). No statistical error.
    Exact,
    /// Exhaustive over spins, sampled disorder.
    ExactThermal,
    /// Metropolis over spins, sampled disorder.
    Metropolis(MetropolisParams),
}

/// Weight table `exp(scale · k)` for integer `k ∈ [-max, max]`.
fn exp_table(scale: f64, max: usize) -> Vec<f64> {
    (0..=2 * max)
        .map(|k| (scale * (k as f64 - max as f64)).exp())
        .collect()
}

/// Thermal average of `exp(-β Σ_{b ∈ obs} σ s σ')` by visiting every spin
/// configuration in Gray-code order.
pub fn exact_local_weight(instance: &RbimInstance) -> Result<f64> {
    let g = instance.graph();
    let n = g.num_spins();
    if n > MAX_EXACT_SPINS {
        return Err(Error::ResourceLimit(format!(
            "{n} spins exceed the exhaustive limit of {MAX_EXACT_SPINS}"
        )));
    }
    let beta = instance.beta();
    let nb = g.num_bonds();
    let mut in_obs = vec![false; nb];
    for &b in g.observable() {
        in_obs[b] = true;
    }
    let no = g.observable().len();
    // Boltzmann weight e^{β(E - nb)} keeps every term ≤ 1; index E + nb.
    let boltz: Vec<f64> = (0..=2 * nb)
        .map(|k| (beta * (k as f64 - 2.0 * nb as f64)).exp())
        .collect();
    let obs = exp_table(-beta, no);
    let s = instance.signs();
    let mut spin = vec![1i8; n];
    let mut energy: i64 = s.iter().map(|&x| i64::from(x)).sum();
    let mut e_obs: i64 = g.observable().iter().map(|&b| i64::from(s[b])).sum();
    let mut z = 0.0;
    let mut num = 0.0;
    let mut add = |e: i64, eo: i64| {
        let w = boltz[(e + nb as i64) as usize];
        z += w;
        num += w * obs[(eo + no as i64) as usize];
    };
    add(energy, e_obs);
    for k in 1u64..1 << n {
        let i = k.trailing_zeros() as usize;
        let si = i64::from(spin[i]);
        for &(j, b) in g.neighbours(i) {
            let d = -2 * i64::from(s[b as usize]) * si * i64::from(spin[j as usize]);
            energy += d;
            if in_obs[b as usize] {
                e_obs += d;
            }
        }
        spin[i] = -spin[i];
        add(energy, e_obs);
    }
    Ok(num / z)
}

/// Disorder average of [`exact_local_weight`] over all `2^bonds` sign
/// patterns, each weighted by its Nishimori probability.
pub fn exact_disorder_average(graph: Arc<BondGraph>, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let nb = graph.num_bonds();
    if nb > MAX_EXACT_BONDS {
        return Err(Error::ResourceLimit(format!(
            "{nb} bonds exceed the exhaustive disorder limit of {MAX_EXACT_BONDS}"
        )));
    }
    let p = nishimori_plus_probability(beta);
    let terms: Vec<(f64, f64)> = (0u64..1 << nb)
        .into_par_iter()
        .map(|mask| {
            let signs: Vec<i8> = (0..nb).map(|b| if mask >> b & 1 == 1 { -1 } else { 1 }).collect();
            let negatives = mask.count_ones() as i32;
            let prob = p.powi(nb as i32 - negatives) * (1.0 - p).powi(negatives);
            let inst = RbimInstance::new(Arc::clone(&graph), signs, beta)?;
            Ok((prob, exact_local_weight(&inst)?))
        })
        .collect::<Result<_>>()?;
    Ok(terms.iter().map(|(p, w)| p * w).sum())
}

/// `p_q = ½ + ½ 𝔼_s ⟨exp(-β Σ σ s σ')⟩` at the lattice centre.
pub fn pq_toric(
    beta: f64,
    lattice: &Lattice,
    n_disorder: usize,
    method: EstimateMethod,
    seed: u64,
) -> Result<EstimateResult> {
    pq_on_graph(beta, lattice.graph()?, n_disorder, method, seed)
}

pub fn pq_on_graph(
    beta: f64,
    graph: BondGraph,
    n_disorder: usize,
    method: EstimateMethod,
    seed: u64,
) -> Result<EstimateResult> {
    check_beta(beta)?;
    if beta == 0.0 {
        let tag = match method {
            EstimateMethod::Exact => MethodTag::Exact,
            EstimateMethod::ExactThermal => MethodTag::ExactThermal,
            EstimateMethod::Metropolis(_) => MethodTag::Metropolis,
        };
        return Ok(EstimateResult {
            mean: 1.0,
            standard_error: 0.0,
            sample_count: n_disorder.max(1),
            method: tag,
        });
    }
    if let EstimateMethod::Exact = method {
        let avg = exact_disorder_average(Arc::new(graph), beta)?;
        return Ok(EstimateResult {
            mean: 0.5 + 0.5 * avg,
            standard_error: 0.0,
            sample_count: 1,
            method: MethodTag::Exact,
        });
    }
    let ensemble = DisorderEnsemble::new(graph, seed, n_disorder)?;
    let values: Vec<f64> = (0..n_disorder)
        .into_par_iter()
        .map(|k| {
            let inst = ensemble.realization(k, beta)?;
            match method {
                EstimateMethod::ExactThermal => exact_local_weight(&inst),
                EstimateMethod::Metropolis(params) => {
                    let mut rng = stream_rng(ensemble.thermal_seed(k), 0);
                    Ok(metropolis_local_weight(&inst, params, &mut rng)?.mean)
                }
                EstimateMethod::Exact => unreachable!("handled above"),
            }
        })
        .collect::<Result<_>>()?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(EstimateResult {
        mean: 0.5 + 0.5 * mean,
        standard_error: 0.5 * (var / n).sqrt(),
        sample_count: values.len(),
        method: match method {
            EstimateMethod::Metropolis(_) => MethodTag::Metropolis,
            _ => MethodTag::ExactThermal,
        },
    })
}

/// `½[1 + sech(β)^N]`.
pub fn pq_ghz(beta: f64, n: usize) -> Result<f64> {
    check_beta(beta)?;
    if n < 3 {
        return Err(Error::Domain(format!("GHZ size must be ≥ 3, got {n}")));
    }
    Ok(0.5 * (1.0 + beta.cosh().recip().powi(n as i32)))
}

/// `(β√N, 2 p_q − 1)`; for the GHZ curve the second coordinate is close to
/// `exp(-x²/2)` at small β.
pub fn collapse_transform(beta: f64, n: usize, pq: f64) -> Result<(f64, f64)> {
    check_beta(beta)?;
    if !(0.5..=1.0).contains(&pq) {
        return Err(Error::Domain(format!("p_q = {pq} outside [1/2, 1]")));
    }
    Ok((beta * (n as f64).sqrt(), 2.0 * pq - 1.0))
}
