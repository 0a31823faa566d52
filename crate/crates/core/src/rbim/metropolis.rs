use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{EstimateResult, MethodTag, RbimInstance};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetropolisParams {
    pub equilibration_sweeps: usize,
    pub measurement_sweeps: usize,
    pub bins: usize,
}

impl Default for MetropolisParams {
    fn default() -> Self {
        Self {
            equilibration_sweeps: 1000,
            measurement_sweeps: 10_000,
            bins: 16,
        }
    }
}

impl MetropolisParams {
    pub fn validate(&self) -> Result<()> {
        if self.equilibration_sweeps == 0 || self.measurement_sweeps == 0 {
            return Err(Error::Domain("sweep counts must be positive".into()));
        }
        if self.bins < 2 || self.bins > self.measurement_sweeps {
            return Err(Error::Domain(format!(
                "need 2 ≤ bins ≤ measurement sweeps, got {} bins",
                self.bins
            )));
        }
        Ok(())
    }
}

/// Single-spin-flip Metropolis estimate of the observable of
/// [`super::exact_local_weight`], starting from all spins up. A sweep is one
/// update attempt per spin at uniformly random sites; a fixed visiting order
/// is not ergodic on small frustrated graphs. The error bar is the spread of
/// bin means.
pub fn metropolis_local_weight<R: Rng + ?Sized>(
    instance: &RbimInstance,
    params: MetropolisParams,
    rng: &mut R,
) -> Result<EstimateResult> {
    params.validate()?;
    let g = instance.graph();
    let beta = instance.beta();
    let s = instance.signs();
    let n = g.num_spins();
    let deg = g.max_degree();
    // Acceptance for local field h (flip changes the exponent by -2βσh), as
    // a threshold on a uniform u32.
    let accept: Vec<u64> = (0..=2 * deg)
        .map(|k| {
            let a = (-2.0 * beta * (k as f64 - deg as f64)).exp().min(1.0);
            (a * 4_294_967_296.0) as u64
        })
        .collect();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut coupled: Vec<(u32, i8)> = Vec::with_capacity(2 * g.num_bonds());
    offsets.push(0);
    for i in 0..n {
        coupled.extend(g.neighbours(i).iter().map(|&(j, b)| (j, s[b as usize])));
        offsets.push(coupled.len());
    }
    let obs_bonds: Vec<(usize, usize, i8)> = g
        .observable()
        .iter()
        .map(|&b| {
            let (i, j) = g.bonds()[b];
            (i, j, s[b])
        })
        .collect();
    let no = obs_bonds.len();
    let obs_table: Vec<f64> = (0..=2 * no)
        .map(|k| (-beta * (k as f64 - no as f64)).exp())
        .collect();

    let mut spin = vec![1i8; n];
    let sweep = |spin: &mut [i8], rng: &mut R| {
        for _ in 0..n {
            let r = rng.next_u64();
            // High half picks the site, low half decides acceptance.
            let i = (((r >> 32) * n as u64) >> 32) as usize;
            let h: i32 = coupled[offsets[i]..offsets[i + 1]]
                .iter()
                .map(|&(j, sb)| i32::from(sb * spin[j as usize]))
                .sum();
            let k = (i32::from(spin[i]) * h + deg as i32) as usize;
            if (r & 0xFFFF_FFFF) < accept[k] {
                spin[i] = -spin[i];
            }
        }
    };
    for _ in 0..params.equilibration_sweeps {
        sweep(&mut spin, rng);
    }
    let per_bin = params.measurement_sweeps / params.bins;
    let mut bin_means = Vec::with_capacity(params.bins);
    for _ in 0..params.bins {
        let mut acc = 0.0;
        for _ in 0..per_bin {
            sweep(&mut spin, rng);
            let e: i32 = obs_bonds
                .iter()
                .map(|&(i, j, sb)| i32::from(sb) * i32::from(spin[i]) * i32::from(spin[j]))
                .sum();
            acc += obs_table[(e + no as i32) as usize];
        }
        bin_means.push(acc / per_bin as f64);
    }
    let m = bin_means.len() as f64;
    let mean = bin_means.iter().sum::<f64>() / m;
    let var = bin_means.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(EstimateResult {
        mean,
        standard_error: (var / m).sqrt(),
        sample_count: per_bin * params.bins,
        method: MethodTag::Metropolis,
    })
}
