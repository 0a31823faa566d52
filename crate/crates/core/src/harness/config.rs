use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::prep::beta_from_theta;
use crate::rbim::{Boundary, MetropolisParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    Ghz,
    Rsc,
    Classical,
    /// Square-lattice random-bond Ising model only, no circuit.
    Toric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Shots,
    ExactBranches,
    RbimExact,
    RbimMc,
}

macro_rules! string_enum {
    ($ty:ty { $($name:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($variant),)+
                    other => Err(Error::Config(format!(
                        "unknown {} {other:?}", stringify!($ty).to_lowercase()
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $variant { return f.write_str($name); })+
                unreachable!()
            }
        }
    };
}

string_enum!(GameKind {
    "ghz" => GameKind::Ghz,
    "rsc" => GameKind::Rsc,
    "classical" => GameKind::Classical,
    "toric" => GameKind::Toric,
});

string_enum!(Estimator {
    "shots" => Estimator::Shots,
    "exact-branches" => Estimator::ExactBranches,
    "rbim-exact" => Estimator::RbimExact,
    "rbim-mc" => Estimator::RbimMc,
});

pub const DEFAULT_SHOTS: usize = 256;
pub const DEFAULT_DISORDER_SAMPLES: usize = 200;
pub const DEFAULT_RESAMPLES: usize = 1000;

/// 13 points on `[0, 1.2]`.
pub fn default_beta_grid() -> Vec<f64> {
    linspace(0.0, 1.2, 13)
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            // Round to 12 decimals so 0.1 steps print as 0.3, not 0.30000000000000004.
            (0..count)
                .map(|k| ((start + step * k as f64) * 1e12).round() / 1e12)
                .collect()
        }
    }
}

/// Parses `--beta` values: plain numbers, or `start:stop:count` ranges.
pub fn parse_beta_values(items: &[String]) -> Result<Vec<f64>> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("bad β value {s:?}")))
    };
    let mut out = Vec::new();
    for item in items {
        for part in item.split(',').filter(|p| !p.trim().is_empty()) {
            let fields: Vec<&str> = part.split(':').collect();
            match fields[..] {
                [v] => out.push(num(v)?),
                [a, b, n] => {
                    let n: usize = n
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad point count in {part:?}")))?;
                    out.extend(linspace(num(a)?, num(b)?, n));
                }
                _ => return Err(Error::Config(format!("expected β or start:stop:count, got {part:?}"))),
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameKind,
    /// GHZ qubit count N, code distance d, or Ising lattice side L.
    pub sizes: Vec<usize>,
    pub players: usize,
    pub betas: Vec<f64>,
    /// Alternative to `betas`; converted with `tan(θ/2) = tanh(β/2)`.
    pub thetas: Vec<f64>,
    /// Per unique promise input.
    pub shots: usize,
    pub seed: u64,
    pub estimator: Estimator,
    pub mc: MetropolisParams,
    pub disorder_samples: usize,
    pub boundary: Boundary,
    pub bootstrap_resamples: usize,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            game: GameKind::Ghz,
            sizes: vec![4],
            players: 3,
            betas: default_beta_grid(),
            thetas: Vec::new(),
            shots: DEFAULT_SHOTS,
            seed: 0,
            estimator: Estimator::ExactBranches,
            mc: MetropolisParams::default(),
            disorder_samples: DEFAULT_DISORDER_SAMPLES,
            boundary: Boundary::Periodic,
            bootstrap_resamples: DEFAULT_RESAMPLES,
            out: None,
            plot: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// β values to run, from `thetas` when given.
    pub fn beta_values(&self) -> Result<Vec<f64>> {
        if self.thetas.is_empty() {
            Ok(self.betas.clone())
        } else {
            self.thetas.iter().map(|&t| beta_from_theta(t)).collect()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.estimator == Estimator::Shots && self.shots == 0 {
            return Err(Error::Config("shots must be positive".into()));
        }
        if let Some(b) = self.betas.iter().find(|b| !(**b >= 0.0) || b.is_infinite()) {
            return Err(Error::Config(format!("β values must be finite and ≥ 0, got {b}")));
        }
        if self.sizes.is_empty() {
            return Err(Error::Config("no sizes given".into()));
        }
        if self.players < 3 {
            return Err(Error::Config(format!("need at least 3 players, got {}", self.players)));
        }
        if self.bootstrap_resamples < 100 {
            return Err(Error::Config("bootstrap needs at least 100 resamples".into()));
        }
        if matches!(self.estimator, Estimator::RbimMc) && self.disorder_samples == 0 {
            return Err(Error::Config("disorder_samples must be positive".into()));
        }
        self.mc.validate()?;
        let ok = match self.game {
            GameKind::Ghz => self.estimator != Estimator::RbimMc,
            GameKind::Rsc => true,
            GameKind::Classical => matches!(self.estimator, Estimator::Shots | Estimator::ExactBranches),
            GameKind::Toric => matches!(self.estimator, Estimator::RbimExact | Estimator::RbimMc),
        };
        if !ok {
            return Err(Error::Config(format!(
                "estimator {} does not apply to game {}",
                self.estimator, self.game
            )));
        }
        Ok(())
    }
}
