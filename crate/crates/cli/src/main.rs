use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use topogame::harness::{
    advantage_loss, collapse_points, collapse_spread, cross_validate, parse_beta_values, run_sweep,
    write_collapse_csv, Estimator, ExperimentConfig, GameKind, ResultRow,
};
use topogame::rbim::Boundary;

#[derive(Parser)]
#[command(name = "topogame", version, about = "Parity games on deformed GHZ and surface-code states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deformed GHZ game, N qubits per `--size`.
    GhzGame(SweepArgs),
    /// Deformed rotated-surface-code game, distance per `--size`.
    RscGame(SweepArgs),
    /// Optimal classical strategy.
    Classical(SweepArgs),
    /// Square-lattice random-bond Ising scan of p_q, side L per `--size`.
    RbimThreshold(SweepArgs),
    /// Compare the circuit and Ising routes on a small patch.
    CrossValidate(SweepArgs),
    /// GHZ curves in the scaled coordinates (β√N, 2p_q − 1).
    Collapse(SweepArgs),
}

#[derive(Args, Clone, Default)]
struct SweepArgs {
    /// Configuration file (TOML); flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "size")]
    sizes: Vec<usize>,
    #[arg(long)]
    players: Option<usize>,
    /// β value, comma list, or start:stop:count range. Repeatable.
    #[arg(long = "beta", allow_hyphen_values = true)]
    betas: Vec<String>,
    /// Shots per unique promise input.
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// shots | exact-branches | rbim-exact | rbim-mc
    #[arg(long)]
    estimator: Option<Estimator>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot of p_q against β.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Measurement sweeps; equilibration is a tenth of this.
    #[arg(long)]
    mc_sweeps: Option<usize>,
    #[arg(long)]
    disorder_samples: Option<usize>,
    /// periodic | open (Ising lattice only)
    #[arg(long)]
    boundary: Option<String>,
}

impl SweepArgs {
    fn resolve(&self, game: GameKind, default_estimator: Estimator, default_sizes: &[usize]) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
            None => ExperimentConfig {
                estimator: default_estimator,
                sizes: default_sizes.to_vec(),
                ..ExperimentConfig::default()
            },
        };
        c.game = game;
        if !self.sizes.is_empty() {
            c.sizes = self.sizes.clone();
        }
        if let Some(p) = self.players {
            c.players = p;
        }
        if !self.betas.is_empty() {
            c.betas = parse_beta_values(&self.betas)?;
            c.thetas.clear();
        }
        if let Some(s) = self.shots {
            c.shots = s;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(e) = self.estimator {
            c.estimator = e;
        }
        if let Some(o) = &self.out {
            c.out = Some(o.clone());
        }
        if let Some(p) = &self.plot {
            c.plot = Some(p.clone());
        }
        if let Some(m) = self.mc_sweeps {
            c.mc.measurement_sweeps = m;
            c.mc.equilibration_sweeps = (m / 10).max(1);
        }
        if let Some(d) = self.disorder_samples {
            c.disorder_samples = d;
        }
        if let Some(b) = &self.boundary {
            c.boundary = match b.as_str() {
                "periodic" => Boundary::Periodic,
                "open" => Boundary::Open,
                other => bail!("unknown boundary {other:?}"),
            };
        }
        c.validate()?;
        Ok(c)
    }
}

fn print_rows(rows: &[ResultRow]) {
    println!("game,size,players,beta,pq,pq_err_lo,pq_err_hi,advantage");
    for r in rows {
        println!(
            "{},{},{},{:.4},{:.6},{:.6},{:.6},{}",
            r.game, r.size, r.players, r.beta, r.pq, r.pq_err_lo, r.pq_err_hi, r.advantage
        );
    }
}

fn print_crossings(rows: &[ResultRow]) {
    for (size, c) in advantage_loss(rows) {
        match c {
            Some(c) => println!("size {size}: p_q crosses {:.4} at beta = {:.4} ± {:.4}", rows[0].p_classical, c.beta, c.sigma),
            None => println!("size {size}: no crossing on this grid"),
        }
    }
}

fn sweep(args: &SweepArgs, game: GameKind, estimator: Estimator, sizes: &[usize]) -> Result<()> {
    let config = args.resolve(game, estimator, sizes)?;
    let rows = run_sweep(&config)?;
    print_rows(&rows);
    if game != GameKind::Classical {
        print_crossings(&rows);
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::GhzGame(a) => sweep(a, GameKind::Ghz, Estimator::ExactBranches, &[4, 9, 16]),
        Command::RscGame(a) => sweep(a, GameKind::Rsc, Estimator::ExactBranches, &[3, 4]),
        Command::Classical(a) => sweep(a, GameKind::Classical, Estimator::Shots, &[3]),
        Command::RbimThreshold(a) => {
            let mut a = a.clone();
            if a.betas.is_empty() && a.config.is_none() {
                a.betas = vec!["0.45:0.8:8".into()];
            }
            sweep(&a, GameKind::Toric, Estimator::RbimMc, &[8, 16, 24])
        }
        Command::CrossValidate(a) => {
            let sizes = if a.sizes.is_empty() { vec![3] } else { a.sizes.clone() };
            let betas = if a.betas.is_empty() { vec![0.0, 0.2, 0.4, 0.6, 0.8] } else { parse_beta_values(&a.betas)? };
            println!("d,beta,circuit,rbim,discrepancy");
            for d in sizes {
                for &b in &betas {
                    let cv = cross_validate(d, b)?;
                    println!("{d},{b},{:.12},{:.12},{:.3e}", cv.circuit, cv.rbim, cv.discrepancy);
                }
            }
            Ok(())
        }
        Command::Collapse(a) => {
            let sizes = if a.sizes.is_empty() { vec![4, 9, 16] } else { a.sizes.clone() };
            let betas = if a.betas.is_empty() {
                topogame::harness::default_beta_grid()
            } else {
                parse_beta_values(&a.betas)?
            };
            let pts = collapse_points(&sizes, &betas)?;
            if let Some(out) = &a.out {
                write_collapse_csv(&pts, out)?;
            }
            println!("n,beta,x,y,gaussian");
            for p in &pts {
                println!("{},{:.4},{:.6},{:.6},{:.6}", p.n, p.beta, p.x, p.y, p.gaussian);
            }
            for x in [0.2, 0.4, 0.6] {
                println!("spread at x = {x}: {:.5}", collapse_spread(x, &sizes)?);
            }
            Ok(())
        }
    }
}
