use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tqsl::experiments::{self, BasisMode, ExperimentConfig, ExperimentKind};
use tqsl::state::KetJson;
use tqsl::QslError;

#[derive(Parser, Debug)]
#[command(name = "tqsl", version, about = "Tighter quantum speed limit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bound curves for random GUE Hamiltonians, one CSV per seed.
    Gue(Common),
    /// Bound curve for the interacting spin chain.
    Spin {
        #[command(flatten)]
        common: Common,
        /// Number of spins.
        #[arg(long)]
        spins: Option<usize>,
        /// Interaction blocks of 1-based spin indices, e.g. "1,2;2,3".
        #[arg(long)]
        blocks: Option<String>,
        #[arg(long)]
        omega0: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Randomized invariant checks across dimensions 2..=dim.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Draws per invariant and dimension.
        #[arg(long)]
        trials: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// TOML file with an experiment configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Seed list: "0-49", "0,1,2" or a mix such as "0-3,10".
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long, value_parser = parse_basis)]
    basis: Option<BasisMode>,
    #[arg(long)]
    hbar: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Initial state as JSON, e.g. '{"re":[1,0],"im":[0,0]}'.
    #[arg(long)]
    state: Option<String>,
}

fn parse_basis(s: &str) -> Result<BasisMode, String> {
    match s {
        "fixed-random" => Ok(BasisMode::FixedRandom),
        "optimize" => Ok(BasisMode::Optimize),
        "identity" => Ok(BasisMode::Identity),
        _ => Err(format!("expected fixed-random, optimize or identity, got {s:?}")),
    }
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, QslError> {
    let bad = || QslError::InvalidConfig(format!("cannot parse seed list {s:?}"));
    let mut seeds = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
                if hi < lo {
                    return Err(bad());
                }
                seeds.extend(lo..=hi);
            }
            None => seeds.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(seeds)
}

fn parse_blocks(s: &str) -> Result<Vec<Vec<usize>>, QslError> {
    s.split(';')
        .map(|block| {
            block
                .split(',')
                .map(|i| {
                    i.trim()
                        .parse()
                        .map_err(|_| QslError::InvalidConfig(format!("cannot parse blocks {s:?}")))
                })
                .collect()
        })
        .collect()
}

fn base_config(kind: ExperimentKind, common: &Common) -> Result<ExperimentConfig, QslError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| QslError::Io(format!("{}: {e}", path.display())))?;
            let mut cfg: ExperimentConfig = toml::from_str(&text)
                .map_err(|e| QslError::InvalidConfig(format!("{}: {e}", path.display())))?;
            cfg.kind = kind;
            cfg
        }
        None => ExperimentConfig::for_kind(kind),
    };
    if let Some(d) = common.dim {
        cfg.dim = d;
    }
    if let Some(t) = common.tmax {
        cfg.t_max = t;
    }
    if let Some(n) = common.steps {
        cfg.steps = n;
    }
    if let Some(s) = &common.seeds {
        cfg.seeds = parse_seeds(s)?;
    }
    if let Some(b) = common.basis {
        cfg.basis_mode = b;
    }
    if let Some(h) = common.hbar {
        cfg.hbar = h;
    }
    if let Some(o) = &common.out {
        cfg.output_path = o.clone();
    }
    if let Some(s) = &common.state {
        let ket: KetJson = serde_json::from_str(s)
            .map_err(|e| QslError::InvalidConfig(format!("--state: {e}")))?;
        cfg.state = Some(ket);
    }
    Ok(cfg)
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, QslError> {
    match &cli.command {
        Command::Gue(common) => base_config(ExperimentKind::Gue, common),
        Command::Spin {
            common,
            spins,
            blocks,
            omega0,
            omega,
        } => {
            let mut cfg = base_config(ExperimentKind::Spin, common)?;
            if let Some(m) = spins {
                cfg.spin.num_spins = *m;
            }
            if let Some(b) = blocks {
                cfg.spin.blocks = parse_blocks(b)?;
            }
            if let Some(w) = omega0 {
                cfg.spin.omega0 = *w;
            }
            if let Some(w) = omega {
                cfg.spin.omega = *w;
            }
            Ok(cfg)
        }
        Command::Verify { common, trials } => {
            let mut cfg = base_config(ExperimentKind::Verify, common)?;
            if let Some(n) = trials {
                cfg.trials = *n;
            }
            Ok(cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = build_config(&cli).and_then(|cfg| {
        let passed = experiments::run(&cfg)?;
        eprintln!(
            "{}: wrote results to {}",
            if passed { "ok" } else { "FAILED" },
            cfg.output_path.display()
        );
        Ok(passed)
    });
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    ExitCode::from(experiments::exit_code(&outcome) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("0-3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_seeds("0,1,2").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("5, 0-1").unwrap(), vec![5, 0, 1]);
        assert!(parse_seeds("3-1").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn block_lists() {
        assert_eq!(parse_blocks("1,2;2,3").unwrap(), vec![vec![1, 2], vec![2, 3]]);
        assert!(parse_blocks("1,a").is_err());
    }
}
