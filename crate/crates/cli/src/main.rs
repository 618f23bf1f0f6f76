use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use saltflow_cli::{cmd_converge, cmd_simulate, cmd_stability, cmd_verify, parse_config, Command};

#[derive(Parser)]
#[command(
    name = "saltflow",
    version,
    about = "Transport-noise SPDE simulations and estimate checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Integrate an ensemble of trajectories.
    Simulate(Common),
    /// Run estimate sweeps; exits nonzero if any check fails.
    Verify(Common),
    /// Measure convergence down eps and dt ladders.
    Converge(Common),
    /// Same-path perturbation experiment.
    Stability(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment file.
    config: PathBuf,
    /// Base seed; overrides experiment.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides experiment.out.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for ensemble members.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn run(cli: Cli) -> Result<bool> {
    let (command, args) = match cli.command {
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::Verify(a) => (Command::Verify, a),
        Sub::Converge(a) => (Command::Converge, a),
        Sub::Stability(a) => (Command::Stability, a),
    };
    let mut spec = parse_config(&args.config).map_err(|e| anyhow::anyhow!("{}: {e}", args.config.display()))?;
    spec.command = command;
    if let Some(seed) = args.seed {
        spec.seed = seed;
        if let Some(sim) = spec.sim.as_mut() {
            sim.seed = seed;
        }
    }
    if let Some(out) = args.out {
        spec.out = out;
    }
    match command {
        Command::Simulate => {
            let o = cmd_simulate(&spec, args.workers)?;
            for (seed, rec) in &o.records {
                println!("seed {seed}: {} at t = {}", rec.reason, rec.tau);
            }
            println!("wrote {} trajectories and {}", o.trajectories.len(), o.stats.display());
            Ok(true)
        }
        Command::Verify => {
            let o = cmd_verify(&spec)?;
            print!("{}", o.table);
            Ok(o.all_pass())
        }
        Command::Converge => {
            print!("{}", cmd_converge(&spec, args.workers)?.table());
            Ok(true)
        }
        Command::Stability => {
            let o = cmd_stability(&spec)?;
            for (d, r) in &o.runs {
                let ratio = r.ratio.map_or("-".to_string(), |v| format!("{v:.6}"));
                println!(
                    "delta {d:e}: initial {:e}, sup {:e}, ratio {ratio}",
                    r.initial_distance, r.sup_distance
                );
            }
            if let Some(a) = o.agreement {
                println!("ratio agreement: {a:.4}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
