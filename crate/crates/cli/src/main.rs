use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stochlab_cli::experiments::{self, NAMES};
use stochlab_cli::params::Raw;
use stochlab_cli::run::{execute, rerun, resolve_request, Request, RunError};

#[derive(Parser)]
#[command(name = "stochlab", version, about = "Seeded stochastic-dynamics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List experiments, or the parameters of one experiment.
    List { experiment: Option<String> },
    /// Run an experiment; parameters are given as key=value.
    Run {
        experiment: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicas: Option<usize>,
        /// TOML file with top-level seed/replicas and one table per experiment.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory [default: out/<experiment>]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Resolve and check parameters, print them, and stop.
        #[arg(long)]
        validate_only: bool,
        #[arg(value_parser = parse_kv)]
        params: Vec<(String, String)>,
    },
    /// Replay the run recorded in a manifest and compare file digests.
    Rerun {
        manifest: PathBuf,
        /// Output directory [default: <manifest dir>/rerun]
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.to_string()))
        .ok_or_else(|| format!("expected key=value, got {s:?}"))
}

fn list(experiment: Option<String>) -> Result<(), RunError> {
    let Some(name) = experiment else {
        for name in NAMES {
            let e = experiments::find(name).expect("registered");
            println!("{name:<12} {}", e.about);
        }
        return Ok(());
    };
    let req = Request { experiment: name, ..Default::default() };
    let (exp, _) = resolve_request(&req)?;
    println!("{}: {}", exp.name, exp.about);
    for p in &exp.params {
        println!("  {:<18} {:<32} default {:<12} {}", p.key, p.kind.describe(), p.default.to_string(), p.help);
    }
    if let Some(k) = exp.replica_key {
        println!("  --replicas sets {k}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List { experiment } => list(experiment),
        Command::Run { experiment, seed, replicas, config, out, validate_only, params } => {
            let req = Request {
                experiment,
                seed,
                replicas,
                config_file: config,
                overrides: params.into_iter().map(|(k, v)| (k, Raw::Text(v))).collect(),
            };
            resolve_request(&req).and_then(|(exp, config)| {
                if validate_only {
                    println!("{}", serde_json::to_string_pretty(&config).expect("config serializes"));
                    return Ok(());
                }
                let out = out.unwrap_or_else(|| PathBuf::from("out").join(exp.name));
                let m = execute(&exp, &config, &out)?;
                println!("wrote {} files to {}", m.files.len() + 1, out.display());
                Ok(())
            })
        }
        Command::Rerun { manifest, out } => rerun(&manifest, out.as_deref()).map(|m| {
            println!("{} files reproduced", m.files.len());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
