// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pinch::experiments::{exit_code, run, write_output, ExperimentConfig, StateKind, Task};
use pinch::{PinchError, Result};

#[derive(Parser)]
#[command(name = "pinch", version, about = "Pinched vacuum state simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Linear tomography at one point; writes correlations and `.rho.txt`
    Tomography(RunArgs),
    /// Mermin statistic with repeats (defaults to the n = 3, 4, 5 table)
    Mermin(RunArgs),
    /// Fidelity over an r grid for each gamma
    FidelityScan(RunArgs),
    /// Mermin statistic over an r grid for each gamma
    MerminScan(RunArgs),
    /// Fidelity versus photon number
    PhotonScan(RunArgs),
    /// Exact-oracle consistency checks; exit status 4 on failure
    OracleCheck(RunArgs),
    /// Print the pinching tensor of a configured state
    DumpTensor(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// key=value config file
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// GHZ, W or file:PATH
    #[arg(long)]
    state: Option<String>,
    /// Photon number(s), comma separated
    #[arg(long)]
    n: Option<String>,
    /// Pinching strength: value, list, or min:max:step
    #[arg(long)]
    r: Option<String>,
    /// Detector threshold(s)
    #[arg(long)]
    gamma: Option<String>,
    /// Relative phase(s)
    #[arg(long)]
    theta: Option<String>,
    /// Realizations per measurement setting (accepts 2^k)
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    repeats: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output CSV path (stdout if omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Extra key=value overrides
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn config(&self, task: Task) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(Some(task), path)?,
            None => ExperimentConfig::new(task),
        };
        let flags = [
            ("state", &self.state),
            ("n", &self.n),
            ("r", &self.r),
            ("gamma", &self.gamma),
            ("theta", &self.theta),
            ("samples", &self.samples),
            ("repeats", &self.repeats),
            ("seed", &self.seed),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| PinchError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        if let Some(o) = &self.output {
            cfg.output = Some(o.clone());
        }
        Ok(cfg)
    }
}

fn dump_tensor(args: &RunArgs) -> Result<i32> {
    let cfg = args.config(Task::Tomography)?;
    let (tensor, _) = cfg.state_at(cfg.ns()[0], cfg.rs()[0])?;
    let text = tensor.to_text();
    match &cfg.output {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    if let StateKind::TensorFile(p) = &cfg.state {
        eprintln!("read base tensor from {}", p.display());
    }
    Ok(0)
}

fn execute(cli: Cli) -> Result<i32> {
    let (task, args) = match &cli.command {
        Command::Tomography(a) => (Task::Tomography, a),
        Command::Mermin(a) => (Task::Mermin, a),
        Command::FidelityScan(a) => (Task::FidelityScan, a),
        Command::MerminScan(a) => (Task::MerminScan, a),
        Command::PhotonScan(a) => (Task::PhotonScan, a),
        Command::OracleCheck(a) => (Task::OracleCheck, a),
        Command::DumpTensor(a) => return dump_tensor(a),
    };
    let cfg = args.config(task)?;
    let out = run(&cfg)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    match &cfg.output {
        Some(path) => {
            for p in write_output(&out, path)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => {
            print!("{}", out.csv);
            if !out.extra.is_empty() {
                eprintln!("note: side outputs are only written with --output");
            }
        }
    }
    Ok(out.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
