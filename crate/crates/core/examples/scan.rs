// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Fidelity versus pinching strength through the experiment runner.

use pinch::experiments::{parse_csv, run, ExperimentConfig};

fn main() -> pinch::Result<()> {
    let cfg = ExperimentConfig::from_text(
        None,
        "task = fidelity-scan\nstate = GHZ\nn = 3\nr = 0.2:1.4:0.3\ngamma = 1.0,2.0\nsamples = 2^14\n",
    )?;
    let out = run(&cfg)?;
    let (meta, rows) = parse_csv(&out.csv);
    println!("seed {}", meta["seed"]);
    for row in rows {
        println!("gamma={} r={:<6} F={}", row["gamma"], row["r"], row["F"]);
    }
    Ok(())
}
