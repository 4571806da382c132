// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Threshold-detector tomography of a pinched three-photon GHZ state.

use pinch::pauli::parse_label;
use pinch::rng::SampleStream;
use pinch::tensor::{ghz_amplitudes, ghz_tensor};
use pinch::tomography::tomography_fidelity;

fn main() -> pinch::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1u64 << 18);
    let t = ghz_tensor(3, 0.6, 0.0)?;
    let (f, table) = tomography_fidelity(&t, 2.0, samples, &SampleStream::new(20240601), &ghz_amplitudes(3, 0.0))?;
    println!("{samples} samples per setting, {} coincidences", table.total_coincidences());
    for label in ["XXX", "ZZI", "ZZZ", "XYY"] {
        let l = parse_label(label)?;
        println!("  T({label}) = {:+.4}", table.get(&l).unwrap_or(f64::NAN));
    }
    println!("fidelity with GHZ: {f:.4}");
    Ok(())
}
