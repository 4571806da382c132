// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Mermin statistic for pinched GHZ states against the classical bound.

use pinch::mermin::{classical_bound, mermin_repeats, quantum_bound};
use pinch::rng::SampleStream;
use pinch::tensor::ghz_tensor;

fn main() -> pinch::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1u64 << 17);
    let stream = SampleStream::new(20240601);
    for (k, (n, r, gamma)) in [(3, 0.6, 2.3), (4, 0.9, 0.6), (5, 0.5, 1.0)].into_iter().enumerate() {
        let t = ghz_tensor(n, r, 0.0)?;
        let s = mermin_repeats(&t, gamma, samples, 3, &stream.substream(k as u64))?;
        println!(
            "n={n} r={r} gamma={gamma}: M = {:.3} +- {:.3}  (classical {}, quantum {})",
            s.mean,
            s.stddev,
            classical_bound(n),
            quantum_bound(n)
        );
    }
    Ok(())
}
