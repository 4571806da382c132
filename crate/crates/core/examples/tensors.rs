// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Build GHZ and W pinching tensors and round-trip them through text.

use pinch::tensor::{distinct_element_count, ghz_tensor, w_tensor, ModeLabel, SymmetricTensor};

fn main() -> pinch::Result<()> {
    let ghz = ghz_tensor(3, 0.6, 0.0)?;
    println!("GHZ n=3: {} modes, {} of {} distinct entries nonzero", ghz.num_modes(), ghz.num_stored(), distinct_element_count(3, 2)?);
    for (key, xi) in ghz.entries() {
        let modes: Vec<String> = key.iter().map(|&m| ModeLabel::from_flat(m).unwrap().to_string()).collect();
        println!("  xi[{}] = {xi}", modes.join(","));
    }

    let w = w_tensor(3, 0.6, &[0.0, 0.0])?;
    println!("W n=3: {} nonzero entries, sum |xi|^2 = {:.6}", w.num_stored(), w.distinct_norm_sqr());

    let text = ghz.to_text();
    let back: SymmetricTensor = text.parse()?;
    assert_eq!(back, ghz);
    print!("text form:\n{text}");
    Ok(())
}
