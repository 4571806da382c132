// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Exact truncated-Fock checks: the conjugation series and the pinched state.

use num_complex::Complex64;
use pinch::fock_oracle::{
    annihilation_matrix, generator_matrix, n_photon_fidelity, pinched_state, vacuum_removed_fidelity, verify_appendix_identity, Order,
    TruncatedFockSpace,
};
use pinch::tensor::{ghz_amplitudes, ghz_tensor};

fn main() -> pinch::Result<()> {
    let space = TruncatedFockSpace::new(6, 2, Some(6))?;
    println!("space dimension {}", space.dim());

    let t = ghz_tensor(3, 0.1, 0.0)?;
    let a = generator_matrix(&space, &t)?;
    let a = a.scale(Complex64::new(0.5 / a.frobenius_norm(), 0.0));
    let x = annihilation_matrix(&space, 1)?;
    let res = verify_appendix_identity(&space, &x, &a, 8)?;
    for (k, (f, i)) in res.full.iter().zip(&res.interior).enumerate() {
        println!("K={k}: residual {f:.3e} (interior {i:.3e})");
    }

    let target = ghz_amplitudes(3, 0.0);
    for r in [0.4, 0.2, 0.05] {
        let t = ghz_tensor(3, r, 0.0)?;
        for order in [Order::Truncated(1), Order::Exact] {
            let state = pinched_state(&space, &t, order)?;
            println!(
                "r={r} {order:?}: 3-photon fidelity {:.6}, vacuum-removed {:.6}",
                n_photon_fidelity(&space, &state, &target)?,
                vacuum_removed_fidelity(&space, &state, &target)?
            );
        }
    }
    Ok(())
}
