// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Commutator series for the pinched annihilation operator.
//!
//! For a rank-2 tensor the series converges to the squeezing closed form.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pinch::bogoliubov::{b_approx, c_term, linear_coefficients, squeeze_closed_form, tensor_from_matrix};
use pinch::tensor::ghz_tensor;

fn main() -> pinch::Result<()> {
    let t = ghz_tensor(3, 0.3, 0.0)?;
    for k in 0..=2 {
        let c = c_term(&t, 1, k)?;
        println!("C^({k}) for mode 1H: {} terms", c.len());
    }
    println!("C^(1) = {}", c_term(&t, 1, 1)?);

    let xi = DMatrix::from_row_slice(2, 2, &[
        Complex64::new(0.3, 0.0), Complex64::new(0.1, 0.2),
        Complex64::new(0.1, 0.2), Complex64::new(-0.2, 0.1),
    ]);
    let t2 = tensor_from_matrix(&xi)?;
    let (cosh, sinh_q) = squeeze_closed_form(&xi)?;
    for p in [1, 3, 5, 9] {
        let b = b_approx(&t2, 1, p)?;
        let (ann, cre) = linear_coefficients(&b, 2);
        let err = (0..2)
            .map(|k| (ann[k] - cosh[(0, k)]).norm().max((cre[k] - sinh_q[(0, k)]).norm()))
            .fold(0.0, f64::max);
        println!("rank 2, p={p}: max deviation from cosh/sinh form {err:.3e}");
    }
    Ok(())
}
