// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Draw first-order realizations and compare moments with their exact values.

use pinch::rng::SampleStream;
use pinch::sampler::{transform_ghz, Sampler};
use pinch::tensor::ghz_tensor;

fn main() -> pinch::Result<()> {
    let r = 0.3;
    let t = ghz_tensor(3, r, 0.0)?;
    let sampler = Sampler::new(&t);
    let stream = SampleStream::new(7);
    let count = 1u64 << 20;

    // sums of |b1|² and Re(b1 b3 b5)
    let sums = sampler.fold(
        &stream,
        count,
        || [0.0f64; 2],
        |s, _, b| {
            s[0] += b[0].norm_sqr();
            s[1] += (b[0] * b[2] * b[4]).re;
        },
        |x, y| [x[0] + y[0], x[1] + y[1]],
    );
    let n = count as f64;
    println!("E|b1|^2      = {:.5}  (exact {:.5})", sums[0] / n, 0.5 + r * r / 4.0);
    println!("E[b1 b3 b5]  = {:.5}  (exact {:.5})", sums[1] / n, 0.75 * r);

    let few = sampler.realizations(&stream, 1 << 16);
    let a2 = few.iter().map(|z| z.a[0].norm_sqr()).sum::<f64>() / few.len() as f64;
    println!("E|a1|^2      = {a2:.5}  (exact 0.5)");

    let z = sampler.realize(&stream, 0);
    let special = transform_ghz(3, r, 0.0, &z.a)?;
    let diff = z.b.iter().zip(&special).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    println!("generic vs GHZ-specialized transform: {diff:.1e}");
    Ok(())
}
