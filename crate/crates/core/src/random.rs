// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Seeded random tensors and matrices for property checks.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::rng::SampleStream;
use crate::tensor::SymmetricTensor;

/// Random symmetric tensor with every distinct entry set, magnitudes `<= scale`.
pub fn random_tensor(rank: usize, d: usize, scale: f64, seed: u64) -> SymmetricTensor {
    let nd = rank * d;
    let mut rng = SampleStream::new(seed).realization_rng(0);
    let mut t = SymmetricTensor::zeros(rank, d).unwrap();
    let mut key = vec![1usize; rank];
    loop {
        let re = 2.0 * rng.uniform() - 1.0;
        let im = 2.0 * rng.uniform() - 1.0;
        t.set(&key, Complex64::new(re, im) * (scale / 2f64.sqrt())).unwrap();
        // next non-decreasing key
        let Some(pos) = (0..rank).rev().find(|&p| key[p] < nd) else {
            return t;
        };
        let v = key[pos] + 1;
        for k in key.iter_mut().skip(pos) {
            *k = v;
        }
    }
}

pub fn random_symmetric_matrix(dim: usize, scale: f64, seed: u64) -> DMatrix<Complex64> {
    let mut rng = SampleStream::new(seed).realization_rng(1);
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let z = Complex64::new(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0) * scale;
            m[(i, j)] = z;
            m[(j, i)] = z;
        }
    }
    m
}
