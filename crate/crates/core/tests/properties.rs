// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use proptest::prelude::*;

use pinch::measurement::{rotate, Basis};
use pinch::pauli::Pauli;
use pinch::random::random_tensor;
use pinch::rng::SampleStream;
use pinch::sampler::{read_dump, transform_generic, write_dump, Sampler};
use pinch::tensor::{ghz_tensor, qubit_state_tensor, SymmetricTensor};
use pinch::tomography::{fidelity, reconstruct, CorrelationTable, DensityMatrix};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn normalized(raw: &[(f64, f64)]) -> Option<Vec<Complex64>> {
    let v: Vec<Complex64> = raw.iter().map(|&(a, b)| c(a, b)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (norm > 1e-3).then(|| v.iter().map(|z| z / norm).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_preserve_norm(ar in -3.0..3.0f64, ai in -3.0..3.0f64, br in -3.0..3.0f64, bi in -3.0..3.0f64, k in 0usize..3) {
        let jones = [c(ar, ai), c(br, bi)];
        let basis = Basis::from_pauli([Pauli::X, Pauli::Y, Pauli::Z][k]).unwrap();
        let out = rotate(jones, &basis.matrix());
        let before = jones[0].norm_sqr() + jones[1].norm_sqr();
        let after = out[0].norm_sqr() + out[1].norm_sqr();
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
    }

    #[test]
    fn tensor_text_round_trip(rank in 1usize..4, d in 1usize..3, seed in any::<u64>()) {
        let t = random_tensor(rank, d, 0.7, seed);
        let back: SymmetricTensor = t.to_text().parse().unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn linear_tomography_round_trip(raw in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 8)) {
        let Some(psi) = normalized(&raw) else { return Ok(()) };
        let rho = reconstruct(&CorrelationTable::exact(&psi).unwrap()).unwrap();
        let exact = DensityMatrix::pure(&psi);
        prop_assert!((&rho.rho - &exact.rho).norm() < 1e-12);
        prop_assert!((fidelity(&rho, &psi).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn map_matches_generic_transform(seed in any::<u64>(), index in 0u64..1_000_000) {
        let t = random_tensor(3, 2, 0.4, seed);
        let z = Sampler::new(&t).realize(&SampleStream::new(seed), index);
        let b = transform_generic(&t, &z.a).unwrap();
        for (x, y) in z.b.iter().zip(&b) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }
}

#[test]
fn fold_is_deterministic_and_chunk_independent() {
    let t = ghz_tensor(3, 0.5, 0.0).unwrap();
    let sampler = Sampler::new(&t);
    let stream = SampleStream::new(99);
    let count = (1 << 15) + 123;
    let run = || {
        sampler.fold(&stream, count, || 0.0f64, |s, _, b| *s += b[0].re, |x, y| x + y)
    };
    let a = run();
    assert_eq!(a.to_bits(), run().to_bits());
    let serial: f64 = (0..count).map(|i| sampler.realize(&stream, i).b[0].re).sum();
    assert!((a - serial).abs() < 1e-9 * count as f64);
}

#[test]
fn dump_round_trip() {
    let t = qubit_state_tensor(&[c(0.6, 0.0), c(0.0, 0.8)], 0.3).unwrap();
    let sampler = Sampler::new(&t);
    let zs = sampler.realizations(&SampleStream::new(4), 17);
    let mut buf = Vec::new();
    write_dump(&mut buf, sampler.num_modes(), &zs).unwrap();
    assert_eq!(buf.len(), 16 + 17 * 2 * 2 * 16);
    let (nd, back) = read_dump(buf.as_slice()).unwrap();
    assert_eq!(nd, 2);
    assert_eq!(back, zs);
}
