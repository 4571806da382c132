// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Mermin operator terms and their estimation from post-selected samples.
//!
//! Every term is measured as its own setting on its own realizations, so each
//! term is averaged over a different post-selected subensemble.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{PinchError, Result};
use crate::measurement::{Basis, Unitary2};
use crate::pauli::{label_string, Pauli};
use crate::rng::SampleStream;
use crate::sampler::Sampler;
use crate::tensor::{fmt_f64, SymmetricTensor};
use crate::tomography::{histogram, mean_std};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MerminTerm {
    pub sign: i8,
    /// One of `X`, `Y` per photon, with an even number of `Y`.
    pub bases: Vec<Pauli>,
}

impl MerminTerm {
    pub fn paulis(&self) -> Vec<Pauli> {
        self.bases.clone()
    }

    /// Signed label such as `-XYY`.
    pub fn label(&self) -> String {
        format!("{}{}", if self.sign > 0 { '+' } else { '-' }, label_string(&self.bases))
    }
}

/// The `2ⁿ⁻¹` terms in lexicographic order (`X < Y`).
pub fn mermin_terms(n: usize) -> Vec<MerminTerm> {
    assert!((1..=usize::BITS as usize - 1).contains(&n), "n must be >= 1");
    (0..1usize << n)
        .filter(|s| s.count_ones() % 2 == 0)
        .map(|s| {
            let bases = (0..n)
                .map(|k| if s & (1 << (n - 1 - k)) != 0 { Pauli::Y } else { Pauli::X })
                .collect();
            let pairs = s.count_ones() / 2;
            MerminTerm {
                sign: if pairs % 2 == 0 { 1 } else { -1 },
                bases,
            }
        })
        .collect()
}

/// `2^{⌊n/2⌋}`: `2^{n/2}` for even `n`, `2^{(n−1)/2}` for odd `n`.
pub fn classical_bound(n: usize) -> f64 {
    2f64.powi((n / 2) as i32)
}

pub fn quantum_bound(n: usize) -> f64 {
    2f64.powi(n as i32 - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermEstimate {
    pub term: MerminTerm,
    /// Mean `±1` product; `None` without coincidences.
    pub expectation: Option<f64>,
    pub coincidences: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MerminEstimate {
    /// Signed sum of term expectations; `None` if any term had no coincidences.
    pub m: Option<f64>,
    pub terms: Vec<TermEstimate>,
}

impl MerminEstimate {
    pub fn value(&self) -> Result<f64> {
        self.m.ok_or_else(|| {
            let starved: Vec<String> = self
                .terms
                .iter()
                .filter(|t| t.expectation.is_none())
                .map(|t| t.term.label())
                .collect();
            PinchError::NoCoincidences(format!("Mermin terms {}", starved.join(" ")))
        })
    }
}

/// One estimate of `M_n`; term `k` uses `stream.substream(k)`.
pub fn mermin_statistic(
    tensor: &SymmetricTensor,
    gamma: f64,
    samples_per_setting: u64,
    stream: &SampleStream,
) -> Result<MerminEstimate> {
    if samples_per_setting == 0 {
        return Err(PinchError::InvalidArgument("samples_per_setting must be >= 1".into()));
    }
    if tensor.modes_per_photon() != 2 {
        return Err(PinchError::InvalidArgument("Mermin test needs two modes per photon".into()));
    }
    if !(gamma > 0.0) {
        return Err(PinchError::InvalidArgument(format!("threshold must be positive (got {gamma})")));
    }
    let n = tensor.rank();
    let sampler = Sampler::new(tensor);
    let terms: Vec<TermEstimate> = mermin_terms(n)
        .into_par_iter()
        .enumerate()
        .map(|(k, term)| {
            let bases: Vec<Unitary2> = term
                .bases
                .iter()
                .map(|&p| Basis::from_pauli(p).expect("X or Y").matrix())
                .collect();
            let h = histogram(&sampler, &stream.substream(k as u64), samples_per_setting, &bases, gamma);
            let count: u64 = h.iter().sum();
            let signed: i64 = h
                .iter()
                .enumerate()
                .map(|(p, &c)| if p.count_ones() % 2 == 0 { c as i64 } else { -(c as i64) })
                .sum();
            TermEstimate {
                term,
                expectation: (count > 0).then(|| signed as f64 / count as f64),
                coincidences: count,
            }
        })
        .collect();
    let m = terms
        .iter()
        .map(|t| t.expectation.map(|e| t.term.sign as f64 * e))
        .sum::<Option<f64>>();
    Ok(MerminEstimate { m, terms })
}

/// Summary over independent repeats.
#[derive(Debug, Clone, PartialEq)]
pub struct MerminSummary {
    pub mean: f64,
    /// Sample standard deviation across repeats.
    pub stddev: f64,
    pub runs: Vec<MerminEstimate>,
}

/// `repeats` independent estimates; repeat `j` uses `stream.substream(j)`.
pub fn mermin_repeats(
    tensor: &SymmetricTensor,
    gamma: f64,
    samples_per_setting: u64,
    repeats: usize,
    stream: &SampleStream,
) -> Result<MerminSummary> {
    if repeats == 0 {
        return Err(PinchError::InvalidArgument("repeats must be >= 1".into()));
    }
    let runs = (0..repeats)
        .map(|j| mermin_statistic(tensor, gamma, samples_per_setting, &stream.substream(j as u64)))
        .collect::<Result<Vec<_>>>()?;
    let values = runs.iter().map(|r| r.value()).collect::<Result<Vec<_>>>()?;
    let (mean, stddev) = mean_std(&values);
    Ok(MerminSummary { mean, stddev, runs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub r: f64,
    pub result: Result<MerminSummary>,
}

/// `M_n` along a grid of pinching strengths; grid point `k` uses
/// `stream.substream(k)`. Failures are kept per point.
pub fn mermin_scan<F>(
    family: F,
    grid: &[f64],
    gamma: f64,
    samples_per_setting: u64,
    repeats: usize,
    stream: &SampleStream,
) -> Result<Vec<ScanPoint>>
where
    F: Fn(f64) -> Result<SymmetricTensor>,
{
    if grid.is_empty() {
        return Err(PinchError::InvalidArgument("empty r grid".into()));
    }
    Ok(grid
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let result = family(r).and_then(|t| {
                mermin_repeats(&t, gamma, samples_per_setting, repeats, &stream.substream(k as u64))
            });
            ScanPoint { r, result }
        })
        .collect())
}

/// Rows `n,r,gamma,term,expectation,coincidences` for one estimate.
pub fn terms_csv(n: usize, r: f64, gamma: f64, estimate: &MerminEstimate, header: bool) -> String {
    let mut out = String::new();
    if header {
        out.push_str("n,r,gamma,term,expectation,coincidences\n");
    }
    for t in &estimate.terms {
        let _ = writeln!(
            out,
            "{n},{},{},{},{},{}",
            fmt_f64(r),
            fmt_f64(gamma),
            t.term.label(),
            t.expectation.map(fmt_f64).unwrap_or_default(),
            t.coincidences
        );
    }
    out
}

pub const SUMMARY_HEADER: &str = "n,r,gamma,M,stddev,classical_bound,quantum_bound";

/// One `n,r,gamma,M,stddev,classical_bound,quantum_bound` row.
pub fn summary_row(n: usize, r: f64, gamma: f64, summary: Option<&MerminSummary>) -> String {
    let (m, s) = summary
        .map(|s| (fmt_f64(s.mean), if s.stddev.is_finite() { fmt_f64(s.stddev) } else { String::new() }))
        .unwrap_or_default();
    format!(
        "{n},{},{},{m},{s},{},{}",
        fmt_f64(r),
        fmt_f64(gamma),
        fmt_f64(classical_bound(n)),
        fmt_f64(quantum_bound(n))
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ghz_tensor;

    fn labels(n: usize) -> Vec<String> {
        mermin_terms(n).iter().map(|t| t.label()).collect()
    }

    #[test]
    fn term_lists() {
        assert_eq!(labels(2), ["+XX", "-YY"]);
        assert_eq!(labels(3), ["+XXX", "-XYY", "-YXY", "-YYX"]);
        let four = labels(4);
        assert_eq!(four.len(), 8);
        assert_eq!(four[0], "+XXXX");
        assert_eq!(four[7], "+YYYY");
        assert_eq!(four.iter().filter(|l| l.starts_with('-')).count(), 6);
        assert_eq!(labels(1), ["+X"]);
        for n in 1..=10 {
            assert_eq!(mermin_terms(n).len(), 1 << (n - 1));
        }
    }

    #[test]
    fn bounds() {
        assert_eq!((classical_bound(3), quantum_bound(3)), (2.0, 4.0));
        assert_eq!((classical_bound(4), quantum_bound(4)), (4.0, 8.0));
        assert_eq!((classical_bound(1), quantum_bound(1)), (1.0, 1.0));
        assert_eq!(classical_bound(5), 4.0);
    }

    #[test]
    fn zero_strength_is_unavailable() {
        let t = ghz_tensor(3, 0.0, 0.0).unwrap();
        let est = mermin_statistic(&t, 2.0, 5_000, &SampleStream::new(3)).unwrap();
        assert_eq!(est.m, None);
        assert!(matches!(est.value(), Err(PinchError::NoCoincidences(_))));
    }

    #[test]
    fn small_run_violates_and_reproduces() {
        let t = ghz_tensor(3, 0.6, 0.0).unwrap();
        let s = SampleStream::new(10);
        let a = mermin_statistic(&t, 1.5, 1 << 15, &s).unwrap();
        let b = mermin_statistic(&t, 1.5, 1 << 15, &s).unwrap();
        assert_eq!(a, b);
        assert!(a.value().unwrap() > 2.0);
        let csv = terms_csv(3, 0.6, 1.5, &a, true);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().nth(2).unwrap().starts_with("3,5.9999999999999998e-1,1.5000000000000000e0,-XYY,"));
    }

    #[test]
    fn summary_row_layout() {
        assert_eq!(
            summary_row(3, 1.0, 0.5, None),
            "3,1.0000000000000000e0,5.0000000000000000e-1,,,2.0000000000000000e0,4.0000000000000000e0"
        );
    }
}
