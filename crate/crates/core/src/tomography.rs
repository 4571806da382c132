// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Linear state tomography from post-selected coincidence counts.
//!
//! All `3ⁿ` settings over `{X, Y, Z}` are measured on fresh realizations. A
//! setting yields the `±1` products for every label obtained by replacing some
//! of its factors with `I`; labels reachable from several settings are
//! averaged with coincidence-count weights.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{PinchError, Result};
use crate::measurement::{coincidence_pattern, Basis, Unitary2};
use crate::pauli::{label_from_index, label_index, label_string, pauli_action, pauli_expectation, Pauli};
use crate::rng::SampleStream;
use crate::sampler::Sampler;
use crate::tensor::{check_normalized, fmt_f64, qubit_count, SymmetricTensor};

/// Outcome histogram of one measured setting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettingCounts {
    pub setting: Vec<Pauli>,
    /// Index = outcome pattern (bit set for `−1`, photon 1 most significant).
    pub histogram: Vec<u64>,
    pub samples: u64,
}

impl SettingCounts {
    pub fn coincidences(&self) -> u64 {
        self.histogram.iter().sum()
    }

    /// Sum of the `±1` product over the photons in `mask`.
    pub fn signed_sum(&self, mask: usize) -> i64 {
        self.histogram
            .iter()
            .enumerate()
            .map(|(pat, &c)| if (pat & mask).count_ones() % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }
}

/// Estimated Pauli correlations `T(μ)` for all `4ⁿ` labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    n: usize,
    values: Vec<Option<f64>>,
    coincidences: Vec<u64>,
    samples: Vec<u64>,
    samples_per_setting: u64,
    settings: Vec<SettingCounts>,
}

impl CorrelationTable {
    /// Exact `Re⟨ψ|σ_μ|ψ⟩` for every label.
    pub fn exact(amplitudes: &[Complex64]) -> Result<Self> {
        check_normalized(amplitudes)?;
        let n = qubit_count(amplitudes.len())?;
        let len = 4usize.pow(n as u32);
        let mut values: Vec<Option<f64>> = (0..len)
            .map(|i| Some(pauli_expectation(amplitudes, &label_from_index(i, n)).re))
            .collect();
        values[0] = Some(1.0);
        Ok(CorrelationTable {
            n,
            values,
            coincidences: vec![0; len],
            samples: vec![0; len],
            samples_per_setting: 0,
            settings: Vec::new(),
        })
    }

    /// Table from per-setting histograms.
    pub fn from_settings(n: usize, samples_per_setting: u64, settings: Vec<SettingCounts>) -> Self {
        let len = 4usize.pow(n as u32);
        let mut sums = vec![0i64; len];
        let mut coincidences = vec![0u64; len];
        let mut samples = vec![0u64; len];
        let full = (1usize << n) - 1;
        for sc in &settings {
            let count = sc.coincidences();
            // every subset of photons kept; the rest become identity
            for mask in 0..=full {
                let label: Vec<Pauli> = sc
                    .setting
                    .iter()
                    .enumerate()
                    .map(|(k, &p)| if mask & (1 << (n - 1 - k)) != 0 { p } else { Pauli::I })
                    .collect();
                let idx = label_index(&label);
                sums[idx] += sc.signed_sum(mask);
                coincidences[idx] += count;
                samples[idx] += sc.samples;
            }
        }
        let mut values: Vec<Option<f64>> = (0..len)
            .map(|i| (coincidences[i] > 0).then(|| sums[i] as f64 / coincidences[i] as f64))
            .collect();
        values[0] = Some(1.0);
        CorrelationTable {
            n,
            values,
            coincidences,
            samples,
            samples_per_setting,
            settings,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn samples_per_setting(&self) -> u64 {
        self.samples_per_setting
    }

    pub fn settings(&self) -> &[SettingCounts] {
        &self.settings
    }

    pub fn get(&self, label: &[Pauli]) -> Option<f64> {
        self.values[label_index(label)]
    }

    pub fn coincidences(&self, label: &[Pauli]) -> u64 {
        self.coincidences[label_index(label)]
    }

    /// Total post-selected events over all measured settings.
    pub fn total_coincidences(&self) -> u64 {
        self.settings.iter().map(|s| s.coincidences()).sum()
    }

    pub fn missing(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// CSV `labels,mu_value,coincidences,samples`; missing values are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("labels,mu_value,coincidences,samples\n");
        for (i, v) in self.values.iter().enumerate() {
            let label = label_string(&label_from_index(i, self.n));
            let value = v.map(fmt_f64).unwrap_or_default();
            let _ = writeln!(out, "{label},{value},{},{}", self.coincidences[i], self.samples[i]);
        }
        out
    }
}

/// Measures all `3ⁿ` settings, each with its own substream.
pub fn run_tomography(
    tensor: &SymmetricTensor,
    gamma: f64,
    samples_per_setting: u64,
    stream: &SampleStream,
) -> Result<CorrelationTable> {
    if samples_per_setting == 0 {
        return Err(PinchError::InvalidArgument("samples_per_setting must be >= 1".into()));
    }
    if tensor.modes_per_photon() != 2 {
        return Err(PinchError::InvalidArgument("tomography needs two modes per photon".into()));
    }
    if !(gamma > 0.0) {
        return Err(PinchError::InvalidArgument(format!("threshold must be positive (got {gamma})")));
    }
    let n = tensor.rank();
    let sampler = Sampler::new(tensor);
    let settings: Vec<Vec<Pauli>> = (0..3usize.pow(n as u32))
        .map(|mut s| {
            let mut label = vec![Pauli::X; n];
            for slot in label.iter_mut().rev() {
                *slot = [Pauli::X, Pauli::Y, Pauli::Z][s % 3];
                s /= 3;
            }
            label
        })
        .collect();
    let counts: Vec<SettingCounts> = settings
        .into_par_iter()
        .map(|setting| {
            let bases: Vec<Unitary2> = setting
                .iter()
                .map(|&p| Basis::from_pauli(p).expect("non-identity").matrix())
                .collect();
            let sub = stream.substream(label_index(&setting) as u64);
            let histogram = histogram(&sampler, &sub, samples_per_setting, &bases, gamma);
            SettingCounts {
                setting,
                histogram,
                samples: samples_per_setting,
            }
        })
        .collect();
    Ok(CorrelationTable::from_settings(n, samples_per_setting, counts))
}

/// Coincidence-pattern histogram for one setting.
pub fn histogram(sampler: &Sampler, stream: &SampleStream, samples: u64, bases: &[Unitary2], gamma: f64) -> Vec<u64> {
    let len = 1usize << bases.len();
    sampler.fold(
        stream,
        samples,
        || vec![0u64; len],
        |h, _, b| {
            if let Some(p) = coincidence_pattern(b, bases, gamma) {
                h[p] += 1;
            }
        },
        |mut x, y| {
            for (a, b) in x.iter_mut().zip(y) {
                *a += b;
            }
            x
        },
    )
}

/// Reconstructed (possibly non-positive) density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn pure(amplitudes: &[Complex64]) -> Self {
        let v = DMatrix::from_column_slice(amplitudes.len(), 1, amplitudes);
        DensityMatrix { rho: &v * v.adjoint() }
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).norm()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.rho.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| a.total_cmp(b));
        e
    }

    /// `dim N` then one line per row of `re im` pairs.
    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim());
        for r in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|c| format!("{} {}", fmt_f64(self.rho[(r, c)].re), fmt_f64(self.rho[(r, c)].im)))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let dim: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("dim "))
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| PinchError::Parse("missing `dim N` header".into()))?;
        let mut rho = DMatrix::zeros(dim, dim);
        for r in 0..dim {
            let line = lines.next().ok_or_else(|| PinchError::Parse(format!("missing row {r}")))?;
            let nums: Vec<f64> = line
                .split_whitespace()
                .map(|x| x.parse().map_err(|_| PinchError::Parse(format!("bad number {x:?}"))))
                .collect::<Result<_>>()?;
            if nums.len() != 2 * dim {
                return Err(PinchError::Parse(format!("row {r} has {} numbers", nums.len())));
            }
            for c in 0..dim {
                rho[(r, c)] = Complex64::new(nums[2 * c], nums[2 * c + 1]);
            }
        }
        Ok(DensityMatrix { rho })
    }
}

/// `ρ = 2⁻ⁿ Σ_μ T(μ) σ_μ`, then `(ρ + ρ†)/2`.
pub fn reconstruct(table: &CorrelationTable) -> Result<DensityMatrix> {
    let missing = table.missing();
    if missing > 0 {
        return Err(PinchError::MissingLabels(missing));
    }
    let n = table.n;
    let dim = 1usize << n;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, v) in table.values.iter().enumerate() {
        let t = v.expect("checked");
        if t == 0.0 {
            continue;
        }
        let label = label_from_index(i, n);
        for s in 0..dim {
            let (row, phase) = pauli_action(&label, s);
            rho[(row, s)] += phase * t;
        }
    }
    rho /= Complex64::new(dim as f64, 0.0);
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(DensityMatrix { rho })
}

/// `Re⟨target|ρ|target⟩`.
pub fn fidelity(rho: &DensityMatrix, target: &[Complex64]) -> Result<f64> {
    check_normalized(target)?;
    if target.len() != rho.dim() {
        return Err(PinchError::InvalidArgument(format!(
            "target has {} amplitudes, ρ is {}-dimensional",
            target.len(),
            rho.dim()
        )));
    }
    let v = DMatrix::from_column_slice(target.len(), 1, target);
    Ok((v.adjoint() * &rho.rho * v)[(0, 0)].re)
}

/// One full tomography run and its fidelity against `target`.
pub fn tomography_fidelity(
    tensor: &SymmetricTensor,
    gamma: f64,
    samples_per_setting: u64,
    stream: &SampleStream,
    target: &[Complex64],
) -> Result<(f64, CorrelationTable)> {
    let table = run_tomography(tensor, gamma, samples_per_setting, stream)?;
    if table.total_coincidences() == 0 {
        return Err(PinchError::NoCoincidences("all tomography settings".into()));
    }
    let rho = reconstruct(&table)?;
    Ok((fidelity(&rho, target)?, table))
}

/// Mean and sample standard deviation of the fidelity over `repeats`
/// independent runs; run `k` uses `stream.substream(k)`. Also returns the
/// total coincidence count.
pub fn fidelity_with_uncertainty(
    tensor: &SymmetricTensor,
    gamma: f64,
    samples_per_setting: u64,
    repeats: usize,
    stream: &SampleStream,
    target: &[Complex64],
) -> Result<(f64, f64, u64)> {
    if repeats < 2 {
        return Err(PinchError::InvalidArgument("repeats must be >= 2".into()));
    }
    let mut fs = Vec::with_capacity(repeats);
    let mut total = 0;
    for k in 0..repeats {
        let (f, table) = tomography_fidelity(tensor, gamma, samples_per_setting, &stream.substream(k as u64), target)?;
        fs.push(f);
        total += table.total_coincidences();
    }
    let (mean, std) = mean_std(&fs);
    Ok((mean, std, total))
}

/// Sample mean and sample (n−1) standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
