// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Symmetric pinching tensors.
//!
//! A rank-`n` tensor over `n·d` modes is stored sparsely, keyed by the sorted
//! multiset of its (1-based) indices, so permutation symmetry holds by
//! construction. The constructors here build the GHZ and W tensors and the
//! general mapping from an `n`-qubit amplitude vector.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{PinchError, Result};

const NORM_TOL: f64 = 1e-12;

/// Maximum number of distinct elements of a symmetric rank-`n` tensor over
/// `n·d` modes, `Σ_{k=1}^{n} C(nd, k)`.
pub fn distinct_element_count(n: usize, d: usize) -> Result<u128> {
    if n == 0 || d == 0 {
        return Err(PinchError::InvalidArgument(format!(
            "distinct_element_count needs n >= 1 and d >= 1 (got n={n}, d={d})"
        )));
    }
    let nd = (n as u128)
        .checked_mul(d as u128)
        .ok_or(PinchError::Overflow("n*d"))?;
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for k in 1..=n as u128 {
        if k > nd {
            break;
        }
        // C(nd, k) = C(nd, k-1) * (nd - k + 1) / k, exact at every step
        binom = binom
            .checked_mul(nd - k + 1)
            .ok_or(PinchError::Overflow("binomial coefficient"))?
            / k;
        total = total
            .checked_add(binom)
            .ok_or(PinchError::Overflow("distinct element count"))?;
    }
    Ok(total)
}

/// Polarization of a photon (the `d = 2` convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    H,
    V,
}

/// A photon/polarization pair; flat index `2(photon-1) + 1` for H, `+ 2` for V.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeLabel {
    pub photon: usize,
    pub polarization: Polarization,
}

impl ModeLabel {
    pub fn new(photon: usize, polarization: Polarization) -> Self {
        assert!(photon >= 1, "photons are numbered from 1");
        ModeLabel {
            photon,
            polarization,
        }
    }

    pub fn h(photon: usize) -> Self {
        Self::new(photon, Polarization::H)
    }

    pub fn v(photon: usize) -> Self {
        Self::new(photon, Polarization::V)
    }

    pub fn flat(self) -> usize {
        2 * (self.photon - 1)
            + match self.polarization {
                Polarization::H => 1,
                Polarization::V => 2,
            }
    }

    pub fn from_flat(index: usize) -> Result<Self> {
        if index == 0 {
            return Err(PinchError::InvalidArgument(
                "flat mode indices start at 1".into(),
            ));
        }
        let photon = (index - 1) / 2 + 1;
        let polarization = if index % 2 == 1 {
            Polarization::H
        } else {
            Polarization::V
        };
        Ok(ModeLabel {
            photon,
            polarization,
        })
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.polarization {
            Polarization::H => 'H',
            Polarization::V => 'V',
        };
        write!(f, "{}{}", self.photon, p)
    }
}

/// Rank-`n` symmetric complex tensor over `n·d` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensor {
    rank: usize,
    modes_per_photon: usize,
    entries: BTreeMap<Vec<usize>, Complex64>,
}

impl SymmetricTensor {
    /// The zero tensor.
    pub fn zeros(rank: usize, modes_per_photon: usize) -> Result<Self> {
        if rank == 0 || modes_per_photon == 0 {
            return Err(PinchError::InvalidArgument(format!(
                "tensor needs n >= 1 and d >= 1 (got n={rank}, d={modes_per_photon})"
            )));
        }
        Ok(SymmetricTensor {
            rank,
            modes_per_photon,
            entries: BTreeMap::new(),
        })
    }

    pub fn from_entries<I, K>(rank: usize, modes_per_photon: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, Complex64)>,
        K: AsRef<[usize]>,
    {
        let mut t = Self::zeros(rank, modes_per_photon)?;
        for (k, v) in entries {
            t.set(k.as_ref(), v)?;
        }
        Ok(t)
    }

    /// Photon count `n`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Modes per photon `d`.
    pub fn modes_per_photon(&self) -> usize {
        self.modes_per_photon
    }

    /// Total mode count `n·d`.
    pub fn num_modes(&self) -> usize {
        self.rank * self.modes_per_photon
    }

    fn canonical_key(&self, indices: &[usize]) -> Result<Vec<usize>> {
        if indices.len() != self.rank {
            return Err(PinchError::InvalidArgument(format!(
                "expected {} indices, got {}",
                self.rank,
                indices.len()
            )));
        }
        let nd = self.num_modes();
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > nd) {
            return Err(PinchError::InvalidArgument(format!(
                "index {bad} outside 1..={nd}"
            )));
        }
        let mut key = indices.to_vec();
        key.sort_unstable();
        Ok(key)
    }

    /// Sets the value of every permutation of `indices`. Exact zeros remove the entry.
    pub fn set(&mut self, indices: &[usize], value: Complex64) -> Result<()> {
        let key = self.canonical_key(indices)?;
        if value == Complex64::new(0.0, 0.0) {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    /// Value at any ordering of `indices`; zero when unset.
    pub fn get(&self, indices: &[usize]) -> Result<Complex64> {
        let key = self.canonical_key(indices)?;
        Ok(self.entries.get(&key).copied().unwrap_or_default())
    }

    /// Distinct stored entries as (sorted multiset, value).
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], Complex64)> + '_ {
        self.entries.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn num_stored(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|v| v.norm_sqr() == 0.0)
    }

    /// Number of stored keys having exactly `k` distinct indices.
    pub fn count_with_distinct(&self, k: usize) -> usize {
        self.entries
            .keys()
            .filter(|key| distinct_in_sorted(key) == k)
            .count()
    }

    /// `Σ |ξ|²` over distinct multisets.
    pub fn distinct_norm_sqr(&self) -> f64 {
        self.entries.values().map(|v| v.norm_sqr()).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Entrywise scaled copy.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = Self::zeros(self.rank, self.modes_per_photon).expect("valid shape");
        for (k, v) in &self.entries {
            let w = v * factor;
            if w != Complex64::new(0.0, 0.0) {
                out.entries.insert(k.clone(), w);
            }
        }
        out
    }

    /// Serializes to the `pinch-tensor v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "pinch-tensor v1 n={} d={}\n",
            self.rank, self.modes_per_photon
        );
        for (k, v) in &self.entries {
            let idx: Vec<String> = k.iter().map(|i| i.to_string()).collect();
            out.push_str(&format!(
                "{} {} {}\n",
                idx.join(","),
                fmt_f64(v.re),
                fmt_f64(v.im)
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| PinchError::Parse("empty tensor file".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "pinch-tensor" || parts[1] != "v1" {
            return Err(PinchError::Parse(format!("bad header: {header:?}")));
        }
        let n = parse_kv(parts[2], "n")?;
        let d = parse_kv(parts[3], "d")?;
        let mut t = SymmetricTensor::zeros(n, d)?;
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(PinchError::Parse(format!("bad entry line: {line:?}")));
            }
            let idx = fields[0]
                .split(',')
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|e| PinchError::Parse(format!("index {s:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let re = parse_f64(fields[1])?;
            let im = parse_f64(fields[2])?;
            t.set(&idx, Complex64::new(re, im))?;
        }
        Ok(t)
    }
}

impl FromStr for SymmetricTensor {
    type Err = PinchError;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_text(s)
    }
}

fn distinct_in_sorted(key: &[usize]) -> usize {
    if key.is_empty() {
        return 0;
    }
    1 + key.windows(2).filter(|w| w[0] != w[1]).count()
}

fn parse_kv(field: &str, key: &str) -> Result<usize> {
    field
        .strip_prefix(key)
        .and_then(|s| s.strip_prefix('='))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| PinchError::Parse(format!("expected {key}=<int>, got {field:?}")))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|e| PinchError::Parse(format!("float {s:?}: {e}")))
}

/// 17 significant digits; parses back to the identical `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Flat mode of photon `photon` (1-based) for qubit value `bit` (0 = H, 1 = V).
fn qubit_mode(photon: usize, bit: usize) -> usize {
    2 * (photon - 1) + 1 + bit
}

/// Bit of photon `photon` (1-based) in basis index `s`; photon 1 is the most
/// significant bit.
pub fn photon_bit(s: usize, photon: usize, n: usize) -> usize {
    (s >> (n - photon)) & 1
}

/// GHZ tensor: `r` on `{1H,…,nH}`, `r·e^{iθ}` on `{1V,…,nV}`.
pub fn ghz_tensor(n: usize, r: f64, theta: f64) -> Result<SymmetricTensor> {
    if n < 2 {
        return Err(PinchError::InvalidArgument(format!(
            "GHZ tensor needs n >= 2 (got {n})"
        )));
    }
    let mut t = SymmetricTensor::zeros(n, 2)?;
    let h: Vec<usize> = (1..=n).map(|p| qubit_mode(p, 0)).collect();
    let v: Vec<usize> = (1..=n).map(|p| qubit_mode(p, 1)).collect();
    t.set(&h, Complex64::new(r, 0.0))?;
    t.set(&v, Complex64::from_polar(r, theta))?;
    Ok(t)
}

/// Phase of the W component whose V photon is `photon` (1-based). Photon `n`
/// carries phase 0 and photon `n - j` carries `thetas[j - 1]`.
pub fn w_phase(n: usize, thetas: &[f64], photon: usize) -> f64 {
    if photon == n {
        0.0
    } else {
        thetas[n - photon - 1]
    }
}

/// W tensor: `√(2/n)·r·e^{iθ}` on each multiset with exactly one V photon.
pub fn w_tensor(n: usize, r: f64, thetas: &[f64]) -> Result<SymmetricTensor> {
    if n < 2 {
        return Err(PinchError::InvalidArgument(format!(
            "W tensor needs n >= 2 (got {n})"
        )));
    }
    if thetas.len() != n - 1 {
        return Err(PinchError::InvalidArgument(format!(
            "W tensor needs {} phases (got {})",
            n - 1,
            thetas.len()
        )));
    }
    let mut t = SymmetricTensor::zeros(n, 2)?;
    let amp = (2.0 / n as f64).sqrt() * r;
    for vp in 1..=n {
        let key: Vec<usize> = (1..=n)
            .map(|p| qubit_mode(p, usize::from(p == vp)))
            .collect();
        t.set(&key, Complex64::from_polar(amp, w_phase(n, thetas, vp)))?;
    }
    Ok(t)
}

/// Tensor with `r·α_s` on the multiset that assigns photon `k` to H (bit 0)
/// or V (bit 1) of bitstring `s`.
///
/// With this convention the pinched state is `|0⟩ + r|ψ⟩` to first order, so
/// `ghz_tensor(n, r, θ)` equals `qubit_state_tensor(ghz, √2·r)`.
pub fn qubit_state_tensor(amplitudes: &[Complex64], r: f64) -> Result<SymmetricTensor> {
    let n = qubit_count(amplitudes.len())?;
    check_normalized(amplitudes)?;
    let mut t = SymmetricTensor::zeros(n, 2)?;
    for (s, &alpha) in amplitudes.iter().enumerate() {
        let key: Vec<usize> = (1..=n)
            .map(|p| qubit_mode(p, photon_bit(s, p, n)))
            .collect();
        t.set(&key, alpha * r)?;
    }
    Ok(t)
}

/// `n` such that `len == 2^n`, `n >= 1`.
pub fn qubit_count(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(PinchError::InvalidArgument(format!(
            "amplitude vector length {len} is not 2^n with n >= 1"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

pub(crate) fn check_normalized(amplitudes: &[Complex64]) -> Result<()> {
    let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (norm.sqrt() - 1.0).abs() > NORM_TOL || !norm.is_finite() {
        return Err(PinchError::NotNormalized(norm));
    }
    Ok(())
}

/// `(|H…H⟩ + e^{iθ}|V…V⟩)/√2`.
pub fn ghz_amplitudes(n: usize, theta: f64) -> Vec<Complex64> {
    let mut a = vec![Complex64::new(0.0, 0.0); 1 << n];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    a[0] = Complex64::new(s, 0.0);
    a[(1 << n) - 1] = Complex64::from_polar(s, theta);
    a
}

/// `(1/√n) Σ_p e^{iθ_p} |H…V_p…H⟩`, phases as in [`w_phase`].
pub fn w_amplitudes(n: usize, thetas: &[f64]) -> Vec<Complex64> {
    assert_eq!(thetas.len(), n - 1, "W state needs n-1 phases");
    let mut a = vec![Complex64::new(0.0, 0.0); 1 << n];
    let s = 1.0 / (n as f64).sqrt();
    for p in 1..=n {
        a[1 << (n - p)] = Complex64::from_polar(s, w_phase(n, thetas, p));
    }
    a
}
