// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Stochastic realizations of the first-order pinched operators.
//!
//! Each annihilation operator is replaced by an independent circular complex
//! Gaussian with variance one half; `b̂ᵢ⁽¹⁾` then becomes a polynomial in the
//! conjugated draws.

use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{PinchError, Result};
use crate::rng::{RealizationRng, SampleStream};
use crate::tensor::{w_phase, SymmetricTensor};

/// Precomputed sparse form of `a ↦ b⁽¹⁾`.
#[derive(Debug, Clone)]
pub struct FirstOrderMap {
    num_modes: usize,
    /// For output mode `i` (0-based): `(coefficient, conjugated 0-based modes)`.
    rows: Vec<Vec<(Complex64, Vec<usize>)>>,
}

impl FirstOrderMap {
    pub fn new(tensor: &SymmetricTensor) -> Self {
        let nd = tensor.num_modes();
        let mut rows = vec![Vec::new(); nd];
        for (key, xi) in tensor.entries() {
            // one output row per distinct index; sum over orderings of the
            // remaining indices collapses to 1/Π m'ⱼ!
            let mut prev = 0;
            for (pos, &i) in key.iter().enumerate() {
                if i == prev {
                    continue;
                }
                prev = i;
                let mut rest: Vec<usize> = key.to_vec();
                rest.remove(pos);
                let mut weight = 1.0;
                let mut run = 1usize;
                for w in rest.windows(2) {
                    if w[0] == w[1] {
                        run += 1;
                        weight *= run as f64;
                    } else {
                        run = 1;
                    }
                }
                rows[i - 1].push((xi / weight, rest.iter().map(|m| m - 1).collect()));
            }
        }
        FirstOrderMap { num_modes: nd, rows }
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    /// `(coefficient, 1-based conjugated modes)` contributing to mode `i` (1-based).
    pub fn row(&self, mode: usize) -> Vec<(Complex64, Vec<usize>)> {
        self.rows[mode - 1]
            .iter()
            .map(|(c, m)| (*c, m.iter().map(|x| x + 1).collect()))
            .collect()
    }

    #[inline]
    pub fn apply_into(&self, a: &[Complex64], b: &mut [Complex64]) {
        debug_assert_eq!(a.len(), self.num_modes);
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = a[i];
            for (coeff, modes) in row {
                let mut prod = *coeff;
                for &m in modes {
                    prod *= a[m].conj();
                }
                acc += prod;
            }
            b[i] = acc;
        }
    }

    pub fn apply(&self, a: &[Complex64]) -> Vec<Complex64> {
        let mut b = vec![Complex64::new(0.0, 0.0); a.len()];
        self.apply_into(a, &mut b);
        b
    }
}

/// `nd` independent vacuum amplitudes drawn from `rng`.
pub fn draw_vacuum(rng: &mut RealizationRng, nd: usize) -> Vec<Complex64> {
    (0..nd).map(|_| rng.vacuum_amplitude()).collect()
}

/// `bᵢ = aᵢ + (1/(n−1)!) Σ ξ_{i,i₂..iₙ} conj(a_{i₂})⋯conj(a_{iₙ})`.
pub fn transform_generic(tensor: &SymmetricTensor, a: &[Complex64]) -> Result<Vec<Complex64>> {
    if a.len() != tensor.num_modes() {
        return Err(PinchError::InvalidArgument(format!(
            "{} amplitudes for a {}-mode tensor",
            a.len(),
            tensor.num_modes()
        )));
    }
    Ok(FirstOrderMap::new(tensor).apply(a))
}

fn check_qubit_modes(n: usize, a: &[Complex64]) -> Result<()> {
    if n < 2 || a.len() != 2 * n {
        return Err(PinchError::InvalidArgument(format!(
            "expected 2n = {} amplitudes with n >= 2, got {}",
            2 * n,
            a.len()
        )));
    }
    Ok(())
}

/// GHZ product form: H couples to conjugated H products, V to V products.
pub fn transform_ghz(n: usize, r: f64, theta: f64, a: &[Complex64]) -> Result<Vec<Complex64>> {
    check_qubit_modes(n, a)?;
    let phase = Complex64::from_polar(1.0, theta);
    let mut b = a.to_vec();
    for p in 0..n {
        let mut h = Complex64::new(r, 0.0);
        let mut v = phase * r;
        for q in (0..n).filter(|&q| q != p) {
            h *= a[2 * q].conj();
            v *= a[2 * q + 1].conj();
        }
        b[2 * p] += h;
        b[2 * p + 1] += v;
    }
    Ok(b)
}

/// W product form with amplitude `√(2/n)·r` on every term.
pub fn transform_w(n: usize, r: f64, thetas: &[f64], a: &[Complex64]) -> Result<Vec<Complex64>> {
    check_qubit_modes(n, a)?;
    if thetas.len() != n - 1 {
        return Err(PinchError::InvalidArgument(format!(
            "W transform needs {} phases (got {})",
            n - 1,
            thetas.len()
        )));
    }
    let amp = (2.0 / n as f64).sqrt() * r;
    let phase = |p: usize| Complex64::from_polar(1.0, w_phase(n, thetas, p + 1));
    let mut b = a.to_vec();
    for p in 0..n {
        let mut v = phase(p) * amp;
        for s in (0..n).filter(|&s| s != p) {
            v *= a[2 * s].conj();
        }
        b[2 * p + 1] += v;

        let mut h = Complex64::new(0.0, 0.0);
        for q in (0..n).filter(|&q| q != p) {
            let mut t = phase(q) * amp * a[2 * q + 1].conj();
            for s in (0..n).filter(|&s| s != p && s != q) {
                t *= a[2 * s].conj();
            }
            h += t;
        }
        b[2 * p] += h;
    }
    Ok(b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

/// Immutable sampler over one tensor.
#[derive(Debug, Clone)]
pub struct Sampler {
    map: FirstOrderMap,
}

impl Sampler {
    pub fn new(tensor: &SymmetricTensor) -> Self {
        Sampler {
            map: FirstOrderMap::new(tensor),
        }
    }

    pub fn num_modes(&self) -> usize {
        self.map.num_modes()
    }

    pub fn map(&self) -> &FirstOrderMap {
        &self.map
    }

    /// Writes realization `index` of `stream` into the buffers.
    #[inline]
    pub fn realize_into(&self, stream: &SampleStream, index: u64, a: &mut [Complex64], b: &mut [Complex64]) {
        let mut rng = stream.realization_rng(index);
        for x in a.iter_mut() {
            *x = rng.vacuum_amplitude();
        }
        self.map.apply_into(a, b);
    }

    pub fn realize(&self, stream: &SampleStream, index: u64) -> Realization {
        let nd = self.num_modes();
        let zero = Complex64::new(0.0, 0.0);
        let mut r = Realization {
            a: vec![zero; nd],
            b: vec![zero; nd],
        };
        self.realize_into(stream, index, &mut r.a, &mut r.b);
        r
    }

    /// Realizations `0..count` in index order.
    pub fn realizations(&self, stream: &SampleStream, count: u64) -> Vec<Realization> {
        (0..count).into_par_iter().map(|i| self.realize(stream, i)).collect()
    }

    /// Parallel fold over realizations `0..count`. `fold` sees `(acc, index, b)`;
    /// `merge` must be associative so the result does not depend on chunking.
    pub fn fold<T, F, M>(&self, stream: &SampleStream, count: u64, init: impl Fn() -> T + Sync + Send, fold: F, merge: M) -> T
    where
        T: Send,
        F: Fn(&mut T, u64, &[Complex64]) + Sync + Send,
        M: Fn(T, T) -> T + Sync + Send,
    {
        const CHUNK: u64 = 1 << 14;
        let nd = self.num_modes();
        let chunks = count.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let zero = Complex64::new(0.0, 0.0);
                let mut a = vec![zero; nd];
                let mut b = vec![zero; nd];
                let mut acc = init();
                for i in c * CHUNK..((c + 1) * CHUNK).min(count) {
                    self.realize_into(stream, i, &mut a, &mut b);
                    fold(&mut acc, i, &b);
                }
                acc
            })
            .reduce(&init, &merge)
    }
}

const DUMP_MAGIC: &[u8; 4] = b"PNCH";

/// Raw dump: `PNCH`, `nd: u32`, `count: u64`, then per realization the `nd`
/// `(re, im)` pairs of `a` followed by those of `b`, all little-endian.
pub fn write_dump<W: Write>(mut w: W, nd: usize, realizations: &[Realization]) -> Result<()> {
    w.write_all(DUMP_MAGIC)?;
    w.write_all(&(nd as u32).to_le_bytes())?;
    w.write_all(&(realizations.len() as u64).to_le_bytes())?;
    for r in realizations {
        if r.a.len() != nd || r.b.len() != nd {
            return Err(PinchError::InvalidArgument("realization length does not match nd".into()));
        }
        for z in r.a.iter().chain(&r.b) {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_dump<R: Read>(mut r: R) -> Result<(usize, Vec<Realization>)> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[..4] != DUMP_MAGIC {
        return Err(PinchError::Parse("not a realization dump".into()));
    }
    let nd = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes")) as usize;
    let count = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes"));
    let mut read_c = || -> Result<Complex64> {
        let mut buf = [0u8; 16];
        r.read_exact(&mut buf)?;
        Ok(Complex64::new(
            f64::from_le_bytes(buf[..8].try_into().expect("8 bytes")),
            f64::from_le_bytes(buf[8..].try_into().expect("8 bytes")),
        ))
    };
    let mut out = Vec::new();
    for _ in 0..count {
        let a = (0..nd).map(|_| read_c()).collect::<Result<Vec<_>>>()?;
        let b = (0..nd).map(|_| read_c()).collect::<Result<Vec<_>>>()?;
        out.push(Realization { a, b });
    }
    Ok((nd, out))
}
