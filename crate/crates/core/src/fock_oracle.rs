// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Exact reference computations on a truncated multimode Fock space.
//!
//! Ladder operators and generators are sparse matrices over a lexicographic
//! basis of occupation vectors. States come from applying the (truncated)
//! exponential series to the vacuum; the conjugation identity
//! `e^{−A} X e^{A} = Σ C⁽ᵏ⁾/k!` is checked against a dense matrix exponential.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bogoliubov::generator;
use crate::error::{PinchError, Result};
use crate::mermin::mermin_terms;
use crate::operator::{Ladder, OperatorPolynomial};
use crate::pauli::pauli_expectation;
use crate::tensor::{check_normalized, photon_bit, qubit_count, SymmetricTensor};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Occupation-number basis with per-mode cutoff and optional total cap.
#[derive(Debug, Clone)]
pub struct TruncatedFockSpace {
    modes: usize,
    cutoff: usize,
    total_cap: Option<usize>,
    basis: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl TruncatedFockSpace {
    pub fn new(modes: usize, cutoff: usize, total_cap: Option<usize>) -> Result<Self> {
        if modes == 0 || cutoff == 0 {
            return Err(PinchError::InvalidArgument(format!(
                "Fock space needs modes >= 1 and cutoff >= 1 (got {modes}, {cutoff})"
            )));
        }
        if cutoff > u8::MAX as usize {
            return Err(PinchError::InvalidArgument("cutoff too large".into()));
        }
        let mut basis = Vec::new();
        let mut occ = vec![0u8; modes];
        loop {
            let total: usize = occ.iter().map(|&x| x as usize).sum();
            if total_cap.is_none_or(|cap| total <= cap) {
                basis.push(occ.clone());
            }
            // lexicographic odometer, last mode fastest
            let Some(pos) = (0..modes).rev().find(|&p| (occ[p] as usize) < cutoff) else {
                break;
            };
            occ[pos] += 1;
            for x in occ.iter_mut().skip(pos + 1) {
                *x = 0;
            }
        }
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        Ok(TruncatedFockSpace {
            modes,
            cutoff,
            total_cap,
            basis,
            index,
        })
    }

    /// Defaults for `n` photons with `d` modes each: cutoff 2, total cap `2n`.
    pub fn for_tensor(tensor: &SymmetricTensor) -> Result<Self> {
        Self::new(tensor.num_modes(), 2, Some(2 * tensor.rank()))
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn total_cap(&self) -> Option<usize> {
        self.total_cap
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn occupations(&self, index: usize) -> &[u8] {
        &self.basis[index]
    }

    pub fn index_of(&self, occupations: &[u8]) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    pub fn vacuum_index(&self) -> usize {
        0
    }

    /// Basis states where every mode is strictly below the cutoff (and the
    /// total strictly below the cap), where `[a, a†] = 1` is not truncated.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| {
                let occ = &self.basis[i];
                let total: usize = occ.iter().map(|&x| x as usize).sum();
                occ.iter().all(|&x| (x as usize) < self.cutoff)
                    && self.total_cap.is_none_or(|cap| total < cap)
            })
            .collect()
    }

    /// Basis label such as `|1,0,1,0,1,0⟩`.
    pub fn label(&self, index: usize) -> String {
        let parts: Vec<String> = self.basis[index].iter().map(|x| x.to_string()).collect();
        format!("|{}⟩", parts.join(","))
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode == 0 || mode > self.modes {
            return Err(PinchError::InvalidArgument(format!(
                "mode {mode} outside 1..={}",
                self.modes
            )));
        }
        Ok(())
    }
}

/// Sparse complex matrix in triplet form with merged duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        SparseMatrix {
            dim,
            entries: (0..dim).map(|i| (i, i, ONE)).collect(),
        }
    }

    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut map: HashMap<(usize, usize), Complex64> = HashMap::new();
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet out of range");
            *map.entry((r, c)).or_default() += v;
        }
        let mut entries: Vec<_> = map
            .into_iter()
            .filter(|(_, v)| *v != ZERO)
            .map(|((r, c), v)| (r, c, v))
            .collect();
        entries.sort_by_key(|&(r, c, _)| (c, r));
        SparseMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn triplets(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries
            .iter()
            .find(|&&(r, c, _)| r == row && c == col)
            .map(|e| e.2)
            .unwrap_or_default()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, f: Complex64) -> Self {
        Self::from_triplets(self.dim, self.entries.iter().map(|&(r, c, v)| (r, c, v * f)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.entries.iter().chain(other.entries.iter()).copied())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut by_row: HashMap<usize, Vec<(usize, Complex64)>> = HashMap::new();
        for &(r, c, v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = Vec::new();
        for &(r, k, v) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, w) in row {
                    out.push((r, c, v * w));
                }
            }
        }
        Self::from_triplets(self.dim, out)
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.dim];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// `dense · self`.
    pub fn left_mul_dense(&self, dense: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(dense.nrows(), self.dim);
        for &(k, c, v) in &self.entries {
            let src = dense.column(k).clone_owned();
            let mut dst = out.column_mut(c);
            dst.axpy(v, &src, ONE);
        }
        out
    }

    /// `self · dense`.
    pub fn right_mul_dense(&self, dense: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(self.dim, dense.ncols());
        for col in 0..dense.ncols() {
            for &(r, k, v) in &self.entries {
                out[(r, col)] += v * dense[(k, col)];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max column sum (induced 1-norm).
    pub fn one_norm(&self) -> f64 {
        let mut cols = vec![0.0; self.dim];
        for &(_, c, v) in &self.entries {
            cols[c] += v.norm();
        }
        cols.into_iter().fold(0.0, f64::max)
    }

    /// Frobenius norm of `self + self†`.
    pub fn skew_hermitian_defect(&self) -> f64 {
        self.add(&self.adjoint()).frobenius_norm()
    }
}

/// `a_mode` on the truncated space: `⟨N − e_mode| a |N⟩ = √N_mode`.
pub fn annihilation_matrix(space: &TruncatedFockSpace, mode: usize) -> Result<SparseMatrix> {
    space.check_mode(mode)?;
    let m = mode - 1;
    let mut trip = Vec::new();
    for (col, occ) in space.basis.iter().enumerate() {
        if occ[m] > 0 {
            let mut lower = occ.clone();
            lower[m] -= 1;
            if let Some(row) = space.index_of(&lower) {
                trip.push((row, col, Complex64::new((occ[m] as f64).sqrt(), 0.0)));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(space.dim(), trip))
}

pub fn creation_matrix(space: &TruncatedFockSpace, mode: usize) -> Result<SparseMatrix> {
    Ok(annihilation_matrix(space, mode)?.adjoint())
}

/// Matrix elements of a normal-ordered polynomial restricted to the space.
/// Each monomial is evaluated exactly on `|N⟩`; results leaving the space are dropped.
pub fn polynomial_matrix(space: &TruncatedFockSpace, poly: &OperatorPolynomial) -> Result<SparseMatrix> {
    if poly.max_mode() > space.modes() {
        return Err(PinchError::InvalidArgument(format!(
            "operator references mode {} on a {}-mode space",
            poly.max_mode(),
            space.modes()
        )));
    }
    let mut trip = Vec::new();
    for (col, occ) in space.basis.iter().enumerate() {
        'terms: for (mono, coeff) in poly.terms() {
            let mut state: Vec<i32> = occ.iter().map(|&x| x as i32).collect();
            let mut amp = 1.0f64;
            for &m in &mono.annihilators {
                let n = state[m - 1];
                if n == 0 {
                    continue 'terms;
                }
                amp *= (n as f64).sqrt();
                state[m - 1] -= 1;
            }
            for &m in &mono.creators {
                state[m - 1] += 1;
                amp *= (state[m - 1] as f64).sqrt();
            }
            if state.iter().any(|&x| x as usize > space.cutoff()) {
                continue;
            }
            let target: Vec<u8> = state.iter().map(|&x| x as u8).collect();
            if let Some(row) = space.index_of(&target) {
                trip.push((row, col, coeff * amp));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(space.dim(), trip))
}

/// Matrix of the pinching exponent `Â`.
pub fn generator_matrix(space: &TruncatedFockSpace, tensor: &SymmetricTensor) -> Result<SparseMatrix> {
    if tensor.num_modes() != space.modes() {
        return Err(PinchError::InvalidArgument(format!(
            "tensor has {} modes, space has {}",
            tensor.num_modes(),
            space.modes()
        )));
    }
    polynomial_matrix(space, &generator(tensor))
}

/// Complex amplitudes over a truncated basis. The norm is reported, never
/// silently renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn vacuum(space: &TruncatedFockSpace) -> Self {
        let mut amplitudes = vec![ZERO; space.dim()];
        amplitudes[space.vacuum_index()] = ONE;
        FockVector { amplitudes }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨self| op |self⟩` (unnormalized).
    pub fn expectation(&self, op: &SparseMatrix) -> Complex64 {
        let y = op.apply(&self.amplitudes);
        self.amplitudes.iter().zip(&y).map(|(a, b)| a.conj() * b).sum()
    }

    /// Text export: one `label re im` line per nonzero amplitude.
    pub fn to_text(&self, space: &TruncatedFockSpace) -> String {
        let mut out = String::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            if *a != ZERO {
                out.push_str(&format!(
                    "{} {} {}\n",
                    space.label(i),
                    crate::tensor::fmt_f64(a.re),
                    crate::tensor::fmt_f64(a.im)
                ));
            }
        }
        out
    }
}

/// Truncation order for [`pinched_state`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    /// `Ŝ⁽ᵖ⁾ = Σ_{k≤p} Âᵏ/k!`
    Truncated(usize),
    /// `e^{Â}`, series summed until the tail is below `1e-12`.
    Exact,
}

const MAX_SERIES_TERMS: usize = 200;

/// `Ŝ⁽ᵖ⁾|0⟩` or `e^{Â}|0⟩` on the truncated space.
pub fn pinched_state(space: &TruncatedFockSpace, tensor: &SymmetricTensor, order: Order) -> Result<FockVector> {
    let a = generator_matrix(space, tensor)?;
    let mut state = FockVector::vacuum(space).amplitudes;
    let mut term = state.clone();
    match order {
        Order::Truncated(p) => {
            for k in 1..=p {
                term = a.apply(&term).iter().map(|x| x / k as f64).collect();
                for (s, t) in state.iter_mut().zip(&term) {
                    *s += t;
                }
            }
        }
        Order::Exact => {
            let mut converged = false;
            for k in 1..=MAX_SERIES_TERMS {
                term = a.apply(&term).iter().map(|x| x / k as f64).collect();
                for (s, t) in state.iter_mut().zip(&term) {
                    *s += t;
                }
                let tn = term.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if tn < 1e-16 {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(PinchError::NoConvergence(MAX_SERIES_TERMS));
            }
        }
    }
    Ok(FockVector { amplitudes: state })
}

/// Basis index of the occupation vector placing photon `k`'s single quantum
/// in H (bit 0) or V (bit 1) for qubit basis state `s`.
fn qubit_occupation(n: usize, s: usize) -> Vec<u8> {
    let mut occ = vec![0u8; 2 * n];
    for p in 1..=n {
        occ[2 * (p - 1) + photon_bit(s, p, n)] = 1;
    }
    occ
}

/// Fock embedding of an `n`-qubit state (one photon per photon slot).
pub fn qubit_embedding(space: &TruncatedFockSpace, amplitudes: &[Complex64]) -> Result<FockVector> {
    let n = qubit_count(amplitudes.len())?;
    if space.modes() != 2 * n {
        return Err(PinchError::InvalidArgument(format!(
            "{n}-qubit state needs a {}-mode space",
            2 * n
        )));
    }
    let mut v = vec![ZERO; space.dim()];
    for (s, &a) in amplitudes.iter().enumerate() {
        let idx = space
            .index_of(&qubit_occupation(n, s))
            .ok_or_else(|| PinchError::InvalidArgument("space cannot hold one photon per slot".into()))?;
        v[idx] = a;
    }
    Ok(FockVector { amplitudes: v })
}

/// Qubit amplitudes of the one-photon-per-slot projection, unnormalized.
pub fn n_photon_projection(space: &TruncatedFockSpace, state: &FockVector, n: usize) -> Result<Vec<Complex64>> {
    if space.modes() != 2 * n {
        return Err(PinchError::InvalidArgument(format!(
            "{n} photons need a {}-mode space",
            2 * n
        )));
    }
    (0..1usize << n)
        .map(|s| {
            space
                .index_of(&qubit_occupation(n, s))
                .map(|i| state.amplitudes[i])
                .ok_or_else(|| PinchError::InvalidArgument("space cannot hold one photon per slot".into()))
        })
        .collect()
}

/// `|⟨target|P⟩|²` with `P` the normalized one-photon-per-slot projection.
pub fn n_photon_fidelity(space: &TruncatedFockSpace, state: &FockVector, target: &[Complex64]) -> Result<f64> {
    check_normalized(target)?;
    let n = qubit_count(target.len())?;
    let proj = n_photon_projection(space, state, n)?;
    let norm = proj.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(PinchError::ZeroProjection);
    }
    let overlap: Complex64 = target.iter().zip(&proj).map(|(t, p)| t.conj() * p).sum();
    Ok(overlap.norm_sqr() / (norm * norm))
}

/// Fidelity of the state with its vacuum component removed against the Fock
/// embedding of `target`.
pub fn vacuum_removed_fidelity(space: &TruncatedFockSpace, state: &FockVector, target: &[Complex64]) -> Result<f64> {
    check_normalized(target)?;
    let mut v = state.clone();
    v.amplitudes[space.vacuum_index()] = ZERO;
    let norm = v.norm();
    if norm == 0.0 {
        return Err(PinchError::ZeroProjection);
    }
    let emb = qubit_embedding(space, target)?;
    Ok(emb.inner(&v).norm_sqr() / (norm * norm))
}

/// `e^{A}` by scaling and squaring of the Taylor series. The number of
/// terms is chosen from the bound `‖B‖^{m+1}/(m+1)! · 1/(1 − ‖B‖/(m+2)) < 1e-17`
/// on the scaled `B = A/2^s` with `‖B‖₁ ≤ 1/2`.
pub fn expm(a: &SparseMatrix) -> Result<DMatrix<Complex64>> {
    let norm = a.one_norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    let b = a.scale(Complex64::new(scale, 0.0));
    let bn = norm * scale;

    let mut terms = 0usize;
    let mut bound = bn;
    while terms < MAX_SERIES_TERMS {
        terms += 1;
        bound *= bn / (terms + 1) as f64;
        let tail = if bn < (terms + 2) as f64 { bound / (1.0 - bn / (terms + 2) as f64) } else { f64::INFINITY };
        if tail < 1e-17 {
            break;
        }
    }
    if terms >= MAX_SERIES_TERMS {
        return Err(PinchError::NoConvergence(MAX_SERIES_TERMS));
    }

    let dim = a.dim();
    let mut result = DMatrix::<Complex64>::identity(dim, dim);
    let mut term = DMatrix::<Complex64>::identity(dim, dim);
    for k in 1..=terms {
        term = b.left_mul_dense(&term) / Complex64::new(k as f64, 0.0);
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// Residuals of the conjugation series.
#[derive(Debug, Clone, PartialEq)]
pub struct AppendixResidual {
    /// Frobenius residual after each partial sum `k = 0..=K`.
    pub full: Vec<f64>,
    /// Same, restricted to the interior block.
    pub interior: Vec<f64>,
}

impl AppendixResidual {
    pub fn at(&self, k: usize) -> f64 {
        self.full[k]
    }
}

/// `‖e^{−A} X e^{A} − Σ_{k≤K} C⁽ᵏ⁾/k!‖_F` with `C⁽ᵏ⁾ = [C⁽ᵏ⁻¹⁾, A]`.
pub fn verify_appendix_identity(
    space: &TruncatedFockSpace,
    x: &SparseMatrix,
    a: &SparseMatrix,
    k_max: usize,
) -> Result<AppendixResidual> {
    let defect = a.skew_hermitian_defect();
    if defect > 1e-10 {
        return Err(PinchError::InvalidArgument(format!(
            "A is not skew-Hermitian (‖A + A†‖ = {defect:.3e})"
        )));
    }
    let ea = expm(a)?;
    let ema = expm(&a.scale(-ONE))?;
    let conj = x.left_mul_dense(&ema) * &ea;

    let interior = space.interior();
    let residual = |m: &DMatrix<Complex64>| -> (f64, f64) {
        let full = m.norm();
        let mut s = 0.0;
        for &i in &interior {
            for &j in &interior {
                s += m[(i, j)].norm_sqr();
            }
        }
        (full, s.sqrt())
    };

    let mut c = x.to_dense();
    let mut partial = c.clone();
    let mut out = AppendixResidual {
        full: Vec::with_capacity(k_max + 1),
        interior: Vec::with_capacity(k_max + 1),
    };
    let (f, i) = residual(&(&conj - &partial));
    out.full.push(f);
    out.interior.push(i);
    let mut fact = 1.0;
    for k in 1..=k_max {
        c = a.left_mul_dense(&c) - a.right_mul_dense(&c);
        fact *= k as f64;
        partial += &c / Complex64::new(fact, 0.0);
        let (f, i) = residual(&(&conj - &partial));
        out.full.push(f);
        out.interior.push(i);
    }
    Ok(out)
}

/// Split of `⟨0|(Ŝ⁽ᵖ⁾)† X Ŝ⁽ᵖ⁾|0⟩` into the `b̂⁽ᵖ⁾` part and the remainder `ĉ⁽ᵖ⁾`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderSplit {
    pub total: Complex64,
    pub b_part: Complex64,
    pub c_part: Complex64,
}

/// Evaluates both sides of `(Ŝ⁽ᵖ⁾)† X Ŝ⁽ᵖ⁾ = b̂⁽ᵖ⁾ + ĉ⁽ᵖ⁾` on the vacuum,
/// each term computed independently from matrices.
pub fn order_p_split(space: &TruncatedFockSpace, x: &SparseMatrix, a: &SparseMatrix, p: usize) -> OrderSplit {
    let vac = FockVector::vacuum(space).amplitudes;
    let fact = |k: usize| (1..=k).fold(1.0, |acc, i| acc * i as f64);

    // A^ℓ|0⟩; the bra side uses ⟨0|(−A)^m = (A^m|0⟩)† since A† = −A
    let mut powers = vec![vac.clone()];
    for _ in 0..2 * p {
        let next = a.apply(powers.last().expect("nonempty"));
        powers.push(next);
    }
    let bra = |m: usize, ket: &[Complex64]| -> Complex64 {
        powers[m].iter().zip(ket).map(|(b, k)| b.conj() * k).sum()
    };

    let total = {
        let psi: Vec<Complex64> = (0..vac.len())
            .map(|i| (0..=p).map(|k| powers[k][i] / fact(k)).sum())
            .collect();
        let y = x.apply(&psi);
        psi.iter().zip(&y).map(|(a, b)| a.conj() * b).sum()
    };

    let term = |k: usize, l: usize| -> Complex64 {
        let ket = x.apply(&powers[l]);
        bra(k - l, &ket) / (fact(k - l) * fact(l))
    };

    let mut b_part = ZERO;
    for k in 0..=p {
        for l in 0..=k {
            b_part += term(k, l);
        }
    }
    let mut c_part = ZERO;
    for k in p + 1..=2 * p {
        for l in k - p..=p {
            c_part += term(k, l);
        }
    }
    OrderSplit {
        total,
        b_part,
        c_part,
    }
}

/// `⟨0| W(word) |0⟩` where `W` averages the word over all orderings of its
/// factors (symmetric ordering), evaluated with ladder matrices on a
/// space large enough to hold every intermediate state.
pub fn symmetric_vacuum_expectation(modes: usize, word: &[Ladder]) -> Result<Complex64> {
    if word.is_empty() {
        return Ok(ONE);
    }
    let mut used: Vec<usize> = word
        .iter()
        .map(|l| match *l {
            Ladder::Create(m) | Ladder::Annihilate(m) => m,
        })
        .collect();
    used.sort_unstable();
    used.dedup();
    if used.iter().any(|&m| m == 0 || m > modes) {
        return Err(PinchError::InvalidArgument("word references a mode outside the space".into()));
    }
    // relabel into a compact space over the modes actually used
    let local = |m: usize| used.iter().position(|&u| u == m).expect("present") + 1;
    let cutoff = word.len().max(1);
    let space = TruncatedFockSpace::new(used.len(), cutoff, Some(word.len()))?;
    let ops: Vec<SparseMatrix> = word
        .iter()
        .map(|l| match *l {
            Ladder::Create(m) => creation_matrix(&space, local(m)),
            Ladder::Annihilate(m) => annihilation_matrix(&space, local(m)),
        })
        .collect::<Result<_>>()?;

    let vac = FockVector::vacuum(&space).amplitudes;
    let mut order: Vec<usize> = (0..word.len()).collect();
    let mut sum = ZERO;
    let mut count = 0usize;
    loop {
        let mut v = vac.clone();
        for &i in order.iter().rev() {
            v = ops[i].apply(&v);
        }
        sum += v[0];
        count += 1;
        let Some(i) = (1..order.len()).rev().find(|&i| order[i - 1] < order[i]) else {
            break;
        };
        let j = (i..order.len()).rev().find(|&j| order[j] > order[i - 1]).expect("pivot");
        order.swap(i - 1, j);
        order[i..].reverse();
    }
    Ok(sum / count as f64)
}

/// `⟨ψ|M̂ₙ|ψ⟩` summed over the Mermin terms.
pub fn mermin_expectation_exact(amplitudes: &[Complex64]) -> Result<f64> {
    check_normalized(amplitudes)?;
    let n = qubit_count(amplitudes.len())?;
    Ok(mermin_terms(n)
        .iter()
        .map(|t| t.sign as f64 * pauli_expectation(amplitudes, &t.paulis()).re)
        .sum())
}
