// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Pauli labels and exact expectations on `n`-qubit amplitude vectors.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{PinchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i]
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

pub fn label_string(label: &[Pauli]) -> String {
    label.iter().map(|p| p.symbol()).collect()
}

pub fn parse_label(s: &str) -> Result<Vec<Pauli>> {
    s.chars()
        .map(|c| match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(PinchError::Parse(format!("bad Pauli symbol {other:?} in {s:?}"))),
        })
        .collect()
}

/// A Pauli string; ordered so that labels sort the same way as their index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(pub Vec<Pauli>);

impl FromStr for PauliString {
    type Err = PinchError;
    fn from_str(s: &str) -> Result<Self> {
        parse_label(s).map(PauliString)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&label_string(&self.0))
    }
}

/// Base-4 index with photon 1 most significant.
pub fn label_index(label: &[Pauli]) -> usize {
    label.iter().fold(0, |acc, &p| acc * 4 + p as usize)
}

pub fn label_from_index(mut index: usize, n: usize) -> Vec<Pauli> {
    let mut out = vec![Pauli::I; n];
    for slot in out.iter_mut().rev() {
        *slot = Pauli::from_index(index % 4);
        index /= 4;
    }
    out
}

/// All `4ⁿ` labels in index order.
pub fn all_labels(n: usize) -> Vec<Vec<Pauli>> {
    (0..4usize.pow(n as u32)).map(|i| label_from_index(i, n)).collect()
}

/// Column action of `σ_label`: basis state `s` maps to `phase·|t⟩`.
#[inline]
pub fn pauli_action(label: &[Pauli], s: usize) -> (usize, Complex64) {
    let n = label.len();
    let i = Complex64::new(0.0, 1.0);
    let mut t = s;
    let mut phase = Complex64::new(1.0, 0.0);
    for (k, &p) in label.iter().enumerate() {
        let bit = 1 << (n - 1 - k);
        let set = s & bit != 0;
        match p {
            Pauli::I => {}
            Pauli::X => t ^= bit,
            Pauli::Y => {
                t ^= bit;
                phase *= if set { -i } else { i };
            }
            Pauli::Z => {
                if set {
                    phase = -phase;
                }
            }
        }
    }
    (t, phase)
}

/// `σ_label |ψ⟩`.
pub fn apply_pauli(amplitudes: &[Complex64], label: &[Pauli]) -> Vec<Complex64> {
    assert_eq!(amplitudes.len(), 1 << label.len(), "label length does not match state");
    let mut out = vec![Complex64::new(0.0, 0.0); amplitudes.len()];
    for (s, &a) in amplitudes.iter().enumerate() {
        let (t, phase) = pauli_action(label, s);
        out[t] += phase * a;
    }
    out
}

/// `⟨ψ|σ_label|ψ⟩`.
pub fn pauli_expectation(amplitudes: &[Complex64], label: &[Pauli]) -> Complex64 {
    let y = apply_pauli(amplitudes, label);
    amplitudes.iter().zip(&y).map(|(a, b)| a.conj() * b).sum()
}

/// Dense `σ_{μ₁} ⊗ … ⊗ σ_{μₙ}`.
pub fn pauli_matrix(label: &[Pauli]) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for &p in label {
        let s = p.matrix();
        let small = DMatrix::from_fn(2, 2, |r, c| s[r][c]);
        m = m.kronecker(&small);
    }
    m
}
