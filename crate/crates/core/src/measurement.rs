// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Threshold detection of rotated Jones vectors and coincidence post-selection.

use num_complex::Complex64;

use crate::error::{PinchError, Result};
use crate::pauli::Pauli;

pub type Jones = [Complex64; 2];
pub type Unitary2 = [[Complex64; 2]; 2];

const UNITARY_TOL: f64 = 1e-10;

/// Per-photon measurement basis. Channel 1 always carries the `+1` eigenstate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    X,
    Y,
    Z,
    Custom(Unitary2),
}

impl Basis {
    /// Explicit Jones matrix, checked for unitarity.
    pub fn custom(u: Unitary2) -> Result<Basis> {
        let defect = unitarity_defect(&u);
        if defect > UNITARY_TOL || !defect.is_finite() {
            return Err(PinchError::InvalidArgument(format!(
                "basis matrix is not unitary (‖U†U − I‖ = {defect:.3e})"
            )));
        }
        Ok(Basis::Custom(u))
    }

    pub fn matrix(&self) -> Unitary2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re * s, im * s);
        match *self {
            Basis::Z => [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
            Basis::X => [[c(1.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(-1.0, 0.0)]],
            Basis::Y => [[c(1.0, 0.0), c(0.0, -1.0)], [c(1.0, 0.0), c(0.0, 1.0)]],
            Basis::Custom(u) => u,
        }
    }

    pub fn from_pauli(p: Pauli) -> Option<Basis> {
        match p {
            Pauli::X => Some(Basis::X),
            Pauli::Y => Some(Basis::Y),
            Pauli::Z => Some(Basis::Z),
            Pauli::I => None,
        }
    }
}

fn unitarity_defect(u: &Unitary2) -> f64 {
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut v: Complex64 = (0..2).map(|k| u[k][i].conj() * u[k][j]).sum();
            if i == j {
                v -= 1.0;
            }
            s += v.norm_sqr();
        }
    }
    s.sqrt()
}

/// Single-photon detection result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
    None,
    Both,
}

impl Outcome {
    pub fn sign(self) -> Option<i8> {
        match self {
            Outcome::Plus => Some(1),
            Outcome::Minus => Some(-1),
            _ => None,
        }
    }
}

/// `U · [b_H, b_V]ᵀ`.
#[inline]
pub fn rotate(jones: Jones, u: &Unitary2) -> Jones {
    [
        u[0][0] * jones[0] + u[0][1] * jones[1],
        u[1][0] * jones[0] + u[1][1] * jones[1],
    ]
}

/// Strict threshold: a channel fires when `|b| > γ`.
#[inline]
pub fn detect(pair: Jones, gamma: f64) -> Outcome {
    let g2 = gamma * gamma;
    let first = pair[0].norm_sqr() > g2;
    let second = pair[1].norm_sqr() > g2;
    match (first, second) {
        (true, false) => Outcome::Plus,
        (false, true) => Outcome::Minus,
        (true, true) => Outcome::Both,
        (false, false) => Outcome::None,
    }
}

/// Rotate then detect one photon.
#[inline]
pub fn measure(pair: Jones, basis: &Unitary2, gamma: f64) -> Outcome {
    detect(rotate(pair, basis), gamma)
}

/// The `±1` tuple when every photon gave an exclusive detection.
pub fn coincidence(outcomes: &[Outcome]) -> Option<Vec<i8>> {
    outcomes.iter().map(|o| o.sign()).collect()
}

/// Measures all photons of a realization `b` (modes `2k-1`, `2k` for photon `k`)
/// and returns the outcome bit pattern (bit set for `−1`, photon 1 most
/// significant), or `None` if the event is not a coincidence.
#[inline]
pub fn coincidence_pattern(b: &[Complex64], bases: &[Unitary2], gamma: f64) -> Option<usize> {
    let n = bases.len();
    debug_assert_eq!(b.len(), 2 * n);
    let mut pattern = 0usize;
    for (k, u) in bases.iter().enumerate() {
        pattern <<= 1;
        match measure([b[2 * k], b[2 * k + 1]], u, gamma) {
            Outcome::Plus => {}
            Outcome::Minus => pattern |= 1,
            _ => return None,
        }
    }
    Some(pattern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SampleStream;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn detect_examples() {
        assert_eq!(detect([c(3.0), c(0.1)], 2.0), Outcome::Plus);
        assert_eq!(detect([c(0.1), c(3.0)], 2.0), Outcome::Minus);
        assert_eq!(detect([c(2.5), c(2.5)], 2.0), Outcome::Both);
        assert_eq!(detect([c(0.1), c(0.1)], 2.0), Outcome::None);
        // boundary does not fire
        assert_eq!(detect([c(2.0), c(0.0)], 2.0), Outcome::None);
    }

    #[test]
    fn rotate_examples() {
        let v = [Complex64::new(0.3, -0.2), Complex64::new(1.1, 0.5)];
        assert_eq!(rotate(v, &Basis::Z.matrix()), v);
        let k = Complex64::new(0.7, 0.4);
        let out = rotate([k, k], &Basis::X.matrix());
        assert!((out[0] - k * 2f64.sqrt()).norm() < 1e-15);
        assert!(out[1].norm() < 1e-15);
        // Y eigenstate (1, i)/√2 maps onto channel 1
        let out = rotate([c(1.0), Complex64::new(0.0, 1.0)], &Basis::Y.matrix());
        assert!((out[0] - c(2f64.sqrt())).norm() < 1e-15);
        assert!(out[1].norm() < 1e-15);
    }

    #[test]
    fn rotation_preserves_norm() {
        let s = SampleStream::new(11);
        for i in 0..200 {
            let mut r = s.realization_rng(i);
            let v = [r.vacuum_amplitude(), r.vacuum_amplitude()];
            let (t, p) = (r.uniform() * 3.0, r.uniform() * 6.0);
            let e = Complex64::from_polar(1.0, p);
            let u = Basis::custom([[c(t.cos()), -e.conj() * t.sin()], [e * t.sin(), c(t.cos())]]).unwrap();
            let w = rotate(v, &u.matrix());
            let n0 = v[0].norm_sqr() + v[1].norm_sqr();
            let n1 = w[0].norm_sqr() + w[1].norm_sqr();
            assert!((n0.sqrt() - n1.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn non_unitary_rejected() {
        assert!(Basis::custom([[c(1.0), c(1.0)], [c(0.0), c(1.0)]]).is_err());
        for b in [Basis::X, Basis::Y, Basis::Z] {
            assert!(unitarity_defect(&b.matrix()) < 1e-15);
        }
    }

    #[test]
    fn coincidence_examples() {
        use Outcome::*;
        assert_eq!(coincidence(&[Plus, Minus, Plus]), Some(vec![1, -1, 1]));
        assert_eq!(coincidence(&[Plus, None, Plus]), Option::None);
        assert_eq!(coincidence(&[Both, Plus, Plus]), Option::None);
    }

    #[test]
    fn pattern_bits() {
        let b = [c(3.0), c(0.0), c(0.0), c(3.0), c(3.0), c(0.0)];
        let z = Basis::Z.matrix();
        assert_eq!(coincidence_pattern(&b, &[z, z, z], 2.0), Some(0b010));
        assert_eq!(coincidence_pattern(&b, &[z, z, z], 3.5), Option::None);
    }
}
