// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Normal-ordered polynomials in bosonic ladder operators.
//!
//! A [`Monomial`] is `a†_{c1}…a†_{cp} a_{d1}…a_{dq}` with both mode lists
//! sorted (1-based modes). Products are brought back to normal order with the
//! per-mode contraction rule
//! `a^k a†^l = Σ_j C(k,j) C(l,j) j! a†^{l-j} a^{k-j}`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{PinchError, Result};

/// Coefficients below this magnitude are dropped on canonicalization.
pub const DROP_TOL: f64 = 1e-14;

/// Default cap on monomials generated by a single product.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub creators: Vec<usize>,
    pub annihilators: Vec<usize>,
}

impl Monomial {
    pub fn identity() -> Self {
        Monomial::default()
    }

    pub fn new(mut creators: Vec<usize>, mut annihilators: Vec<usize>) -> Self {
        creators.sort_unstable();
        annihilators.sort_unstable();
        Monomial {
            creators,
            annihilators,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.creators.is_empty() && self.annihilators.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.creators.len() + self.annihilators.len()
    }

    pub fn adjoint(&self) -> Self {
        Monomial {
            creators: self.annihilators.clone(),
            annihilators: self.creators.clone(),
        }
    }

    pub fn max_mode(&self) -> usize {
        self.creators
            .iter()
            .chain(self.annihilators.iter())
            .copied()
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorPolynomial {
    terms: BTreeMap<Monomial, Complex64>,
}

impl OperatorPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), Monomial::identity())
    }

    pub fn annihilation(mode: usize) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), Monomial::new(vec![], vec![mode]))
    }

    pub fn creation(mode: usize) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), Monomial::new(vec![mode], vec![]))
    }

    pub fn monomial(coeff: Complex64, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, coeff);
        p.canonicalize();
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Complex64, Monomial)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (c, m) in terms {
            p.add_term(m, c);
        }
        p.canonicalize();
        p
    }

    /// Accumulates without dropping small coefficients; call [`canonicalize`](Self::canonicalize) after.
    pub(crate) fn add_term(&mut self, m: Monomial, c: Complex64) {
        *self.terms.entry(m).or_default() += c;
    }

    pub fn canonicalize(&mut self) {
        self.terms.retain(|_, c| c.norm() >= DROP_TOL);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Complex64)> + '_ {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coefficient(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    /// Vacuum expectation value: the identity coefficient of the normal form.
    pub fn vacuum_expectation(&self) -> Complex64 {
        self.coefficient(&Monomial::identity())
    }

    pub fn max_mode(&self) -> usize {
        self.terms.keys().map(Monomial::max_mode).max().unwrap_or(0)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.adjoint(), c.conj()))
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect(),
        };
        out.canonicalize();
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out.canonicalize();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -*c);
        }
        out.canonicalize();
        out
    }

    /// Normal-ordered product, aborting once more than `cap` monomials are generated.
    pub fn mul_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        let mut out = Self::zero();
        let mut generated = 0usize;
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let c = c1 * c2;
                for (k, m) in monomial_product(m1, m2) {
                    generated += 1;
                    if generated > cap {
                        return Err(PinchError::TermExplosion { cap });
                    }
                    out.add_term(m, c * k);
                }
            }
        }
        out.canonicalize();
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_capped(other, DEFAULT_TERM_CAP)
    }

    /// Largest coefficient difference against `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, c) in &self.terms {
            worst = worst.max((c - other.coefficient(m)).norm());
        }
        for (m, c) in &other.terms {
            if !self.terms.contains_key(m) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }
}

/// `[P, Q] = PQ − QP` in normal order.
pub fn commutator(p: &OperatorPolynomial, q: &OperatorPolynomial) -> Result<OperatorPolynomial> {
    commutator_capped(p, q, DEFAULT_TERM_CAP)
}

pub fn commutator_capped(
    p: &OperatorPolynomial,
    q: &OperatorPolynomial,
    cap: usize,
) -> Result<OperatorPolynomial> {
    let pq = p.mul_capped(q, cap)?;
    let qp = q.mul_capped(p, cap)?;
    Ok(pq.sub(&qp))
}

fn counts(sorted: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &m in sorted {
        match out.last_mut() {
            Some((mode, c)) if *mode == m => *c += 1,
            _ => out.push((m, 1)),
        }
    }
    out
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn remove_copies(list: &[usize], mode: usize, copies: usize) -> Vec<usize> {
    let mut left = copies;
    list.iter()
        .copied()
        .filter(|&m| {
            if m == mode && left > 0 {
                left -= 1;
                false
            } else {
                true
            }
        })
        .collect()
}

/// Normal-ordered expansion of `m1 · m2` as (multiplicity, monomial) pairs.
fn monomial_product(m1: &Monomial, m2: &Monomial) -> Vec<(f64, Monomial)> {
    // only m1's annihilators and m2's creators need reordering
    let ann = counts(&m1.annihilators);
    let cre = counts(&m2.creators);
    let shared: Vec<(usize, usize, usize)> = ann
        .iter()
        .filter_map(|&(mode, k)| {
            cre.iter()
                .find(|&&(m, _)| m == mode)
                .map(|&(_, l)| (mode, k, l))
        })
        .collect();

    let mut out = Vec::new();
    let mut choice = vec![0usize; shared.len()];
    loop {
        let mut weight = 1.0;
        let mut a1 = m1.annihilators.clone();
        let mut c2 = m2.creators.clone();
        for (&(mode, k, l), &j) in shared.iter().zip(&choice) {
            if j > 0 {
                weight *= binom(k, j) * binom(l, j) * factorial(j);
                a1 = remove_copies(&a1, mode, j);
                c2 = remove_copies(&c2, mode, j);
            }
        }
        let mut creators = m1.creators.clone();
        creators.extend(c2);
        let mut annihilators = a1;
        annihilators.extend(m2.annihilators.iter().copied());
        out.push((weight, Monomial::new(creators, annihilators)));

        // odometer over contraction counts
        let mut pos = 0;
        loop {
            if pos == shared.len() {
                return out;
            }
            let (_, k, l) = shared[pos];
            if choice[pos] < k.min(l) {
                choice[pos] += 1;
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// A ladder operator in an unordered word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// Normal-orders an arbitrary word by repeated adjacent swaps
/// `a_i a†_j → a†_j a_i + δ_ij`.
pub fn normal_order_word(word: &[Ladder]) -> OperatorPolynomial {
    let mut out = OperatorPolynomial::zero();
    let mut stack: Vec<(f64, Vec<Ladder>)> = vec![(1.0, word.to_vec())];
    while let Some((w, word)) = stack.pop() {
        let swap = word.windows(2).position(|p| {
            matches!(p, [Ladder::Annihilate(_), Ladder::Create(_)])
        });
        match swap {
            None => {
                let mut creators = Vec::new();
                let mut annihilators = Vec::new();
                for l in &word {
                    match *l {
                        Ladder::Create(m) => creators.push(m),
                        Ladder::Annihilate(m) => annihilators.push(m),
                    }
                }
                out.add_term(
                    Monomial::new(creators, annihilators),
                    Complex64::new(w, 0.0),
                );
            }
            Some(p) => {
                let (Ladder::Annihilate(i), Ladder::Create(j)) = (word[p], word[p + 1]) else {
                    unreachable!()
                };
                let mut swapped = word.clone();
                swapped.swap(p, p + 1);
                stack.push((w, swapped));
                if i == j {
                    let mut contracted = word[..p].to_vec();
                    contracted.extend_from_slice(&word[p + 2..]);
                    stack.push((w, contracted));
                }
            }
        }
    }
    out.canonicalize();
    out
}

fn fmt_modes(modes: &[usize]) -> String {
    modes
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a†[{}] a[{}]",
            fmt_modes(&self.creators),
            fmt_modes(&self.annihilators)
        )
    }
}

/// One term per line, `(+re±im i) a†[modes] a[modes]`, in monomial order.
impl fmt::Display for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                writeln!(f)?;
            }
            write!(f, "({:+}{:+} i) {}", c.re, c.im, m)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn canonical_commutation() {
        let a1 = OperatorPolynomial::annihilation(1);
        let c1 = OperatorPolynomial::creation(1);
        let c2 = OperatorPolynomial::creation(2);
        assert_eq!(commutator(&a1, &c1).unwrap(), OperatorPolynomial::identity());
        assert!(commutator(&a1, &c2).unwrap().is_zero());
    }

    #[test]
    fn commutator_with_cubic_creator() {
        let a1 = OperatorPolynomial::annihilation(1);
        let cubic = OperatorPolynomial::monomial(one(), Monomial::new(vec![1, 2, 3], vec![]));
        let c = commutator(&a1, &cubic).unwrap();
        let expected = OperatorPolynomial::monomial(one(), Monomial::new(vec![2, 3], vec![]));
        assert_eq!(c, expected);
    }

    #[test]
    fn single_mode_reordering_rule() {
        // a^2 a†^2 = a†^2 a^2 + 4 a† a + 2
        let a2 = OperatorPolynomial::monomial(one(), Monomial::new(vec![], vec![1, 1]));
        let c2 = OperatorPolynomial::monomial(one(), Monomial::new(vec![1, 1], vec![]));
        let p = a2.mul(&c2).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.coefficient(&Monomial::new(vec![1, 1], vec![1, 1])), one());
        assert_eq!(
            p.coefficient(&Monomial::new(vec![1], vec![1])),
            Complex64::new(4.0, 0.0)
        );
        assert_eq!(p.vacuum_expectation(), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn word_normal_ordering_agrees_with_product() {
        use Ladder::*;
        let word = [Annihilate(1), Annihilate(2), Create(1), Create(2), Create(1)];
        let by_word = normal_order_word(&word);
        let lhs = OperatorPolynomial::monomial(one(), Monomial::new(vec![], vec![1, 2]));
        let rhs = OperatorPolynomial::monomial(one(), Monomial::new(vec![1, 1, 2], vec![]));
        let by_product = lhs.mul(&rhs).unwrap();
        assert!(by_word.max_abs_diff(&by_product) < 1e-15);
    }

    #[test]
    fn term_cap_aborts() {
        let p = OperatorPolynomial::from_terms(
            (1..=20).map(|m| (one(), Monomial::new(vec![], vec![m]))),
        );
        let q = OperatorPolynomial::from_terms(
            (1..=20).map(|m| (one(), Monomial::new(vec![m], vec![]))),
        );
        assert!(matches!(
            p.mul_capped(&q, 100),
            Err(PinchError::TermExplosion { cap: 100 })
        ));
        assert!(p.mul_capped(&q, 10_000).is_ok());
    }

    #[test]
    fn small_coefficients_dropped() {
        let p = OperatorPolynomial::monomial(Complex64::new(1e-15, 0.0), Monomial::identity());
        assert!(p.is_zero());
        let q = OperatorPolynomial::annihilation(3);
        assert!(q.sub(&q).is_zero());
    }

    #[test]
    fn pretty_printer_format() {
        let p = OperatorPolynomial::from_terms([
            (Complex64::new(0.5, -1.0), Monomial::new(vec![3, 1], vec![2])),
            (Complex64::new(-2.0, 0.0), Monomial::identity()),
        ]);
        assert_eq!(
            p.to_string(),
            "(-2+0 i) a†[] a[]\n(+0.5-1 i) a†[1,3] a[2]"
        );
        assert_eq!(OperatorPolynomial::zero().to_string(), "0");
    }
}
