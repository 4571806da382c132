// Copyright 2026 The pinch Developers
// SPDX-License-Identifier: Apache-2.0

//! Pinched (Bogoliubov-transformed) ladder operators.
//!
//! `b̂ᵢ = e^{−Â} âᵢ e^{Â} = Σ_k Ĉᵢ⁽ᵏ⁾/k!` with `Ĉᵢ⁽⁰⁾ = âᵢ` and
//! `Ĉᵢ⁽ᵏ⁾ = [Ĉᵢ⁽ᵏ⁻¹⁾, Â]`. The recursion is evaluated symbolically on
//! [`OperatorPolynomial`]s. Closed forms for the first two terms and, for
//! rank-2 tensors, the cosh/sinh squeezing solution provide independent checks.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{PinchError, Result};
use crate::operator::{
    commutator_capped, normal_order_word, Ladder, Monomial, OperatorPolynomial, DEFAULT_TERM_CAP,
};
use crate::tensor::SymmetricTensor;

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// `Π mⱼ!` over the multiplicities of a sorted multiset.
fn multiplicity_factor(sorted: &[usize]) -> f64 {
    let mut f = 1.0;
    let mut run = 0usize;
    for (i, m) in sorted.iter().enumerate() {
        if i > 0 && sorted[i - 1] == *m {
            run += 1;
        } else {
            run = 1;
        }
        f *= run as f64;
    }
    f
}

/// Exponent `Â` of the pinching operator, normal-ordered.
pub fn generator(tensor: &SymmetricTensor) -> OperatorPolynomial {
    let mut terms = Vec::with_capacity(2 * tensor.num_stored());
    for (key, xi) in tensor.entries() {
        // n!/Π mⱼ! orderings of the key, each weighted 1/n!
        let w = 1.0 / multiplicity_factor(key);
        terms.push((xi * w, Monomial::new(key.to_vec(), vec![])));
        terms.push((-xi.conj() * w, Monomial::new(vec![], key.to_vec())));
    }
    OperatorPolynomial::from_terms(terms)
}

fn check_mode(tensor: &SymmetricTensor, mode: usize) -> Result<()> {
    if mode == 0 || mode > tensor.num_modes() {
        return Err(PinchError::InvalidArgument(format!(
            "mode {mode} outside 1..={}",
            tensor.num_modes()
        )));
    }
    Ok(())
}

/// `Ĉᵢ⁽⁰⁾, …, Ĉᵢ⁽ᵏ⁾` by the commutator recursion.
pub fn c_terms(
    tensor: &SymmetricTensor,
    mode: usize,
    k_max: usize,
    cap: usize,
) -> Result<Vec<OperatorPolynomial>> {
    check_mode(tensor, mode)?;
    let a = generator(tensor);
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(OperatorPolynomial::annihilation(mode));
    for _ in 0..k_max {
        let next = commutator_capped(out.last().expect("nonempty"), &a, cap)?;
        out.push(next);
    }
    Ok(out)
}

/// `Ĉᵢ⁽ᵏ⁾` in normal order.
pub fn c_term(tensor: &SymmetricTensor, mode: usize, k: usize) -> Result<OperatorPolynomial> {
    Ok(c_terms(tensor, mode, k, DEFAULT_TERM_CAP)?.pop().expect("nonempty"))
}

/// Order-`p` pinched annihilation operator `b̂ᵢ⁽ᵖ⁾ = Σ_{k≤p} Ĉᵢ⁽ᵏ⁾/k!`.
pub fn b_approx(tensor: &SymmetricTensor, mode: usize, p: usize) -> Result<OperatorPolynomial> {
    let cs = c_terms(tensor, mode, p, DEFAULT_TERM_CAP)?;
    let mut b = OperatorPolynomial::zero();
    for (k, c) in cs.iter().enumerate() {
        b = b.add(&c.scale(Complex64::new(1.0 / factorial(k), 0.0)));
    }
    Ok(b)
}

/// All ordered tuples `(i₂,…,iₙ)` with `ξ_{i,i₂,…,iₙ} ≠ 0`.
fn ordered_completions(tensor: &SymmetricTensor, mode: usize) -> Vec<(Vec<usize>, Complex64)> {
    let mut out = Vec::new();
    for (key, xi) in tensor.entries() {
        if let Some(pos) = key.iter().position(|&m| m == mode) {
            let mut rest = key.to_vec();
            rest.remove(pos);
            for perm in distinct_permutations(&rest) {
                out.push((perm, xi));
            }
        }
    }
    out
}

/// Distinct orderings of a sorted multiset, in lexicographic order.
pub(crate) fn distinct_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = sorted.to_vec();
    let mut out = vec![cur.clone()];
    loop {
        // next lexicographic permutation
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// `Ĉᵢ⁽¹⁾ = (1/(n−1)!) Σ ξ_{i,i₂…iₙ} a†_{i₂}⋯a†_{iₙ}`.
pub fn c1_closed_form(tensor: &SymmetricTensor, mode: usize) -> Result<OperatorPolynomial> {
    check_mode(tensor, mode)?;
    let n = tensor.rank();
    let w = 1.0 / factorial(n - 1);
    Ok(OperatorPolynomial::from_terms(
        ordered_completions(tensor, mode)
            .into_iter()
            .map(|(tuple, xi)| (xi * w, Monomial::new(tuple, vec![]))),
    ))
}

/// `Ĉᵢ⁽²⁾` from the double contraction
/// `Σ ξ_{i,i₂…}/(n−1)! Σ ξ*_{i₂,j₂…}/(n−1)! D̂`, where `D̂` places the
/// annihilator block `a_{j₂}⋯a_{jₙ}` at each of the `n−1` slots among
/// `a†_{i₃}⋯a†_{iₙ}`. Each word is then normal-ordered by adjacent swaps.
pub fn c2_closed_form(tensor: &SymmetricTensor, mode: usize) -> Result<OperatorPolynomial> {
    check_mode(tensor, mode)?;
    let n = tensor.rank();
    if n < 2 {
        return Err(PinchError::InvalidArgument(
            "c2_closed_form needs a tensor of rank >= 2".into(),
        ));
    }
    let w = 1.0 / factorial(n - 1);
    let mut out = OperatorPolynomial::zero();
    for (outer, xi) in ordered_completions(tensor, mode) {
        let contracted = outer[0];
        let rest = &outer[1..];
        for (inner, xj) in ordered_completions(tensor, contracted) {
            let coeff = xi * xj.conj() * (w * w);
            for left in 0..=rest.len() {
                let mut word: Vec<Ladder> = rest[..left].iter().map(|&m| Ladder::Create(m)).collect();
                word.extend(inner.iter().map(|&m| Ladder::Annihilate(m)));
                word.extend(rest[left..].iter().map(|&m| Ladder::Create(m)));
                for (mono, c) in normal_order_word(&word).terms() {
                    out.add_term(mono.clone(), c * coeff);
                }
            }
        }
    }
    out.canonicalize();
    Ok(out)
}

/// Rank-2 tensor as its symmetric `nd × nd` matrix.
pub fn rank2_matrix(tensor: &SymmetricTensor) -> Result<DMatrix<Complex64>> {
    if tensor.rank() != 2 {
        return Err(PinchError::InvalidArgument(format!(
            "expected a rank-2 tensor, got rank {}",
            tensor.rank()
        )));
    }
    let nd = tensor.num_modes();
    let mut m = DMatrix::zeros(nd, nd);
    for (key, xi) in tensor.entries() {
        m[(key[0] - 1, key[1] - 1)] = xi;
        m[(key[1] - 1, key[0] - 1)] = xi;
    }
    Ok(m)
}

/// Rank-2 tensor from a symmetric matrix of even dimension (`d = dim/2`).
pub fn tensor_from_matrix(xi: &DMatrix<Complex64>) -> Result<SymmetricTensor> {
    let dim = xi.nrows();
    check_symmetric(xi)?;
    if dim % 2 != 0 {
        return Err(PinchError::InvalidArgument(format!(
            "rank-2 tensors span 2d modes; got dimension {dim}"
        )));
    }
    let mut t = SymmetricTensor::zeros(2, dim / 2)?;
    for i in 0..dim {
        for j in i..dim {
            t.set(&[i + 1, j + 1], xi[(i, j)])?;
        }
    }
    Ok(t)
}

/// Coefficients of `a_k` and `a†_k` (0-based `k`) in a linear polynomial.
pub fn linear_coefficients(
    poly: &OperatorPolynomial,
    num_modes: usize,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let ann = (1..=num_modes)
        .map(|k| poly.coefficient(&Monomial::new(vec![], vec![k])))
        .collect();
    let cre = (1..=num_modes)
        .map(|k| poly.coefficient(&Monomial::new(vec![k], vec![])))
        .collect();
    (ann, cre)
}

/// `ξ = R·Q` with `R` Hermitian positive semi-definite and `Q` unitary.
#[derive(Debug, Clone)]
pub struct PolarFactors {
    pub r: DMatrix<Complex64>,
    pub q: DMatrix<Complex64>,
}

fn check_symmetric(xi: &DMatrix<Complex64>) -> Result<()> {
    if !xi.is_square() {
        return Err(PinchError::InvalidArgument(format!(
            "matrix is {}x{}, expected square",
            xi.nrows(),
            xi.ncols()
        )));
    }
    let scale = xi.norm().max(1.0);
    if (xi - xi.transpose()).norm() > 1e-10 * scale {
        return Err(PinchError::InvalidArgument(
            "pinching matrix must be symmetric".into(),
        ));
    }
    Ok(())
}

/// Polar factors via the SVD `ξ = UΣV†`: `R = UΣU†`, `Q = UV†`.
pub fn polar_decompose(xi: &DMatrix<Complex64>) -> Result<PolarFactors> {
    check_symmetric(xi)?;
    let svd = xi.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V†");
    let sigma = DMatrix::from_diagonal(&svd.singular_values.map(|s| Complex64::new(s, 0.0)));
    let r = &u * sigma * u.adjoint();
    let q = &u * v_t;
    Ok(PolarFactors { r, q })
}

/// `(cosh R, sinh R · Q)`: the coefficient matrices on `â` and `â†` in
/// `b̂ = (cosh R) â + (sinh R) Q â†`.
pub fn squeeze_closed_form(
    xi: &DMatrix<Complex64>,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let PolarFactors { r, q } = polar_decompose(xi)?;
    let eig = r.symmetric_eigen();
    let w = &eig.eigenvectors;
    let cosh = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.cosh(), 0.0)));
    let sinh = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.sinh(), 0.0)));
    let cosh_r = w * cosh * w.adjoint();
    let sinh_r = w * sinh * w.adjoint();
    Ok((cosh_r, sinh_r * q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::commutator;
    use crate::tensor::ghz_tensor;
    use crate::random::{random_symmetric_matrix, random_tensor};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ghz_generator() {
        let r = 0.3;
        let a = generator(&ghz_tensor(3, r, 0.0).unwrap());
        let expected = OperatorPolynomial::from_terms([
            (c(r, 0.0), Monomial::new(vec![1, 3, 5], vec![])),
            (c(r, 0.0), Monomial::new(vec![2, 4, 6], vec![])),
            (c(-r, 0.0), Monomial::new(vec![], vec![1, 3, 5])),
            (c(-r, 0.0), Monomial::new(vec![], vec![2, 4, 6])),
        ]);
        assert!(a.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn zero_and_displacement_generators() {
        let z = SymmetricTensor::zeros(3, 2).unwrap();
        assert!(generator(&z).is_zero());
        let t = SymmetricTensor::from_entries(1, 2, [([1], c(0.2, 0.1)), ([2], c(-0.4, 0.0))])
            .unwrap();
        let a = generator(&t);
        assert_eq!(a.len(), 4);
        assert_eq!(a.coefficient(&Monomial::new(vec![1], vec![])), c(0.2, 0.1));
        assert_eq!(a.coefficient(&Monomial::new(vec![], vec![1])), c(-0.2, 0.1));
    }

    #[test]
    fn repeated_index_generator_weight() {
        // (1/2)Σ ξ_ij a†_i a†_j with only ξ_11 = s gives (s/2) a†_1²
        let t = SymmetricTensor::from_entries(2, 1, [([1, 1], c(0.8, 0.0))]).unwrap();
        let a = generator(&t);
        assert_eq!(a.coefficient(&Monomial::new(vec![1, 1], vec![])), c(0.4, 0.0));
    }

    #[test]
    fn displacement_recursion() {
        let t = SymmetricTensor::from_entries(1, 3, [([1], c(0.2, 0.1)), ([3], c(-0.4, 0.3))])
            .unwrap();
        for i in 1..=3 {
            let xi = t.get(&[i]).unwrap();
            let c1 = c_term(&t, i, 1).unwrap();
            assert!(c1.max_abs_diff(&OperatorPolynomial::identity().scale(xi)) < 1e-15);
            assert!(c_term(&t, i, 2).unwrap().is_zero());
        }
    }

    #[test]
    fn squeezing_first_order() {
        let xi = random_symmetric_matrix(4, 0.5, 11);
        let t = tensor_from_matrix(&xi).unwrap();
        for i in 1..=4 {
            let c1 = c_term(&t, i, 1).unwrap();
            let expected = OperatorPolynomial::from_terms(
                (1..=4).map(|j| (xi[(i - 1, j - 1)], Monomial::new(vec![j], vec![]))),
            );
            assert!(c1.max_abs_diff(&expected) < 1e-14);
        }
    }

    #[test]
    fn ghz_first_order_rows() {
        let r = 0.25;
        let t = ghz_tensor(3, r, 0.0).unwrap();
        let c1 = c_term(&t, 1, 1).unwrap();
        let expected = OperatorPolynomial::monomial(c(r, 0.0), Monomial::new(vec![3, 5], vec![]));
        assert!(c1.max_abs_diff(&expected) < 1e-15);
        let b = b_approx(&t, 1, 1).unwrap();
        let expected = expected.add(&OperatorPolynomial::annihilation(1));
        assert!(b.max_abs_diff(&expected) < 1e-15);
        assert_eq!(b_approx(&t, 4, 0).unwrap(), OperatorPolynomial::annihilation(4));
    }

    #[test]
    fn recursion_matches_closed_forms_rank_1_to_3() {
        for (seed, (rank, d)) in [(1, 4), (1, 6), (2, 2), (2, 3), (3, 2), (3, 1)]
            .into_iter()
            .enumerate()
        {
            let t = random_tensor(rank, d, 0.6, 100 + seed as u64);
            for i in 1..=t.num_modes() {
                let c1 = c_term(&t, i, 1).unwrap();
                assert!(c1.max_abs_diff(&c1_closed_form(&t, i).unwrap()) < 1e-13);
                if rank >= 2 {
                    let c2 = c_term(&t, i, 2).unwrap();
                    assert!(
                        c2.max_abs_diff(&c2_closed_form(&t, i).unwrap()) < 1e-13,
                        "rank {rank} mode {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn c2_rank3_normal_ordered_expression() {
        // (1/2)Σ ξ_ijk ξ*_jkl a_l + (1/2)Σ ξ_ijk ξ*_klm a†_j a_l a_m
        let t = random_tensor(3, 2, 0.7, 5);
        let nd = t.num_modes();
        let xi = |a: usize, b: usize, c: usize| t.get(&[a, b, c]).unwrap();
        for i in 1..=nd {
            let mut terms = Vec::new();
            for j in 1..=nd {
                for k in 1..=nd {
                    for l in 1..=nd {
                        terms.push((
                            0.5 * xi(i, j, k) * xi(j, k, l).conj(),
                            Monomial::new(vec![], vec![l]),
                        ));
                        for m in 1..=nd {
                            terms.push((
                                0.5 * xi(i, j, k) * xi(k, l, m).conj(),
                                Monomial::new(vec![j], vec![l, m]),
                            ));
                        }
                    }
                }
            }
            let expected = OperatorPolynomial::from_terms(terms);
            assert!(c2_closed_form(&t, i).unwrap().max_abs_diff(&expected) < 1e-13);
            assert!(c_term(&t, i, 2).unwrap().max_abs_diff(&expected) < 1e-13);
        }
    }

    #[test]
    fn c2_rank2_and_zero() {
        let xi = random_symmetric_matrix(4, 0.4, 3);
        let t = tensor_from_matrix(&xi).unwrap();
        let prod = &xi * xi.map(|z| z.conj());
        for i in 1..=4 {
            let expected = OperatorPolynomial::from_terms(
                (1..=4).map(|k| (prod[(i - 1, k - 1)], Monomial::new(vec![], vec![k]))),
            );
            assert!(c2_closed_form(&t, i).unwrap().max_abs_diff(&expected) < 1e-14);
        }
        let z = SymmetricTensor::zeros(3, 2).unwrap();
        assert!(c2_closed_form(&z, 2).unwrap().is_zero());
        let rank1 = SymmetricTensor::zeros(1, 2).unwrap();
        assert!(c2_closed_form(&rank1, 1).is_err());
    }

    #[test]
    fn generator_is_skew_hermitian() {
        for seed in 0..6 {
            let t = random_tensor(1 + seed % 3, 2, 0.8, seed as u64);
            let a = generator(&t);
            assert!(a.adjoint().add(&a).is_zero());
        }
    }

    #[test]
    fn rank2_parity_pattern() {
        let xi = random_symmetric_matrix(4, 0.3, 21);
        let t = tensor_from_matrix(&xi).unwrap();
        let PolarFactors { r, q } = polar_decompose(&xi).unwrap();
        for i in 1..=4 {
            let cs = c_terms(&t, i, 5, DEFAULT_TERM_CAP).unwrap();
            let mut rk = DMatrix::<Complex64>::identity(4, 4);
            for (k, ck) in cs.iter().enumerate() {
                let (ann, cre) = linear_coefficients(ck, 4);
                let want = if k % 2 == 0 { rk.clone() } else { &rk * &q };
                let (on, off) = if k % 2 == 0 { (&ann, &cre) } else { (&cre, &ann) };
                for j in 0..4 {
                    assert!((on[j] - want[(i - 1, j)]).norm() < 1e-12, "k={k}");
                    assert!(off[j].norm() < 1e-14);
                }
                assert_eq!(ck.len(), ck.terms().filter(|(m, _)| m.degree() == 1).count());
                rk = &rk * &r;
            }
        }
    }

    #[test]
    fn polar_examples() {
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.3, 0.0), c(0.7, 0.0)]));
        let p = polar_decompose(&s).unwrap();
        assert!((&p.r - &s).norm() < 1e-12);
        assert!((&p.q - DMatrix::identity(2, 2)).norm() < 1e-12);

        let p = polar_decompose(&(-&s)).unwrap();
        assert!((&p.r - &s).norm() < 1e-12);
        assert!((&p.q + DMatrix::<Complex64>::identity(2, 2)).norm() < 1e-12);

        for seed in 0..10 {
            let xi = random_symmetric_matrix(6, 1.0, 40 + seed);
            let p = polar_decompose(&xi).unwrap();
            assert!((&p.r * &p.q - &xi).norm() < 1e-10);
            assert!((p.q.adjoint() * &p.q - DMatrix::<Complex64>::identity(6, 6)).norm() < 1e-10);
            assert!((&p.r - p.r.adjoint()).norm() < 1e-12);
            let ev = p.r.clone().symmetric_eigen().eigenvalues;
            assert!(ev.iter().all(|&l| l >= -1e-12));
        }
    }

    #[test]
    fn polar_rejects_non_symmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(polar_decompose(&m).is_err());
        assert!(polar_decompose(&DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn squeeze_examples() {
        let (ch, sh) = squeeze_closed_form(&DMatrix::zeros(4, 4)).unwrap();
        assert!((ch - DMatrix::<Complex64>::identity(4, 4)).norm() < 1e-15);
        assert!(sh.norm() < 1e-15);

        let (ch, sh) = squeeze_closed_form(&DMatrix::from_element(1, 1, c(0.3, 0.0))).unwrap();
        assert!((ch[(0, 0)].re - 0.3f64.cosh()).abs() < 1e-15);
        assert!((sh[(0, 0)].re - 0.3f64.sinh()).abs() < 1e-15);
        assert!((ch[(0, 0)].re - 1.045_338_514_128_861).abs() < 1e-15);
    }

    #[test]
    fn squeeze_series_matches_closed_form() {
        for seed in 0..5 {
            let mut xi = random_symmetric_matrix(4, 1.0, 70 + seed);
            xi *= Complex64::new(0.09 / xi.norm(), 0.0);
            let t = tensor_from_matrix(&xi).unwrap();
            let (ch, sh) = squeeze_closed_form(&xi).unwrap();
            for i in 1..=4 {
                let b = b_approx(&t, i, 7).unwrap();
                let (ann, cre) = linear_coefficients(&b, 4);
                for j in 0..4 {
                    assert!((ann[j] - ch[(i - 1, j)]).norm() < 1e-9);
                    assert!((cre[j] - sh[(i - 1, j)]).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn diagonal_squeeze_converges_to_hyperbolic() {
        let s = 0.6;
        let t = SymmetricTensor::from_entries(2, 1, [([1, 1], c(s, 0.0))]).unwrap();
        let b = b_approx(&t, 1, 20).unwrap();
        assert!((b.coefficient(&Monomial::new(vec![], vec![1])).re - s.cosh()).abs() < 1e-13);
        assert!((b.coefficient(&Monomial::new(vec![1], vec![])).re - s.sinh()).abs() < 1e-13);
    }

    #[test]
    fn explosion_cap_propagates() {
        let t = random_tensor(3, 2, 1.0, 9);
        assert!(matches!(
            c_terms(&t, 1, 4, 50),
            Err(PinchError::TermExplosion { .. })
        ));
        assert!(c_term(&t, 99, 1).is_err());
    }

    #[test]
    fn commutator_linearity_and_antisymmetry() {
        let t1 = random_tensor(2, 2, 0.5, 1);
        let t2 = random_tensor(3, 2, 0.5, 2);
        let p = generator(&t1);
        let q = generator(&t2).add(&OperatorPolynomial::annihilation(2));
        let r = c_term(&t2, 3, 1).unwrap();
        let pq = commutator(&p, &q).unwrap();
        let qp = commutator(&q, &p).unwrap();
        assert!(pq.add(&qp).is_zero());
        let lhs = commutator(&p, &q.add(&r)).unwrap();
        let rhs = pq.add(&commutator(&p, &r).unwrap());
        assert!(lhs.max_abs_diff(&rhs) < 1e-13);
        // Jacobi identity
        let a = commutator(&p, &commutator(&q, &r).unwrap()).unwrap();
        let b = commutator(&q, &commutator(&r, &p).unwrap()).unwrap();
        let cc = commutator(&r, &commutator(&p, &q).unwrap()).unwrap();
        assert!(a.add(&b).add(&cc).max_abs_diff(&OperatorPolynomial::zero()) < 1e-12);
    }
}
