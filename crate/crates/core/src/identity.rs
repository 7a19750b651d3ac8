//! Exact tests for whether a linear matrix pencil `M(α) = Σ_k α_k C_k` has
//! full row rank for general `α`.
//!
//! Every maximal minor is homogeneous of degree `r` (the row count) in `α`,
//! so it vanishes identically iff it vanishes on `{1} × {0..r}^{n-1}`. Over
//! ℚ the grid is evaluated modulo large primes until their product exceeds a
//! bound on the integer coefficients of the minors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{inv_mod, is_prime, mul_mod, Field, Scalar};
use crate::matrix::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("the prime field F{p} is too small; exact testing needs p > {degree}")]
    FieldTooSmall { p: u64, degree: usize },
}

const PRESCREEN_POINTS: usize = 6;

/// Primes just below `2^61`, in decreasing order.
fn large_primes() -> impl Iterator<Item = u64> {
    ((1u64 << 60)..(1u64 << 61)).rev().filter(|&p| is_prime(p))
}

fn rank_mod(mut a: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(piv, rank);
        let inv = inv_mod(a[rank][c], p);
        for i in rank + 1..rows {
            if a[i][c] == 0 {
                continue;
            }
            let f = mul_mod(a[i][c], inv, p);
            for j in c..cols {
                let sub = mul_mod(f, a[rank][j], p);
                a[i][j] = (a[i][j] + p - sub) % p;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// `Σ α_k C_k`.
pub fn evaluate_pencil(mats: &[Matrix<Scalar>], alpha: &[Scalar]) -> Matrix<Scalar> {
    let mut out = Matrix::zeros(mats[0].rows(), mats[0].cols());
    for (c, a) in mats.iter().zip(alpha) {
        if !a.is_zero() {
            out = out.add(&c.scale(a));
        }
    }
    out
}

fn prime_of(mats: &[Matrix<Scalar>]) -> Option<u64> {
    mats.iter().flat_map(|m| m.data()).find_map(|x| x.kind()).map(|k| k.characteristic())
}

/// Grid points `(1, y)` with `y ∈ {0..=r}^{n-1}`, in lexicographic order.
fn grid(n: usize, r: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = (r as u64 + 1).pow(n.saturating_sub(1) as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0u64; n];
        v[0] = 1;
        for k in (1..n).rev() {
            v[k] = idx % (r as u64 + 1);
            idx /= r as u64 + 1;
        }
        v
    })
}

fn to_scalars(v: &[u64]) -> Vec<Scalar> {
    v.iter().map(|&x| Scalar::from_i64(x as i64)).collect()
}

/// A point `α` with `rank M(α) = rows`, or `None` when every maximal minor
/// vanishes identically. Entries of the point are small nonnegative integers.
pub fn full_rank_point(mats: &[Matrix<Scalar>], seed: u64) -> Result<Option<Vec<Scalar>>, IdentityError> {
    let Some(first) = mats.first() else { return Ok(None) };
    let (rows, cols, n) = (first.rows(), first.cols(), mats.len());
    if rows == 0 {
        return Ok(Some(vec![Scalar::zero(); n]));
    }
    if rows > cols {
        return Ok(None);
    }
    let exact_ok = |alpha: &[Scalar]| evaluate_pencil(mats, alpha).rank() == rows;
    if let Some(p) = prime_of(mats) {
        if (p as usize) <= rows {
            return Err(IdentityError::FieldTooSmall { p, degree: rows });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..PRESCREEN_POINTS {
            let alpha: Vec<Scalar> = (0..n).map(|_| Scalar::from_i64(rng.gen_range(0..p.min(1 << 30)) as i64)).collect();
            if exact_ok(&alpha) {
                return Ok(Some(alpha));
            }
        }
        return Ok(grid(n, rows).map(|v| to_scalars(&v)).find(|a| exact_ok(a)));
    }

    // Integer coefficients: scale by the common denominator.
    let mut lcm = BigInt::one();
    for x in mats.iter().flat_map(|m| m.data()) {
        lcm = lcm.lcm(x.as_rational().unwrap().denom());
    }
    let ints: Vec<Vec<BigInt>> = mats
        .iter()
        .map(|m| m.data().iter().map(|x| (x.as_rational().unwrap() * &lcm).to_integer()).collect())
        .collect();
    let mut bound = BigInt::one();
    for i in 0..rows {
        let mut s = BigInt::zero();
        for j in 0..cols {
            for c in &ints {
                s += c[i * cols + j].abs();
            }
        }
        bound *= s;
    }
    if bound.is_zero() {
        return Ok(None);
    }
    let reduce = |p: u64| -> Vec<Vec<u64>> {
        let pb = BigInt::from(p);
        ints.iter().map(|c| c.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect()).collect()
    };
    let eval_mod = |red: &[Vec<u64>], alpha: &[u64], p: u64| -> usize {
        let mut m = vec![vec![0u64; cols]; rows];
        for (k, c) in red.iter().enumerate() {
            let a = alpha[k] % p;
            if a == 0 {
                continue;
            }
            for i in 0..rows {
                for j in 0..cols {
                    m[i][j] = (m[i][j] + mul_mod(a, c[i * cols + j], p)) % p;
                }
            }
        }
        rank_mod(m, p)
    };

    let mut primes = large_primes();
    let p0 = primes.next().unwrap();
    let red0 = reduce(p0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..PRESCREEN_POINTS {
        let alpha: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1_000_000)).collect();
        if eval_mod(&red0, &alpha, p0) == rows {
            let a = to_scalars(&alpha);
            debug_assert!(exact_ok(&a));
            return Ok(Some(a));
        }
    }
    let mut product = BigInt::one();
    let mut p = p0;
    let mut red = red0;
    loop {
        for alpha in grid(n, rows) {
            if eval_mod(&red, &alpha, p) == rows {
                return Ok(Some(to_scalars(&alpha)));
            }
        }
        product *= p;
        if product > bound {
            return Ok(None);
        }
        p = primes.next().unwrap();
        red = reduce(p);
    }
}

/// Whether the pencil has full row rank for general `α`.
pub fn generically_full_rank(mats: &[Matrix<Scalar>], seed: u64) -> Result<bool, IdentityError> {
    full_rank_point(mats, seed).map(|p| p.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<i64>>) -> Matrix<Scalar> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(Scalar::from_i64).collect()).collect())
    }

    #[test]
    fn primes_are_prime() {
        let p = large_primes().next().unwrap();
        assert!(p < 1 << 61 && p > 1 << 60);
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime((1 << 61) - 3 * 5));
    }

    #[test]
    fn hankel_pencil() {
        // Gram pencil of k[e]/e^3: [[a0,a1,a2],[a1,a2,0],[a2,0,0]]
        let c0 = m(vec![vec![1, 0, 0], vec![0, 0, 0], vec![0, 0, 0]]);
        let c1 = m(vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]]);
        let c2 = m(vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        let p = full_rank_point(&[c0.clone(), c1.clone(), c2.clone()], 1).unwrap().unwrap();
        assert_eq!(evaluate_pencil(&[c0, c1, c2], &p).rank(), 3);
    }

    #[test]
    fn identically_singular_pencil() {
        // [[a0,a1,a2],[a1,0,0],[a2,0,0]] has rank at most 2
        let c0 = m(vec![vec![1, 0, 0], vec![0, 0, 0], vec![0, 0, 0]]);
        let c1 = m(vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]]);
        let c2 = m(vec![vec![0, 0, 1], vec![0, 0, 0], vec![1, 0, 0]]);
        assert_eq!(full_rank_point(&[c0, c1, c2], 1).unwrap(), None);
    }

    #[test]
    fn sparse_nonzero_minor_is_found_on_the_grid() {
        // det = a1 * (a1 - a2)
        let c1 = m(vec![vec![1, 0], vec![0, 1]]);
        let c2 = m(vec![vec![0, 0], vec![0, -1]]);
        let c0 = m(vec![vec![0, 0], vec![0, 0]]);
        let p = full_rank_point(&[c0.clone(), c1.clone(), c2.clone()], 3).unwrap().unwrap();
        assert_eq!(evaluate_pencil(&[c0, c1, c2], &p).rank(), 2);
    }

    #[test]
    fn small_prime_fields() {
        let f = |x: i64| Scalar::Fp(x.rem_euclid(3) as u64, 3);
        let c = Matrix::from_rows(vec![vec![f(1), f(0), f(0)], vec![f(0), f(1), f(0)], vec![f(0), f(0), f(1)]]);
        assert!(matches!(full_rank_point(&[c.clone()], 0), Err(IdentityError::FieldTooSmall { .. })));
        let g = |x: i64| Scalar::Fp(x.rem_euclid(7) as u64, 7);
        let c = Matrix::from_rows(vec![vec![g(1), g(0)], vec![g(0), g(1)]]);
        assert!(generically_full_rank(&[c], 0).unwrap());
    }
}
