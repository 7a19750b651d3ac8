//! Exact scalars over ℚ or a prime field, and the `Field` trait shared with series.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("malformed scalar {0:?}")]
    Malformed(String),
    #[error("{value} has a denominator divisible by {p}")]
    NotReducible { value: String, p: u64 },
}

/// Arithmetic needed by the generic linear algebra.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;

    fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inv().expect("division by zero"))
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

/// The base field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rationals,
    Prime(u64),
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(p: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if p < 2 {
        return false;
    }
    for &b in &BASES {
        if p % b == 0 {
            return p == b;
        }
    }
    let mut d = p - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, p);
        if x == 1 || x == p - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, p);
            if x == p - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl FieldKind {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if is_prime(p) && p < (1 << 62) {
            Ok(FieldKind::Prime(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    /// 0 for ℚ.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldKind::Rationals => 0,
            FieldKind::Prime(p) => *p,
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        self.embed(&Scalar::from_i64(n))
    }

    /// Maps a scalar into this field (rationals are reduced modulo p).
    pub fn embed(&self, x: &Scalar) -> Scalar {
        match (self, x) {
            (FieldKind::Rationals, _) => x.clone(),
            (FieldKind::Prime(p), Scalar::Q(r)) => Scalar::Fp(reduce_rational(r, *p), *p),
            (FieldKind::Prime(p), Scalar::Fp(v, q)) => {
                assert_eq!(p, q, "mixing residues modulo different primes");
                Scalar::Fp(*v, *p)
            }
        }
    }

    pub fn parse(&self, s: &str) -> Result<Scalar, FieldError> {
        let r = parse_rational(s)?;
        match self {
            FieldKind::Rationals => Ok(Scalar::Q(r)),
            FieldKind::Prime(p) => {
                let den = r.denom().mod_floor(&BigInt::from(*p));
                if den.is_zero() {
                    return Err(FieldError::NotReducible { value: s.to_string(), p: *p });
                }
                Ok(Scalar::Fp(reduce_rational(&r, *p), *p))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            FieldKind::Rationals => "Q".to_string(),
            FieldKind::Prime(p) => format!("F{p}"),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let t = s.trim();
    let bad = || FieldError::Malformed(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    let r = match t.split_once('/') {
        Some((a, b)) => {
            let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
            let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            BigRational::new(a, b)
        }
        None => BigRational::from_integer(BigInt::from_str(t).map_err(|_| bad())?),
    };
    Ok(r)
}

pub(crate) fn reduce_rational(r: &BigRational, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let n = r.numer().mod_floor(&pb).to_u64().unwrap();
    let d = r.denom().mod_floor(&pb).to_u64().unwrap();
    assert!(d != 0, "rational {r} has no residue modulo {p}");
    mul_mod(n, inv_mod(d, p), p)
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// An element of ℚ or of 𝔽ₚ.
///
/// Rational values combine with residues by reduction modulo p, so integer
/// constants such as `Scalar::one()` act in every field.
#[derive(Clone, Debug)]
pub enum Scalar {
    Q(BigRational),
    Fp(u64, u64),
}

impl Scalar {
    pub fn rational(n: i64, d: i64) -> Scalar {
        Scalar::Q(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_big(r: BigRational) -> Scalar {
        Scalar::Q(r)
    }

    pub fn kind(&self) -> Option<FieldKind> {
        match self {
            Scalar::Q(_) => None,
            Scalar::Fp(_, p) => Some(FieldKind::Prime(*p)),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Q(r) => Some(r),
            Scalar::Fp(..) => None,
        }
    }

    /// Canonical string: `a/b` for rationals, the residue in `0..p` otherwise.
    pub fn to_text(&self) -> String {
        match self {
            Scalar::Q(r) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp(v, _) => v.to_string(),
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Q(r) if r.is_negative())
    }

    pub fn pow(&self, e: u64) -> Scalar {
        let mut r = Scalar::one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    fn binop(
        &self,
        rhs: &Scalar,
        q: impl Fn(&BigRational, &BigRational) -> BigRational,
        f: impl Fn(u64, u64, u64) -> u64,
    ) -> Scalar {
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(q(a, b)),
            (Scalar::Fp(a, p), Scalar::Fp(b, p2)) => {
                assert_eq!(p, p2, "mixing residues modulo different primes");
                Scalar::Fp(f(*a, *b, *p), *p)
            }
            (Scalar::Q(a), Scalar::Fp(b, p)) => Scalar::Fp(f(reduce_rational(a, *p), *b, *p), *p),
            (Scalar::Fp(a, p), Scalar::Q(b)) => Scalar::Fp(f(*a, reduce_rational(b, *p), *p), *p),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => a == b,
            (Scalar::Fp(a, p), Scalar::Fp(b, q)) => p == q && a == b,
            (Scalar::Q(a), Scalar::Fp(b, p)) | (Scalar::Fp(b, p), Scalar::Q(a)) => {
                let d = a.denom().mod_floor(&BigInt::from(*p));
                !d.is_zero() && reduce_rational(a, *p) == *b
            }
        }
    }
}

impl Eq for Scalar {}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::Q(BigRational::zero())
    }
    fn one() -> Self {
        Scalar::Q(BigRational::one())
    }
    fn from_i64(n: i64) -> Self {
        Scalar::Q(BigRational::from_integer(BigInt::from(n)))
    }
    fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp(v, _) => *v == 0,
        }
    }
    fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Fp(v, _) => *v == 1,
        }
    }
    fn add(&self, rhs: &Self) -> Self {
        self.binop(rhs, |a, b| a + b, |a, b, p| (a + b) % p)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.binop(rhs, |a, b| a - b, |a, b, p| (a + p - b) % p)
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return match (self, rhs) {
                (Scalar::Fp(_, p), _) | (_, Scalar::Fp(_, p)) => Scalar::Fp(0, *p),
                _ => Scalar::zero(),
            };
        }
        self.binop(rhs, |a, b| a * b, mul_mod)
    }
    fn neg(&self) -> Self {
        match self {
            Scalar::Q(r) => Scalar::Q(-r),
            Scalar::Fp(v, p) => Scalar::Fp((p - v) % p, *p),
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Q(r) => Scalar::Q(r.recip()),
            Scalar::Fp(v, p) => Scalar::Fp(inv_mod(*v, *p), *p),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::rational(n, d)
    }

    #[test]
    fn primality_matches_trial_division() {
        let slow = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..5000 {
            assert_eq!(is_prime(n), slow(n), "{n}");
        }
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn mixed_constants_reduce() {
        let f5 = FieldKind::prime(5).unwrap();
        let a = f5.from_i64(3);
        assert_eq!(a.add(&Scalar::from_i64(4)), f5.from_i64(2));
        assert_eq!(q(1, 2).mul(&f5.from_i64(2)), f5.from_i64(1));
        assert!(FieldKind::prime(9).is_err());
    }

    #[test]
    fn fermat_small_primes() {
        for p in [2u64, 3, 5, 7] {
            let k = FieldKind::prime(p).unwrap();
            for a in 0..p {
                let x = k.from_i64(a as i64);
                assert_eq!(x.pow(p), x);
            }
        }
    }

    #[test]
    fn parsing() {
        let k = FieldKind::Rationals;
        assert_eq!(k.parse("-3/6").unwrap(), q(-1, 2));
        assert!(k.parse("1/0").is_err());
        assert!(k.parse("x").is_err());
        assert!(FieldKind::Prime(3).parse("1/3").is_err());
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in -20i64..20, b in 1i64..9, c in -20i64..20, d in 1i64..9, e in -9i64..9) {
            let (x, y, z) = (q(a, b), q(c, d), q(e, 1));
            prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
            prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            if !x.is_zero() {
                prop_assert!(x.mul(&x.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn prime_field_axioms(a in 0i64..7, b in 0i64..7, c in 0i64..7) {
            let k = FieldKind::Prime(7);
            let (x, y, z) = (k.from_i64(a), k.from_i64(b), k.from_i64(c));
            prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
            prop_assert_eq!(x.sub(&y).add(&y), x.clone());
            if !x.is_zero() {
                prop_assert!(x.mul(&x.inv().unwrap()).is_one());
            }
        }
    }
}
