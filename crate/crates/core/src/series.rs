//! Rational functions in a deformation parameter with Puiseux exponents.
//!
//! A [`Series`] stores `num(s)/den(s)` with `t = s^N`. Elements with
//! different `N` are lifted to the least common multiple before combining.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("negative valuation {0}")]
    NegativeValuation(Valuation),
}

/// Order of vanishing at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Rational64),
    Infinity,
}

impl Valuation {
    pub fn int(k: i64) -> Valuation {
        Valuation::Finite(Rational64::from_integer(k))
    }

    pub fn finite(&self) -> Option<Rational64> {
        match self {
            Valuation::Finite(r) => Some(*r),
            Valuation::Infinity => None,
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Valuation::Finite(r) if *r < Rational64::from_integer(0))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(r) => write!(f, "{r}"),
            Valuation::Infinity => f.write_str("inf"),
        }
    }
}

/// Exact element of 𝕜(t^{1/N}) in lowest terms with a monic denominator.
#[derive(Clone, Debug)]
pub struct Series {
    num: Poly,
    den: Poly,
    n: u32,
}

impl Series {
    /// Builds `num(s)/den(s)` with `t = s^n`.
    pub fn new(num: Poly, den: Poly, n: u32) -> Series {
        assert!(!den.is_zero(), "zero denominator");
        assert!(n > 0);
        if num.is_zero() {
            return Series { num, den: Poly::one(), n };
        }
        let (num, den) = if den.degree() == Some(0) {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g), den.div_exact(&g))
            }
        };
        let l = den.lead().unwrap().clone();
        if l.is_one() {
            Series { num, den, n }
        } else {
            let li = l.inv().unwrap();
            Series { num: num.scale(&li), den: den.scale(&li), n }
        }
    }

    pub fn from_scalar(c: Scalar) -> Series {
        Series { num: Poly::constant(c), den: Poly::one(), n: 1 }
    }

    pub fn from_i64(c: i64) -> Series {
        Series::from_scalar(Scalar::from_i64(c))
    }

    /// Polynomial in `t` from coefficients `c_0, c_1, …`.
    pub fn from_t_coeffs(coeffs: Vec<Scalar>) -> Series {
        Series { num: Poly::from_coeffs(coeffs), den: Poly::one(), n: 1 }
    }

    /// `c · t^(k/n)`, where `k` may be negative.
    pub fn monomial(c: Scalar, k: i64, n: u32) -> Series {
        if k >= 0 {
            Series::new(Poly::monomial(c, k as usize), Poly::one(), n)
        } else {
            Series::new(Poly::constant(c), Poly::monomial(Scalar::one(), (-k) as usize), n)
        }
    }

    /// `t^r` for a rational exponent.
    pub fn t_pow(r: Rational64) -> Series {
        Series::monomial(Scalar::one(), *r.numer(), *r.denom() as u32)
    }

    pub fn t() -> Series {
        Series::monomial(Scalar::one(), 1, 1)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn exp_denominator(&self) -> u32 {
        self.n
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Valuation measured in powers of `s = t^{1/N}`.
    pub fn ord_s(&self) -> Option<i64> {
        let a = self.num.ord()? as i64;
        Some(a - self.den.ord().unwrap() as i64)
    }

    pub fn valuation(&self) -> Valuation {
        match self.ord_s() {
            None => Valuation::Infinity,
            Some(k) => Valuation::Finite(Rational64::new(k, self.n as i64)),
        }
    }

    /// Coefficient of the lowest-order term of the expansion.
    pub fn leading_coefficient(&self) -> Scalar {
        match self.num.ord() {
            None => Scalar::zero(),
            Some(a) => {
                let b = self.den.ord().unwrap();
                self.num.coeff(a).div(&self.den.coeff(b))
            }
        }
    }

    pub fn limit_at_zero(&self) -> Result<Scalar, SeriesError> {
        match self.ord_s() {
            None => Ok(Scalar::zero()),
            Some(k) if k < 0 => Err(SeriesError::NegativeValuation(self.valuation())),
            Some(0) => Ok(self.leading_coefficient()),
            Some(_) => Ok(Scalar::zero()),
        }
    }

    /// Same element with the exponent denominator multiplied by `m`.
    pub fn rescale_exponents(&self, m: u32) -> Series {
        assert!(m > 0);
        Series { num: self.num.spread(m as usize), den: self.den.spread(m as usize), n: self.n * m }
    }

    /// Lifts to exponent denominator `n`, a multiple of the current one.
    pub fn lift(&self, n: u32) -> Series {
        assert!(n % self.n == 0, "cannot lift N={} to {}", self.n, n);
        self.rescale_exponents(n / self.n)
    }

    /// Smallest exponent denominator representing the same element.
    pub fn reduce_exponents(&self) -> Series {
        let mut g = self.n as usize;
        for k in self.num.support().chain(self.den.support()) {
            g = g.gcd(&k);
        }
        if g <= 1 {
            return self.clone();
        }
        let squeeze = |p: &Poly| {
            Poly::from_coeffs(p.coeffs().iter().step_by(g).cloned().collect())
        };
        Series { num: squeeze(&self.num), den: squeeze(&self.den), n: self.n / g as u32 }
    }

    /// Multiplies by `s^k`.
    pub fn shift_s(&self, k: i64) -> Series {
        match k.cmp(&0) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => Series::new(self.num.shift_up(k as usize), self.den.clone(), self.n),
            Ordering::Less => Series::new(self.num.clone(), self.den.shift_up((-k) as usize), self.n),
        }
    }

    /// Evaluates at a nonzero value of `s`; `None` at a pole.
    pub fn eval_s(&self, s: &Scalar) -> Option<Scalar> {
        let d = self.den.eval(s);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(s).div(&d))
    }

    fn common(&self, rhs: &Series) -> (Series, Series) {
        if self.n == rhs.n {
            return (self.clone(), rhs.clone());
        }
        let n = self.n.lcm(&rhs.n);
        (self.lift(n), rhs.lift(n))
    }

    fn combine(&self, rhs: &Series, f: impl Fn(&Series, &Series) -> Series) -> Series {
        if self.n == rhs.n {
            f(self, rhs)
        } else {
            let (a, b) = self.common(rhs);
            f(&a, &b)
        }
    }
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.num == other.num && self.den == other.den;
        }
        let (a, b) = self.common(other);
        a.num == b.num && a.den == b.den
    }
}

impl Eq for Series {}

impl Field for Series {
    fn zero() -> Self {
        Series { num: Poly::zero(), den: Poly::one(), n: 1 }
    }
    fn one() -> Self {
        Series::from_scalar(Scalar::one())
    }
    fn from_i64(n: i64) -> Self {
        Series::from_scalar(Scalar::from_i64(n))
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        self.combine(rhs, |a, b| {
            if a.den.is_one() && b.den.is_one() {
                Series { num: a.num.add(&b.num), den: Poly::one(), n: a.n }
            } else if a.den == b.den {
                Series::new(a.num.add(&b.num), a.den.clone(), a.n)
            } else {
                Series::new(a.num.mul(&b.den).add(&b.num.mul(&a.den)), a.den.mul(&b.den), a.n)
            }
        })
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Series::zero();
        }
        self.combine(rhs, |a, b| {
            if a.den.is_one() && b.den.is_one() {
                Series { num: a.num.mul(&b.num), den: Poly::one(), n: a.n }
            } else {
                Series::new(a.num.mul(&b.num), a.den.mul(&b.den), a.n)
            }
        })
    }
    fn neg(&self) -> Self {
        Series { num: self.num.neg(), den: self.den.clone(), n: self.n }
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Series::new(self.den.clone(), self.num.clone(), self.n))
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero");
        if self.is_zero() {
            return Series::zero();
        }
        self.combine(rhs, |a, b| Series::new(a.num.mul(&b.den), a.den.mul(&b.num), a.n))
    }
}

fn fmt_exponent(k: usize, n: u32) -> String {
    let r = Rational64::new(k as i64, n as i64);
    if *r.denom() == 1 {
        if *r.numer() == 1 {
            "t".to_string()
        } else {
            format!("t^{}", r.numer())
        }
    } else {
        format!("t^({}/{})", r.numer(), r.denom())
    }
}

/// Renders a polynomial in `s` as a sum of terms in `t`.
pub(crate) fn fmt_poly(p: &Poly, n: u32) -> String {
    let mut out = String::new();
    for k in p.support() {
        let c = p.coeff(k);
        let neg = c.is_negative();
        let a = if neg { c.neg() } else { c };
        let body = match (k, a.is_one()) {
            (0, _) => a.to_text(),
            (_, true) => fmt_exponent(k, n),
            _ => format!("{}*{}", a.to_text(), fmt_exponent(k, n)),
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", fmt_poly(&self.num, self.n))
        } else {
            write!(f, "({})/({})", fmt_poly(&self.num, self.n), fmt_poly(&self.den, self.n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tp(c: &[i64]) -> Series {
        Series::from_t_coeffs(c.iter().map(|&x| Scalar::from_i64(x)).collect())
    }

    fn r(a: i64, b: i64) -> Valuation {
        Valuation::Finite(Rational64::new(a, b))
    }

    #[test]
    fn valuations() {
        assert_eq!(tp(&[0, 0, 1, 1]).valuation(), Valuation::int(2));
        assert_eq!(Series::zero().valuation(), Valuation::Infinity);
        let x = tp(&[0, 1, -1]).div(&tp(&[1, 1]));
        assert_eq!(x.valuation(), Valuation::int(1));
        assert_eq!(Series::t_pow(Rational64::new(1, 2)).valuation(), r(1, 2));
    }

    #[test]
    fn limits() {
        assert_eq!(tp(&[1, 1]).limit_at_zero().unwrap(), Scalar::one());
        assert!(tp(&[0, 1]).div(&tp(&[1, 1])).limit_at_zero().unwrap().is_zero());
        let x = tp(&[2, 1]).div(&tp(&[1, -1]));
        assert_eq!(x.limit_at_zero().unwrap(), Scalar::from_i64(2));
        let y = Series::one().div(&tp(&[0, 1]));
        assert!(matches!(y.limit_at_zero(), Err(SeriesError::NegativeValuation(_))));
    }

    #[test]
    fn puiseux_rescaling() {
        let t = Series::t();
        let t3 = t.rescale_exponents(3);
        assert_eq!(t3.exp_denominator(), 3);
        assert_eq!(t3, t);
        assert_eq!(t3.valuation(), Valuation::int(1));
        let h = Series::t_pow(Rational64::new(1, 2));
        let h2 = h.rescale_exponents(2);
        assert_eq!(h2.exp_denominator(), 4);
        assert_eq!(h2.valuation(), r(1, 2));
        assert_eq!(h.mul(&h), t);
        assert_eq!(h.mul(&h).reduce_exponents().exp_denominator(), 1);
        let mixed = h.add(&Series::t_pow(Rational64::new(1, 3)));
        assert_eq!(mixed.exp_denominator(), 6);
        assert_eq!(mixed.valuation(), r(1, 3));
    }

    #[test]
    fn display() {
        assert_eq!(tp(&[1, 0, -2]).to_string(), "1 - 2*t^2");
        assert_eq!(Series::t_pow(Rational64::new(1, 3)).to_string(), "t^(1/3)");
        assert_eq!(Series::one().div(&tp(&[1, 1])).to_string(), "(1)/(1 + t)");
    }

    fn arb_series() -> impl Strategy<Value = Series> {
        (
            proptest::collection::vec(-4i64..5, 0..4),
            proptest::collection::vec(-4i64..5, 0..3),
            1u32..4,
        )
            .prop_map(|(a, b, n)| {
                let num = Poly::from_coeffs(a.into_iter().map(Scalar::from_i64).collect());
                let mut den = Poly::from_coeffs(b.into_iter().map(Scalar::from_i64).collect());
                if den.is_zero() {
                    den = Poly::one();
                }
                Series::new(num, den, n)
            })
    }

    proptest! {
        #[test]
        fn field_axioms(x in arb_series(), y in arb_series(), z in arb_series()) {
            prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
            prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            if !x.is_zero() {
                prop_assert!(x.mul(&x.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn valuation_laws(x in arb_series(), y in arb_series()) {
            let add = |a: Valuation, b: Valuation| match (a, b) {
                (Valuation::Finite(p), Valuation::Finite(q)) => Valuation::Finite(p + q),
                _ => Valuation::Infinity,
            };
            prop_assert_eq!(x.mul(&y).valuation(), add(x.valuation(), y.valuation()));
            let s = x.add(&y).valuation();
            let m = x.valuation().min(y.valuation());
            prop_assert!(s >= m);
            if x.valuation() != y.valuation() {
                prop_assert_eq!(s, m);
            }
        }

        #[test]
        fn rescale_commutes_with_valuation(x in arb_series(), m in 1u32..5) {
            prop_assert_eq!(x.rescale_exponents(m).valuation(), x.valuation());
            prop_assert_eq!(x.rescale_exponents(m).reduce_exponents(), x.clone());
        }

        #[test]
        fn limit_is_a_homomorphism(x in arb_series(), y in arb_series()) {
            let nonneg = |v: &Series| !v.valuation().is_negative();
            if nonneg(&x) && nonneg(&y) {
                let (a, b) = (x.limit_at_zero().unwrap(), y.limit_at_zero().unwrap());
                prop_assert_eq!(x.add(&y).limit_at_zero().unwrap(), a.add(&b));
                prop_assert_eq!(x.mul(&y).limit_at_zero().unwrap(), a.mul(&b));
            }
        }
    }
}
