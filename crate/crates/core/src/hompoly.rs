//! Homogeneous polynomials in `m` variables, stored as exponent vectors.
//!
//! A linear map `A` acts by the substitution `v_j ↦ Σ_k A[k][j] v_k`, which
//! matches [`Tensor::restrict`] on the symmetric embedding.

use std::collections::BTreeMap;
use std::fmt;

use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::series::{Series, SeriesError, Valuation};
use crate::tensor::{coefficient_term, join_terms, multi_indices, Tensor};

#[derive(Clone, Debug, PartialEq)]
pub struct HomPoly<E> {
    nvars: usize,
    degree: usize,
    terms: BTreeMap<Vec<u32>, E>,
}

fn multinomial(a: &[u32]) -> i64 {
    let mut out: i64 = 1;
    let mut n: i64 = 0;
    for &k in a {
        for j in 1..=k as i64 {
            n += 1;
            out = out * n / j;
        }
    }
    out
}

/// All exponent vectors of the given degree, in increasing lexicographic order.
pub fn monomials(nvars: usize, degree: usize) -> Vec<Vec<u32>> {
    fn rec(left: usize, nvars: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(left as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k as u32);
            rec(left - k, nvars, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars > 0 {
        rec(degree, nvars, &mut Vec::new(), &mut out);
    }
    out
}

impl<E: Field> HomPoly<E> {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        HomPoly { nvars, degree, terms: BTreeMap::new() }
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms(nvars: usize, degree: usize, terms: impl IntoIterator<Item = (Vec<u32>, E)>) -> Self {
        let mut p = HomPoly::zero(nvars, degree);
        for (a, c) in terms {
            assert_eq!(a.len(), nvars, "exponent vector length");
            assert_eq!(a.iter().sum::<u32>() as usize, degree, "inhomogeneous term");
            p.add_term(a, c);
        }
        p
    }

    /// The linear form `Σ c_k v_k`.
    pub fn linear(coeffs: &[E]) -> Self {
        let n = coeffs.len();
        HomPoly::from_terms(
            n,
            1,
            coeffs.iter().enumerate().map(|(k, c)| {
                let mut a = vec![0; n];
                a[k] = 1;
                (a, c.clone())
            }),
        )
    }

    fn add_term(&mut self, a: Vec<u32>, c: E) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&a) {
            Some(x) => {
                let s = x.add(&c);
                if s.is_zero() {
                    self.terms.remove(&a);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(a, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, E> {
        &self.terms
    }

    pub fn coeff(&self, a: &[u32]) -> E {
        self.terms.get(a).cloned().unwrap_or_else(E::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.nvars, self.degree), (rhs.nvars, rhs.degree));
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&E::one().neg()))
    }

    pub fn scale(&self, c: &E) -> Self {
        HomPoly::from_terms(self.nvars, self.degree, self.terms.iter().map(|(a, x)| (a.clone(), x.mul(c))))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = HomPoly::zero(self.nvars, self.degree + rhs.degree);
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(i, j)| i + j).collect();
                out.add_term(e, x.mul(y));
            }
        }
        out
    }

    pub fn map<F: Field>(&self, f: impl Fn(&E) -> F) -> HomPoly<F> {
        HomPoly::from_terms(self.nvars, self.degree, self.terms.iter().map(|(a, x)| (a.clone(), f(x))))
    }

    /// `∂/∂v_j`.
    pub fn partial(&self, j: usize) -> Self {
        assert!(self.degree > 0);
        let mut out = HomPoly::zero(self.nvars, self.degree - 1);
        for (a, x) in &self.terms {
            if a[j] > 0 {
                let mut b = a.clone();
                b[j] -= 1;
                out.add_term(b, x.mul(&E::from_i64(a[j] as i64)));
            }
        }
        out
    }

    /// Whether some monomial involves `v_j`.
    pub fn involves(&self, j: usize) -> bool {
        self.terms.keys().any(|a| a[j] > 0)
    }

    /// Image under `v_j ↦ Σ_k A[k][j] v_k`.
    pub fn substitute(&self, a: &Matrix<E>) -> Self {
        assert_eq!(a.cols(), self.nvars);
        let images: Vec<HomPoly<E>> = (0..self.nvars).map(|j| HomPoly::linear(&a.column(j))).collect();
        let mut powers: Vec<Vec<HomPoly<E>>> = images
            .iter()
            .map(|l| vec![HomPoly::from_terms(a.rows(), 0, [(vec![0; a.rows()], E::one())]), l.clone()])
            .collect();
        let mut out = HomPoly::zero(a.rows(), self.degree);
        for (e, x) in &self.terms {
            let mut prod = HomPoly::from_terms(a.rows(), 0, [(vec![0; a.rows()], x.clone())]);
            for (j, &k) in e.iter().enumerate() {
                while powers[j].len() <= k as usize {
                    let next = powers[j].last().unwrap().mul(&images[j]);
                    powers[j].push(next);
                }
                prod = prod.mul(&powers[j][k as usize]);
            }
            out = out.add(&prod);
        }
        out
    }

    /// Multiplies the coefficient of each monomial by `c^{a_j}`.
    pub fn scale_variable(&self, j: usize, c: &E) -> Self {
        let mut pows = vec![E::one()];
        for _ in 0..self.degree {
            let next = pows.last().unwrap().mul(c);
            pows.push(next);
        }
        self.map_terms(|a, x| x.mul(&pows[a[j] as usize]))
    }

    fn map_terms(&self, f: impl Fn(&[u32], &E) -> E) -> Self {
        HomPoly::from_terms(self.nvars, self.degree, self.terms.iter().map(|(a, x)| (a.clone(), f(a, x))))
    }

    /// Coefficients in the order of [`monomials`].
    pub fn coefficient_vector(&self) -> Vec<E> {
        monomials(self.nvars, self.degree).iter().map(|a| self.coeff(a)).collect()
    }

    /// The polynomial `Σ_ix T[ix] v_{ix_1}⋯v_{ix_ν}` of a tensor whose axes all have size `m`.
    pub fn from_tensor(t: &Tensor<E>) -> Self {
        let m = t.dims()[0];
        assert!(t.dims().iter().all(|&k| k == m), "all axes must have equal size");
        let mut p = HomPoly::zero(m, t.order());
        for (ix, x) in t.nonzero_entries() {
            let mut a = vec![0u32; m];
            for i in ix {
                a[i] += 1;
            }
            p.add_term(a, x);
        }
        p
    }

    /// Symmetric tensor with `from_tensor(to_tensor(F)) = F`; needs `ν!` invertible.
    pub fn to_tensor(&self) -> Tensor<E> {
        let dims = vec![self.nvars; self.degree];
        let mut t = Tensor::zeros(&dims);
        for ix in multi_indices(&dims) {
            let mut a = vec![0u32; self.nvars];
            for &i in &ix {
                a[i] += 1;
            }
            if let Some(x) = self.terms.get(&a) {
                t.set(&ix, x.div(&E::from_i64(multinomial(&a))));
            }
        }
        t.with_format_unchecked(vec![self.degree])
    }
}

impl HomPoly<Series> {
    pub fn limit_at_zero(&self) -> Result<HomPoly<Scalar>, SeriesError> {
        let terms = self
            .terms
            .iter()
            .map(|(a, x)| x.limit_at_zero().map(|c| (a.clone(), c)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HomPoly::from_terms(self.nvars, self.degree, terms))
    }

    pub fn min_valuation(&self) -> Valuation {
        self.terms.values().map(|x| x.valuation()).min().unwrap_or(Valuation::Infinity)
    }
}

impl HomPoly<Scalar> {
    pub fn to_series(&self) -> HomPoly<Series> {
        self.map(|x| Series::from_scalar(x.clone()))
    }

    /// Parses sums of terms like `1/2*x1^2*x4` or `-x2*x3`.
    pub fn parse(text: &str, nvars: usize) -> Result<Self, String> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pieces = Vec::new();
        let mut cur = String::new();
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                pieces.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        pieces.push(cur);
        let mut terms = Vec::new();
        let mut degree = None;
        for piece in pieces.iter().filter(|p| !p.is_empty() && *p != "+") {
            let (sign, body) = match piece.strip_prefix('-') {
                Some(b) => (-1, b),
                None => (1, piece.trim_start_matches('+')),
            };
            let mut coeff = Scalar::from_i64(sign);
            let mut a = vec![0u32; nvars];
            for factor in body.split('*') {
                if let Some(var) = factor.strip_prefix('x') {
                    let (idx, pow) = match var.split_once('^') {
                        Some((i, p)) => (i, p.parse::<u32>().map_err(|_| format!("bad exponent in {factor}"))?),
                        None => (var, 1),
                    };
                    let k: usize = idx.parse().map_err(|_| format!("bad variable {factor}"))?;
                    if k == 0 || k > nvars {
                        return Err(format!("variable {factor} out of range"));
                    }
                    a[k - 1] += pow;
                } else {
                    let c = crate::field::parse_rational(factor).map_err(|e| e.to_string())?;
                    coeff = coeff.mul(&Scalar::from_big(c));
                }
            }
            let deg = a.iter().sum::<u32>() as usize;
            if *degree.get_or_insert(deg) != deg {
                return Err("polynomial is not homogeneous".into());
            }
            terms.push((a, coeff));
        }
        let degree = degree.ok_or("empty polynomial")?;
        Ok(HomPoly::from_terms(nvars, degree, terms))
    }
}

impl<E: Field> fmt::Display for HomPoly<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(a, x)| {
                let vars: Vec<String> = a
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                    .collect();
                if vars.is_empty() {
                    x.to_string()
                } else {
                    coefficient_term(&x.to_string(), &vars.join("*"))
                }
            })
            .collect();
        f.write_str(&join_terms(&terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str, n: usize) -> HomPoly<Scalar> {
        HomPoly::parse(s, n).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let f = p("x1*x2*x3 + 1/2*x4*x1^2", 4);
        assert_eq!(f.to_string(), "1/2*x1^2*x4 + x1*x2*x3");
        assert_eq!(p("-x1^2 - 3*x2^2", 2).to_string(), "-x1^2 - 3*x2^2");
        assert!(HomPoly::parse("x1 + x2^2", 2).is_err());
    }

    #[test]
    fn tensor_round_trip() {
        let f = p("x1*x2*x3 + 1/2*x4*x1^2", 4);
        let t = f.to_tensor();
        assert_eq!(*t.get(&[1, 0, 2]), Scalar::rational(1, 6));
        assert_eq!(*t.get(&[0, 3, 0]), Scalar::rational(1, 6));
        assert_eq!(HomPoly::from_tensor(&t), f);
        assert_eq!(monomials(3, 2).len(), 6);
    }

    #[test]
    fn substitution_composes() {
        let f = p("x1^2*x2 + x2^3", 2);
        let a = Matrix::from_rows(vec![vec![Scalar::one(), Scalar::from_i64(2)], vec![Scalar::zero(), Scalar::one()]]);
        // v2 -> 2 v1 + v2
        assert_eq!(f.substitute(&a), p("x1^2*x2 + 2*x1^3 + x2^3 + 6*x1*x2^2 + 12*x1^2*x2 + 8*x1^3", 2));
        let t = f.to_tensor().restrict_coordinates(&[a.clone()]).unwrap();
        assert_eq!(HomPoly::from_tensor(&t), f.substitute(&a));
    }

    proptest! {
        #[test]
        fn partials_commute_and_substitution_matches_restriction(
            coeffs in proptest::collection::vec(-3i64..4, 10),
            mat in proptest::collection::vec(-2i64..3, 9),
        ) {
            let f = HomPoly::from_terms(3, 3, monomials(3, 3).into_iter().zip(coeffs).map(|(a, c)| (a, Scalar::from_i64(c))));
            prop_assert_eq!(f.partial(0).partial(2), f.partial(2).partial(0));
            let a = Matrix::new(3, 3, mat.into_iter().map(Scalar::from_i64).collect());
            let t = f.to_tensor().restrict_coordinates(&[a.clone()]).unwrap();
            prop_assert_eq!(HomPoly::from_tensor(&t), f.substitute(&a));
        }
    }
}
