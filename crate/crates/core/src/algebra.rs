//! Finite commutative unital algebras given by structure constants.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use thiserror::Error;

use crate::field::{parse_rational, Field, FieldKind, Scalar};
use crate::identity::{full_rank_point, IdentityError};
use crate::matrix::Matrix;
use crate::tensor::Tensor;

pub use crate::tensor::unit_tensor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("structure constants have the wrong shape: {0}")]
    Shape(String),
    #[error("multiplication is not commutative at ({0}, {1})")]
    NotCommutative(usize, usize),
    #[error("multiplication is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("the given unit does not act as the identity")]
    BadUnit,
    #[error("cannot parse algebra: {0}")]
    Parse(String),
    #[error(transparent)]
    UnsupportedField(#[from] IdentityError),
}

/// `c[i][j][k]` is the coefficient of `e_k` in `e_i e_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteAlgebra {
    dim: usize,
    mult: Vec<Scalar>,
    unit: Vec<Scalar>,
}

/// An element of the dual space `A^∨`, by its values on the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional(pub Vec<Scalar>);

impl Functional {
    pub fn basis_dual(dim: usize, i: usize) -> Self {
        Functional((0..dim).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect())
    }

    pub fn eval(&self, a: &[Scalar]) -> Scalar {
        self.0.iter().zip(a).fold(Scalar::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }
}

impl FiniteAlgebra {
    /// Validates commutativity, associativity and the unit.
    pub fn new(dim: usize, mult: Vec<Scalar>, unit: Vec<Scalar>) -> Result<Self, AlgebraError> {
        if dim == 0 || mult.len() != dim * dim * dim || unit.len() != dim {
            return Err(AlgebraError::Shape(format!("dim {dim}, {} constants, unit of length {}", mult.len(), unit.len())));
        }
        let a = FiniteAlgebra { dim, mult, unit };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<(), AlgebraError> {
        let m = self.dim;
        for i in 0..m {
            for j in i + 1..m {
                if (0..m).any(|k| self.c(i, j, k) != self.c(j, i, k)) {
                    return Err(AlgebraError::NotCommutative(i, j));
                }
            }
        }
        let prods: Vec<Vec<Vec<Scalar>>> =
            (0..m).map(|i| (0..m).map(|j| (0..m).map(|k| self.c(i, j, k).clone()).collect()).collect()).collect();
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let left = self.mul(&prods[i][j], &basis(m, k));
                    let right = self.mul(&basis(m, i), &prods[j][k]);
                    if left != right {
                        return Err(AlgebraError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        for i in 0..m {
            if self.mul(&self.unit, &basis(m, i)) != basis(m, i) {
                return Err(AlgebraError::BadUnit);
            }
        }
        Ok(())
    }

    fn c(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.mult[(i * self.dim + j) * self.dim + k]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn structure_constants(&self) -> &[Scalar] {
        &self.mult
    }

    pub fn structure(&self, i: usize, j: usize, k: usize) -> &Scalar {
        self.c(i, j, k)
    }

    pub fn field(&self) -> FieldKind {
        self.mult.iter().chain(&self.unit).find_map(|x| x.kind()).unwrap_or(FieldKind::Rationals)
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let m = self.dim;
        let mut out = vec![Scalar::zero(); m];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                let xy = x.mul(y);
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.c(i, j, k);
                    if !c.is_zero() {
                        *o = o.add(&xy.mul(c));
                    }
                }
            }
        }
        out
    }

    /// Matrix of `x ↦ a·x` on the basis.
    pub fn mult_matrix(&self, a: &[Scalar]) -> Matrix<Scalar> {
        let cols: Vec<Vec<Scalar>> = (0..self.dim).map(|c| self.mul(a, &basis(self.dim, c))).collect();
        Matrix::from_rows(cols).transpose()
    }

    pub fn is_invertible(&self, a: &[Scalar]) -> bool {
        self.mult_matrix(a).rank() == self.dim
    }

    /// The field itself.
    pub fn ground() -> Self {
        FiniteAlgebra { dim: 1, mult: vec![Scalar::one()], unit: vec![Scalar::one()] }
    }

    /// `𝕜[x]/(x^n)` on the basis `1, x, …, x^{n-1}`.
    pub fn truncated(n: usize) -> Self {
        Self::monogenic(&{
            let mut v = vec![Scalar::zero(); n];
            v.push(Scalar::one());
            v
        })
        .unwrap()
    }

    /// `𝕜[x]/(f)` for a monic `f` given by coefficients from the constant term up.
    pub fn monogenic(f: &[Scalar]) -> Result<Self, AlgebraError> {
        let n = f.len().checked_sub(1).filter(|&n| n > 0).ok_or_else(|| AlgebraError::Parse("constant polynomial".into()))?;
        if !f[n].is_one() {
            return Err(AlgebraError::Parse("polynomial must be monic".into()));
        }
        // x^k reduced modulo f for k < 2n-1
        let mut powers: Vec<Vec<Scalar>> = (0..n).map(|k| basis(n, k)).collect();
        for _ in n..2 * n - 1 {
            let prev = powers.last().unwrap();
            let mut next = vec![Scalar::zero(); n];
            for k in 1..n {
                next[k] = prev[k - 1].clone();
            }
            let top = &prev[n - 1];
            for k in 0..n {
                next[k] = next[k].sub(&top.mul(&f[k]));
            }
            powers.push(next);
        }
        let mut mult = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                mult.extend(powers[i + j].iter().cloned());
            }
        }
        FiniteAlgebra::new(n, mult, basis(n, 0))
    }

    /// Direct product; the basis of `self` comes first.
    pub fn product(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        let m = a + b;
        let mut mult = vec![Scalar::zero(); m * m * m];
        for i in 0..a {
            for j in 0..a {
                for k in 0..a {
                    mult[(i * m + j) * m + k] = self.c(i, j, k).clone();
                }
            }
        }
        for i in 0..b {
            for j in 0..b {
                for k in 0..b {
                    mult[((a + i) * m + a + j) * m + a + k] = other.c(i, j, k).clone();
                }
            }
        }
        let unit = self.unit.iter().chain(&other.unit).cloned().collect();
        FiniteAlgebra { dim: m, mult, unit }
    }

    /// The same algebra on the basis `e'_i = Σ_k P[k][i] e_k`.
    pub fn change_basis(&self, p: &Matrix<Scalar>) -> Option<Self> {
        let pinv = p.inverse()?;
        let m = self.dim;
        let cols: Vec<Vec<Scalar>> = (0..m).map(|i| p.column(i)).collect();
        let mut mult = Vec::with_capacity(m * m * m);
        for i in 0..m {
            for j in 0..m {
                mult.extend(pinv.mul_vec(&self.mul(&cols[i], &cols[j])));
            }
        }
        let unit = pinv.mul_vec(&self.unit);
        Some(FiniteAlgebra { dim: m, mult, unit })
    }

    /// Maps every constant into the given field.
    pub fn embed(&self, kind: FieldKind) -> Result<Self, AlgebraError> {
        let mult = self.mult.iter().map(|x| kind.embed(x)).collect();
        let unit = self.unit.iter().map(|x| kind.embed(x)).collect();
        FiniteAlgebra::new(self.dim, mult, unit)
    }

    /// Product `e_{i_1} ⋯ e_{i_k}` for every index tuple of length `k ≥ 1`,
    /// in lexicographic order.
    fn iterated_products(&self, k: usize) -> Vec<Vec<Scalar>> {
        let m = self.dim;
        let mut cur: Vec<Vec<Scalar>> = (0..m).map(|i| basis(m, i)).collect();
        for _ in 1..k {
            let mut next = Vec::with_capacity(cur.len() * m);
            for p in &cur {
                for j in 0..m {
                    next.push(self.mul(p, &basis(m, j)));
                }
            }
            cur = next;
        }
        cur
    }

    /// `G[i][j] = ε(e_i e_j)`.
    pub fn gram(&self, eps: &Functional) -> Matrix<Scalar> {
        let m = self.dim;
        Matrix::from_fn(m, m, |i, j| (0..m).fold(Scalar::zero(), |acc, k| acc.add(&self.c(i, j, k).mul(&eps.0[k]))))
    }

    pub fn is_dual_generator(&self, eps: &Functional) -> bool {
        self.gram(eps).rank() == self.dim
    }
}

fn basis(m: usize, i: usize) -> Vec<Scalar> {
    (0..m).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect()
}

/// Tensor of `A^{×(d-1)} → A`: entry `[i_1, …, i_{d-1}, k]` is the coefficient of
/// `e_k` in `e_{i_1} ⋯ e_{i_{d-1}}`.
pub fn multiplication_tensor(a: &FiniteAlgebra, d: usize) -> Tensor<Scalar> {
    assert!(d >= 2, "multiplication tensors have order at least two");
    let m = a.dim;
    let data: Vec<Scalar> = a.iterated_products(d - 1).into_iter().flatten().collect();
    Tensor::new(vec![m; d], data).unwrap()
}

/// `(a_1, …, a_d) ↦ ε(a_1 ⋯ a_d)`.
pub fn evaluation_tensor(a: &FiniteAlgebra, eps: &Functional, d: usize) -> Tensor<Scalar> {
    assert!(d >= 1);
    let m = a.dim;
    let data: Vec<Scalar> = a.iterated_products(d).iter().map(|p| eps.eval(p)).collect();
    Tensor::with_format(vec![m; d], vec![1; d], data).unwrap()
}

/// `restrict(multiplication_tensor(A, d), maps) = evaluation_tensor(A, ε, d)`
/// with the Gram matrix on the last coordinate.
pub fn evaluation_from_multiplication(a: &FiniteAlgebra, eps: &Functional, d: usize) -> Vec<Matrix<Scalar>> {
    let mut maps: Vec<Matrix<Scalar>> = (0..d - 1).map(|_| Matrix::identity(a.dim)).collect();
    maps.push(a.gram(eps));
    maps
}

/// Maps taking `evaluation_tensor(A, ε, d)` to `evaluation_tensor(A, u·ε, d)`.
pub fn unit_twist_maps(a: &FiniteAlgebra, u: &[Scalar], d: usize) -> Vec<Matrix<Scalar>> {
    let mut maps = vec![a.mult_matrix(u).transpose()];
    maps.extend((1..d).map(|_| Matrix::identity(a.dim)));
    maps
}

/// `(u·ε)(x) = ε(u x)`.
pub fn twist_functional(a: &FiniteAlgebra, eps: &Functional, u: &[Scalar]) -> Functional {
    Functional((0..a.dim).map(|i| eps.eval(&a.mul(u, &basis(a.dim, i)))).collect())
}

#[derive(Clone, Debug)]
pub struct GorensteinQuotient {
    pub algebra: FiniteAlgebra,
    pub eps: Functional,
    /// Coordinates on `A/I` of the image of each basis vector (`dim A'` rows).
    pub projection: Matrix<Scalar>,
}

impl GorensteinQuotient {
    /// Maps with `restrict(evaluation_tensor(A', ε', d), maps) = evaluation_tensor(A, ε, d)`.
    pub fn pullback_maps(&self, d: usize) -> Vec<Matrix<Scalar>> {
        (0..d).map(|_| self.projection.transpose()).collect()
    }
}

/// `A/I` with `I = {a : ε(A·a) = 0}`, the induced functional and the projection.
pub fn gorenstein_quotient(a: &FiniteAlgebra, eps: &Functional) -> GorensteinQuotient {
    let m = a.dim;
    let kernel = Matrix::from_rows(a.gram(eps).kernel());
    let (ideal, pivots) = if kernel.rows() == 0 { (Matrix::zeros(0, m), vec![]) } else { kernel.rref() };
    let keep: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    // v ↦ v - Σ_l v_{p_l} K_l, read off on the kept coordinates
    let projection = Matrix::from_fn(keep.len(), m, |r, j| match pivots.iter().position(|&p| p == j) {
        Some(l) => ideal.get(l, keep[r]).neg(),
        None => {
            if keep[r] == j {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        }
    });
    let n = keep.len();
    let mut mult = Vec::with_capacity(n * n * n);
    for &i in &keep {
        for &j in &keep {
            mult.extend(projection.mul_vec(&a.mul(&basis(m, i), &basis(m, j))));
        }
    }
    let unit = projection.mul_vec(&a.unit);
    let algebra = FiniteAlgebra::new(n, mult, unit).expect("quotients by ideals are algebras");
    let eps2 = Functional(keep.iter().map(|&c| eps.0[c].clone()).collect());
    GorensteinQuotient { algebra, eps: eps2, projection }
}

/// A dual generator if one exists, decided exactly.
pub fn is_gorenstein(a: &FiniteAlgebra, seed: u64) -> Result<Option<Functional>, AlgebraError> {
    let m = a.dim;
    let mats: Vec<Matrix<Scalar>> = (0..m).map(|k| Matrix::from_fn(m, m, |i, j| a.c(i, j, k).clone())).collect();
    let point = full_rank_point(&mats, seed)?;
    Ok(point.map(|p| {
        let kind = a.field();
        Functional(p.iter().map(|x| kind.embed(x)).collect())
    }))
}

type Monomial = Vec<u32>;
type MPoly = BTreeMap<Monomial, Scalar>;

fn deglex_key(a: &Monomial) -> (u32, Vec<u32>) {
    (a.iter().sum(), a.clone())
}

fn leading(p: &MPoly) -> Option<(&Monomial, &Scalar)> {
    p.iter().max_by(|x, y| deglex_key(x.0).cmp(&deglex_key(y.0)))
}

fn divides(a: &Monomial, b: &Monomial) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn add_term(p: &mut MPoly, a: Monomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let s = p.get(&a).map_or(c.clone(), |x| x.add(&c));
    if s.is_zero() {
        p.remove(&a);
    } else {
        p.insert(a, s);
    }
}

fn parse_poly(text: &str, vars: &[String]) -> Result<MPoly, AlgebraError> {
    let err = |m: String| AlgebraError::Parse(m);
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut pieces = Vec::new();
    let mut cur = String::new();
    for ch in cleaned.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') {
            pieces.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    pieces.push(cur);
    let mut p = MPoly::new();
    for piece in pieces.iter().filter(|s| !s.is_empty()) {
        let (sign, body) = match piece.strip_prefix('-') {
            Some(b) => (-1, b),
            None => (1, piece.strip_prefix('+').unwrap_or(piece)),
        };
        if body.is_empty() {
            return Err(err(format!("empty term in {text:?}")));
        }
        let mut coeff = Scalar::from_i64(sign);
        let mut a = vec![0u32; vars.len()];
        for factor in body.split('*') {
            let (base, pow) = match factor.split_once('^') {
                Some((b, e)) => (b, e.parse::<u32>().map_err(|_| err(format!("bad exponent in {factor:?}")))?),
                None => (factor, 1),
            };
            if let Some(k) = vars.iter().position(|v| v == base) {
                a[k] += pow;
            } else {
                let c = parse_rational(base).map_err(|_| err(format!("unknown symbol {base:?}")))?;
                coeff = coeff.mul(&Scalar::from_big(c).pow(pow as u64));
            }
        }
        add_term(&mut p, a, coeff);
    }
    Ok(p)
}

const MAX_STANDARD_MONOMIALS: usize = 64;

/// Parses `k[x,y]/(x^2, y^2 - x*y)`. The generators must form a Gröbner
/// basis for the degree-lexicographic order; the quotient must be finite.
pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra, AlgebraError> {
    let err = |m: &str| AlgebraError::Parse(format!("{m} in {text:?}"));
    let t = text.trim();
    let open = t.find('[').ok_or_else(|| err("missing variable list"))?;
    let close = t.find(']').ok_or_else(|| err("unclosed variable list"))?;
    let vars: Vec<String> =
        t[open + 1..close].split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if vars.is_empty() {
        return Err(err("no variables"));
    }
    let rest = t[close + 1..].trim();
    let gens_text = rest
        .strip_prefix('/')
        .map(str::trim)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| err("expected /(generators)"))?;
    let gens: Vec<MPoly> =
        gens_text.split(',').map(|g| parse_poly(g, &vars)).collect::<Result<Vec<_>, _>>()?.into_iter().filter(|g| !g.is_empty()).collect();
    let leads: Vec<Monomial> = gens.iter().map(|g| leading(g).unwrap().0.clone()).collect();
    let n = vars.len();
    let zero = vec![0u32; n];
    if leads.iter().any(|l| *l == zero) {
        return Err(err("the ideal contains a unit"));
    }
    // standard monomials by breadth-first search
    let mut standard: BTreeSet<Monomial> = BTreeSet::new();
    let mut queue = VecDeque::from([zero.clone()]);
    while let Some(a) = queue.pop_front() {
        if standard.contains(&a) || leads.iter().any(|l| divides(l, &a)) {
            continue;
        }
        standard.insert(a.clone());
        if standard.len() > MAX_STANDARD_MONOMIALS {
            return Err(err("quotient is infinite or too large"));
        }
        for k in 0..n {
            let mut b = a.clone();
            b[k] += 1;
            queue.push_back(b);
        }
    }
    let mut order: Vec<Monomial> = standard.into_iter().collect();
    order.sort_by_key(deglex_key);
    let index: BTreeMap<Monomial, usize> = order.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
    let normal_form = |mut p: MPoly| -> MPoly {
        let mut out = MPoly::new();
        while let Some((a, c)) = leading(&p).map(|(a, c)| (a.clone(), c.clone())) {
            p.remove(&a);
            match gens.iter().zip(&leads).find(|(_, l)| divides(l, &a)) {
                None => add_term(&mut out, a, c),
                Some((g, l)) => {
                    let lc = g[l].clone();
                    let f = c.div(&lc);
                    for (b, x) in g.iter().filter(|(b, _)| *b != l) {
                        let e: Monomial = a.iter().zip(l).zip(b).map(|((ai, li), bi)| ai - li + bi).collect();
                        add_term(&mut p, e, f.mul(x).neg());
                    }
                }
            }
        }
        out
    };
    let m = order.len();
    let mut mult = Vec::with_capacity(m * m * m);
    for a in &order {
        for b in &order {
            let prod: Monomial = a.iter().zip(b).map(|(x, y)| x + y).collect();
            let nf = normal_form(MPoly::from([(prod, Scalar::one())]));
            let mut v = vec![Scalar::zero(); m];
            for (mono, c) in nf {
                v[index[&mono]] = c;
            }
            mult.extend(v);
        }
    }
    let alg = FiniteAlgebra::new(m, mult, basis(m, 0)).map_err(|e| match e {
        AlgebraError::NotAssociative(..) => err("generators are not a Gröbner basis"),
        other => other,
    })?;
    // the generators must vanish in the table, so that it is the true quotient
    let var_elems: Vec<Vec<Scalar>> = (0..n)
        .map(|k| {
            let mut a = zero.clone();
            a[k] = 1;
            let mut v = vec![Scalar::zero(); m];
            for (mono, c) in normal_form(MPoly::from([(a, Scalar::one())])) {
                v[index[&mono]] = c;
            }
            v
        })
        .collect();
    for g in &gens {
        let mut total = vec![Scalar::zero(); m];
        for (a, c) in g {
            let mut p = basis(m, 0);
            for (k, &e) in a.iter().enumerate() {
                for _ in 0..e {
                    p = alg.mul(&p, &var_elems[k]);
                }
            }
            total = total.iter().zip(&p).map(|(x, y)| x.add(&y.mul(c))).collect();
        }
        if total.iter().any(|x| !x.is_zero()) {
            return Err(err("generators are not a Gröbner basis"));
        }
    }
    Ok(alg)
}

/// Random Gorenstein algebras with a dual generator, for property tests.
pub mod random {
    use super::*;

    fn small<R: Rng>(rng: &mut R) -> Scalar {
        Scalar::from_i64(rng.gen_range(-3..=3))
    }

    /// `𝕜[x]/(f)` with random monic `f` of degree `n`, with `ε = (x^{n-1})^*`.
    pub fn monogenic<R: Rng>(rng: &mut R, n: usize) -> (FiniteAlgebra, Functional) {
        let mut f: Vec<Scalar> = (0..n).map(|_| small(rng)).collect();
        f.push(Scalar::one());
        (FiniteAlgebra::monogenic(&f).unwrap(), Functional::basis_dual(n, n - 1))
    }

    /// Apolar algebra of a random polynomial in two variables of degree ≤ 3,
    /// rejected until its dimension is at most `max_dim`.
    pub fn apolar<R: Rng>(rng: &mut R, max_dim: usize) -> (FiniteAlgebra, Functional) {
        loop {
            let mut f = MPoly::new();
            for a in [[1u32, 0], [0, 1], [2, 0], [1, 1], [0, 2], [3, 0], [2, 1], [1, 2], [0, 3]] {
                if rng.gen_bool(0.5) {
                    add_term(&mut f, a.to_vec(), small(rng));
                }
            }
            if let Some(out) = apolar_of(&f, max_dim) {
                return out;
            }
        }
    }

    fn derivative(f: &MPoly, beta: &[u32]) -> MPoly {
        let mut out = MPoly::new();
        for (a, c) in f {
            if a.iter().zip(beta).any(|(x, y)| x < y) {
                continue;
            }
            let mut coef = c.clone();
            let e: Monomial = a.iter().zip(beta).map(|(x, y)| x - y).collect();
            for (x, y) in a.iter().zip(beta) {
                for k in 0..*y {
                    coef = coef.mul(&Scalar::from_i64((x - k) as i64));
                }
            }
            add_term(&mut out, e, coef);
        }
        out
    }

    /// `𝕜[∂]/Ann(f)` on a basis of derivatives `∂^β f`, with `ε(g) = g(0)`.
    pub(crate) fn apolar_of(f: &MPoly, max_dim: usize) -> Option<(FiniteAlgebra, Functional)> {
        let n = f.keys().next()?.len();
        let deg = f.keys().map(|a| a.iter().sum::<u32>()).max()?;
        let betas: Vec<Monomial> =
            (0..=deg).flat_map(|d| crate::hompoly::monomials(n, d as usize)).collect();
        let monos: Vec<Monomial> = betas.clone();
        let vec_of = |p: &MPoly| -> Vec<Scalar> { monos.iter().map(|a| p.get(a).cloned().unwrap_or_else(Scalar::zero)).collect() };
        // pick derivatives forming a basis of the span, in order
        let mut chosen: Vec<Monomial> = Vec::new();
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        for b in &betas {
            let v = vec_of(&derivative(f, b));
            let mut trial = rows.clone();
            trial.push(v.clone());
            if Matrix::from_rows(trial).rank() > rows.len() {
                rows.push(v);
                chosen.push(b.clone());
            }
        }
        let m = chosen.len();
        if m == 0 || m > max_dim {
            return None;
        }
        let span = Matrix::from_rows(rows).transpose();
        let mut mult = Vec::with_capacity(m * m * m);
        for a in &chosen {
            for b in &chosen {
                let s: Monomial = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let target = Matrix::new(monos.len(), 1, vec_of(&derivative(f, &s)));
                let coords = span.solve(&target)?;
                mult.extend(coords.column(0));
            }
        }
        let zero = vec![0u32; n];
        let unit_pos = chosen.iter().position(|b| *b == zero)?;
        let alg = FiniteAlgebra::new(m, mult, basis(m, unit_pos)).ok()?;
        let eps = Functional(chosen.iter().map(|b| derivative(f, b).get(&zero).cloned().unwrap_or_else(Scalar::zero)).collect());
        Some((alg, eps))
    }

    /// A random invertible matrix with small integer entries.
    pub fn invertible<R: Rng>(rng: &mut R, n: usize) -> Matrix<Scalar> {
        loop {
            let m = Matrix::new(n, n, (0..n * n).map(|_| small(rng)).collect());
            if m.rank() == n {
                return m;
            }
        }
    }

    /// One of the generators above, or a product of two, in a random basis.
    pub fn gorenstein<R: Rng>(rng: &mut R, max_dim: usize) -> (FiniteAlgebra, Functional) {
        let (a, eps) = match rng.gen_range(0..3) {
            0 => {
                let n = rng.gen_range(1..=max_dim);
                monogenic(rng, n)
            }
            1 => apolar(rng, max_dim),
            _ if max_dim >= 2 => {
                let k = rng.gen_range(1..max_dim);
                let (a1, e1) = monogenic(rng, k);
                let k2 = rng.gen_range(1..=max_dim - k);
                let (a2, e2) = monogenic(rng, k2);
                (a1.product(&a2), Functional(e1.0.into_iter().chain(e2.0).collect()))
            }
            _ => monogenic(rng, 1),
        };
        let p = invertible(rng, a.dim());
        let twisted = a.change_basis(&p).unwrap();
        // ε in the new basis: ε'(e'_i) = ε(Σ_k P[k][i] e_k)
        let eps2 = Functional((0..a.dim()).map(|i| eps.eval(&p.column(i))).collect());
        (twisted, eps2)
    }
}
