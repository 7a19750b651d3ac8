//! Dense matrices over any [`Field`].

use std::fmt;

use crate::field::{Field, Scalar};
use crate::poly::Poly;
use crate::series::{Series, SeriesError};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

/// A linear map `k^cols → k^rows`.
pub type LinMap<E> = Matrix<E>;

impl<E: Field> Matrix<E> {
    pub fn new(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix shape mismatch");
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![E::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, E::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map<F: Field>(&self, f: impl Fn(&E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).add(&a.mul(b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[E]) -> Vec<E> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = E::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&E::one().neg()))
    }

    pub fn scale(&self, c: &E) -> Self {
        self.map(|a| a.mul(c))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() })
            })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    /// Stacks `self` on top of `rhs`.
    pub fn vstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols);
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Matrix { rows: self.rows + rhs.rows, cols: self.cols, data }
    }

    /// Places `rhs` to the right of `self`.
    pub fn hstack(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows);
        Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Rank by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut prev = E::one();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            a.swap_rows(p, r);
            let piv = a.get(r, c).clone();
            for i in r + 1..a.rows {
                let f = a.get(i, c).clone();
                for j in c + 1..a.cols {
                    let x = a.get(i, j);
                    let y = a.get(r, j);
                    let mut v = piv.mul(x);
                    if !f.is_zero() && !y.is_zero() {
                        v = v.sub(&f.mul(y));
                    }
                    if !v.is_zero() && !prev.is_one() {
                        v = v.div(&prev);
                    }
                    a.set(i, j, v);
                }
                a.set(i, c, E::zero());
            }
            prev = piv;
            r += 1;
        }
        r
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> E {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return E::one();
        }
        let mut a = self.clone();
        let mut prev = E::one();
        let mut negate = false;
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
                return E::zero();
            };
            if p != k {
                a.swap_rows(p, k);
                negate = !negate;
            }
            let piv = a.get(k, k).clone();
            for i in k + 1..n {
                let f = a.get(i, k).clone();
                for j in k + 1..n {
                    let mut v = piv.mul(a.get(i, j));
                    let y = a.get(k, j);
                    if !f.is_zero() && !y.is_zero() {
                        v = v.sub(&f.mul(y));
                    }
                    if !v.is_zero() && !prev.is_one() {
                        v = v.div(&prev);
                    }
                    a.set(i, j, v);
                }
            }
            prev = piv;
        }
        let d = a.get(n - 1, n - 1).clone();
        if negate {
            d.neg()
        } else {
            d
        }
    }

    /// Reduced row echelon form scanning columns in the given order.
    /// Returns the reduced matrix (zero rows removed) and its pivot columns.
    pub fn rref_in_order(&self, order: &[usize]) -> (Self, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in order {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            a.swap_rows(p, r);
            let inv = a.get(r, c).inv().unwrap();
            for j in 0..a.cols {
                let v = a.get(r, j).mul(&inv);
                a.set(r, j, v);
            }
            for i in 0..a.rows {
                if i == r {
                    continue;
                }
                let f = a.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..a.cols {
                    let y = a.get(r, j);
                    if !y.is_zero() {
                        let v = a.get(i, j).sub(&f.mul(y));
                        a.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        a.data.truncate(r * a.cols);
        a.rows = r;
        (a, pivots)
    }

    pub fn rref(&self) -> (Self, Vec<usize>) {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_in_order(&order)
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<E>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![E::zero(); self.cols];
                v[f] = E::one();
                for (k, &p) in pivots.iter().enumerate() {
                    v[p] = r.get(k, f).neg();
                }
                v
            })
            .collect()
    }

    /// Solves `self · X = rhs`; `None` if inconsistent. Free variables are set to zero.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        assert_eq!(self.rows, rhs.rows);
        let (r, pivots) = self.hstack(rhs).rref();
        // a pivot on the right-hand side means a row 0 = nonzero
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (k, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(p, j, r.get(k, self.cols + j).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        if self.rank() < self.rows {
            return None;
        }
        self.solve(&Self::identity(self.rows))
    }

    /// Rows spanning the row space, in reduced echelon form.
    pub fn row_space(&self) -> Self {
        self.rref().0
    }
}

impl Matrix<Series> {
    /// Entrywise value at `t = 0`.
    pub fn limit_at_zero(&self) -> Result<Matrix<Scalar>, SeriesError> {
        let data = self.data.iter().map(|x| x.limit_at_zero()).collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn min_valuation(&self) -> crate::series::Valuation {
        self.data.iter().map(|x| x.valuation()).min().unwrap_or(crate::series::Valuation::Infinity)
    }

    /// Clears denominators row by row. Returns the polynomial rows in
    /// `s = t^{1/N}`, the row multipliers, and `N`.
    pub fn cleared_rows(&self) -> (Vec<Vec<Poly>>, Vec<Poly>, u32) {
        let n = self.data.iter().fold(1u32, |acc, x| num_integer::lcm(acc, x.exp_denominator()));
        let mut rows = Vec::with_capacity(self.rows);
        let mut mults = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let entries: Vec<Series> = self.row(r).iter().map(|x| x.lift(n)).collect();
            let mut d = Poly::one();
            for x in &entries {
                let e = x.denominator();
                if e.is_one() || *e == d {
                    continue;
                }
                let g = d.gcd(e);
                d = d.mul(&e.div_exact(&g));
            }
            rows.push(entries.iter().map(|x| x.numerator().mul(&d.div_exact(x.denominator()))).collect());
            mults.push(d);
        }
        (rows, mults, n)
    }

    /// `X⁻¹ · self` where `X` is the square submatrix on `cols`, by
    /// fraction-free Gauss-Jordan elimination over polynomials.
    /// `None` if that submatrix is singular.
    pub fn reduce_by_columns(&self, cols: &[usize]) -> Option<Matrix<Series>> {
        assert_eq!(cols.len(), self.rows);
        let (mut a, _, n) = self.cleared_rows();
        let mut prev = Poly::one();
        for (s, &c) in cols.iter().enumerate() {
            let p = (s..self.rows).find(|&i| !a[i][c].is_zero())?;
            a.swap(p, s);
            let piv = a[s][c].clone();
            for i in (0..self.rows).filter(|&i| i != s) {
                let f = a[i][c].clone();
                for j in 0..self.cols {
                    let mut v = piv.mul(&a[i][j]);
                    if !f.is_zero() && !a[s][j].is_zero() {
                        v = v.sub(&f.mul(&a[s][j]));
                    }
                    if !prev.is_one() && !v.is_zero() {
                        v = v.div_exact(&prev);
                    }
                    a[i][j] = v;
                }
            }
            prev = piv;
        }
        let data = (0..self.rows)
            .flat_map(|s| {
                let d = a[s][cols[s]].clone();
                a[s].iter().map(move |x| Series::new(x.clone(), d.clone(), n)).collect::<Vec<_>>()
            })
            .collect();
        Some(Matrix { rows: self.rows, cols: self.cols, data })
    }
}

impl Matrix<Scalar> {
    pub fn to_series(&self) -> Matrix<Series> {
        self.map(|x| Series::from_scalar(x.clone()))
    }
}

impl<E: Field> fmt::Display for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}
