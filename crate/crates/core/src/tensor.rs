//! Dense tensors, flattenings, restrictions and conciseness.
//!
//! A tensor has one array axis per tensor factor. A partially symmetric
//! tensor in `S^{ν₁}V₁ ⊗ … ⊗ S^{ν_d}V_d` is stored in its multilinear
//! embedding: coordinate `i` owns `νᵢ` consecutive axes of equal size and the
//! entries are symmetric under permutations of those axes.

use std::fmt;

use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::matrix::{LinMap, Matrix};
use crate::series::{Series, SeriesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("entries are not symmetric on coordinate {0}")]
    NotSymmetric(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<E> {
    dims: Vec<usize>,
    format: Vec<usize>,
    data: Vec<E>,
}

/// Iterates over all multi-indices of the given shape in lexicographic order.
pub fn multi_indices(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = dims.iter().product();
    let mut cur = vec![0usize; dims.len()];
    let mut first = true;
    (0..total).map(move |_| {
        if first {
            first = false;
        } else {
            for a in (0..dims.len()).rev() {
                cur[a] += 1;
                if cur[a] < dims[a] {
                    break;
                }
                cur[a] = 0;
            }
        }
        cur.clone()
    })
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for a in (0..dims.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * dims[a + 1];
    }
    s
}

impl<E: Field> Tensor<E> {
    pub fn new(dims: Vec<usize>, data: Vec<E>) -> Result<Self, TensorError> {
        let format = vec![1; dims.len()];
        Self::with_format(dims, format, data)
    }

    /// Validates the grouping of axes and the symmetry of each group.
    pub fn with_format(dims: Vec<usize>, format: Vec<usize>, data: Vec<E>) -> Result<Self, TensorError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(TensorError::ShapeMismatch(format!("invalid dims {dims:?}")));
        }
        if format.contains(&0) || format.iter().sum::<usize>() != dims.len() {
            return Err(TensorError::ShapeMismatch(format!("format {format:?} does not fit dims {dims:?}")));
        }
        if data.len() != dims.iter().product::<usize>() {
            return Err(TensorError::ShapeMismatch(format!(
                "{} entries for dims {dims:?}",
                data.len()
            )));
        }
        let t = Tensor { dims, format, data };
        for c in 0..t.format.len() {
            let axes = t.coordinate_axes(c);
            if axes.clone().any(|a| t.dims[a] != t.dims[axes.start]) {
                return Err(TensorError::ShapeMismatch(format!("unequal dims in symmetric coordinate {c}")));
            }
            if axes.len() > 1 && !t.is_symmetric_on(c) {
                return Err(TensorError::NotSymmetric(c));
            }
        }
        Ok(t)
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let n = dims.iter().product();
        Tensor { dims: dims.to_vec(), format: vec![1; dims.len()], data: vec![E::zero(); n] }
    }

    pub fn from_fn(dims: &[usize], f: impl Fn(&[usize]) -> E) -> Self {
        let data = multi_indices(dims).map(|ix| f(&ix)).collect();
        Tensor { dims: dims.to_vec(), format: vec![1; dims.len()], data }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn format(&self) -> &[usize] {
        &self.format
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    /// Number of array axes.
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Number of (possibly symmetric) tensor coordinates.
    pub fn coordinates(&self) -> usize {
        self.format.len()
    }

    pub fn is_segre(&self) -> bool {
        self.format.iter().all(|&v| v == 1)
    }

    pub fn coordinate_axes(&self, c: usize) -> std::ops::Range<usize> {
        let start: usize = self.format[..c].iter().sum();
        start..start + self.format[c]
    }

    /// Dimension of the vector space of coordinate `c`.
    pub fn coordinate_dim(&self, c: usize) -> usize {
        self.dims[self.coordinate_axes(c).start]
    }

    pub fn offset(&self, ix: &[usize]) -> usize {
        debug_assert_eq!(ix.len(), self.dims.len());
        let mut o = 0;
        for (a, &i) in ix.iter().enumerate() {
            debug_assert!(i < self.dims[a]);
            o = o * self.dims[a] + i;
        }
        o
    }

    pub fn get(&self, ix: &[usize]) -> &E {
        &self.data[self.offset(ix)]
    }

    pub fn set(&mut self, ix: &[usize], v: E) {
        let o = self.offset(ix);
        self.data[o] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<F: Field>(&self, f: impl Fn(&E) -> F) -> Tensor<F> {
        Tensor { dims: self.dims.clone(), format: self.format.clone(), data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &E) -> Self {
        self.map(|x| x.mul(c))
    }

    /// Forgets the symmetric grouping.
    pub fn as_segre(&self) -> Self {
        Tensor { dims: self.dims.clone(), format: vec![1; self.dims.len()], data: self.data.clone() }
    }

    pub fn with_format_unchecked(mut self, format: Vec<usize>) -> Self {
        assert_eq!(format.iter().sum::<usize>(), self.dims.len());
        self.format = format;
        self
    }

    fn is_symmetric_on(&self, c: usize) -> bool {
        let axes = self.coordinate_axes(c);
        for ix in multi_indices(&self.dims) {
            for a in axes.start..axes.end - 1 {
                if ix[a] > ix[a + 1] {
                    let mut jx = ix.clone();
                    jx.swap(a, a + 1);
                    if self.get(&ix) != self.get(&jx) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Matrix of the contraction onto the axes `rows`: rows are indexed
    /// lexicographically by those axes, columns by the remaining ones.
    pub fn flatten(&self, rows: &[usize]) -> Matrix<E> {
        let mut rs: Vec<usize> = rows.to_vec();
        rs.sort_unstable();
        rs.dedup();
        assert!(rs.iter().all(|&a| a < self.order()), "axis out of range");
        let cs: Vec<usize> = (0..self.order()).filter(|a| !rs.contains(a)).collect();
        let rdims: Vec<usize> = rs.iter().map(|&a| self.dims[a]).collect();
        let cdims: Vec<usize> = cs.iter().map(|&a| self.dims[a]).collect();
        let nr: usize = rdims.iter().product();
        let nc: usize = cdims.iter().product();
        let st = strides(&self.dims);
        let rst = strides(&rdims);
        let cst = strides(&cdims);
        let mut data = vec![E::zero(); nr * nc];
        for (o, x) in self.data.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let (mut r, mut c) = (0, 0);
            for (k, &a) in rs.iter().enumerate() {
                r += (o / st[a] % self.dims[a]) * rst[k];
            }
            for (k, &a) in cs.iter().enumerate() {
                c += (o / st[a] % self.dims[a]) * cst[k];
            }
            data[r * nc + c] = x.clone();
        }
        Matrix::new(nr, nc, data)
    }

    /// Inverse of `flatten(&[axis])` for a matrix with `new_dim` rows.
    pub fn unflatten_axis(&self, axis: usize, m: &Matrix<E>) -> Self {
        let mut dims = self.dims.clone();
        dims[axis] = m.rows();
        let cdims: Vec<usize> = (0..dims.len()).filter(|&a| a != axis).map(|a| dims[a]).collect();
        assert_eq!(m.cols(), cdims.iter().product::<usize>(), "flattening shape mismatch");
        let data = multi_indices(&dims)
            .map(|ix| {
                let mut c = 0;
                for (a, &i) in ix.iter().enumerate() {
                    if a != axis {
                        c = c * dims[a] + i;
                    }
                }
                m.get(ix[axis], c).clone()
            })
            .collect();
        Tensor { dims, format: self.format.clone(), data }
    }

    /// Applies a linear map to one axis.
    pub fn apply_axis(&self, axis: usize, map: &LinMap<E>) -> Result<Self, TensorError> {
        if map.cols() != self.dims[axis] {
            return Err(TensorError::ShapeMismatch(format!(
                "map with {} columns on axis {axis} of size {}",
                map.cols(),
                self.dims[axis]
            )));
        }
        Ok(self.unflatten_axis(axis, &map.mul(&self.flatten(&[axis]))))
    }

    /// Image under the tensor product of one map per axis.
    pub fn restrict(&self, maps: &[LinMap<E>]) -> Result<Self, TensorError> {
        if maps.len() != self.order() {
            return Err(TensorError::ShapeMismatch(format!("{} maps for order {}", maps.len(), self.order())));
        }
        let mut t = self.as_segre();
        for (a, m) in maps.iter().enumerate() {
            if !m.is_identity() {
                t = t.apply_axis(a, m)?;
            }
        }
        t.format = self.format.clone();
        Ok(t)
    }

    /// Image under one map per coordinate, applied to every axis of the coordinate.
    pub fn restrict_coordinates(&self, maps: &[LinMap<E>]) -> Result<Self, TensorError> {
        if maps.len() != self.coordinates() {
            return Err(TensorError::ShapeMismatch(format!(
                "{} maps for {} coordinates",
                maps.len(),
                self.coordinates()
            )));
        }
        let mut per_axis = Vec::with_capacity(self.order());
        for (c, m) in maps.iter().enumerate() {
            for _ in self.coordinate_axes(c) {
                per_axis.push(m.clone());
            }
        }
        self.restrict(&per_axis)
    }

    pub fn flattening_rank(&self, rows: &[usize]) -> usize {
        self.flatten(rows).rank()
    }

    /// Conciseness on coordinate `c`; for series entries this is conciseness
    /// of the general member.
    pub fn is_concise(&self, c: usize) -> bool {
        let a = self.coordinate_axes(c).start;
        self.flattening_rank(&[a]) == self.dims[a]
    }

    pub fn is_concise_everywhere(&self) -> bool {
        (0..self.coordinates()).all(|c| self.is_concise(c))
    }

    /// Coordinates on which the tensor is concise.
    pub fn concise_pattern(&self) -> Vec<bool> {
        (0..self.coordinates()).map(|c| self.is_concise(c)).collect()
    }

    /// Entries together with their multi-indices, skipping zeros.
    pub fn nonzero_entries(&self) -> Vec<(Vec<usize>, E)> {
        multi_indices(&self.dims)
            .zip(self.data.iter())
            .filter(|(_, x)| !x.is_zero())
            .map(|(ix, x)| (ix, x.clone()))
            .collect()
    }
}

/// Basis (rows, reduced echelon form) of the smallest subspace of the given
/// axis containing every tensor of the list.
pub fn joint_conciseness_space<E: Field>(tensors: &[Tensor<E>], axis: usize) -> Matrix<E> {
    let Some(first) = tensors.first() else {
        return Matrix::zeros(0, 0);
    };
    let n = first.dims()[axis];
    let mut stacked = Matrix::zeros(0, n);
    for t in tensors {
        assert_eq!(t.dims(), first.dims(), "tensors of different shapes");
        stacked = stacked.vstack(&t.flatten(&[axis]).transpose());
    }
    stacked.row_space()
}

/// `Σᵢ eᵢ^{⊗d}` in `(k^r)^{⊗d}`.
pub fn unit_tensor<E: Field>(r: usize, d: usize) -> Tensor<E> {
    Tensor::from_fn(&vec![r; d], |ix| if ix.iter().all(|&i| i == ix[0]) { E::one() } else { E::zero() })
}

impl Tensor<Series> {
    pub fn limit_at_zero(&self) -> Result<Tensor<Scalar>, SeriesError> {
        let data = self.data.iter().map(|x| x.limit_at_zero()).collect::<Result<Vec<_>, _>>()?;
        Ok(Tensor { dims: self.dims.clone(), format: self.format.clone(), data })
    }

    pub fn min_valuation(&self) -> crate::series::Valuation {
        self.data.iter().map(|x| x.valuation()).min().unwrap_or(crate::series::Valuation::Infinity)
    }

    /// Least common multiple of the exponent denominators of all entries.
    pub fn exp_denominator(&self) -> u32 {
        use num_integer::Integer;
        self.data.iter().filter(|x| !x.is_zero()).fold(1u32, |n, x| n.lcm(&x.exp_denominator()))
    }
}

impl Tensor<Scalar> {
    pub fn to_series(&self) -> Tensor<Series> {
        self.map(|x| Series::from_scalar(x.clone()))
    }
}

/// `c·sym` with parentheses around compound coefficients.
pub(crate) fn coefficient_term(c: &str, sym: &str) -> String {
    match c {
        "1" => sym.to_string(),
        "-1" => format!("-{sym}"),
        _ if c.contains(' ') || c.contains('/') && c.contains('t') => format!("({c})*{sym}"),
        _ => format!("{c}*{sym}"),
    }
}

pub(crate) fn join_terms(terms: &[String]) -> String {
    let mut out = String::new();
    for t in terms {
        if out.is_empty() {
            out.push_str(t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(t);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl<E: Field> Tensor<E> {
    /// Order-three tensors as a matrix of linear forms in `x1, x2, …`: the
    /// first axis gives the variables, the second the rows, the third the columns.
    pub fn pencil(&self) -> String {
        assert_eq!(self.order(), 3, "pencil rendering needs an order-three tensor");
        let (n, r, c) = (self.dims[0], self.dims[1], self.dims[2]);
        let mut rows = Vec::new();
        for a in 0..r {
            let mut cells = Vec::new();
            for b in 0..c {
                let terms: Vec<String> = (0..n)
                    .filter(|&k| !self.get(&[k, a, b]).is_zero())
                    .map(|k| coefficient_term(&self.get(&[k, a, b]).to_string(), &format!("x{}", k + 1)))
                    .collect();
                cells.push(join_terms(&terms));
            }
            rows.push(format!("[{}]", cells.join(", ")));
        }
        format!("[{}]", rows.join(", "))
    }
}

impl<E: Field> fmt::Display for Tensor<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order() == 3 {
            return f.write_str(&self.pencil());
        }
        let parts: Vec<String> =
            self.nonzero_entries().iter().map(|(ix, x)| format!("{ix:?}: {x}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn st(dims: &[usize], entries: &[(&[usize], i64)]) -> Tensor<Scalar> {
        let mut t = Tensor::zeros(dims);
        for (ix, v) in entries {
            t.set(ix, Scalar::from_i64(*v));
        }
        t
    }

    fn w_state() -> Tensor<Scalar> {
        st(&[2, 2, 2], &[(&[0, 0, 1], 1), (&[0, 1, 0], 1), (&[1, 0, 0], 1)])
    }

    #[test]
    fn flattening_examples() {
        let u = unit_tensor::<Scalar>(2, 3);
        let f = u.flatten(&[0]);
        assert_eq!((f.rows(), f.cols(), f.rank()), (2, 4, 2));
        let one = st(&[2, 2, 2], &[(&[0, 0, 0], 1)]);
        for a in 0..3 {
            assert_eq!(one.flattening_rank(&[a]), 1);
            assert!(!one.is_concise(a));
        }
        assert_eq!(w_state().flattening_rank(&[0]), 2);
    }

    #[test]
    fn flatten_layout_is_lexicographic() {
        let t = st(&[2, 3, 2], &[(&[1, 2, 0], 5)]);
        let f = t.flatten(&[1]);
        assert_eq!(*f.get(2, 2), Scalar::from_i64(5));
        assert_eq!(t.unflatten_axis(1, &f), t);
        let g = t.flatten(&[0, 2]);
        assert_eq!(*g.get(2, 2), Scalar::from_i64(5));
    }

    #[test]
    fn symmetric_validation() {
        let bad = st(&[2, 2], &[(&[0, 1], 1)]);
        assert!(Tensor::with_format(vec![2, 2], vec![2], bad.data().to_vec()).is_err());
        let good = st(&[2, 2], &[(&[0, 1], 1), (&[1, 0], 1)]);
        assert!(Tensor::with_format(vec![2, 2], vec![2], good.data().to_vec()).is_ok());
    }

    #[test]
    fn joint_spaces() {
        // x1^3 and x2^3 in three variables
        let mut a = Tensor::<Scalar>::zeros(&[3, 3, 3]);
        a.set(&[0, 0, 0], Scalar::one());
        let mut b = Tensor::<Scalar>::zeros(&[3, 3, 3]);
        b.set(&[1, 1, 1], Scalar::one());
        assert_eq!(joint_conciseness_space(&[a, b], 0).rows(), 2);
        // partials of x1 x2 x3 are x2 x3, x1 x3, x1 x2
        let partials: Vec<Tensor<Scalar>> = (0..3)
            .map(|k| {
                let (i, j) = [(1, 2), (0, 2), (0, 1)][k];
                st(&[3, 3], &[(&[i, j], 1), (&[j, i], 1)])
            })
            .collect();
        assert_eq!(joint_conciseness_space(&partials, 0).rows(), 3);
        assert_eq!(joint_conciseness_space::<Scalar>(&[], 0).rows(), 0);
    }

    #[test]
    fn pencil_rendering() {
        assert_eq!(w_state().pencil(), "[[x2, x1], [x1, 0]]");
    }

    fn arb_tensor(dims: Vec<usize>) -> impl Strategy<Value = Tensor<Scalar>> {
        let n: usize = dims.iter().product();
        proptest::collection::vec(-2i64..3, n).prop_map(move |v| {
            Tensor::new(dims.clone(), v.into_iter().map(Scalar::from_i64).collect()).unwrap()
        })
    }

    fn arb_map(r: usize, c: usize) -> impl Strategy<Value = Matrix<Scalar>> {
        proptest::collection::vec(-2i64..3, r * c)
            .prop_map(move |v| Matrix::new(r, c, v.into_iter().map(Scalar::from_i64).collect()))
    }

    proptest! {
        #[test]
        fn complementary_flattenings_agree(t in arb_tensor(vec![2, 3, 2, 2])) {
            for rows in [vec![0], vec![1], vec![0, 1], vec![0, 2], vec![1, 3]] {
                let comp: Vec<usize> = (0..4).filter(|a| !rows.contains(a)).collect();
                prop_assert_eq!(t.flattening_rank(&rows), t.flattening_rank(&comp));
            }
        }

        #[test]
        fn restriction_is_functorial(
            t in arb_tensor(vec![2, 3, 2]),
            a in proptest::collection::vec(arb_map(3, 2), 1),
            b in arb_map(2, 3),
            c in arb_map(2, 3),
        ) {
            let first = vec![a[0].clone(), b.clone(), Matrix::identity(2)];
            let second = vec![c.clone(), Matrix::identity(2), b.transpose()];
            let composed: Vec<Matrix<Scalar>> = first.iter().zip(&second).map(|(f, s)| s.mul(f)).collect();
            let lhs = t.restrict(&first).unwrap().restrict(&second).unwrap();
            prop_assert_eq!(lhs, t.restrict(&composed).unwrap());
        }

        #[test]
        fn conciseness_descends_from_restrictions(t in arb_tensor(vec![2, 2, 2]), m in arb_map(2, 2)) {
            let r = t.restrict(&[m.clone(), Matrix::identity(2), Matrix::identity(2)]).unwrap();
            for c in 0..3 {
                if r.is_concise(c) {
                    prop_assert!(t.is_concise(c));
                }
            }
            if m.rank() == 2 {
                prop_assert_eq!(r.concise_pattern(), t.concise_pattern());
            }
        }
    }
}
