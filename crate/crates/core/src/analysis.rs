//! Border-rank diagnostics built on the centroid of a tensor.

use thiserror::Error;

use crate::algebra::{evaluation_tensor, AlgebraError, FiniteAlgebra, Functional};
use crate::field::{Field, FieldKind, Scalar};
use crate::identity::{full_rank_point, IdentityError};
use crate::matrix::{LinMap, Matrix};
use crate::segre::BorderRankStatus;
use crate::tensor::{multi_indices, Tensor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("tensor is not concise on coordinate {0}")]
    NotConcise(usize),
    #[error("centroid is not closed under composition: {0}")]
    ClosureFailure(String),
    #[error("minimal border rank is decided only for m ≤ 5 (m = {m}); centroid-abundant: {centroid_abundant}")]
    UnsupportedSize { m: usize, centroid_abundant: bool },
    #[error("minimal border rank is decided only over ℚ; centroid-abundant: {centroid_abundant}")]
    UnsupportedField { centroid_abundant: bool },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("tensor is not 1-generic on coordinate {0}")]
    Not1Generic(usize),
    #[error("restriction on coordinate {0} is not regular")]
    NotRegular(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Tuples `(X_1, …, X_d)` with `X_1∘T = X_i∘T` for every `i`.
#[derive(Clone, Debug)]
pub struct Centroid {
    pub basis: Vec<Vec<Matrix<Scalar>>>,
    pub algebra: FiniteAlgebra,
}

fn field_of(t: &Tensor<Scalar>) -> FieldKind {
    t.data().iter().find_map(|x| x.kind()).unwrap_or(FieldKind::Rationals)
}

fn require_concise(t: &Tensor<Scalar>) -> Result<(), AnalysisError> {
    match (0..t.order()).find(|&c| !t.is_concise(c)) {
        Some(c) => Err(AnalysisError::NotConcise(c)),
        None => Ok(()),
    }
}

fn vectorize(m: &Matrix<Scalar>) -> Vec<Scalar> {
    m.data().to_vec()
}

/// Centroid of a tensor of order at least three, concise on every axis.
pub fn centroid(t: &Tensor<Scalar>) -> Result<Centroid, AnalysisError> {
    let t = t.as_segre();
    if t.order() < 3 {
        return Err(AnalysisError::Precondition("centroids need tensors of order at least three".into()));
    }
    require_concise(&t)?;
    let dims = t.dims().to_vec();
    let d = dims.len();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &m| {
        let o = *acc;
        *acc += m * m;
        Some(o)
    }).collect();
    let unknowns: usize = dims.iter().map(|m| m * m).sum();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for i in 1..d {
        for ix in multi_indices(&dims) {
            let mut row = vec![Scalar::zero(); unknowns];
            for (s, sign) in [(0usize, 1i64), (i, -1)] {
                let a = ix[s];
                let mut jx = ix.clone();
                for b in 0..dims[s] {
                    jx[s] = b;
                    let v = t.get(&jx);
                    if !v.is_zero() {
                        let col = offsets[s] + a * dims[s] + b;
                        row[col] = row[col].add(&v.mul(&Scalar::from_i64(sign)));
                    }
                }
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() {
        (0..unknowns).map(|k| (0..unknowns).map(|j| if j == k { Scalar::one() } else { Scalar::zero() }).collect()).collect()
    } else {
        Matrix::from_rows(rows).kernel()
    };
    let basis: Vec<Vec<Matrix<Scalar>>> = kernel
        .iter()
        .map(|v| (0..d).map(|s| Matrix::new(dims[s], dims[s], v[offsets[s]..offsets[s] + dims[s] * dims[s]].to_vec())).collect())
        .collect();
    let algebra = centroid_algebra(&basis)?;
    Ok(Centroid { basis, algebra })
}

fn centroid_algebra(basis: &[Vec<Matrix<Scalar>>]) -> Result<FiniteAlgebra, AnalysisError> {
    let n = basis.len();
    let d = basis[0].len();
    // columns: first components, flattened
    let firsts = Matrix::from_rows(basis.iter().map(|b| vectorize(&b[0])).collect()).transpose();
    let coords = |target: &Matrix<Scalar>| -> Option<Vec<Scalar>> {
        let rhs = Matrix::new(target.rows() * target.cols(), 1, vectorize(target));
        firsts.solve(&rhs).map(|s| s.column(0))
    };
    let combine = |c: &[Scalar], s: usize| -> Matrix<Scalar> {
        let m = basis[0][s].rows();
        c.iter().zip(basis).fold(Matrix::zeros(m, m), |acc, (x, b)| if x.is_zero() { acc } else { acc.add(&b[s].scale(x)) })
    };
    let mut mult = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            let prod = basis[a][0].mul(&basis[b][0]);
            let c = coords(&prod).ok_or_else(|| AnalysisError::ClosureFailure(format!("product of basis elements {a} and {b}")))?;
            for s in 1..d {
                if combine(&c, s) != basis[a][s].mul(&basis[b][s]) {
                    return Err(AnalysisError::ClosureFailure(format!("slot {s} of product {a}·{b}")));
                }
            }
            mult.extend(c);
        }
    }
    let unit = coords(&Matrix::identity(basis[0][0].rows()))
        .ok_or_else(|| AnalysisError::ClosureFailure("identity is not in the centroid".into()))?;
    FiniteAlgebra::new(n, mult, unit).map_err(|e| AnalysisError::ClosureFailure(e.to_string()))
}

impl Centroid {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The centroid element with the given coordinates, one matrix per axis.
    pub fn element(&self, coords: &[Scalar]) -> Vec<Matrix<Scalar>> {
        let d = self.basis[0].len();
        (0..d)
            .map(|s| {
                let m = self.basis[0][s].rows();
                coords.iter().zip(&self.basis).fold(Matrix::zeros(m, m), |acc, (x, b)| acc.add(&b[s].scale(x)))
            })
            .collect()
    }

    /// Dimensions of the powers of the nilradical, ending at the first power
    /// that repeats. `None` when the characteristic is at most the dimension.
    pub fn radical_series(&self) -> Option<Vec<usize>> {
        radical_series(&self.algebra)
    }

    pub fn is_reduced(&self) -> Option<bool> {
        self.radical_series().map(|s| s[0] == 0)
    }

    /// For a two-dimensional centroid `𝕜[u]/(u² − a u − b)`, the value `a² + 4b`.
    pub fn discriminant(&self) -> Option<Scalar> {
        two_dim_discriminant(&self.algebra)
    }
}

/// Nilradical via the radical of the trace form `(x, y) ↦ tr(L_x L_y)`.
pub fn nilradical(a: &FiniteAlgebra) -> Option<Matrix<Scalar>> {
    let m = a.dim();
    let p = a.field().characteristic();
    if p != 0 && p as usize <= m {
        return None;
    }
    let mats: Vec<Matrix<Scalar>> = (0..m).map(|i| a.mult_matrix(&basis_vec(m, i))).collect();
    let form = Matrix::from_fn(m, m, |i, j| {
        let prod = mats[i].mul(&mats[j]);
        (0..m).fold(Scalar::zero(), |acc, k| acc.add(prod.get(k, k)))
    });
    let ker = form.kernel();
    Some(if ker.is_empty() { Matrix::zeros(0, m) } else { Matrix::from_rows(ker).row_space() })
}

pub fn radical_series(a: &FiniteAlgebra) -> Option<Vec<usize>> {
    let rad = nilradical(a)?;
    let mut dims = vec![rad.rows()];
    let mut cur = rad.clone();
    while cur.rows() > 0 {
        let mut prods = Vec::new();
        for i in 0..cur.rows() {
            for j in 0..rad.rows() {
                prods.push(a.mul(cur.row(i), rad.row(j)));
            }
        }
        let next = Matrix::from_rows(prods).row_space();
        if next.rows() == cur.rows() {
            break;
        }
        dims.push(next.rows());
        cur = next;
    }
    Some(dims)
}

fn two_dim_discriminant(a: &FiniteAlgebra) -> Option<Scalar> {
    if a.dim() != 2 {
        return None;
    }
    let unit = a.unit().to_vec();
    let u = (0..2).map(|i| basis_vec(2, i)).find(|v| Matrix::from_rows(vec![unit.clone(), v.clone()]).rank() == 2)?;
    let sq = a.mul(&u, &u);
    // sq = x·unit + y·u, so u² = y u + x
    let m = Matrix::from_rows(vec![unit, u]).transpose();
    let sol = m.solve(&Matrix::new(2, 1, sq))?.column(0);
    let (b, a_coef) = (sol[0].clone(), sol[1].clone());
    Some(a_coef.mul(&a_coef).add(&b.mul(&Scalar::from_i64(4))))
}

fn basis_vec(m: usize, i: usize) -> Vec<Scalar> {
    (0..m).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect()
}

fn equal_dims(t: &Tensor<Scalar>) -> Result<usize, AnalysisError> {
    let m = t.dims()[0];
    if t.dims().iter().any(|&x| x != m) {
        return Err(AnalysisError::Shape(format!("all dimensions must be equal, got {:?}", t.dims())));
    }
    Ok(m)
}

/// Decides border rank `m` for concise `m×⋯×m` tensors over ℚ with `m ≤ 5`.
pub fn is_minimal_border_rank(t: &Tensor<Scalar>) -> Result<bool, AnalysisError> {
    let t = t.as_segre();
    let m = equal_dims(&t)?;
    let abundant = centroid(&t)?.dim() >= m;
    if field_of(&t) != FieldKind::Rationals {
        return Err(AnalysisError::UnsupportedField { centroid_abundant: abundant });
    }
    if m > 5 {
        return Err(AnalysisError::UnsupportedSize { m, centroid_abundant: abundant });
    }
    Ok(abundant)
}

/// Summary of [`is_minimal_border_rank`] suitable for certificates.
pub fn border_rank_status(t: &Tensor<Scalar>) -> BorderRankStatus {
    match is_minimal_border_rank(t) {
        Ok(true) => BorderRankStatus::MinimalBorderRank,
        Ok(false) => BorderRankStatus::NotMinimal,
        Err(AnalysisError::UnsupportedSize { centroid_abundant: false, .. }) => BorderRankStatus::NotMinimal,
        Err(AnalysisError::UnsupportedSize { centroid_abundant: true, .. })
        | Err(AnalysisError::UnsupportedField { centroid_abundant: true }) => BorderRankStatus::CentroidAbundantOnly,
        Err(_) => BorderRankStatus::NotChecked,
    }
}

/// Slices of `T` along axis `i`, each flattened with axis `j` as rows.
fn contraction_pencil(t: &Tensor<Scalar>, i: usize) -> Vec<Matrix<Scalar>> {
    let d = t.order();
    let j = if i == 0 { 1 } else { 0 };
    let rest: Vec<usize> = (0..d).filter(|&a| a != i).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&a| t.dims()[a]).collect();
    let row_axis = rest.iter().position(|&a| a == j).unwrap();
    (0..t.dims()[i])
        .map(|k| {
            let slice = Tensor::from_fn(&rest_dims, |ix| {
                let mut full = vec![0; d];
                for (p, &a) in rest.iter().enumerate() {
                    full[a] = ix[p];
                }
                full[i] = k;
                t.get(&full).clone()
            });
            slice.flatten(&[row_axis])
        })
        .collect()
}

/// A functional `α` on axis `i` whose contraction `T(α)` has full rank.
pub fn one_generic_witness(t: &Tensor<Scalar>, i: usize, seed: u64) -> Result<Option<Functional>, AnalysisError> {
    let t = t.as_segre();
    if t.order() < 2 || i >= t.order() {
        return Err(AnalysisError::Precondition(format!("coordinate {i} out of range")));
    }
    let m = equal_dims(&t)?;
    let c = centroid(&t)?;
    if c.dim() < m {
        return Err(AnalysisError::Precondition(format!("centroid has dimension {} < {m}", c.dim())));
    }
    Ok(full_rank_point(&contraction_pencil(&t, i), seed)?.map(Functional))
}

/// `restrict(T, maps) = evaluation_tensor(algebra, eps, d)` with invertible maps;
/// row `a` of `maps[i]` is `e_a · generators[i]`.
#[derive(Clone, Debug)]
pub struct RecoveredStructure {
    pub algebra: FiniteAlgebra,
    pub eps: Functional,
    pub generators: Vec<Functional>,
    pub maps: Vec<LinMap<Scalar>>,
}

pub fn recover_structure(t: &Tensor<Scalar>, seed: u64) -> Result<RecoveredStructure, AnalysisError> {
    let t = t.as_segre();
    let m = equal_dims(&t)?;
    let d = t.order();
    let cen = centroid(&t)?;
    if cen.dim() < m {
        return Err(AnalysisError::Precondition(format!("centroid has dimension {} < {m}", cen.dim())));
    }
    let n = cen.dim();
    let mut generators = Vec::with_capacity(d);
    let mut maps = Vec::with_capacity(d);
    for i in 0..d {
        // (a·α)[w] = Σ_k α_k X_i(a)[k][w]
        let pencil: Vec<Matrix<Scalar>> =
            (0..m).map(|k| Matrix::from_fn(n, m, |a, w| cen.basis[a][i].get(k, w).clone())).collect();
        let alpha = full_rank_point(&pencil, seed.wrapping_add(i as u64))?.ok_or(AnalysisError::Not1Generic(i))?;
        if n != m {
            return Err(AnalysisError::Not1Generic(i));
        }
        maps.push(crate::identity::evaluate_pencil(&pencil, &alpha));
        generators.push(Functional(alpha));
    }
    let e = t.restrict(&maps).map_err(|err| AnalysisError::Shape(err.to_string()))?;
    let unit = cen.algebra.unit().to_vec();
    let eps = Functional(
        (0..m)
            .map(|a| {
                multi_indices(&vec![m; d - 1]).fold(Scalar::zero(), |acc, ix| {
                    let w = ix.iter().fold(Scalar::one(), |w, &k| w.mul(&unit[k]));
                    if w.is_zero() {
                        return acc;
                    }
                    let mut full = ix.clone();
                    full.push(a);
                    acc.add(&w.mul(e.get(&full)))
                })
            })
            .collect(),
    );
    if evaluation_tensor(&cen.algebra, &eps, d) != e.as_segre() {
        return Err(AnalysisError::ClosureFailure("evaluation tensor round trip failed".into()));
    }
    Ok(RecoveredStructure { algebra: cen.algebra, eps, generators, maps })
}

/// Elements `φ^∨(v^*)` of the algebra: the rows of `φ`.
fn image_rows(phi: &LinMap<Scalar>) -> Vec<Vec<Scalar>> {
    (0..phi.rows()).map(|i| phi.row(i).to_vec()).collect()
}

fn span_rank(vectors: Vec<Vec<Scalar>>, m: usize) -> usize {
    if vectors.is_empty() {
        0
    } else {
        Matrix::from_rows(vectors).rank().min(m)
    }
}

/// `φ: 𝒜^∨ → V` is regular when `𝒜 · φ^∨(V^∨) = 𝒜`.
pub fn is_regular(phi: &LinMap<Scalar>, a: &FiniteAlgebra) -> bool {
    let m = a.dim();
    let mut products = Vec::new();
    for r in image_rows(phi) {
        for k in 0..m {
            products.push(a.mul(&r, &basis_vec(m, k)));
        }
    }
    span_rank(products, m) == m
}

/// Products `φ_1^∨(v_1) ⋯ φ_d^∨(v_d)` span `𝒜`.
pub fn is_jointly_spanning(phis: &[LinMap<Scalar>], a: &FiniteAlgebra) -> bool {
    let m = a.dim();
    let mut span = Matrix::from_rows(vec![a.unit().to_vec()]);
    for phi in phis {
        let mut products = Vec::new();
        for i in 0..span.rows() {
            for r in image_rows(phi) {
                products.push(a.mul(span.row(i), &r));
            }
        }
        if products.is_empty() {
            return false;
        }
        span = Matrix::from_rows(products).row_space();
        if span.rows() == 0 {
            return false;
        }
    }
    span.rows() == m
}

/// A tensor exhibited as a regular restriction of an evaluation tensor.
#[derive(Clone, Debug)]
pub struct CactusCertificate {
    pub algebra: FiniteAlgebra,
    pub eps: Functional,
    pub maps: Vec<LinMap<Scalar>>,
    /// Asserted by the caller; never computed.
    pub smoothable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CactusReport {
    pub matches: bool,
    pub cactus_rank_bound: usize,
    pub border_rank_bound: Option<usize>,
}

pub fn build_cactus_tensor(cert: &CactusCertificate) -> Result<Tensor<Scalar>, AnalysisError> {
    let e = evaluation_tensor(&cert.algebra, &cert.eps, cert.maps.len());
    e.restrict(&cert.maps).map_err(|err| AnalysisError::Shape(err.to_string()))
}

pub fn verify_cactus_certificate(t: &Tensor<Scalar>, cert: &CactusCertificate) -> Result<CactusReport, AnalysisError> {
    if let Some(i) = cert.maps.iter().position(|phi| !is_regular(phi, &cert.algebra)) {
        return Err(AnalysisError::NotRegular(i));
    }
    let built = build_cactus_tensor(cert)?;
    let r = cert.algebra.dim();
    Ok(CactusReport {
        matches: built.as_segre() == t.as_segre(),
        cactus_rank_bound: r,
        border_rank_bound: cert.smoothable.then_some(r),
    })
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub concise: Vec<bool>,
    pub centroid_dim: Option<usize>,
    pub centroid_nilpotent: Option<bool>,
    pub minimal_border_rank: BorderRankStatus,
    pub one_generic: Option<Vec<bool>>,
    pub recovered: Option<RecoveredStructure>,
}

/// Every diagnostic that applies to the tensor.
pub fn analyze(t: &Tensor<Scalar>, seed: u64) -> AnalysisReport {
    let t = t.as_segre();
    let concise = t.concise_pattern();
    let cen = centroid(&t).ok();
    let square = equal_dims(&t).is_ok();
    let abundant = square && cen.as_ref().is_some_and(|c| c.dim() >= t.dims()[0]);
    let one_generic = abundant.then(|| {
        (0..t.order()).map(|i| matches!(one_generic_witness(&t, i, seed), Ok(Some(_)))).collect::<Vec<bool>>()
    });
    let recovered = match &one_generic {
        Some(v) if v.iter().all(|&b| b) => recover_structure(&t, seed).ok(),
        _ => None,
    };
    AnalysisReport {
        concise,
        centroid_dim: cen.as_ref().map(Centroid::dim),
        centroid_nilpotent: cen.as_ref().and_then(|c| c.is_reduced()).map(|r| !r),
        minimal_border_rank: if square { border_rank_status(&t) } else { BorderRankStatus::NotChecked },
        one_generic,
        recovered,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{multiplication_tensor, parse_algebra, random};
    use crate::hompoly::HomPoly;
    use crate::tensor::unit_tensor;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w_state() -> Tensor<Scalar> {
        HomPoly::parse("3*x1^2*x2", 2).unwrap().to_tensor().as_segre()
    }

    fn small_cw() -> Tensor<Scalar> {
        HomPoly::parse("x1*x2*x3 + 1/2*x4*x1^2", 4).unwrap().to_tensor().as_segre()
    }

    fn random_tensor(rng: &mut ChaCha8Rng, m: usize) -> Tensor<Scalar> {
        let data = (0..m * m * m).map(|_| Scalar::from_i64(rng.gen_range(-5..=5))).collect();
        Tensor::new(vec![m, m, m], data).unwrap()
    }

    #[test]
    fn centroid_of_unit_tensor() {
        let c = centroid(&unit_tensor(3, 3)).unwrap();
        assert_eq!(c.dim(), 3);
        assert_eq!(c.is_reduced(), Some(true));
        assert_eq!(c.radical_series(), Some(vec![0]));
    }

    #[test]
    fn centroid_of_w_state() {
        let c = centroid(&w_state()).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.is_reduced(), Some(false));
        assert_eq!(c.discriminant(), Some(Scalar::zero()));
        assert!(centroid(&unit_tensor(2, 3)).unwrap().discriminant().is_some_and(|x| !x.is_zero()));
    }

    #[test]
    fn centroid_rejects_non_concise() {
        let mut t = Tensor::zeros(&[2, 2, 2]);
        t.set(&[0, 0, 0], Scalar::one());
        assert_eq!(centroid(&t).unwrap_err(), AnalysisError::NotConcise(0));
    }

    #[test]
    fn random_tensors_have_scalar_centroid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in [3, 4] {
            let t = random_tensor(&mut rng, m);
            assert_eq!(centroid(&t).unwrap().dim(), 1);
            assert!(!is_minimal_border_rank(&t).unwrap());
        }
    }

    #[test]
    fn minimal_border_rank_decisions() {
        assert!(is_minimal_border_rank(&small_cw()).unwrap());
        assert!(is_minimal_border_rank(&unit_tensor(4, 3)).unwrap());
        assert!(matches!(
            is_minimal_border_rank(&unit_tensor(6, 3)),
            Err(AnalysisError::UnsupportedSize { m: 6, centroid_abundant: true })
        ));
        let fp = unit_tensor::<Scalar>(2, 3).map(|x| FieldKind::Prime(7).embed(x));
        assert_eq!(border_rank_status(&fp), BorderRankStatus::CentroidAbundantOnly);
    }

    #[test]
    fn one_genericity() {
        let sq = parse_algebra("k[x,y]/(x^2, x*y, y^2)").unwrap();
        let t = multiplication_tensor(&sq, 3);
        assert!(one_generic_witness(&t, 0, 0).unwrap().is_some());
        assert!(one_generic_witness(&t, 2, 0).unwrap().is_none());
        for i in 0..3 {
            assert!(one_generic_witness(&w_state(), i, 0).unwrap().is_some());
        }
        let cube = FiniteAlgebra::truncated(3);
        let e = evaluation_tensor(&cube, &Functional::basis_dual(3, 2), 3);
        for i in 0..3 {
            assert!(one_generic_witness(&e, i, 1).unwrap().is_some());
        }
    }

    #[test]
    fn structure_recovery() {
        for t in [w_state(), unit_tensor(3, 3), small_cw()] {
            let r = recover_structure(&t, 2).unwrap();
            assert_eq!(t.restrict(&r.maps).unwrap(), evaluation_tensor(&r.algebra, &r.eps, 3));
            assert!(r.algebra.is_dual_generator(&r.eps));
        }
        let cw = recover_structure(&small_cw(), 2).unwrap();
        assert_eq!(cw.algebra.dim(), 4);
        let rad = radical_series(&cw.algebra).unwrap();
        assert_eq!(rad[0], 3, "local algebra");
        let sq = parse_algebra("k[x,y]/(x^2, x*y, y^2)").unwrap();
        assert!(matches!(recover_structure(&multiplication_tensor(&sq, 3), 0), Err(AnalysisError::Not1Generic(_))));
    }

    fn span_of(rows: &[&[i64]], m: usize) -> Matrix<Scalar> {
        Matrix::from_rows(
            rows.iter().map(|r| (0..m).map(|k| Scalar::from_i64(*r.get(k).unwrap_or(&0))).collect()).collect(),
        )
    }

    #[test]
    fn regularity_on_truncated_polynomials() {
        let a = FiniteAlgebra::truncated(5);
        let one_x = span_of(&[&[1], &[0, 1]], 5);
        let x_x2 = span_of(&[&[0, 1], &[0, 0, 1]], 5);
        assert!(is_regular(&one_x, &a));
        assert!(!is_regular(&x_x2, &a));
        assert!(is_regular(&Matrix::identity(1), &FiniteAlgebra::ground()));
        assert!(!is_jointly_spanning(&vec![one_x.clone(); 3], &a));
        assert!(is_jointly_spanning(&vec![one_x; 4], &a));
        assert!(is_jointly_spanning(&vec![Matrix::identity(5); 3], &a));
    }

    #[test]
    fn cactus_certificates() {
        let cube = FiniteAlgebra::truncated(3);
        let cert = CactusCertificate {
            algebra: cube.clone(),
            eps: Functional::basis_dual(3, 2),
            maps: vec![Matrix::identity(3); 3],
            smoothable: true,
        };
        let t = build_cactus_tensor(&cert).unwrap();
        assert_eq!(t, HomPoly::parse("3*x1^2*x3 + 3*x1*x2^2", 3).unwrap().to_tensor().as_segre());
        let rep = verify_cactus_certificate(&t, &cert).unwrap();
        assert_eq!(rep, CactusReport { matches: true, cactus_rank_bound: 3, border_rank_bound: Some(3) });

        // rank decompositions from the split algebra
        let r = 3;
        let split = (1..r).fold(FiniteAlgebra::ground(), |acc, _| acc.product(&FiniteAlgebra::ground()));
        let ones = Functional(vec![Scalar::one(); r]);
        let cert = CactusCertificate { algebra: split, eps: ones, maps: vec![Matrix::identity(r); 3], smoothable: true };
        assert_eq!(build_cactus_tensor(&cert).unwrap(), unit_tensor(r, 3));

        // restrictions of x^4 on four coordinates through span{1, x}
        let a = FiniteAlgebra::truncated(5);
        let phi = span_of(&[&[1], &[0, 1]], 5);
        let cert = CactusCertificate {
            algebra: a.clone(),
            eps: Functional::basis_dual(5, 4),
            maps: vec![Matrix::identity(5), phi.clone(), phi.clone(), phi.clone()],
            smoothable: false,
        };
        let t = build_cactus_tensor(&cert).unwrap();
        let rep = verify_cactus_certificate(&t, &cert).unwrap();
        assert!(rep.matches && rep.cactus_rank_bound == 5 && rep.border_rank_bound.is_none());
        assert!(!is_jointly_spanning(&vec![phi.clone(); 3], &a));
        assert!(!t.is_concise(0));
        let bad = CactusCertificate { maps: vec![span_of(&[&[0, 1]], 5); 4], ..cert };
        assert_eq!(verify_cactus_certificate(&t, &bad).unwrap_err(), AnalysisError::NotRegular(0));
    }

    #[test]
    fn gorenstein_evaluation_tensors_have_minimal_border_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..8 {
            let (a, eps) = random::gorenstein(&mut rng, 5);
            let t = evaluation_tensor(&a, &eps, 3);
            assert!(is_minimal_border_rank(&t).unwrap());
            let rec = recover_structure(&t, 0).unwrap();
            assert_eq!(radical_series(&rec.algebra), radical_series(&a));
        }
    }
}
