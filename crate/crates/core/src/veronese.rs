//! Unrestriction of symmetric and partially symmetric degenerations.
//!
//! A family of degree-`ν` polynomials is made jointly concise at `t = 0` one
//! variable at a time. For the next variable `v` the loop peels off
//! `∂_v F − Σ λᵢ ∂ᵢ F` order by order in `t`, substitutes `vᵢ ↦ vᵢ − λᵢ v`,
//! and rescales `v ↦ t^{-w} v` with `w = min_j e_j / j`, where `e_j` is the
//! least valuation of a coefficient of a monomial of degree `j` in `v`.

use num_integer::Integer;
use num_rational::Rational64;
use thiserror::Error;

use crate::field::{Field, Scalar};
use crate::hompoly::HomPoly;
use crate::matrix::Matrix;
use crate::segre::{minor_valuation, min_valuation_columns, BorderRankStatus, Degeneration, UnrestrictionCertificate};
use crate::series::{Series, Valuation};
use crate::tensor::{joint_conciseness_space, multi_indices, Tensor, TensorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VeroneseError {
    #[error("the general members are not jointly concise: {0}")]
    NotJointlyConcise(String),
    #[error("the general member is not concise on coordinate {0}")]
    NotGenericallyConcise(usize),
    #[error("basis extraction failed: {0}")]
    BasisExtractionFailure(String),
    #[error("characteristic {characteristic} does not exceed the degree {degree}")]
    UnsupportedCharacteristic { characteristic: u64, degree: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("a coefficient has negative valuation")]
    NegativeValuation,
    #[error("invalid coordinate order {0:?}")]
    InvalidOrder(Vec<usize>),
    #[error(transparent)]
    Shape(#[from] TensorError),
}

/// Data of one variable added to the concise part.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    /// Index of the new variable in the adapted basis.
    pub variable: usize,
    pub lambda: Vec<Series>,
    /// `e_1, …, e_ν`; `None` stands for infinity.
    pub e: Vec<Option<Rational64>>,
    pub weight: Rational64,
    /// Valuation of the remainder left by the loop.
    pub remainder_valuation: Rational64,
    pub loop_iterations: usize,
}

impl StepRecord {
    pub fn weight_equals_e1(&self) -> bool {
        self.e[0] == Some(self.weight)
    }
}

/// Output of a family run: `input = map_t · family_t`.
#[derive(Clone, Debug)]
pub struct FamilyUnrestriction {
    pub family_t: Vec<HomPoly<Series>>,
    pub limit: Vec<HomPoly<Scalar>>,
    pub map_t: Matrix<Series>,
    pub map_limit: Matrix<Scalar>,
    pub steps: Vec<StepRecord>,
}

/// Output of the single polynomial run: `input = scale · (map_t · output_t)`.
#[derive(Clone, Debug)]
pub struct SymmetricUnrestriction {
    pub scale: Series,
    pub output_t: HomPoly<Series>,
    pub limit: HomPoly<Scalar>,
    pub map_t: Matrix<Series>,
    pub map_limit: Matrix<Scalar>,
    pub steps: Vec<StepRecord>,
}

/// Output of the partially symmetric run:
/// `input = scale · restrict_coordinates(unrestriction_t, maps_t)`.
#[derive(Clone, Debug)]
pub struct PartialCertificate {
    pub input: Tensor<Series>,
    pub order: Vec<usize>,
    pub scale: Series,
    pub unrestriction_t: Tensor<Series>,
    pub maps_t: Vec<Matrix<Series>>,
    pub limit: Tensor<Scalar>,
    pub maps_limit: Vec<Matrix<Scalar>>,
    /// Coordinates whose inverse map has poles at `t = 0`, so that the
    /// output was re-expanded over the rational function field.
    pub reexpanded: Vec<bool>,
    pub steps: Vec<Vec<StepRecord>>,
    pub border_rank_status: BorderRankStatus,
}

impl PartialCertificate {
    pub fn restriction_identity_holds(&self) -> bool {
        self.unrestriction_t
            .restrict_coordinates(&self.maps_t)
            .map(|t| t.scale(&self.scale) == self.input)
            .unwrap_or(false)
    }

    /// Least common exponent denominator of the unrestriction.
    pub fn exp_denominator(&self) -> u32 {
        self.unrestriction_t.map(|x| x.reduce_exponents()).exp_denominator()
    }

    /// The same data as a Segre certificate (all coordinates linear, unit scale).
    pub fn to_segre_certificate(&self) -> Option<UnrestrictionCertificate> {
        if !self.input.is_segre() || !self.scale.is_one() {
            return None;
        }
        Some(UnrestrictionCertificate {
            input: self.input.clone(),
            order: self.order.clone(),
            unrestriction_t: Degeneration::new(self.unrestriction_t.clone()).ok()?,
            maps_t: self.maps_t.clone(),
            limit: self.limit.clone(),
            maps_limit: self.maps_limit.clone(),
            minor_choices: Vec::new(),
            border_rank_status: self.border_rank_status.clone(),
        })
    }
}

fn series_characteristic(x: &Series) -> u64 {
    x.numerator()
        .coeffs()
        .iter()
        .chain(x.denominator().coeffs())
        .find_map(|c| c.kind())
        .map_or(0, |k| k.characteristic())
}

fn check_characteristic<'a>(coeffs: impl Iterator<Item = &'a Series>, degree: usize) -> Result<(), VeroneseError> {
    for x in coeffs {
        let p = series_characteristic(x);
        if p != 0 && p as usize <= degree {
            return Err(VeroneseError::UnsupportedCharacteristic { characteristic: p, degree });
        }
        if p != 0 {
            break;
        }
    }
    Ok(())
}

/// Concatenated coefficient vectors of a tuple of polynomials.
fn tuple_vector<E: Field>(tuple: &[HomPoly<E>]) -> Vec<E> {
    tuple.iter().flat_map(|p| p.coefficient_vector()).collect()
}

fn partial_tuple(family: &[HomPoly<Series>], j: usize) -> Vec<HomPoly<Series>> {
    family.iter().map(|f| f.partial(j)).collect()
}

fn partial_matrix(family: &[HomPoly<Series>], vars: usize) -> Matrix<Series> {
    Matrix::from_rows((0..vars).map(|j| tuple_vector(&partial_tuple(family, j))).collect())
}

fn family_limit(family: &[HomPoly<Series>]) -> Result<Vec<HomPoly<Scalar>>, VeroneseError> {
    family
        .iter()
        .map(|f| f.limit_at_zero())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| VeroneseError::NegativeValuation)
}

/// Rows spanning the smallest subspace containing every polynomial of the family.
fn conciseness_space(limit: &[HomPoly<Scalar>], nvars: usize) -> Matrix<Scalar> {
    let tensors: Vec<Tensor<Scalar>> = limit.iter().filter(|f| !f.is_zero()).map(|f| f.to_tensor()).collect();
    if tensors.is_empty() {
        return Matrix::zeros(0, nvars);
    }
    joint_conciseness_space(&tensors, 0)
}

/// Basis with the reduced rows of `space` first, then the standard vectors
/// at the non-pivot positions, as columns.
fn adapted_basis(space: &Matrix<Scalar>) -> Matrix<Scalar> {
    let m = space.cols();
    let pivots: Vec<usize> =
        (0..space.rows()).map(|i| space.row(i).iter().position(|x| !x.is_zero()).unwrap()).collect();
    let mut cols: Vec<Vec<Scalar>> = (0..space.rows()).map(|i| space.row(i).to_vec()).collect();
    for j in (0..m).filter(|j| !pivots.contains(j)) {
        let mut e = vec![Scalar::zero(); m];
        e[j] = Scalar::one();
        cols.push(e);
    }
    Matrix::from_rows(cols).transpose()
}

/// Requires the general members to be jointly concise in all variables.
fn check_generic_conciseness(family: &[HomPoly<Series>], nvars: usize) -> Result<(), VeroneseError> {
    let rank = partial_matrix(family, nvars).rank();
    if rank < nvars {
        return Err(VeroneseError::NotJointlyConcise(format!(
            "the partials span only {rank} of {nvars} directions over k(t)"
        )));
    }
    Ok(())
}

fn min_maximal_minor_valuation(m: &Matrix<Series>) -> Valuation {
    if m.rank() < m.rows() {
        return Valuation::Infinity;
    }
    let prio: Vec<usize> = (0..m.cols()).collect();
    minor_valuation(m, &min_valuation_columns(m, &prio))
}

fn as_rational(v: Valuation) -> Option<Rational64> {
    v.finite()
}

/// Adds the variable at index `r` to the concise part of the limit. The
/// limit must be jointly concise in exactly the first `r` variables.
/// Returns the new family and the matrix `H` with `input = H · output`.
pub fn unrestrict_poly_step(
    family: &[HomPoly<Series>],
    r: usize,
) -> Result<(Vec<HomPoly<Series>>, Matrix<Series>, StepRecord), VeroneseError> {
    let Some(first) = family.first() else {
        return Err(VeroneseError::Precondition("empty family".into()));
    };
    let (m, nu) = (first.nvars(), first.degree());
    if r >= m {
        return Err(VeroneseError::Precondition(format!("no variable left after {r}")));
    }
    let limit = family_limit(family)?;
    if limit.iter().any(|f| (r..m).any(|j| f.involves(j))) {
        return Err(VeroneseError::Precondition(format!("the limit involves variables beyond the first {r}")));
    }
    let base = Matrix::from_rows((0..r).map(|i| tuple_vector(&partial_tuple_scalar(&limit, i))).collect());
    if base.rank() < r {
        return Err(VeroneseError::Precondition("limit partials are dependent".into()));
    }
    let bound = min_maximal_minor_valuation(&partial_matrix(family, r + 1));
    let Some(bound) = as_rational(bound) else {
        return Err(VeroneseError::NotJointlyConcise(format!("partial {} is dependent on the previous ones", r + 1)));
    };

    let d_all: Vec<Vec<HomPoly<Series>>> = (0..r).map(|i| partial_tuple(family, i)).collect();
    let d0 = if r > 0 { base.transpose() } else { Matrix::zeros(tuple_vector(&partial_tuple(family, r)).len(), 0) };
    let mut q = partial_tuple(family, r);
    let mut lambda = vec![Series::zero(); r];
    let mut iterations = 0;
    let (rem_val, remainder) = loop {
        let v = q.iter().map(|f| f.min_valuation()).min().unwrap_or(Valuation::Infinity);
        let Some(v) = as_rational(v) else {
            return Err(VeroneseError::NotJointlyConcise(format!("partial {} lies in the span of the others", r + 1)));
        };
        if v > bound {
            return Err(VeroneseError::NotJointlyConcise(format!(
                "remainder valuation {v} exceeds the minor bound {bound}"
            )));
        }
        let shift = Series::t_pow(-v);
        let r0: Vec<HomPoly<Scalar>> = family_limit(&q.iter().map(|f| f.scale(&shift)).collect::<Vec<_>>())?;
        let rhs = Matrix::new(d0.rows(), 1, tuple_vector(&r0));
        let mu = if r > 0 { d0.solve(&rhs) } else { None };
        let Some(mu) = mu else { break (v, r0) };
        iterations += 1;
        let tv = Series::t_pow(v);
        for i in 0..r {
            let c = Series::from_scalar(mu.get(i, 0).clone()).mul(&tv);
            if c.is_zero() {
                continue;
            }
            lambda[i] = lambda[i].add(&c);
            for (qk, dk) in q.iter_mut().zip(&d_all[i]) {
                *qk = qk.sub(&dk.scale(&c));
            }
        }
    };

    // v_i -> v_i - λ_i v
    let mut psi = Matrix::<Series>::identity(m);
    let mut psi_inv = Matrix::<Series>::identity(m);
    for i in 0..r {
        psi.set(r, i, lambda[i].neg());
        psi_inv.set(r, i, lambda[i].clone());
    }
    let shifted: Vec<HomPoly<Series>> =
        if lambda.iter().all(|x| x.is_zero()) { family.to_vec() } else { family.iter().map(|f| f.substitute(&psi)).collect() };

    let mut e: Vec<Option<Rational64>> = vec![None; nu];
    for f in &shifted {
        for (a, x) in f.terms() {
            let j = a[r] as usize;
            if j == 0 {
                continue;
            }
            let v = as_rational(x.valuation()).unwrap();
            if e[j - 1].is_none_or(|old| v < old) {
                e[j - 1] = Some(v);
            }
        }
    }
    let weight = e
        .iter()
        .enumerate()
        .filter_map(|(j, x)| x.map(|v| v / Rational64::from(j as i64 + 1)))
        .min()
        .ok_or_else(|| VeroneseError::NotJointlyConcise(format!("variable {} does not occur", r + 1)))?;
    if weight <= Rational64::from(0) {
        return Err(VeroneseError::BasisExtractionFailure(format!("nonpositive weight {weight}")));
    }
    let record = StepRecord { variable: r, lambda, e, weight, remainder_valuation: rem_val, loop_iterations: iterations };
    if record.weight_equals_e1() && remainder.iter().any(|f| f.involves(r)) {
        return Err(VeroneseError::BasisExtractionFailure("remainder involves the new variable".into()));
    }

    let out: Vec<HomPoly<Series>> = shifted.iter().map(|f| f.scale_variable(r, &Series::t_pow(-weight))).collect();
    if out.iter().any(|f| f.min_valuation().is_negative()) {
        return Err(VeroneseError::BasisExtractionFailure("rescaling produced a negative valuation".into()));
    }
    let out_limit = family_limit(&out)?;
    let check = Matrix::from_rows((0..=r).map(|i| tuple_vector(&partial_tuple_scalar(&out_limit, i))).collect());
    if check.rank() < r + 1 {
        return Err(VeroneseError::BasisExtractionFailure("limit partials stay dependent after the step".into()));
    }
    let mut sigma_inv = Matrix::<Series>::identity(m);
    sigma_inv.set(r, r, Series::t_pow(weight));
    Ok((out, psi_inv.mul(&sigma_inv), record))
}

fn partial_tuple_scalar(family: &[HomPoly<Scalar>], j: usize) -> Vec<HomPoly<Scalar>> {
    family.iter().map(|f| f.partial(j)).collect()
}

/// Makes a family of homogeneous polynomials of equal degree jointly concise at `t = 0`.
pub fn unrestrict_family(members: &[HomPoly<Series>]) -> Result<FamilyUnrestriction, VeroneseError> {
    let Some(first) = members.first() else {
        return Err(VeroneseError::Precondition("empty family".into()));
    };
    let (m, nu) = (first.nvars(), first.degree());
    if members.iter().any(|f| f.nvars() != m || f.degree() != nu) {
        return Err(VeroneseError::Precondition("members differ in variables or degree".into()));
    }
    check_characteristic(members.iter().flat_map(|f| f.terms().values()), nu)?;
    if members.iter().any(|f| f.min_valuation().is_negative()) {
        return Err(VeroneseError::NegativeValuation);
    }
    check_generic_conciseness(members, m)?;
    let mut family = members.to_vec();
    let mut g = Matrix::<Series>::identity(m);
    let mut steps = Vec::new();
    loop {
        let limit = family_limit(&family)?;
        let space = conciseness_space(&limit, m);
        let r = space.rows();
        if r == m {
            let map_limit = g
                .limit_at_zero()
                .map_err(|_| VeroneseError::BasisExtractionFailure("the composed map has a pole".into()))?;
            return Ok(FamilyUnrestriction { family_t: family, limit, map_t: g, map_limit, steps });
        }
        let b = adapted_basis(&space);
        if !b.is_identity() {
            let binv = b.inverse().expect("adapted basis is invertible").to_series();
            family = family.iter().map(|f| f.substitute(&binv)).collect();
            g = g.mul(&b.to_series());
        }
        let (next, h, record) = unrestrict_poly_step(&family, r)?;
        family = next;
        g = g.mul(&h);
        steps.push(record);
    }
}

/// `c · t^v` where `v` is the least valuation and `c` the leading coefficient
/// of the first coefficient attaining it; one if the limit is already nonzero.
fn projective_scale<'a>(coeffs: impl Iterator<Item = &'a Series>) -> Series {
    let mut best: Option<(Rational64, Scalar)> = None;
    for x in coeffs {
        if let Some(v) = x.valuation().finite() {
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, x.leading_coefficient()));
            }
        }
    }
    match best {
        Some((v, c)) if v > Rational64::from(0) => Series::from_scalar(c).mul(&Series::t_pow(v)),
        _ => Series::one(),
    }
}

/// Concise unrestriction of a single polynomial degeneration.
pub fn unrestrict_symmetric(f: &HomPoly<Series>) -> Result<SymmetricUnrestriction, VeroneseError> {
    if f.is_zero() {
        return Err(VeroneseError::NotJointlyConcise("zero polynomial".into()));
    }
    let scale = projective_scale(f.terms().values());
    let normalized = f.scale(&scale.inv().unwrap());
    let mut run = unrestrict_family(&[normalized])?;
    Ok(SymmetricUnrestriction {
        scale,
        output_t: run.family_t.remove(0),
        limit: run.limit.remove(0),
        map_t: run.map_t,
        map_limit: run.map_limit,
        steps: run.steps,
    })
}

/// The nonzero columns of the flattening onto coordinate `c`, as polynomials.
fn coordinate_family(t: &Tensor<Series>, c: usize) -> Vec<HomPoly<Series>> {
    let axes: Vec<usize> = t.coordinate_axes(c).collect();
    let m = t.coordinate_dim(c);
    let flat = t.flatten(&axes);
    let rows: Vec<Vec<usize>> = multi_indices(&vec![m; axes.len()]).collect();
    (0..flat.cols())
        .filter_map(|col| {
            let terms: Vec<(Vec<u32>, Series)> = rows
                .iter()
                .enumerate()
                .filter(|(r, _)| !flat.get(*r, col).is_zero())
                .map(|(r, ix)| {
                    let mut a = vec![0u32; m];
                    for &i in ix {
                        a[i] += 1;
                    }
                    (a, flat.get(r, col).clone())
                })
                .collect();
            let p = HomPoly::from_terms(m, axes.len(), terms);
            (!p.is_zero()).then_some(p)
        })
        .collect()
}

/// Concise unrestriction of a partially symmetric degeneration, processing
/// coordinates in `order` (all of them, increasing, by default).
pub fn unrestrict_partial(t: &Tensor<Series>, order: Option<&[usize]>) -> Result<PartialCertificate, VeroneseError> {
    let k = t.coordinates();
    let order: Vec<usize> = order.map_or_else(|| (0..k).collect(), |o| o.to_vec());
    let mut seen = vec![false; k];
    for &c in &order {
        if c >= k || std::mem::replace(&mut seen[c], true) {
            return Err(VeroneseError::InvalidOrder(order.clone()));
        }
    }
    let top = *t.format().iter().max().unwrap();
    check_characteristic(t.data().iter().filter(|x| !x.is_zero()), top)?;
    if t.min_valuation().is_negative() {
        return Err(VeroneseError::NegativeValuation);
    }
    for c in 0..k {
        if !t.is_concise(c) {
            return Err(VeroneseError::NotGenericallyConcise(c));
        }
    }
    let scale = projective_scale(t.data().iter());
    let mut cur = t.scale(&scale.inv().unwrap());
    let mut maps_t: Vec<Matrix<Series>> = (0..k).map(|c| Matrix::identity(t.coordinate_dim(c))).collect();
    let mut reexpanded = vec![false; k];
    let mut steps = vec![Vec::new(); k];
    for &c in &order {
        let family = coordinate_family(&cur, c);
        let run = unrestrict_family(&family).map_err(|e| match e {
            VeroneseError::NotJointlyConcise(_) => VeroneseError::NotGenericallyConcise(c),
            other => other,
        })?;
        if run.map_t.is_identity() {
            continue;
        }
        let inv = run.map_t.inverse().expect("unrestriction maps are invertible over k(t)");
        reexpanded[c] = inv.min_valuation().is_negative();
        let mut per_coord: Vec<Matrix<Series>> = (0..k).map(|j| Matrix::identity(cur.coordinate_dim(j))).collect();
        per_coord[c] = inv;
        cur = cur.restrict_coordinates(&per_coord)?;
        if cur.min_valuation().is_negative() {
            return Err(VeroneseError::BasisExtractionFailure(format!("coordinate {c} left a pole")));
        }
        maps_t[c] = maps_t[c].mul(&run.map_t);
        steps[c] = run.steps;
    }
    let limit = cur.limit_at_zero().map_err(|_| VeroneseError::NegativeValuation)?;
    for &c in &order {
        if !limit.is_concise(c) {
            return Err(VeroneseError::BasisExtractionFailure(format!("limit not concise on coordinate {c}")));
        }
    }
    let maps_limit = maps_t
        .iter()
        .map(|g| g.limit_at_zero())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| VeroneseError::BasisExtractionFailure("a map has a pole".into()))?;
    Ok(PartialCertificate {
        input: t.clone(),
        order,
        scale,
        unrestriction_t: cur,
        maps_t,
        limit,
        maps_limit,
        reexpanded,
        steps,
        border_rank_status: BorderRankStatus::NotChecked,
    })
}

/// Least common multiple of `ν!` over the coordinates.
pub fn exponent_bound(format: &[usize]) -> u32 {
    format.iter().fold(1u32, |acc, &nu| acc.lcm(&(1..=nu as u32).product::<u32>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segre::{check_gl_equivalence, unrestrict_full, GlEquivalence, MinorStrategy};

    fn sp(text: &str, n: usize) -> HomPoly<Series> {
        HomPoly::parse(text, n).unwrap().to_series()
    }

    fn t(k: i64) -> Series {
        Series::monomial(Scalar::one(), k, 1)
    }

    fn linear(coeffs: &[Series]) -> HomPoly<Series> {
        HomPoly::linear(coeffs)
    }

    fn power(p: &HomPoly<Series>, k: usize) -> HomPoly<Series> {
        (1..k).fold(p.clone(), |acc, _| acc.mul(p))
    }

    /// `(x1 + t x2 + t x3)^3 - (x1 + t x2)^3 - (x1 + t x3)^3 + (x1 + t^n x4)^3`.
    pub(crate) fn small_cw(n: i64) -> HomPoly<Series> {
        let z = Series::zero;
        let one = Series::one;
        let a = power(&linear(&[one(), t(1), t(1), z()]), 3);
        let b = power(&linear(&[one(), t(1), z(), z()]), 3);
        let c = power(&linear(&[one(), z(), t(1), z()]), 3);
        let d = power(&linear(&[one(), z(), z(), t(n)]), 3);
        a.sub(&b).sub(&c).add(&d)
    }

    fn check_symmetric(f: &HomPoly<Series>, run: &SymmetricUnrestriction) {
        let back = run.output_t.substitute(&run.map_t).scale(&run.scale);
        assert_eq!(&back, f);
        assert_eq!(run.output_t.limit_at_zero().unwrap(), run.limit);
        for s in &run.steps {
            assert!(s.e[0].is_none_or(|e1| s.weight <= e1));
        }
    }

    #[test]
    fn small_cw_reproduces_big_cw() {
        for n in [4, 5, 7] {
            let f = small_cw(n);
            let run = unrestrict_symmetric(&f).unwrap();
            check_symmetric(&f, &run);
            assert_eq!(run.limit, HomPoly::parse("x1*x2*x3 + 1/2*x4*x1^2", 4).unwrap());
            assert_eq!(run.scale, Series::from_i64(6).mul(&t(2)));
            assert_eq!(run.steps.len(), 1);
            assert_eq!(run.steps[0].weight, Rational64::from(n - 2));
            let e: Vec<_> = run.steps[0].e.iter().map(|x| x.unwrap()).collect();
            assert_eq!(e, vec![Rational64::from(n - 2), Rational64::from(2 * n - 2), Rational64::from(3 * n - 2)]);
        }
    }

    #[test]
    fn fractional_weight() {
        let f = sp("x1^3", 2).add(&sp("x2^3", 2).scale(&t(1)));
        let (out, h, rec) = unrestrict_poly_step(&[f.clone()], 1).unwrap();
        assert_eq!(rec.loop_iterations, 0);
        assert_eq!(rec.weight, Rational64::new(1, 3));
        assert_eq!(out[0].limit_at_zero().unwrap(), HomPoly::parse("x1^3 + x2^3", 2).unwrap());
        assert_eq!(out[0].substitute(&h), f);
        let run = unrestrict_symmetric(&f).unwrap();
        check_symmetric(&f, &run);
        let n = run.map_t.data().iter().map(|x| x.reduce_exponents().exp_denominator()).max();
        assert_eq!(n, Some(3));
    }

    #[test]
    fn dependent_partials_are_rejected() {
        let f = power(&linear(&[Series::one(), t(1)]), 3);
        assert!(matches!(unrestrict_symmetric(&f), Err(VeroneseError::NotJointlyConcise(_))));
        let unperturbed = small_cw(4).sub(&power(&linear(&[Series::one(), Series::zero(), Series::zero(), t(4)]), 3))
            .add(&sp("x1^3", 4));
        assert!(matches!(unrestrict_symmetric(&unperturbed), Err(VeroneseError::NotJointlyConcise(_))));
    }

    #[test]
    fn lambda_loop_runs() {
        // x1^2 x2-free limit; ∂2 F = t ∂1 F + t^2 x2^2 forces λ = t
        let x1 = linear(&[Series::one(), t(1)]);
        let f = power(&x1, 3).add(&sp("x2^3", 2).scale(&t(3)));
        let (out, h, rec) = unrestrict_poly_step(&[f.clone()], 1).unwrap();
        assert_eq!(rec.lambda, vec![t(1)]);
        assert!(rec.loop_iterations >= 1);
        assert_eq!(out[0].substitute(&h), f);
        let run = unrestrict_symmetric(&f).unwrap();
        check_symmetric(&f, &run);
        assert_eq!(run.limit, HomPoly::parse("x1^3 + x2^3", 2).unwrap());
    }

    #[test]
    fn constant_concise_input_is_unchanged() {
        let f = sp("2*x1*x2*x3 + x4^3 + x1^3 + x2^3 + x3^3", 4);
        let run = unrestrict_symmetric(&f).unwrap();
        assert!(run.steps.is_empty());
        assert!(run.map_t.is_identity());
        assert_eq!(run.output_t, f);
    }

    #[test]
    fn small_characteristic_is_rejected() {
        let f = HomPoly::from_terms(2, 3, [(vec![3, 0], Series::from_scalar(Scalar::Fp(1, 3))), (vec![0, 3], Series::from_scalar(Scalar::Fp(1, 3)))]);
        assert!(matches!(unrestrict_symmetric(&f), Err(VeroneseError::UnsupportedCharacteristic { .. })));
    }

    fn two_one_example() -> Tensor<Series> {
        // (x1 + t x2)^2 ⊗ y1 + t x2^2 ⊗ y2
        let mut ten = Tensor::<Series>::zeros(&[2, 2, 2]);
        let sq = [[Series::one(), t(1)], [t(1), t(2)]];
        for i in 0..2 {
            for j in 0..2 {
                ten.set(&[i, j, 0], sq[i][j].clone());
            }
        }
        ten.set(&[1, 1, 1], t(1));
        ten.with_format_unchecked(vec![2, 1])
    }

    #[test]
    fn partially_symmetric_two_one() {
        let ten = two_one_example();
        let cert = unrestrict_partial(&ten, None).unwrap();
        assert!(cert.restriction_identity_holds());
        assert!(cert.limit.is_concise_everywhere());
        assert_eq!(cert.steps[0][0].weight, Rational64::new(1, 2));
        assert_eq!(exponent_bound(&[2, 1]) % cert.exp_denominator(), 0);
        assert!(cert.reexpanded[0]);
        let direct = Tensor::with_format(vec![2, 2, 2], vec![2, 1], cert.limit.data().to_vec());
        assert!(direct.is_ok());
    }

    #[test]
    fn segre_format_agrees_with_segre_module() {
        let d = crate::segre::tests_support::order_matters();
        for order in [vec![2, 0, 1], vec![1, 2, 0], vec![0, 1, 2]] {
            let cert = unrestrict_partial(d.tensor(), Some(&order)).unwrap();
            assert!(cert.restriction_identity_holds());
            assert_eq!(cert.exp_denominator(), 1);
            let seg = unrestrict_full(&d, &order, &MinorStrategy::LexFirst).unwrap();
            let as_seg = cert.to_segre_certificate().unwrap();
            assert!(matches!(check_gl_equivalence(&seg, &as_seg).unwrap(), GlEquivalence::Found(_)), "order {order:?}");
        }
    }
}
