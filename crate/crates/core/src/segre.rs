//! Unrestriction of Segre-format degenerations, one coordinate at a time.
//!
//! A step on coordinate `i` factors the flattening `M` of `T_t` as `X · M'`
//! where `X` consists of columns of `M` whose maximal minor has minimal
//! valuation. Cramer's rule then makes every entry of `M'` a ratio of maximal
//! minors, hence of nonnegative valuation, and `M'` contains an identity
//! block, so its limit at `t = 0` has full rank.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::Scalar;
use crate::matrix::{LinMap, Matrix};
use crate::poly::Poly;
use crate::series::{Series, Valuation};
use crate::tensor::{Tensor, TensorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegreError {
    #[error("the general member is not concise on coordinate {0}")]
    NotGenericallyConcise(usize),
    #[error("entry {index:?} has negative valuation {valuation}")]
    NegativeValuation { index: Vec<usize>, valuation: Valuation },
    #[error("invalid coordinate order {0:?}")]
    InvalidOrder(Vec<usize>),
    #[error("certificates come from different inputs or coordinate orders")]
    InputMismatch,
    #[error(transparent)]
    Shape(#[from] TensorError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A tensor over `𝕜(t)` whose entries all lie in `𝕜[[t]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Degeneration {
    tensor: Tensor<Series>,
}

impl Degeneration {
    pub fn new(tensor: Tensor<Series>) -> Result<Self, SegreError> {
        for (ix, x) in tensor.nonzero_entries() {
            let v = x.valuation();
            if v.is_negative() {
                return Err(SegreError::NegativeValuation { index: ix, valuation: v });
            }
        }
        Ok(Degeneration { tensor })
    }

    pub fn constant(t: &Tensor<Scalar>) -> Self {
        Degeneration { tensor: t.to_series() }
    }

    pub fn tensor(&self) -> &Tensor<Series> {
        &self.tensor
    }

    pub fn dims(&self) -> &[usize] {
        self.tensor.dims()
    }

    pub fn limit(&self) -> Tensor<Scalar> {
        self.tensor.limit_at_zero().expect("degenerations have nonnegative valuations")
    }
}

/// How to choose among maximal minors of equal minimal valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinorStrategy {
    /// Lexicographically smallest column set.
    LexFirst,
    /// Lexicographically largest column set.
    LexLast,
    /// A seeded random column priority.
    Random(u64),
}

/// Whether the border rank of the limit has been compared with that of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BorderRankStatus {
    NotChecked,
    MinimalBorderRank,
    NotMinimal,
    CentroidAbundantOnly,
}

#[derive(Clone, Debug)]
pub struct StepResult {
    pub tensor: Degeneration,
    pub map: LinMap<Series>,
    pub columns: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct UnrestrictionCertificate {
    pub input: Tensor<Series>,
    pub order: Vec<usize>,
    pub unrestriction_t: Degeneration,
    pub maps_t: Vec<LinMap<Series>>,
    pub limit: Tensor<Scalar>,
    pub maps_limit: Vec<LinMap<Scalar>>,
    /// Chosen column sets, in processing order.
    pub minor_choices: Vec<Vec<usize>>,
    pub border_rank_status: BorderRankStatus,
}

impl UnrestrictionCertificate {
    /// `restrict(unrestriction_t, maps_t) == input`.
    pub fn restriction_identity_holds(&self) -> bool {
        self.unrestriction_t.tensor.restrict(&self.maps_t).map(|t| t == self.input).unwrap_or(false)
    }

    pub fn limits_consistent(&self) -> bool {
        self.unrestriction_t.limit() == self.limit
            && self.maps_t.iter().zip(&self.maps_limit).all(|(m, l)| m.limit_at_zero().as_ref() == Ok(l))
    }
}

/// Column priority used when scanning for pivots.
fn column_order(n: usize, strategy: &MinorStrategy, step: usize) -> Vec<usize> {
    match strategy {
        MinorStrategy::LexFirst => (0..n).collect(),
        MinorStrategy::LexLast => (0..n).rev().collect(),
        MinorStrategy::Random(seed) => {
            let mut v: Vec<usize> = (0..n).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(step as u64));
            v.shuffle(&mut rng);
            v
        }
    }
}

/// Some basis of columns whose maximal minor has minimal valuation, by
/// elimination with full valuation pivoting. Works fraction-free on the
/// cleared rows: every remaining row picks up the same scale at each step,
/// so only the initial per-row offsets matter for comparisons.
fn greedy_min_valuation_basis(m: &Matrix<Series>) -> Vec<usize> {
    let (mut w, mults, _) = m.cleared_rows();
    let offset: Vec<i64> = mults.iter().map(|d| d.ord().unwrap() as i64).collect();
    let mut used_rows = vec![false; m.rows()];
    let mut used_cols = vec![false; m.cols()];
    let mut cols = Vec::with_capacity(m.rows());
    let mut prev = Poly::one();
    for _ in 0..m.rows() {
        let mut best: Option<(i64, usize, usize)> = None;
        for r in (0..m.rows()).filter(|&r| !used_rows[r]) {
            for c in (0..m.cols()).filter(|&c| !used_cols[c]) {
                if let Some(k) = w[r][c].ord() {
                    let v = k as i64 - offset[r];
                    if best.is_none_or(|b| v < b.0) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((_, r, c)) = best else { break };
        used_rows[r] = true;
        used_cols[c] = true;
        cols.push(c);
        let piv = w[r][c].clone();
        for r2 in (0..m.rows()).filter(|&r2| !used_rows[r2]) {
            let f = w[r2][c].clone();
            for c2 in (0..m.cols()).filter(|&c2| !used_cols[c2]) {
                let mut v = piv.mul(&w[r2][c2]);
                if !f.is_zero() && !w[r][c2].is_zero() {
                    v = v.sub(&f.mul(&w[r][c2]));
                }
                if !prev.is_one() && !v.is_zero() {
                    v = v.div_exact(&prev);
                }
                w[r2][c2] = v;
            }
            w[r2][c] = Poly::zero();
        }
        prev = piv;
    }
    cols.sort_unstable();
    cols
}

/// Columns of a full-row-rank matrix forming a basis whose maximal minor has
/// minimal valuation; among those, the first one in the given column priority.
pub fn min_valuation_columns(m: &Matrix<Series>, priority: &[usize]) -> Vec<usize> {
    let b0 = greedy_min_valuation_basis(m);
    let normalized = m.reduce_by_columns(&b0).expect("greedy basis is invertible");
    // The bases of minimal valuation are exactly the bases of this limit.
    let limit = normalized.limit_at_zero().expect("Cramer ratios of minimal minors have valuation >= 0");
    let (_, mut pivots) = limit.rref_in_order(priority);
    pivots.sort_unstable();
    pivots
}

/// Valuation of the maximal minor on the given columns.
pub fn minor_valuation(m: &Matrix<Series>, cols: &[usize]) -> Valuation {
    m.select_columns(cols).det().valuation()
}

/// One unrestriction step on axis `i`.
pub fn unrestrict_step(d: &Degeneration, i: usize, strategy: &MinorStrategy) -> Result<StepResult, SegreError> {
    unrestrict_step_numbered(d, i, strategy, 0)
}

fn unrestrict_step_numbered(
    d: &Degeneration,
    i: usize,
    strategy: &MinorStrategy,
    step: usize,
) -> Result<StepResult, SegreError> {
    let t = d.tensor.as_segre();
    if i >= t.order() {
        return Err(SegreError::InvalidOrder(vec![i]));
    }
    let m = t.flatten(&[i]);
    if greedy_min_valuation_basis(&m).len() != m.rows() {
        return Err(SegreError::NotGenericallyConcise(i));
    }
    let columns = min_valuation_columns(&m, &column_order(m.cols(), strategy, step));
    let x = m.select_columns(&columns);
    let reduced = m
        .reduce_by_columns(&columns)
        .ok_or_else(|| SegreError::Internal("chosen minor is singular".into()))?;
    if reduced.min_valuation().is_negative() {
        return Err(SegreError::Internal("negative valuation after a step".into()));
    }
    if !reduced.select_columns(&columns).is_identity() {
        return Err(SegreError::Internal("chosen columns do not reduce to the identity".into()));
    }
    let out = t.unflatten_axis(i, &reduced).with_format_unchecked(d.tensor.format().to_vec());
    Ok(StepResult { tensor: Degeneration { tensor: out }, map: x, columns })
}

fn validate_order(order: &[usize], d: usize) -> Result<(), SegreError> {
    let mut seen = vec![false; d];
    for &i in order {
        if i >= d || seen[i] {
            return Err(SegreError::InvalidOrder(order.to_vec()));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Runs a step on each axis in `order` (a permutation of a subset of the axes).
pub fn unrestrict_full(
    d: &Degeneration,
    order: &[usize],
    strategy: &MinorStrategy,
) -> Result<UnrestrictionCertificate, SegreError> {
    let n = d.tensor.order();
    validate_order(order, n)?;
    let mut cur = d.clone();
    let mut maps_t: Vec<LinMap<Series>> = d.dims().iter().map(|&k| Matrix::identity(k)).collect();
    let mut choices = Vec::with_capacity(order.len());
    for (step, &i) in order.iter().enumerate() {
        let r = unrestrict_step_numbered(&cur, i, strategy, step)?;
        maps_t[i] = maps_t[i].mul(&r.map);
        choices.push(r.columns);
        cur = r.tensor;
    }
    let limit = cur.limit();
    for &i in order {
        if !limit.is_concise(i) {
            return Err(SegreError::Internal(format!("limit not concise on processed coordinate {i}")));
        }
    }
    let maps_limit = maps_t
        .iter()
        .map(|m| m.limit_at_zero())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| SegreError::Internal(e.to_string()))?;
    Ok(UnrestrictionCertificate {
        input: d.tensor.clone(),
        order: order.to_vec(),
        unrestriction_t: cur,
        maps_t,
        limit,
        maps_limit,
        minor_choices: choices,
        border_rank_status: BorderRankStatus::NotChecked,
    })
}

/// Processes every axis in increasing order.
pub fn unrestrict_default(d: &Degeneration) -> Result<UnrestrictionCertificate, SegreError> {
    let order: Vec<usize> = (0..d.tensor.order()).collect();
    unrestrict_full(d, &order, &MinorStrategy::LexFirst)
}

/// Outcome of comparing two certificates.
#[derive(Clone, Debug, PartialEq)]
pub enum GlEquivalence {
    /// Invertible `ψᵢ` with `ψ(limit₁) = limit₂` and `maps_limit₂[i]·ψᵢ = maps_limit₁[i]`.
    Found(Vec<LinMap<Scalar>>),
    NotFound(String),
}

/// `maps2⁻¹ · maps1` per axis, over `𝕜(t)`.
pub fn gl_transition(maps1: &[LinMap<Series>], maps2: &[LinMap<Series>]) -> Option<Vec<LinMap<Series>>> {
    maps1.iter().zip(maps2).map(|(a, b)| b.inverse().map(|bi| bi.mul(a))).collect()
}

pub fn check_gl_equivalence(
    c1: &UnrestrictionCertificate,
    c2: &UnrestrictionCertificate,
) -> Result<GlEquivalence, SegreError> {
    if c1.input != c2.input || c1.order != c2.order {
        return Err(SegreError::InputMismatch);
    }
    let Some(psi_t) = gl_transition(&c1.maps_t, &c2.maps_t) else {
        return Ok(GlEquivalence::NotFound("a map is not invertible over k(t)".into()));
    };
    let mut psi = Vec::with_capacity(psi_t.len());
    for (i, p) in psi_t.iter().enumerate() {
        let Ok(p0) = p.limit_at_zero() else {
            return Ok(GlEquivalence::NotFound(format!("transition on coordinate {i} has negative valuation")));
        };
        if p0.rank() != p0.rows() {
            return Ok(GlEquivalence::NotFound(format!("limit transition on coordinate {i} is singular")));
        }
        psi.push(p0);
    }
    if c1.limit.restrict(&psi)? != c2.limit {
        return Ok(GlEquivalence::NotFound("limits are not related by the transition".into()));
    }
    for (i, p) in psi.iter().enumerate() {
        if c2.maps_limit[i].mul(p) != c1.maps_limit[i] {
            return Ok(GlEquivalence::NotFound(format!("limit maps disagree on coordinate {i}")));
        }
    }
    Ok(GlEquivalence::Found(psi))
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;
    use crate::field::Field;

    pub(crate) fn tp(k: i64) -> Series {
        Series::monomial(Scalar::one(), k, 1)
    }

    /// Pencil `[[x1, t²x2], [t x2, t x1]]` with the variable on axis 0.
    pub(crate) fn order_matters() -> Degeneration {
        let mut t = Tensor::<Series>::zeros(&[2, 2, 2]);
        t.set(&[0, 0, 0], tp(0));
        t.set(&[1, 0, 1], tp(2));
        t.set(&[1, 1, 0], tp(1));
        t.set(&[0, 1, 1], tp(1));
        Degeneration::new(t).unwrap()
    }
}
