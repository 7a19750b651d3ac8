//! Geometry of the second secant of `(ℙ¹)^d` and its concise resolution:
//! torus fixed points, tangent weights, motives and 𝔽ₚ point counts.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::centroid;
use crate::field::{is_prime, Field, Scalar};
use crate::tensor::Tensor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Sigma2Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("the zero tensor has no normal form")]
    ZeroTensor,
    #[error("one-parameter subgroup {0:?} pairs to zero with a tangent weight")]
    DegenerateOnePS(Vec<i64>),
    #[error("scan of {vectors} vectors exceeds the limit {limit}")]
    TooLarge { vectors: u128, limit: u128 },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("need at least {min} factors, got {d}")]
    TooFewFactors { d: usize, min: usize },
}

/// Integer polynomial in `𝕃`, lowest degree first, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MotivePoly(pub Vec<i64>);

impl MotivePoly {
    pub fn new(mut c: Vec<i64>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        MotivePoly(c)
    }

    pub fn constant(c: i64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: i64, k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `1 + 𝕃 + ⋯ + 𝕃^k`-style sums: `Σ_{i=lo}^{hi} 𝕃^i`, empty when `hi < lo`.
    pub fn range(lo: usize, hi: usize) -> Self {
        (lo..=hi).fold(Self::default(), |acc, k| acc.add(&Self::monomial(1, k)))
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1))
    }

    pub fn scale(&self, c: i64) -> Self {
        Self::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return Self::default();
        }
        let mut v = vec![0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::constant(1), |acc, _| acc.mul(self))
    }

    /// Exact division by two; panics on an odd coefficient.
    fn halve(&self) -> Self {
        assert!(self.0.iter().all(|c| c % 2 == 0), "odd coefficient in {self}");
        Self::new(self.0.iter().map(|c| c / 2).collect())
    }

    pub fn eval(&self, x: i128) -> i128 {
        self.0.iter().rev().fold(0i128, |acc, &c| acc * x + c as i128)
    }
}

impl fmt::Display for MotivePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| match k {
                0 => c.to_string(),
                1 => format!("{c}*L"),
                _ => format!("{c}*L^{k}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

fn one_plus_l() -> MotivePoly {
    MotivePoly::new(vec![1, 1])
}

fn one_plus_l2() -> MotivePoly {
    MotivePoly::new(vec![1, 0, 1])
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

/// Class of the concise second secant.
pub fn csigma2_motive_formula(d: usize) -> MotivePoly {
    assert!(d >= 3);
    let half = one_plus_l().pow(2 * (d - 1)).add(&one_plus_l2().pow(d - 1)).halve();
    let tail = MotivePoly::monomial(1, 1).mul(&one_plus_l().pow(d - 1)).mul(&MotivePoly::range(0, d - 3));
    one_plus_l().mul(&one_plus_l2()).mul(&half.add(&tail))
}

/// Motive of the fibre over a rank-one tensor.
pub fn rank_one_fibre_motive(d: usize) -> MotivePoly {
    one_plus_l().pow(d - 1).add(&MotivePoly::range(1, d - 2)).add(&MotivePoly::monomial(d as i64 - 1, 2))
}

/// Class of the ordinary second secant.
pub fn sigma2_motive_formula(d: usize) -> MotivePoly {
    let two_concise = MotivePoly::new(vec![0, -1, 0, 1])
        .mul(&MotivePoly::new(vec![0, 1, 1]))
        .mul(&one_plus_l().pow(d - 2))
        .scale(binom(d, 2));
    let segre = rank_one_fibre_motive(d).sub(&MotivePoly::constant(1)).mul(&one_plus_l().pow(d));
    csigma2_motive_formula(d).sub(&two_concise).sub(&segre)
}

/// Which fixed point over a given base simple tensor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FixedKind {
    /// `x̃₁ ⊗ x_{S∪J} + ỹ₁ ⊗ y_S ⊗ x_J` with `S ⊆ {1, …, d−1}` (0-based) of size ≥ 2.
    HeightOne { ys: Vec<usize> },
    /// One of the three points over the subspace with distinguished coordinate `j`.
    HeightTwo { j: usize, kind: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedPoint {
    /// Bit `i` set when the base simple tensor has `y` on coordinate `i`.
    pub base: u64,
    pub kind: FixedKind,
}

/// All torus-fixed points, grouped by base.
pub fn enumerate_fixed_points(d: usize) -> Vec<FixedPoint> {
    assert!((3..64).contains(&d));
    let mut local = Vec::new();
    for mask in 0u64..1 << (d - 1) {
        if mask.count_ones() >= 2 {
            let ys = (0..d - 1).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
            local.push(FixedKind::HeightOne { ys });
        }
    }
    for j in 1..d {
        for kind in 1..=3 {
            local.push(FixedKind::HeightTwo { j, kind });
        }
    }
    (0..1u64 << d).flat_map(|base| local.iter().map(move |k| FixedPoint { base, kind: k.clone() })).collect()
}

pub fn expected_fixed_point_count(d: usize) -> u64 {
    (1u64 << d) * ((1u64 << (d - 1)) + 2 * d as u64 - 3)
}

pub type WeightVector = Vec<i64>;

fn e(d: usize, terms: &[(usize, i64)]) -> WeightVector {
    let mut v = vec![0; d];
    for &(i, c) in terms {
        v[i] += c;
    }
    v
}

/// Tangent weights at a fixed point, with `deg x_i = −e_i`, `deg y_i = e_i`.
/// Bases other than `x_{1..d}` are obtained by `e_i ↦ −e_i` on their `y` coordinates.
pub fn tangent_weights(fp: &FixedPoint, d: usize) -> Vec<WeightVector> {
    let mut w = Vec::with_capacity(2 * d + 1);
    match &fp.kind {
        FixedKind::HeightOne { ys } => {
            for i in 1..d {
                if ys.contains(&i) {
                    w.push(e(d, &[(i, 2)]));
                    w.push(e(d, &[(i, -2)]));
                } else {
                    w.push(e(d, &[(i, 2)]));
                    w.push(e(d, &[(i, 2)]));
                }
            }
            let s: Vec<(usize, i64)> = ys.iter().map(|&i| (i, 2)).collect();
            w.push(e(d, &[(0, 2)]));
            w.push(e(d, &s));
            let mut s0 = s.clone();
            s0.push((0, 2));
            w.push(e(d, &s0));
        }
        FixedKind::HeightTwo { j, kind } => {
            let j = *j;
            let l = (1..d).find(|&c| c != j).unwrap();
            let ks: Vec<usize> = (1..d).filter(|&c| c != j && c != l).collect();
            w.push(e(d, &[(0, 2)]));
            w.push(e(d, &[(j, 2)]));
            w.push(e(d, &[(0, 2), (j, 2)]));
            w.push(e(d, &[(l, 2)]));
            match kind {
                1 => {
                    w.push(e(d, &[(l, 2)]));
                    w.push(e(d, &[(j, 2)]));
                    w.push(e(d, &[(j, -2)]));
                    for &k in &ks {
                        w.push(e(d, &[(k, 2)]));
                        w.push(e(d, &[(k, 2)]));
                    }
                }
                2 => {
                    w.push(e(d, &[(j, 2), (l, 2)]));
                    w.push(e(d, &[(j, -2)]));
                    w.push(e(d, &[(j, -4)]));
                    for &k in &ks {
                        w.push(e(d, &[(k, 2)]));
                        w.push(e(d, &[(k, 2), (j, 2)]));
                    }
                }
                _ => {
                    w.push(e(d, &[(j, 2)]));
                    w.push(e(d, &[(j, -2), (l, 2)]));
                    w.push(e(d, &[(j, 4)]));
                    for &k in &ks {
                        w.push(e(d, &[(k, 2)]));
                        w.push(e(d, &[(k, 2), (j, -2)]));
                    }
                }
            }
        }
    }
    for v in &mut w {
        for (i, c) in v.iter_mut().enumerate() {
            if fp.base >> i & 1 == 1 {
                *c = -*c;
            }
        }
    }
    w
}

/// `(1, K, K², …)` with `K = 2d + 3`, which separates every weight above.
pub fn default_one_ps(d: usize) -> Vec<i64> {
    let k = 2 * d as i64 + 3;
    (0..d as u32).map(|i| k.pow(i)).collect()
}

fn pairing(w: &[i64], e: &[i64]) -> i64 {
    w.iter().zip(e).map(|(a, b)| a * b).sum()
}

/// `Σ_x 𝕃^{n_x}` with `n_x` the number of positive weights at `x`.
pub fn bb_motive(d: usize, one_ps: Option<&[i64]>) -> Result<MotivePoly, Sigma2Error> {
    let default = default_one_ps(d);
    let ps = one_ps.unwrap_or(&default);
    if ps.len() != d {
        return Err(Sigma2Error::ShapeMismatch(format!("one-parameter subgroup of length {} for d = {d}", ps.len())));
    }
    let mut counts = vec![0i64; 2 * d + 2];
    for fp in enumerate_fixed_points(d) {
        let mut positive = 0;
        for w in tangent_weights(&fp, d) {
            match pairing(&w, ps) {
                0 => return Err(Sigma2Error::DegenerateOnePS(ps.to_vec())),
                x if x > 0 => positive += 1,
                _ => {}
            }
        }
        counts[positive] += 1;
    }
    Ok(MotivePoly::new(counts))
}

/// `Σ 𝕃^{m_x}` over fixed points above `x_{1..d}`, with `m_x` the number of negative weights.
pub fn bb_rank_one_fibre_motive(d: usize) -> MotivePoly {
    let ps = default_one_ps(d);
    let mut counts = vec![0i64; 2 * d + 2];
    for fp in enumerate_fixed_points(d).into_iter().filter(|f| f.base == 0) {
        counts[tangent_weights(&fp, d).iter().filter(|w| pairing(w, &ps) < 0).count()] += 1;
    }
    MotivePoly::new(counts)
}

/// Number of projective points by number of concise coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCensus {
    pub d: usize,
    pub p: u64,
    pub by_concise: Vec<u64>,
}

impl PointCensus {
    pub fn sigma2(&self) -> u128 {
        self.by_concise.iter().map(|&x| x as u128).sum()
    }

    /// Points concise on exactly one coordinate; the structure theory says none exist.
    pub fn concise_on_one(&self) -> u64 {
        self.by_concise[1]
    }

    pub fn csigma2(&self) -> u128 {
        let p = self.p as u128;
        let d = self.d as u32;
        let rank_one = (p + 1).pow(d - 1) + (1..=d - 2).map(|k| p.pow(k)).sum::<u128>() + (d as u128 - 1) * p * p;
        self.by_concise
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let fibre = match k {
                    0 => rank_one,
                    2 => p * p + p + 1,
                    _ => 1,
                };
                n as u128 * fibre
            })
            .sum()
    }
}

/// Default bound on scanned vectors, about `3^16`.
pub const DEFAULT_SCAN_LIMIT: u128 = 50_000_000;

struct Flattenings {
    /// Each flattening as a row-major list of entry positions.
    layouts: Vec<(usize, usize, Vec<usize>)>,
    /// The flattening of coordinate `i` against the rest.
    single: Vec<usize>,
}

fn flattenings(d: usize) -> Flattenings {
    let n = 1usize << d;
    // bit d-1-i of an entry index is the digit on coordinate i
    let digit = |ix: usize, i: usize| ix >> (d - 1 - i) & 1;
    let mut layouts = Vec::new();
    let mut single = vec![0; d];
    for mask in 1u64..(1 << d) - 1 {
        if mask & 1 == 0 {
            continue;
        }
        let rows: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 1).collect();
        let cols: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 0).collect();
        let mut pos = vec![0; n];
        for ix in 0..n {
            let r = rows.iter().fold(0, |acc, &i| acc * 2 + digit(ix, i));
            let c = cols.iter().fold(0, |acc, &i| acc * 2 + digit(ix, i));
            pos[r * (1 << cols.len()) + c] = ix;
        }
        if rows.len() == 1 {
            single[0] = layouts.len();
        }
        if cols.len() == 1 {
            single[cols[0]] = layouts.len();
        }
        layouts.push((1 << rows.len(), 1 << cols.len(), pos));
    }
    Flattenings { layouts, single }
}

/// Rank modulo `p`, stopping once it exceeds `cap`.
fn rank_capped(v: &[u32], layout: &(usize, usize, Vec<usize>), p: u32, inv: &[u32], cap: usize, buf: &mut Vec<u32>) -> usize {
    let (rows, cols, pos) = layout;
    buf.clear();
    buf.extend(pos.iter().map(|&i| v[i]));
    let mut rank = 0;
    for c in 0..*cols {
        let Some(piv) = (rank..*rows).find(|&r| buf[r * cols + c] != 0) else { continue };
        if piv != rank {
            for k in 0..*cols {
                buf.swap(piv * cols + k, rank * cols + k);
            }
        }
        let pinv = inv[buf[rank * cols + c] as usize];
        for r in rank + 1..*rows {
            let f = buf[r * cols + c];
            if f == 0 {
                continue;
            }
            let f = f * pinv % p;
            for k in c..*cols {
                let sub = f * buf[rank * cols + k] % p;
                buf[r * cols + k] = (buf[r * cols + k] + p - sub) % p;
            }
        }
        rank += 1;
        if rank > cap || rank == *rows {
            break;
        }
    }
    rank
}

/// Counts projective 𝔽ₚ-points whose flattenings all have rank ≤ 2, split by
/// the number of coordinates on which they are concise.
pub fn census(d: usize, p: u64, limit: u128) -> Result<PointCensus, Sigma2Error> {
    if d < 2 {
        return Err(Sigma2Error::TooFewFactors { d, min: 2 });
    }
    if !is_prime(p) || p >= 1 << 15 {
        return Err(Sigma2Error::NotPrime(p));
    }
    let n = 1usize << d;
    let vectors = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if vectors > limit {
        return Err(Sigma2Error::TooLarge { vectors, limit });
    }
    let pp = p as u32;
    let inv: Vec<u32> = (0..pp).map(|a| if a == 0 { 0 } else { (1..pp).find(|b| a * b % pp == 1).unwrap() }).collect();
    let flats = flattenings(d);
    const CHUNK: u64 = 1 << 14;

    let classify = |v: &[u32], buf: &mut Vec<u32>| -> Option<usize> {
        for layout in &flats.layouts {
            if layout.0 > 2 && layout.1 > 2 && rank_capped(v, layout, pp, &inv, 2, buf) > 2 {
                return None;
            }
        }
        Some((0..d).filter(|&i| rank_capped(v, &flats.layouts[flats.single[i]], pp, &inv, 1, buf) == 2).count())
    };

    let mut by_concise = vec![0u64; d + 1];
    for lead in 0..n {
        let free = n - lead - 1;
        let total = (p as u64).pow(free as u32);
        let chunks = total.div_ceil(CHUNK);
        let partial: Vec<Vec<u64>> = (0..chunks)
            .into_par_iter()
            .map(|ch| {
                let mut counts = vec![0u64; d + 1];
                let mut v = vec![0u32; n];
                v[lead] = 1;
                let start = ch * CHUNK;
                let mut x = start;
                for k in (lead + 1..n).rev() {
                    v[k] = (x % p) as u32;
                    x /= p;
                }
                let mut buf = Vec::with_capacity(n);
                for _ in start..(start + CHUNK).min(total) {
                    if let Some(c) = classify(&v, &mut buf) {
                        counts[c] += 1;
                    }
                    for k in (lead + 1..n).rev() {
                        v[k] += 1;
                        if v[k] == pp {
                            v[k] = 0;
                        } else {
                            break;
                        }
                    }
                }
                counts
            })
            .collect();
        for c in partial {
            for (a, b) in by_concise.iter_mut().zip(c) {
                *a += b;
            }
        }
    }
    Ok(PointCensus { d, p, by_concise })
}

pub fn count_sigma2_points(d: usize, p: u64) -> Result<u128, Sigma2Error> {
    census(d, p, DEFAULT_SCAN_LIMIT).map(|c| c.sigma2())
}

pub fn count_csigma2_points(d: usize, p: u64) -> Result<u128, Sigma2Error> {
    census(d, p, DEFAULT_SCAN_LIMIT).map(|c| c.csigma2())
}

/// Comparison of a census against the motive polynomials at `𝕃 = p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusComparison {
    pub d: usize,
    pub p: u64,
    pub sigma2_count: u128,
    pub sigma2_motive: i128,
    pub csigma2_count: u128,
    pub csigma2_motive: i128,
    pub concise_on_one: u64,
}

impl CensusComparison {
    pub fn matches(&self) -> bool {
        self.sigma2_count as i128 == self.sigma2_motive
            && self.csigma2_count as i128 == self.csigma2_motive
            && self.concise_on_one == 0
    }
}

pub fn compare_census(c: &PointCensus) -> CensusComparison {
    CensusComparison {
        d: c.d,
        p: c.p,
        sigma2_count: c.sigma2(),
        sigma2_motive: sigma2_motive_formula(c.d).eval(c.p as i128),
        csigma2_count: c.csigma2(),
        csigma2_motive: csigma2_motive_formula(c.d).eval(c.p as i128),
        concise_on_one: c.concise_on_one(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalKind {
    B,
    C,
}

/// Normal form of a tensor of border rank at most two in `(𝕜²)^{⊗d}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm2 {
    pub kind: NormalKind,
    /// Concise coordinates, 0-based.
    pub concise: Vec<usize>,
    /// `a² + 4b` for the centroid `𝕜[u]/(u² − a u − b)` of the concise core, when `|I| ≥ 3`.
    pub discriminant: Option<Scalar>,
    /// Whether the two points of a `B` form are defined over ℚ.
    pub split_over_q: Option<bool>,
}

fn is_rational_square(x: &Scalar) -> bool {
    use num_traits::Signed;
    let Some(r) = x.as_rational() else { return false };
    if r.is_negative() {
        return false;
    }
    let sq = |n: &num_bigint::BigInt| {
        let s = n.sqrt();
        &s * &s == *n
    };
    sq(r.numer()) && sq(r.denom())
}

pub fn classify_rank2(t: &Tensor<Scalar>) -> Result<Option<NormalForm2>, Sigma2Error> {
    let t = t.as_segre();
    let d = t.order();
    if t.dims().iter().any(|&m| m != 2) {
        return Err(Sigma2Error::ShapeMismatch(format!("expected all dimensions 2, got {:?}", t.dims())));
    }
    if t.is_zero() {
        return Err(Sigma2Error::ZeroTensor);
    }
    for mask in 1u64..(1 << d) - 1 {
        if mask & 1 == 1 {
            let rows: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 1).collect();
            if t.flattening_rank(&rows) > 2 {
                return Ok(None);
            }
        }
    }
    let concise: Vec<usize> = (0..d).filter(|&i| t.is_concise(i)).collect();
    assert_ne!(concise.len(), 1, "a tensor of border rank two is never concise on exactly one coordinate");
    if concise.len() < 3 {
        return Ok(Some(NormalForm2 { kind: NormalKind::B, concise, discriminant: None, split_over_q: None }));
    }
    // contract every non-concise coordinate with a functional not vanishing on its line
    let mut core = t.clone();
    for i in (0..d).rev().filter(|i| !concise.contains(i)) {
        let m = core.flatten(&[i]);
        let k = (0..2).find(|&r| m.row(r).iter().any(|x| !x.is_zero())).unwrap();
        let dims: Vec<usize> = core.dims().iter().enumerate().filter(|(a, _)| *a != i).map(|(_, &x)| x).collect();
        core = Tensor::new(dims, m.row(k).to_vec()).unwrap();
    }
    let cen = centroid(&core).map_err(|e| Sigma2Error::ShapeMismatch(e.to_string()))?;
    let disc = cen.discriminant().expect("the core of a border rank two tensor has a two-dimensional centroid");
    let kind = if disc.is_zero() { NormalKind::C } else { NormalKind::B };
    let split = (kind == NormalKind::B).then(|| is_rational_square(&disc));
    Ok(Some(NormalForm2 { kind, concise, discriminant: Some(disc), split_over_q: split }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::unit_tensor;

    #[test]
    fn fixed_point_counts() {
        for (d, n) in [(3, 56), (4, 208), (5, 736)] {
            assert_eq!(enumerate_fixed_points(d).len(), n);
            assert_eq!(expected_fixed_point_count(d), n as u64);
        }
    }

    #[test]
    fn weight_examples() {
        let fp = FixedPoint { base: 0, kind: FixedKind::HeightOne { ys: vec![1, 2] } };
        let mut w = tangent_weights(&fp, 4);
        w.sort();
        let mut expected = vec![
            vec![0, 2, 0, 0],
            vec![0, -2, 0, 0],
            vec![0, 0, 2, 0],
            vec![0, 0, -2, 0],
            vec![0, 0, 0, 2],
            vec![0, 0, 0, 2],
            vec![2, 0, 0, 0],
            vec![0, 2, 2, 0],
            vec![2, 2, 2, 0],
        ];
        expected.sort();
        assert_eq!(w, expected);
        let fp = FixedPoint { base: 0, kind: FixedKind::HeightTwo { j: 1, kind: 1 } };
        let mut w = tangent_weights(&fp, 3);
        w.sort();
        let mut expected =
            vec![vec![2, 0, 0], vec![0, 2, 0], vec![2, 2, 0], vec![0, 0, 2], vec![0, 0, 2], vec![0, 2, 0], vec![0, -2, 0]];
        expected.sort();
        assert_eq!(w, expected);
    }

    #[test]
    fn weights_are_even_and_complete() {
        for d in 3..=6 {
            for fp in enumerate_fixed_points(d) {
                let w = tangent_weights(&fp, d);
                assert_eq!(w.len(), 2 * d + 1);
                assert!(w.iter().flatten().all(|c| c % 2 == 0));
            }
        }
    }

    #[test]
    fn formula_sanity() {
        assert_eq!(csigma2_motive_formula(3).eval(1), 56);
        for p in [2, 3, 5] {
            assert_eq!(sigma2_motive_formula(3).eval(p), (p.pow(8) - 1) / (p - 1));
        }
        for d in 3..=10 {
            let f = csigma2_motive_formula(d);
            assert_eq!(f.eval(1), expected_fixed_point_count(d) as i128);
            // 1 from the half-sum, d - 1 from its linear term, 1 from the outer factor
            assert_eq!(f.coeff(1), d as i64 + 1);
            assert_eq!(rank_one_fibre_motive(d).eval(1), ((1 << (d - 1)) + 2 * d - 3) as i128);
        }
    }

    #[test]
    fn bb_matches_formula() {
        for d in 3..=6 {
            assert_eq!(bb_motive(d, None).unwrap(), csigma2_motive_formula(d), "d = {d}");
            assert_eq!(bb_rank_one_fibre_motive(d), rank_one_fibre_motive(d), "d = {d}");
        }
    }

    #[test]
    fn one_ps_choice_is_irrelevant() {
        for d in 3..=5 {
            let alt: Vec<i64> = (0..d as u32).map(|i| 3 * 17i64.pow(i)).collect();
            assert_eq!(bb_motive(d, Some(&alt)).unwrap(), bb_motive(d, None).unwrap());
        }
        assert!(matches!(bb_motive(3, Some(&[1, 1, 0])), Err(Sigma2Error::DegenerateOnePS(_))));
    }

    #[test]
    fn small_census() {
        let c = census(3, 2, DEFAULT_SCAN_LIMIT).unwrap();
        assert_eq!(c.sigma2(), 255);
        let cmp = compare_census(&c);
        assert!(cmp.matches(), "{cmp:?}");
        assert!(matches!(census(5, 3, DEFAULT_SCAN_LIMIT), Err(Sigma2Error::TooLarge { .. })));
        assert!(matches!(census(3, 4, DEFAULT_SCAN_LIMIT), Err(Sigma2Error::NotPrime(4))));
    }

    fn simple(d: usize, ys: &[usize]) -> Tensor<Scalar> {
        let mut t = Tensor::zeros(&vec![2; d]);
        let ix: Vec<usize> = (0..d).map(|i| usize::from(ys.contains(&i))).collect();
        t.set(&ix, Scalar::one());
        t
    }

    fn sum(ts: &[Tensor<Scalar>]) -> Tensor<Scalar> {
        let data = (0..ts[0].data().len()).map(|k| ts.iter().fold(Scalar::zero(), |a, t| a.add(&t.data()[k]))).collect();
        Tensor::new(ts[0].dims().to_vec(), data).unwrap()
    }

    #[test]
    fn normal_forms() {
        let b12 = sum(&[simple(3, &[]), simple(3, &[0, 1])]);
        let nf = classify_rank2(&b12).unwrap().unwrap();
        assert_eq!((nf.kind, nf.concise.clone()), (NormalKind::B, vec![0, 1]));
        let w = sum(&[simple(3, &[0]), simple(3, &[1]), simple(3, &[2])]);
        let nf = classify_rank2(&w).unwrap().unwrap();
        assert_eq!((nf.kind, nf.concise.len()), (NormalKind::C, 3));
        let nf = classify_rank2(&unit_tensor(2, 3)).unwrap().unwrap();
        assert_eq!((nf.kind, nf.split_over_q), (NormalKind::B, Some(true)));
        // x⊗x + 2 y⊗y in a non-split form: points defined over ℚ(√2)
        let twisted = Tensor::new(
            vec![2, 2, 2],
            [1, 0, 0, 2, 0, 2, 2, 0].into_iter().map(Scalar::from_i64).collect(),
        )
        .unwrap();
        let nf = classify_rank2(&twisted).unwrap().unwrap();
        assert_eq!(nf.kind, NormalKind::B);
        assert_eq!(nf.split_over_q, Some(false));
        let perturbed = sum(&[simple(4, &[]), simple(4, &[0, 1, 2, 3]), simple(4, &[1, 3])]);
        assert_eq!(classify_rank2(&perturbed).unwrap(), None);
        let rank_one = simple(4, &[2]);
        assert_eq!(classify_rank2(&rank_one).unwrap().unwrap().concise, Vec::<usize>::new());
    }
}
