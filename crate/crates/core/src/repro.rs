//! Named regression examples, each checked by a list of exact assertions.

use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{
    evaluation_tensor, gorenstein_quotient, is_gorenstein, multiplication_tensor, FiniteAlgebra, Functional,
};
use crate::analysis::{centroid, is_jointly_spanning, is_minimal_border_rank, is_regular, one_generic_witness};
use crate::field::{Field, FieldKind, Scalar};
use crate::hompoly::HomPoly;
use crate::json::{parse_matrix, parse_tensor, series_tensor_to_json};
use crate::matrix::Matrix;
use crate::segre::{unrestrict_default, unrestrict_full, Degeneration, MinorStrategy};
use crate::series::Series;
use crate::tensor::Tensor;
use crate::veronese::unrestrict_symmetric;

pub const EXAMPLES: &[&str] = &["smallCW", "order_matters", "bini", "wedge", "joint_surjectivity", "eps3_gallery"];

const ORDER_MATTERS_JSON: &str = include_str!("../fixtures/order_matters.json");
const BINI_JSON: &str = include_str!("../fixtures/bini.json");
const WEDGE_JSON: &str = include_str!("../fixtures/wedge.json");
const SMALL_CW_JSON: &str = include_str!("../fixtures/small_cw.json");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown example `{0}`")]
pub struct UnknownExample(pub String);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReproReport {
    pub example: String,
    pub assertions: Vec<Assertion>,
}

impl ReproReport {
    fn new(example: &str) -> Self {
        ReproReport { example: example.to_string(), assertions: Vec::new() }
    }

    fn check(&mut self, name: &str, expected: impl ToString, actual: impl ToString) {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        self.assertions.push(Assertion { name: name.into(), passed: expected == actual, expected, actual });
    }

    fn check_true(&mut self, name: &str, actual: bool) {
        self.check(name, true, actual);
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn to_json(&self) -> Value {
        let assertions: Vec<Value> = self
            .assertions
            .iter()
            .map(|a| {
                let mut v = json!({ "name": a.name, "passed": a.passed });
                if !a.passed {
                    v["diff"] = json!({ "expected": a.expected, "actual": a.actual });
                }
                v
            })
            .collect();
        json!({ "example": self.example, "passed": self.passed(), "assertions": assertions })
    }
}

pub fn run_reproduction(name: &str) -> Result<ReproReport, UnknownExample> {
    match name {
        "smallCW" => Ok(small_cw_report()),
        "order_matters" => Ok(order_matters_report()),
        "bini" => Ok(bini_report()),
        "wedge" => Ok(wedge_report()),
        "joint_surjectivity" => Ok(joint_surjectivity_report()),
        "eps3_gallery" => Ok(eps3_gallery_report()),
        other => Err(UnknownExample(other.to_string())),
    }
}

pub fn run_all() -> Vec<ReproReport> {
    EXAMPLES.iter().map(|n| run_reproduction(n).unwrap()).collect()
}

// ---------------------------------------------------------------------------
// builders

fn t_pow(c: i64, k: i64) -> Series {
    Series::monomial(Scalar::from_i64(c), k, 1)
}

/// Parses `[-][t[^k]]x<n>` terms joined by `+`/`-`, e.g. `-t^2x1 + tx3`.
fn linear_form(text: &str) -> Vec<(usize, Series)> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let sign = if let Some(r) = rest.strip_prefix('-') {
            rest = r;
            -1
        } else {
            rest = rest.strip_prefix('+').unwrap_or(rest);
            1
        };
        let mut k = 0;
        if let Some(r) = rest.strip_prefix('t') {
            rest = r;
            k = 1;
            if let Some(r) = rest.strip_prefix('^') {
                let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
                k = r[..end].parse().expect("exponent");
                rest = &r[end..];
            }
        }
        rest = rest.strip_prefix('x').expect("variable");
        let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let var: usize = rest[..end].parse().expect("variable index");
        rest = &rest[end..];
        out.push((var - 1, t_pow(sign, k)));
    }
    out
}

/// An order-three tensor from a matrix of linear forms (variables on axis 0).
fn pencil(nvars: usize, rows: &[&[&str]]) -> Tensor<Series> {
    let (r, c) = (rows.len(), rows[0].len());
    let mut t: Tensor<Series> = Tensor::zeros(&[nvars, r, c]);
    for (a, row) in rows.iter().enumerate() {
        for (b, cell) in row.iter().enumerate() {
            if *cell == "0" {
                continue;
            }
            for (k, coeff) in linear_form(cell) {
                let cur = t.get(&[k, a, b]).add(&coeff);
                t.set(&[k, a, b], cur);
            }
        }
    }
    t
}

fn vector(n: usize, terms: &[(usize, i64, i64)]) -> Vec<Series> {
    let mut v = vec![Series::zero(); n];
    for &(i, c, k) in terms {
        v[i - 1] = v[i - 1].add(&t_pow(c, k));
    }
    v
}

fn add_rank_one(t: &mut Tensor<Series>, a: &[Series], b: &[Series], c: &[Series]) {
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            let xy = x.mul(y);
            for (k, z) in c.iter().enumerate().filter(|(_, z)| !z.is_zero()) {
                let v = t.get(&[i, j, k]).add(&xy.mul(z));
                t.set(&[i, j, k], v);
            }
        }
    }
}

/// `[[x1, t²x2], [t x2, t x1]]`.
pub fn order_matters_tensor() -> Tensor<Series> {
    pencil(2, &[&["x1", "t^2x2"], &["tx2", "tx1"]])
}

/// A border rank five degeneration of a 5×5×5 tensor, as a sum of five
/// rank-one terms `(a) ⊗ (b) ⊗ (c)`.
pub fn bini_tensor() -> Tensor<Series> {
    let v = |terms: &[(usize, i64, i64)]| vector(5, terms);
    let mut t = Tensor::zeros(&[5, 5, 5]);
    add_rank_one(&mut t, &v(&[(1, 1, 1), (3, 1, 0)]), &v(&[(2, 1, 0)]), &v(&[(2, 1, 0), (4, 1, 1)]));
    add_rank_one(&mut t, &v(&[(1, 1, 1), (2, 1, 0)]), &v(&[(1, 1, 0), (3, 1, 1)]), &v(&[(1, 1, 0)]));
    add_rank_one(&mut t, &v(&[(2, 1, 0), (3, 1, 0)]), &v(&[(1, 1, 0), (4, 1, 1)]), &v(&[(2, 1, 0), (3, 1, 1)]));
    add_rank_one(
        &mut t,
        &v(&[(3, -1, 0), (4, 1, 2)]),
        &v(&[(1, 1, 0), (2, 1, 0), (4, 1, 1), (5, 1, 2)]),
        &v(&[(2, 1, 0)]),
    );
    add_rank_one(
        &mut t,
        &v(&[(2, -1, 0), (5, 1, 2)]),
        &v(&[(1, 1, 0)]),
        &v(&[(1, 1, 0), (2, 1, 0), (3, 1, 1), (5, 1, 2)]),
    );
    t
}

/// A known concise unrestriction of the Bini degeneration, with maps taking it
/// back to `t⁻¹` times the input.
fn bini_printed() -> (Tensor<Series>, Vec<Matrix<Series>>) {
    let tp = pencil(
        5,
        &[
            &["x1", "x2", "x3", "0", "x5"],
            &["0", "-tx2+x3", "0", "0", "0"],
            &["0", "x4", "0", "-tx2+x3+tx4", "0"],
            &["x5", "0", "0", "0", "tx5"],
            &["0", "-tx1+tx2+x5", "-t^2x1+tx3+tx5", "0", "0"],
        ],
    );
    let m = |rows: &[[(i64, i64); 5]]| {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&(c, k)| t_pow(c, k)).collect()).collect())
    };
    const Z: (i64, i64) = (0, 0);
    const O: (i64, i64) = (1, 0);
    const T: (i64, i64) = (1, 1);
    let a = m(&[[O, Z, Z, O, T], [Z, Z, Z, Z, O], [Z, Z, O, Z, Z], [Z, T, Z, T, Z], [T, T, (1, 2), Z, Z]]);
    let b = m(&[[O, Z, Z, Z, Z], [Z, Z, O, Z, Z], [Z, Z, Z, O, Z], [Z, Z, Z, Z, O], [Z, (-1, 1), Z, Z, Z]]);
    let c = m(&[[O, Z, Z, Z, Z], [Z, O, Z, Z, Z], [Z, Z, O, Z, Z], [Z, Z, Z, O, Z], [(1, 2), Z, Z, Z, (-1, 1)]]);
    (tp, vec![a, b, c])
}

/// A 5×5×5 pencil containing `e1 ∧ e2 ∧ e3` in its top-left corner.
pub fn wedge_tensor() -> Tensor<Scalar> {
    pencil(
        5,
        &[
            &["x5", "x3+x4", "-x2", "x1", "x2"],
            &["-x3+x4", "0", "x1", "0", "0"],
            &["x2", "-x1", "0", "0", "0"],
            &["x1", "0", "0", "0", "0"],
            &["x2", "0", "0", "0", "0"],
        ],
    )
    .map(|x| x.limit_at_zero().unwrap())
}

/// `e1 ∧ e2 ∧ e3` in `𝕜³ ⊗ 𝕜³ ⊗ 𝕜³`.
pub fn wedge_target() -> Tensor<Scalar> {
    pencil(3, &[&["0", "x3", "-x2"], &["-x3", "0", "x1"], &["x2", "-x1", "0"]]).map(|x| x.limit_at_zero().unwrap())
}

/// Projection onto the first three basis vectors, on every axis.
pub fn wedge_maps() -> Vec<Matrix<Scalar>> {
    let p = Matrix::from_fn(3, 5, |i, j| if i == j { Scalar::one() } else { Scalar::zero() });
    vec![p.clone(), p.clone(), p]
}

/// `(x1 + t x2 + t x3)³ − (x1 + t x2)³ − (x1 + t x3)³ + (x1 + tⁿ x4)³`.
pub fn small_cw_poly(n: i64) -> HomPoly<Series> {
    let cube = |terms: &[(usize, i64)]| {
        let l = HomPoly::linear(&vector(4, &terms.iter().map(|&(i, k)| (i, 1, k)).collect::<Vec<_>>()));
        l.mul(&l).mul(&l)
    };
    cube(&[(1, 0), (2, 1), (3, 1)])
        .sub(&cube(&[(1, 0), (2, 1)]))
        .sub(&cube(&[(1, 0), (3, 1)]))
        .add(&cube(&[(1, 0), (4, n)]))
}

pub const SMALL_CW_EXPONENT: i64 = 4;

// ---------------------------------------------------------------------------
// fixtures

fn fixture(text: &str) -> Value {
    serde_json::from_str(text).expect("shipped fixtures are valid JSON")
}

fn fixture_tensor(text: &str) -> Tensor<Series> {
    parse_tensor(&fixture(text)).expect("shipped fixtures parse").tensor
}

pub fn order_matters_fixture() -> Tensor<Series> {
    fixture_tensor(ORDER_MATTERS_JSON)
}

pub fn bini_fixture() -> Tensor<Series> {
    fixture_tensor(BINI_JSON)
}

pub fn small_cw_fixture() -> HomPoly<Series> {
    HomPoly::from_tensor(&fixture_tensor(SMALL_CW_JSON))
}

/// The wedge pencil, the frozen maps and the expected restriction.
pub fn wedge_fixture() -> (Tensor<Scalar>, Vec<Matrix<Scalar>>, Tensor<Scalar>) {
    let v = fixture(WEDGE_JSON);
    let constant = |x: &Value| parse_tensor(x).unwrap().constant().expect("constant tensor");
    let maps = v["maps"]
        .as_array()
        .unwrap()
        .iter()
        .enumerate()
        .map(|(i, m)| parse_matrix(m, FieldKind::Rationals, &format!("/maps/{i}")).unwrap())
        .collect();
    (constant(&v["tensor"]), maps, constant(&v["restriction"]))
}

/// Fixture documents regenerated from the builders.
pub fn fixture_documents() -> Vec<(&'static str, Value)> {
    let q = FieldKind::Rationals;
    let wedge = json!({
        "tensor": series_tensor_to_json(&wedge_tensor().to_series(), q),
        "maps": wedge_maps().iter().map(crate::json::matrix_to_json).collect::<Vec<_>>(),
        "restriction": series_tensor_to_json(&wedge_target().to_series(), q),
    });
    vec![
        ("order_matters.json", series_tensor_to_json(&order_matters_tensor(), q)),
        ("bini.json", series_tensor_to_json(&bini_tensor(), q)),
        ("wedge.json", wedge),
        ("small_cw.json", series_tensor_to_json(&small_cw_poly(SMALL_CW_EXPONENT).to_tensor(), q)),
    ]
}

// ---------------------------------------------------------------------------
// reports

fn centroid_dim(t: &Tensor<Scalar>) -> String {
    centroid(t).map(|c| c.dim().to_string()).unwrap_or_else(|e| e.to_string())
}

fn minimal_border_rank(t: &Tensor<Scalar>) -> String {
    is_minimal_border_rank(t).map(|b| b.to_string()).unwrap_or_else(|e| e.to_string())
}

fn small_cw_report() -> ReproReport {
    let mut r = ReproReport::new("smallCW");
    let f = small_cw_fixture();
    r.check("fixture matches builder", small_cw_poly(SMALL_CW_EXPONENT), &f);
    let run = match unrestrict_symmetric(&f) {
        Ok(run) => run,
        Err(e) => {
            r.check("unrestriction succeeds", "ok", e);
            return r;
        }
    };
    let expected = HomPoly::parse("x1*x2*x3 + 1/2*x4*x1^2", 4).unwrap();
    r.check("limit", &expected, &run.limit);
    r.check("restriction identity", &f, run.output_t.substitute(&run.map_t).scale(&run.scale));
    r.check("minimal border rank of the limit", true, minimal_border_rank(&run.limit.to_tensor().as_segre()));
    r
}

fn order_matters_report() -> ReproReport {
    let mut r = ReproReport::new("order_matters");
    let t = order_matters_fixture();
    r.check("fixture matches builder", order_matters_tensor().pencil(), t.pencil());
    let d = Degeneration::new(t).unwrap();
    let cases = [("column-first", [2, 0, 1], "[[x1, x2], [x2, x1]]"), ("row-first", [1, 2, 0], "[[x1, 0], [x2, x1]]")];
    for (label, order, expected) in cases {
        let cert = match unrestrict_full(&d, &order, &MinorStrategy::LexFirst) {
            Ok(c) => c,
            Err(e) => {
                r.check(&format!("{label} unrestriction succeeds"), "ok", e);
                continue;
            }
        };
        r.check(&format!("{label} limit"), expected, cert.limit.pencil());
        r.check_true(&format!("{label} restriction identity"), cert.restriction_identity_holds());
        match centroid(&cert.limit) {
            Ok(c) => {
                let disc = c.discriminant().map(|x| x.to_string()).unwrap_or_else(|| "undefined".into());
                if label == "column-first" {
                    r.check(&format!("{label} centroid is split"), true, c.dim() == 2 && disc != "0");
                } else {
                    r.check(&format!("{label} centroid discriminant"), "0", disc);
                    r.check(&format!("{label} centroid radical series"), "Some([1, 0])", format!("{:?}", c.radical_series()));
                }
            }
            Err(e) => r.check(&format!("{label} centroid"), "ok", e),
        }
    }
    r
}

fn bini_report() -> ReproReport {
    let mut r = ReproReport::new("bini");
    let t = bini_fixture();
    r.check_true("fixture matches builder", t == bini_tensor());
    let (tp, maps) = bini_printed();
    let back = tp.restrict(&maps).map(|x| x.scale(&t_pow(1, 1)));
    r.check_true("printed maps send the printed unrestriction to the input up to t", back.as_ref() == Ok(&t));
    let d = Degeneration::new(t).unwrap();
    match unrestrict_default(&d) {
        Ok(cert) => {
            r.check_true("restriction identity", cert.restriction_identity_holds());
            r.check_true("limits consistent", cert.limits_consistent());
            r.check("concise limit", "[true, true, true]", format!("{:?}", cert.limit.concise_pattern()));
            r.check("centroid dimension", 5, centroid_dim(&cert.limit));
            r.check("minimal border rank", true, minimal_border_rank(&cert.limit));
        }
        Err(e) => r.check("unrestriction succeeds", "ok", e),
    }
    r
}

fn wedge_report() -> ReproReport {
    let mut r = ReproReport::new("wedge");
    let (tp, maps, target) = wedge_fixture();
    r.check("fixture matches builder", wedge_tensor().pencil(), tp.pencil());
    r.check("restriction", target.pencil(), tp.restrict(&maps).map(|x| x.pencil()).unwrap_or_else(|e| e.to_string()));
    r.check("restriction is the wedge", wedge_target().pencil(), target.pencil());
    r.check("concise", "[true, true, true]", format!("{:?}", tp.concise_pattern()));
    r.check("centroid dimension", 5, centroid_dim(&tp));
    r.check("minimal border rank", true, minimal_border_rank(&tp));
    r
}

/// Inclusion of `span{1, x}` into `𝕜[x]/(x⁵)`, as a restriction `𝒜^∨ → 𝕜²`.
fn linear_part(n: usize) -> Matrix<Scalar> {
    Matrix::from_fn(2, n, |i, j| if i == j { Scalar::one() } else { Scalar::zero() })
}

fn joint_surjectivity_report() -> ReproReport {
    let mut r = ReproReport::new("joint_surjectivity");
    let a = FiniteAlgebra::truncated(5);
    let phi = linear_part(5);
    r.check_true("inclusion is regular", is_regular(&phi, &a));
    r.check("three copies jointly spanning", false, is_jointly_spanning(&vec![phi.clone(); 3], &a));
    r.check("four copies jointly spanning", true, is_jointly_spanning(&vec![phi.clone(); 4], &a));
    let eps = Functional::basis_dual(5, 4);
    let e = evaluation_tensor(&a, &eps, 4);
    let maps = vec![Matrix::identity(5), phi.clone(), phi.clone(), phi];
    match e.restrict(&maps) {
        Ok(x) => r.check("restriction concise on the free coordinate", false, x.is_concise(0)),
        Err(err) => r.check("restriction", "ok", err),
    }
    r
}

fn eps3_gallery_report() -> ReproReport {
    let mut r = ReproReport::new("eps3_gallery");
    let a = FiniteAlgebra::truncated(3);
    let q = |s: &str, n| HomPoly::<Scalar>::parse(s, n).unwrap().to_tensor().as_segre();
    let three = Scalar::from_i64(3);

    let e = evaluation_tensor(&a, &Functional::basis_dual(3, 2), 3);
    let maps = vec![Matrix::identity(3).scale(&three), Matrix::identity(3), Matrix::identity(3)];
    let target = q("x1^2*x3 + x1*x2^2", 3);
    r.check_true("dual generator gives x^2 z + x y^2", target.restrict(&maps).as_ref() == Ok(&e));

    for (k, poly, nvars) in [(1, "3*x1^2*x2", 2), (0, "x1^3", 1)] {
        let eps = Functional::basis_dual(3, k);
        let quot = gorenstein_quotient(&a, &eps);
        let small = evaluation_tensor(&quot.algebra, &quot.eps, 3);
        let label = format!("quotient by functional {k}");
        r.check(&format!("{label} dimension"), nvars, quot.algebra.dim());
        r.check_true(
            &format!("{label} pulls back"),
            small.restrict(&quot.pullback_maps(3)).as_ref() == Ok(&evaluation_tensor(&a, &eps, 3)),
        );
        if small.dims()[0] == nvars {
            let f = HomPoly::from_tensor(&small);
            let expected = HomPoly::<Scalar>::parse(poly, nvars).unwrap();
            r.check(&format!("{label} polynomial"), expected, f);
        }
    }

    let b = crate::algebra::parse_algebra("k[x,y]/(x^2, x*y, y^2)").unwrap();
    r.check("square of the maximal ideal is Gorenstein", false, matches!(is_gorenstein(&b, 0), Ok(Some(_))));
    let m = multiplication_tensor(&b, 3);
    let generic: Vec<String> = (0..3)
        .map(|i| match one_generic_witness(&m, i, 0) {
            Ok(w) => w.is_some().to_string(),
            Err(e) => e.to_string(),
        })
        .collect();
    r.check("multiplication tensor 1-generic per coordinate", "true, true, false", generic.join(", "));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_current() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/");
        for (name, doc) in fixture_documents() {
            if std::env::var_os("UNRES_WRITE_FIXTURES").is_some() {
                std::fs::write(format!("{dir}{name}"), serde_json::to_string_pretty(&doc).unwrap() + "\n").unwrap();
            }
            let shipped: Value = serde_json::from_str(&std::fs::read_to_string(format!("{dir}{name}")).unwrap()).unwrap();
            assert_eq!(shipped, doc, "{name}");
        }
    }

    #[test]
    fn linear_forms() {
        let f = linear_form("-t^2x1 + tx3+x5");
        assert_eq!(f.len(), 3);
        assert_eq!(f[0], (0, t_pow(-1, 2)));
        assert_eq!(f[1], (2, t_pow(1, 1)));
        assert_eq!(f[2], (4, t_pow(1, 0)));
    }

    #[test]
    fn every_example_passes() {
        for rep in run_all() {
            for a in &rep.assertions {
                assert!(a.passed, "{}: {} expected {} got {}", rep.example, a.name, a.expected, a.actual);
            }
        }
    }

    #[test]
    fn unknown_example() {
        assert_eq!(run_reproduction("nope"), Err(UnknownExample("nope".into())));
    }

    #[test]
    fn failures_carry_a_diff() {
        let mut r = ReproReport::new("x");
        r.check("a", 1, 2);
        let v = r.to_json();
        assert_eq!(v["passed"], false);
        assert_eq!(v["assertions"][0]["diff"]["actual"], "2");
    }
}
