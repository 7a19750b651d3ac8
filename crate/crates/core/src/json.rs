//! JSON documents for tensors, matrices, algebras and certificates.
//!
//! A tensor document looks like
//! `{"dims": [2, 2], "format": [1, 1], "field": "Q", "entries": [{"index": [0, 1], "value": "1/2"}]}`.
//! Values are rationals (strings or integers) or series
//! `{"num": [[exp, "c"], …], "den": [[exp, "c"], …], "N": n}` in `s = t^{1/N}`.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::algebra::{FiniteAlgebra, Functional};
use crate::field::{Field, FieldKind, Scalar};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::segre::{BorderRankStatus, UnrestrictionCertificate};
use crate::series::Series;
use crate::tensor::{multi_indices, Tensor};
use crate::veronese::{PartialCertificate, StepRecord, SymmetricUnrestriction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JsonError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("bad value at {path}: {message}")]
    Value { path: String, message: String },
}

fn schema(path: &str, message: impl Into<String>) -> JsonError {
    JsonError::Schema { path: if path.is_empty() { "/".into() } else { path.into() }, message: message.into() }
}

fn bad_value(path: &str, message: impl Into<String>) -> JsonError {
    JsonError::Value { path: path.into(), message: message.into() }
}

fn field_at<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, JsonError> {
    obj.get(key).ok_or_else(|| schema(path, format!("missing field \"{key}\"")))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, JsonError> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize, JsonError> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn usize_list(v: &Value, path: &str) -> Result<Vec<usize>, JsonError> {
    as_array(v, path)?.iter().enumerate().map(|(i, x)| as_usize(x, &format!("{path}/{i}"))).collect()
}

pub fn parse_field(v: Option<&Value>, path: &str) -> Result<FieldKind, JsonError> {
    match v {
        None => Ok(FieldKind::Rationals),
        Some(Value::String(s)) if s == "Q" => Ok(FieldKind::Rationals),
        Some(Value::Object(o)) if o.len() == 1 && o.contains_key("Fp") => {
            let p = o["Fp"].as_u64().ok_or_else(|| schema(&format!("{path}/Fp"), "expected a prime"))?;
            FieldKind::prime(p).map_err(|e| bad_value(&format!("{path}/Fp"), e.to_string()))
        }
        Some(_) => Err(schema(path, "expected \"Q\" or {\"Fp\": p}")),
    }
}

pub fn field_to_json(k: FieldKind) -> Value {
    match k {
        FieldKind::Rationals => json!("Q"),
        FieldKind::Prime(p) => json!({ "Fp": p }),
    }
}

pub fn parse_scalar(v: &Value, field: FieldKind, path: &str) -> Result<Scalar, JsonError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        _ => return Err(schema(path, "expected a rational as a string or integer")),
    };
    field.parse(&text).map_err(|e| bad_value(path, e.to_string()))
}

pub fn scalar_to_json(x: &Scalar) -> Value {
    json!(x.to_text())
}

fn parse_poly(v: &Value, field: FieldKind, path: &str) -> Result<Poly, JsonError> {
    let mut coeffs: Vec<Scalar> = Vec::new();
    for (i, term) in as_array(v, path)?.iter().enumerate() {
        let p = format!("{path}/{i}");
        let pair = as_array(term, &p)?;
        if pair.len() != 2 {
            return Err(schema(&p, "expected [exponent, coefficient]"));
        }
        let k = as_usize(&pair[0], &format!("{p}/0"))?;
        let c = parse_scalar(&pair[1], field, &format!("{p}/1"))?;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Scalar::zero());
        }
        coeffs[k] = coeffs[k].add(&c);
    }
    Ok(Poly::from_coeffs(coeffs))
}

fn poly_to_json(p: &Poly) -> Value {
    Value::Array(p.support().map(|k| json!([k, p.coeff(k).to_text()])).collect())
}

pub fn parse_series(v: &Value, field: FieldKind, path: &str) -> Result<Series, JsonError> {
    let Value::Object(o) = v else {
        return parse_scalar(v, field, path).map(Series::from_scalar);
    };
    for k in o.keys() {
        if !["num", "den", "N"].contains(&k.as_str()) {
            return Err(schema(&format!("{path}/{k}"), "unknown field"));
        }
    }
    let num = parse_poly(field_at(o, path, "num")?, field, &format!("{path}/num"))?;
    let den = match o.get("den") {
        Some(d) => parse_poly(d, field, &format!("{path}/den"))?,
        None => Poly::one(),
    };
    if den.is_zero() {
        return Err(bad_value(&format!("{path}/den"), "zero denominator"));
    }
    let n = match o.get("N") {
        Some(x) => as_usize(x, &format!("{path}/N"))?,
        None => 1,
    };
    if n == 0 || n > u32::MAX as usize {
        return Err(bad_value(&format!("{path}/N"), "N must be positive"));
    }
    Ok(Series::new(num, den, n as u32))
}

pub fn series_to_json(x: &Series) -> Value {
    let x = x.reduce_exponents();
    if x.is_polynomial() && x.numerator().degree().unwrap_or(0) == 0 {
        return scalar_to_json(&x.numerator().coeff(0));
    }
    let mut o = Map::new();
    o.insert("num".into(), poly_to_json(x.numerator()));
    if !x.denominator().is_one() {
        o.insert("den".into(), poly_to_json(x.denominator()));
    }
    if x.exp_denominator() != 1 {
        o.insert("N".into(), json!(x.exp_denominator()));
    }
    Value::Object(o)
}

/// A parsed tensor document.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorDocument {
    pub field: FieldKind,
    pub tensor: Tensor<Series>,
}

impl TensorDocument {
    pub fn is_constant(&self) -> bool {
        self.tensor.data().iter().all(|x| x.is_polynomial() && x.numerator().degree().unwrap_or(0) == 0)
    }

    /// The tensor when every entry is a constant.
    pub fn constant(&self) -> Option<Tensor<Scalar>> {
        self.is_constant().then(|| self.tensor.map(|x| x.numerator().coeff(0)))
    }
}

pub fn parse_tensor(v: &Value) -> Result<TensorDocument, JsonError> {
    let o = as_object(v, "")?;
    for k in o.keys() {
        if !["dims", "format", "field", "entries"].contains(&k.as_str()) {
            return Err(schema(&format!("/{k}"), "unknown field"));
        }
    }
    let dims = usize_list(field_at(o, "", "dims")?, "/dims")?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(bad_value("/dims", "dimensions must be positive"));
    }
    let format = match o.get("format") {
        Some(f) => usize_list(f, "/format")?,
        None => vec![1; dims.len()],
    };
    let field = parse_field(o.get("field"), "/field")?;
    let mut data = vec![Series::zero(); dims.iter().product()];
    let mut seen = BTreeSet::new();
    for (n, entry) in as_array(field_at(o, "", "entries")?, "/entries")?.iter().enumerate() {
        let p = format!("/entries/{n}");
        let e = as_object(entry, &p)?;
        let index = usize_list(field_at(e, &p, "index")?, &format!("{p}/index"))?;
        if index.len() != dims.len() {
            return Err(schema(&format!("{p}/index"), format!("expected {} indices", dims.len())));
        }
        if let Some(a) = (0..dims.len()).find(|&a| index[a] >= dims[a]) {
            return Err(schema(&format!("{p}/index/{a}"), format!("index {} out of range {}", index[a], dims[a])));
        }
        if !seen.insert(index.clone()) {
            return Err(schema(&format!("{p}/index"), "duplicate index"));
        }
        let value = parse_series(field_at(e, &p, "value")?, field, &format!("{p}/value"))?;
        let off = index.iter().zip(&dims).fold(0, |acc, (i, m)| acc * m + i);
        data[off] = value;
    }
    let tensor = Tensor::with_format(dims, format, data).map_err(|e| schema("/format", e.to_string()))?;
    Ok(TensorDocument { field, tensor })
}

fn entries_json<E: Field>(t: &Tensor<E>, value: impl Fn(&E) -> Value) -> Value {
    Value::Array(
        multi_indices(t.dims())
            .zip(t.data())
            .filter(|(_, x)| !x.is_zero())
            .map(|(ix, x)| json!({ "index": ix, "value": value(x) }))
            .collect(),
    )
}

fn field_of_scalars<'a>(xs: impl Iterator<Item = &'a Scalar>) -> FieldKind {
    xs.into_iter().find_map(|x| x.kind()).unwrap_or(FieldKind::Rationals)
}

pub fn tensor_to_json(t: &Tensor<Scalar>) -> Value {
    json!({
        "dims": t.dims(),
        "format": t.format(),
        "field": field_to_json(field_of_scalars(t.data().iter())),
        "entries": entries_json(t, scalar_to_json),
    })
}

pub fn series_tensor_to_json(t: &Tensor<Series>, field: FieldKind) -> Value {
    json!({
        "dims": t.dims(),
        "format": t.format(),
        "field": field_to_json(field),
        "entries": entries_json(t, series_to_json),
    })
}

pub fn parse_matrix(v: &Value, field: FieldKind, path: &str) -> Result<Matrix<Scalar>, JsonError> {
    let rows = as_array(v, path)?;
    let parsed: Vec<Vec<Scalar>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let p = format!("{path}/{i}");
            as_array(r, &p)?.iter().enumerate().map(|(j, x)| parse_scalar(x, field, &format!("{p}/{j}"))).collect()
        })
        .collect::<Result<_, _>>()?;
    let cols = parsed.first().map_or(0, |r| r.len());
    if parsed.iter().any(|r| r.len() != cols) {
        return Err(schema(path, "rows have different lengths"));
    }
    Ok(if parsed.is_empty() { Matrix::zeros(0, 0) } else { Matrix::from_rows(parsed) })
}

pub fn matrix_to_json(m: &Matrix<Scalar>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(scalar_to_json).collect())).collect())
}

pub fn series_matrix_to_json(m: &Matrix<Series>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(series_to_json).collect())).collect())
}

fn flatten_numbers<'a>(v: &'a Value, path: String, out: &mut Vec<(String, &'a Value)>) {
    match v {
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten_numbers(x, format!("{path}/{i}"), out);
            }
        }
        _ => out.push((path, v)),
    }
}

/// `{"dim": m, "mult": [...], "unit": [...], "field": …}`; `mult` is either a
/// flat list of `m³` constants or nested `m × m × m`. A string is read as
/// `k[x, y]/(…)`.
pub fn parse_algebra(v: &Value) -> Result<FiniteAlgebra, JsonError> {
    if let Value::String(s) = v {
        return crate::algebra::parse_algebra(s).map_err(|e| bad_value("", e.to_string()));
    }
    let o = as_object(v, "")?;
    let field = parse_field(o.get("field"), "/field")?;
    let dim = as_usize(field_at(o, "", "dim")?, "/dim")?;
    let mut flat = Vec::new();
    flatten_numbers(field_at(o, "", "mult")?, "/mult".into(), &mut flat);
    if flat.len() != dim * dim * dim {
        return Err(schema("/mult", format!("expected {} constants, found {}", dim * dim * dim, flat.len())));
    }
    let mult = flat.iter().map(|(p, x)| parse_scalar(x, field, p)).collect::<Result<Vec<_>, _>>()?;
    let unit = as_array(field_at(o, "", "unit")?, "/unit")?
        .iter()
        .enumerate()
        .map(|(i, x)| parse_scalar(x, field, &format!("/unit/{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    FiniteAlgebra::new(dim, mult, unit).map_err(|e| bad_value("", e.to_string()))
}

pub fn algebra_to_json(a: &FiniteAlgebra) -> Value {
    let m = a.dim();
    let mult: Vec<Value> = (0..m)
        .map(|i| {
            Value::Array(
                (0..m).map(|j| Value::Array((0..m).map(|k| scalar_to_json(a.structure(i, j, k))).collect())).collect(),
            )
        })
        .collect();
    json!({
        "dim": m,
        "field": field_to_json(a.field()),
        "mult": mult,
        "unit": a.unit().iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

pub fn parse_functional(v: &Value, field: FieldKind, path: &str) -> Result<Functional, JsonError> {
    let xs = as_array(v, path)?;
    Ok(Functional(
        xs.iter().enumerate().map(|(i, x)| parse_scalar(x, field, &format!("{path}/{i}"))).collect::<Result<_, _>>()?,
    ))
}

pub fn functional_to_json(f: &Functional) -> Value {
    Value::Array(f.0.iter().map(scalar_to_json).collect())
}

pub fn border_rank_status_to_json(s: &BorderRankStatus) -> Value {
    json!(match s {
        BorderRankStatus::NotChecked => "not_checked",
        BorderRankStatus::MinimalBorderRank => "minimal",
        BorderRankStatus::NotMinimal => "not_minimal",
        BorderRankStatus::CentroidAbundantOnly => "centroid_abundant_only",
    })
}

fn rational_to_json(r: &num_rational::Rational64) -> Value {
    json!(if *r.denom() == 1 { r.numer().to_string() } else { format!("{}/{}", r.numer(), r.denom()) })
}

pub fn step_to_json(s: &StepRecord) -> Value {
    json!({
        "variable": s.variable,
        "lambda": s.lambda.iter().map(series_to_json).collect::<Vec<_>>(),
        "e": s.e.iter().map(|x| x.as_ref().map_or(json!("inf"), rational_to_json)).collect::<Vec<_>>(),
        "weight": rational_to_json(&s.weight),
        "remainder_valuation": rational_to_json(&s.remainder_valuation),
        "loop_iterations": s.loop_iterations,
    })
}

pub fn segre_certificate_to_json(c: &UnrestrictionCertificate, field: FieldKind) -> Value {
    json!({
        "kind": "segre",
        "order": c.order,
        "limit": tensor_to_json(&c.limit),
        "limit_pencil": (c.limit.order() == 3).then(|| c.limit.pencil()),
        "unrestriction": series_tensor_to_json(c.unrestriction_t.tensor(), field),
        "maps": c.maps_t.iter().map(series_matrix_to_json).collect::<Vec<_>>(),
        "maps_limit": c.maps_limit.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "minor_choices": c.minor_choices,
        "restriction_identity": c.restriction_identity_holds(),
        "limit_concise": c.limit.concise_pattern(),
        "border_rank_status": border_rank_status_to_json(&c.border_rank_status),
    })
}

pub fn symmetric_to_json(u: &SymmetricUnrestriction) -> Value {
    json!({
        "kind": "veronese",
        "limit": u.limit.to_string(),
        "scale": series_to_json(&u.scale),
        "output": u.output_t.to_string(),
        "map": series_matrix_to_json(&u.map_t),
        "map_limit": matrix_to_json(&u.map_limit),
        "steps": u.steps.iter().map(step_to_json).collect::<Vec<_>>(),
    })
}

pub fn partial_certificate_to_json(c: &PartialCertificate, field: FieldKind) -> Value {
    json!({
        "kind": "partial",
        "order": c.order,
        "scale": series_to_json(&c.scale),
        "limit": tensor_to_json(&c.limit),
        "unrestriction": series_tensor_to_json(&c.unrestriction_t, field),
        "maps": c.maps_t.iter().map(series_matrix_to_json).collect::<Vec<_>>(),
        "maps_limit": c.maps_limit.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "reexpanded": c.reexpanded,
        "restriction_identity": c.restriction_identity_holds(),
        "steps": c.steps.iter().map(|s| s.iter().map(step_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "border_rank_status": border_rank_status_to_json(&c.border_rank_status),
    })
}
