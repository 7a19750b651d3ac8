use proptest::prelude::*;
use serde_json::{json, Value};
use unres_core::json::{parse_tensor, series_tensor_to_json, JsonError};
use unres_core::segre::{unrestrict_full, Degeneration, MinorStrategy};
use unres_core::{Field, FieldKind, Scalar, Series, Tensor};

fn fixture(name: &str) -> Value {
    let p = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn fixtures_round_trip() {
    for name in ["bini.json", "order_matters.json", "small_cw.json"] {
        let v = fixture(name);
        let doc = parse_tensor(&v).unwrap();
        assert_eq!(series_tensor_to_json(&doc.tensor, doc.field), v, "{name}");
    }
    let w = fixture("wedge.json");
    let doc = parse_tensor(&w["tensor"]).unwrap();
    assert!(doc.is_constant());
    assert_eq!(series_tensor_to_json(&doc.tensor, doc.field), w["tensor"]);
}

#[test]
fn fixture_degenerations_unrestrict() {
    for name in ["bini.json", "order_matters.json"] {
        let doc = parse_tensor(&fixture(name)).unwrap();
        let d = Degeneration::new(doc.tensor).unwrap();
        let c = unrestrict_full(&d, &[0, 1, 2], &MinorStrategy::LexFirst).unwrap();
        assert!(c.restriction_identity_holds(), "{name}");
        assert!(c.limits_consistent(), "{name}");
    }
}

#[test]
fn malformed_documents_are_rejected() {
    let bad = [
        json!({ "dims": [2, 2], "entries": [{ "index": [2, 0], "value": "1" }] }),
        json!({ "dims": [2, 2], "entries": [{ "index": [0], "value": "1" }] }),
        json!({ "dims": [2, 0], "entries": [] }),
        json!({ "dims": [2], "entries": [], "colour": "red" }),
        json!({ "dims": [2], "entries": [{ "index": [0], "value": "1" }, { "index": [0], "value": "2" }] }),
        json!({ "dims": [2], "entries": [{ "index": [0], "value": "1/0" }] }),
    ];
    for v in &bad {
        let e: JsonError = parse_tensor(v).unwrap_err();
        assert!(!e.to_string().is_empty());
    }
}

fn arb_series() -> impl Strategy<Value = Series> {
    (proptest::collection::vec(-3i64..4, 0..4), 0i64..3, 1u32..3).prop_map(|(c, shift, n)| {
        let mut s = Series::from_t_coeffs(c.into_iter().map(Scalar::from_i64).collect()).shift_s(shift);
        if n > 1 {
            s = s.rescale_exponents(n);
        }
        s
    })
}

proptest! {
    #[test]
    fn random_tensors_round_trip(data in proptest::collection::vec(arb_series(), 8)) {
        let t = Tensor::new(vec![2, 2, 2], data).unwrap();
        let v = series_tensor_to_json(&t, FieldKind::Rationals);
        let doc = parse_tensor(&v).unwrap();
        prop_assert_eq!(doc.tensor, t);
    }
}
