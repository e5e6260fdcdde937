use polylab_web::{cheeger, flow_bound, sample_graph};
use serde_json::Value;

#[test]
fn full_square_graph() {
    let v: Value = serde_json::from_str(&sample_graph(2, 1.0, 0, 1).unwrap()).unwrap();
    assert_eq!(v["vertices"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(v["edges"].as_array().unwrap().len(), 4);
}

#[test]
fn cheeger_of_full_cube_is_one() {
    let v: Value = serde_json::from_str(&cheeger(3, 1.0, 0).unwrap()).unwrap();
    assert_eq!(v["cheeger"], "1");
    assert_eq!(v["witness"].as_array().unwrap().len(), 4);
    assert!(cheeger(6, 1.0, 0).is_err());
}

#[test]
fn flow_bound_is_an_estimate() {
    let v: Value = serde_json::from_str(&flow_bound(10, 0.7, 3, 300).unwrap()).unwrap();
    assert_eq!(v["bound_kind"], "estimate");
    assert_eq!(v["attempted"], 300);
}

#[test]
fn oversized_dimension_rejected() {
    assert!(sample_graph(13, 0.5, 0, 1).is_err());
}
