use serde_json::Value;
use tower_primes_wasm::{growth, matrix, witness, MAX_DEMO_CEILING};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn matrix_marks_cells_above_the_ceiling() {
    let m = parse(matrix(3, 4, 100).unwrap());
    assert_eq!(m["rows"][0], serde_json::json!([1, 2, 3, 5, 11]));
    assert_eq!(m["rows"][2][3], 31);
    assert_eq!(m["rows"][2][4], Value::Null);
    assert!(matrix(0, 1, 100).is_err());
    assert!(matrix(1, 1, MAX_DEMO_CEILING + 1).is_err());
}

#[test]
fn growth_along_the_first_tower() {
    let g = parse(growth("tower:1", 1000).unwrap());
    assert_eq!(g["members"], serde_json::json!([2, 3, 5, 11, 31, 127, 709]));
    assert_eq!(g["consecutive_ratios"][0], serde_json::json!([1, 1.5]));
    assert_eq!(g["log_growth"].as_array().unwrap().len(), 6);
    assert!(growth("nested:1", 1000).is_err());
    assert!(growth("bogus", 1000).is_err());
}

#[test]
fn witness_finds_exact_unit_ratio() {
    let w = parse(witness(2, 1.0, 0.0, 100).unwrap());
    assert_eq!((w["a"].as_u64(), w["b"].as_u64(), w["sufficient"].as_bool()), (Some(3), Some(3), Some(true)));
    let w = parse(witness(1, 0.5, 1e-3, 100_000).unwrap());
    assert_eq!(w["sufficient"], true);
}
