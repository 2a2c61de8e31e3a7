use caplaw_demo::{conjugate_curve_json, slln_paths_json, tail_curve_json};
use serde_json::Value;

#[test]
fn conjugate_curve_matches_closed_form() {
    let v: Value =
        serde_json::from_str(&conjugate_curve_json(3.0, 2.0, 0.5, 6.0, 25).unwrap()).unwrap();
    assert_eq!(v["q"].as_f64().unwrap(), 1.5);
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 25);
    for pt in points {
        let d = pt["analytic"].as_f64().unwrap() - pt["numeric"].as_f64().unwrap();
        assert!(d.abs() < 1e-6);
    }
}

#[test]
fn conjugate_curve_rejects_bad_input() {
    assert!(conjugate_curve_json(1.0, 1.0, 1.0, 5.0, 10)
        .unwrap_err()
        .contains("dual index"));
    assert!(conjugate_curve_json(2.0, 1.0, 1.0, 5.0, 1).is_err());
}

#[test]
fn tail_curve_stays_below_bound() {
    let v: Value = serde_json::from_str(&tail_curve_json(1.0, 3.0, 6, 50_000, 1).unwrap()).unwrap();
    for pt in v.as_array().unwrap() {
        let eps = pt["epsilon"].as_f64().unwrap();
        assert!((pt["bound"].as_f64().unwrap() - 2.0 * (-eps * eps / 2.0).exp()).abs() < 1e-12);
        assert!(pt["empirical"].as_f64().unwrap() <= pt["bound"].as_f64().unwrap());
    }
}

#[test]
fn slln_paths_are_thinned_and_deterministic() {
    let a = slln_paths_json(0.3, 1.0, 0.1, 5_000, 4, 11).unwrap();
    assert_eq!(a, slln_paths_json(0.3, 1.0, 0.1, 5_000, 4, 11).unwrap());
    let v: Value = serde_json::from_str(&a).unwrap();
    let n = v["n"].as_array().unwrap();
    assert_eq!(n[0].as_u64(), Some(1));
    assert_eq!(n.last().unwrap().as_u64(), Some(5_000));
    let models = v["models"].as_array().unwrap();
    assert_eq!(models.len(), 3);
    assert_eq!(models[0]["paths"][0].as_array().unwrap().len(), n.len());
    assert!((v["band"][1].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!(slln_paths_json(0.3, 1.0, 0.1, 1_000_000, 100, 1).is_err());
}
