use morreylab_wasm::{counterexample, envelope, norm};
use serde_json::Value;

const CHI: &str = r#"{"breakpoints":[0,1],"values":[1]}"#;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn envelope_matches_closed_form() {
    let v = parse(&envelope(CHI, -2.0, 3.0, 11).unwrap());
    let xs: Vec<f64> = v["x"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(xs.len(), 11);
    for (i, &x) in xs.iter().enumerate() {
        let want = if x < 0.0 { 1.0 / (1.0 - x) } else if x <= 1.0 { 1.0 } else { 1.0 / x };
        assert!((v["mf"][i].as_f64().unwrap() - want).abs() < 1e-12, "x = {x}");
        let (lo, hi) = (v["m2_lo"][i].as_f64().unwrap(), v["m2_hi"][i].as_f64().unwrap());
        // M²f ≥ Mf, so the upper side must clear the closed form.
        assert!(lo <= hi && hi >= want * (1.0 - 1e-12), "x = {x}: [{lo}, {hi}]");
    }
}

#[test]
fn envelope_rejects_bad_windows() {
    assert!(envelope(CHI, 1.0, 1.0, 10).is_err());
    assert!(envelope(CHI, 0.0, 1.0, 1).is_err());
    assert!(envelope("{", 0.0, 1.0, 10).is_err());
    let z = parse(&envelope(r#"{"breakpoints":[],"values":[]}"#, 0.0, 1.0, 3).unwrap());
    assert!(z["m2_hi"].as_array().unwrap().iter().all(|v| v.as_f64() == Some(0.0)));
}

#[test]
fn norm_kinds() {
    let m = parse(&norm(r#"{"breakpoints":[0,4],"values":[1]}"#, "morrey", 2.0, 0.5).unwrap());
    let s = 2f64.sqrt();
    assert!(m["value"].as_f64().unwrap() <= s * (1.0 + 1e-12) && m["upper_bound"].as_f64().unwrap() >= s);
    let r = parse(&norm(CHI, "zm-radial", 1.0, 0.5).unwrap());
    assert!((r["value"].as_f64().unwrap() - 2.0 * (-0.5f64).exp()).abs() < 1e-9);
    for kind in ["zm", "char", "bmo"] {
        assert!(norm(CHI, kind, 1.0, 0.5).is_ok(), "{kind}");
    }
    assert!(norm(CHI, "nope", 1.0, 0.5).is_err());
    assert!(norm(CHI, "morrey", 2.0, 1.5).is_err());
}

#[test]
fn counterexample_grows() {
    let a = parse(&counterexample(8, 0.5).unwrap());
    let b = parse(&counterexample(16, 0.5).unwrap());
    assert_eq!(a["starts"].as_array().unwrap().len(), 8);
    assert!(b["mf_lower_bound"].as_f64().unwrap() > a["mf_lower_bound"].as_f64().unwrap());
    assert!(b["f_norm_hi"].as_f64().unwrap() < 2.4);
    assert!(counterexample(1, 0.5).is_err());
}
