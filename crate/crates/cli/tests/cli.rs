use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_morreylab"));
    c.env("MORREYLAB_THREADS", "1");
    c
}

fn file(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<Vec<f64>> {
    stdout(o).lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

fn chi01() -> PathBuf {
    file("chi01.json", r#"{"breakpoints":[0,1],"values":[1]}"#)
}

#[test]
fn maxfn_m_closed_form() {
    let p = chi01();
    let o = run(&["maxfn", "--input", p.to_str().unwrap(), "--op", "M", "--at", "2,0.5,-3"]);
    assert!(o.status.success());
    let rows = csv_rows(&o);
    assert_eq!(stdout(&o).lines().next(), Some("x,value"));
    assert!((rows[0][1] - 0.5).abs() < 1e-15);
    assert!((rows[1][1] - 1.0).abs() < 1e-15);
    assert!((rows[2][1] - 0.25).abs() < 1e-15);
}

#[test]
fn maxfn_m2_bracket_and_grid() {
    let p = chi01();
    let o = run(&["maxfn", "--input", p.to_str().unwrap(), "--op", "m2", "--at", "0.5", "--grid", "-2:3:6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().next(), Some("x,value,lo,hi"));
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 7);
    let r = &rows[0];
    assert!(r[2] <= 1.0 && 1.0 <= r[3] && r[1] == r[3], "{r:?}");
    for r in &rows {
        assert!(r[2] <= r[3]);
    }
}

#[test]
fn maxfn_empty_function_gives_zeros() {
    let p = file("empty.json", r#"{"breakpoints":[],"values":[]}"#);
    for op in ["M", "M2"] {
        let o = run(&["maxfn", "--input", p.to_str().unwrap(), "--op", op, "--at", "0,1,5"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        for r in csv_rows(&o) {
            assert!(r[1..].iter().all(|&v| v == 0.0), "{r:?}");
        }
    }
}

#[test]
fn maxfn_commutators_need_symbol() {
    let p = chi01();
    let o = run(&["maxfn", "--input", p.to_str().unwrap(), "--op", "Cb", "--at", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let b = file("b.json", r#"{"breakpoints":[0,0.5,1],"values":[1,-1]}"#);
    let o = run(&["maxfn", "--input", p.to_str().unwrap(), "--symbol", b.to_str().unwrap(), "--op", "Cb", "--at", "0.5"]);
    assert!(o.status.success());
    assert!(csv_rows(&o)[0][1] > 0.0);
}

#[test]
fn norm_morrey_brackets_sqrt2() {
    let p = file("chi04.json", r#"{"breakpoints":[0,4],"values":[1]}"#);
    let o = run(&["norm", "--input", p.to_str().unwrap(), "--kind", "morrey", "--p", "2", "--lambda", "0.5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (lo, hi) = (v["value"].as_f64().unwrap(), v["upper_bound"].as_f64().unwrap());
    let s = 2f64.sqrt();
    assert!(lo <= s * (1.0 + 1e-12) && s <= hi, "{lo} {hi}");
}

#[test]
fn norm_zm_radial_closed_form() {
    let p = file("profile.csv", "x,value\n0,1\n1,\n");
    let o = run(&["norm", "--input", p.to_str().unwrap(), "--kind", "zm-radial", "--n", "1", "--lambda", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let want = 2.0 * (-0.5f64).exp();
    assert!((v["value"].as_f64().unwrap() - want).abs() < 1e-6);
}

#[test]
fn norm_bmo_of_zero_is_zero() {
    let p = file("zero.json", r#"{"breakpoints":[-1,3],"values":[0]}"#);
    let o = run(&["norm", "--input", p.to_str().unwrap(), "--kind", "bmo", "--format", "csv"]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&o)[0][0], 0.0);
}

#[test]
fn verify_holder_passes_and_is_deterministic() {
    let a = run(&["verify", "--suite", "holder", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&["verify", "--suite", "holder", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(v[0]["checks"].as_array().unwrap().len() > 1);
}

#[test]
fn verify_counterexample_table() {
    let o = run(&["verify", "--suite", "counterexample", "--K", "8,16,32,64"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["table"]["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_pointwise_constant_symbol() {
    let b = file("bconst.json", r#"{"breakpoints":[0,2],"values":[3]}"#);
    let f = file("f.json", r#"{"breakpoints":[0,0.25,1],"values":[1,-2]}"#);
    let o = run(&["verify", "--suite", "pointwise", "--symbol", b.to_str().unwrap(), "--input", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn counterexample_csv_and_out_file() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join("table.csv");
    let _ = std::fs::create_dir_all(out.parent().unwrap());
    let o = run(&["counterexample", "--K", "8,16", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("K,f_norm_lo,f_norm_hi,Mf_lower_bound,ratio"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1][3] > rows[0][3]);
}

#[test]
fn radial_report() {
    let p = chi01();
    let o = run(&["radial", "--input", p.to_str().unwrap(), "--n", "2", "--lambda", "0.5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["nonincreasing"], true);
    let h = &v["hardy"];
    assert!(h["lhs"].as_f64().unwrap() <= h["bound"].as_f64().unwrap());
    assert_eq!(h["lhs"], v["functional_m"]["value"]);
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let bad = file("bad.csv", "x,value\n0,1\n1,2\n2,oops\n");
    let o = run(&["maxfn", "--input", bad.to_str().unwrap(), "--op", "M", "--at", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let p = chi01();
    assert_eq!(run(&["norm", "--input", p.to_str().unwrap(), "--kind", "morrey", "--lambda", "3"]).status.code(), Some(2));
    assert_eq!(run(&["maxfn", "--input", p.to_str().unwrap(), "--op", "nope", "--at", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    let o = bin().env("MORREYLAB_THREADS", "zero").args(["norm", "--input", p.to_str().unwrap(), "--kind", "bmo"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_check_exits_1_with_report() {
    // Two adjacent truncations cannot show the required growth.
    let o = run(&["verify", "--suite", "counterexample", "--K", "8,9"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["passed"], false);
    let failing: Vec<_> = v[0]["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).collect();
    assert!(!failing.is_empty() && failing.iter().all(|c| c["margin"].as_f64().unwrap() < 0.0));
}
