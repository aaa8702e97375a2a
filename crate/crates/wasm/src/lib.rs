//! Browser bindings. Each export takes and returns JSON strings; the inner
//! functions are plain Rust so they can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use morreylab::experiments::{counterexample_family, counterexample_upper, m2_lower_bound, CounterexampleSpec};
use morreylab::io::from_json_str;
use morreylab::maxops::iterated_maximal_on;
use morreylab::norms::{bmo_seminorm, characterization_functional, morrey_norm, zygmund_morrey_norm};
use morreylab::radial::zm_radial_functional;
use morreylab::{maximal, FamilySpec, Interval, RadialProfile, RefinePolicy, StepFunction};

const MAX_SAMPLES: usize = 4096;

fn parse(json: &str) -> Result<StepFunction, String> {
    from_json_str(json).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

#[derive(Serialize)]
struct Envelope {
    x: Vec<f64>,
    f: Vec<f64>,
    mf: Vec<f64>,
    m2_lo: Vec<f64>,
    m2_hi: Vec<f64>,
}

/// `f`, `Mf` and the `M²f` bracket sampled at `samples` points of `[a, b]`.
pub fn envelope(f_json: &str, a: f64, b: f64, samples: usize) -> Result<String, String> {
    let f = parse(f_json)?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(format!("need a finite window a < b, got [{a}, {b}]"));
    }
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(format!("samples must lie in 2..={MAX_SAMPLES}"));
    }
    let x: Vec<f64> = (0..samples).map(|i| a + (b - a) * i as f64 / (samples - 1) as f64).collect();
    let fx = x.iter().map(|&t| f.eval(t)).collect();
    let mf = x.iter().map(|&t| maximal(&f, t)).collect();
    let (m2_lo, m2_hi) = match f.support() {
        None => (vec![0.0; samples], vec![0.0; samples]),
        Some(s) => {
            let pol = RefinePolicy::with_tol(1e-3);
            let window = Interval::new(a, b).map_err(|e| e.to_string())?;
            let br = iterated_maximal_on(&f, &pol.domain_for(&s.hull(&window)), &pol);
            (x.iter().map(|&t| br.lower_at(t)).collect(), x.iter().map(|&t| br.upper_at(t)).collect())
        }
    };
    Ok(to_json(&Envelope { x, f: fx, mf, m2_lo, m2_hi }))
}

/// One norm estimate as JSON. `kind` is one of `morrey`, `zm`, `char`, `bmo`,
/// `zm-radial` (the input read as a profile in dimension 1).
pub fn norm(f_json: &str, kind: &str, p: f64, lambda: f64) -> Result<String, String> {
    let f = parse(f_json)?;
    let fam = FamilySpec::dyadic(10);
    let e = |r: morreylab::Result<morreylab::NormEstimate>| r.map(|e| to_json(&e)).map_err(|e| e.to_string());
    match kind {
        "morrey" => e(morrey_norm(&f, p, lambda, &fam)),
        "zm" => e(zygmund_morrey_norm(&f, lambda, &fam, 1e-8)),
        "char" => e(characterization_functional(&f, lambda, &fam)),
        "bmo" => e(bmo_seminorm(&f, &fam)),
        "zm-radial" => {
            let prof = RadialProfile::new(f, 1).map_err(|e| e.to_string())?;
            zm_radial_functional(&prof, lambda).map(|e| to_json(&e)).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown norm kind {other:?}")),
    }
}

#[derive(Serialize)]
struct Counterexample {
    k: usize,
    starts: Vec<f64>,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    f_norm_lo: f64,
    f_norm_hi: f64,
    mf_lower_bound: f64,
}

/// The truncated counterexample `f_K`, its `ZM` bracket and the lower bound
/// for the second maximal function.
pub fn counterexample(k: usize, lambda: f64) -> Result<String, String> {
    if !(2..=128).contains(&k) {
        return Err("K must lie in 2..=128".into());
    }
    let spec = CounterexampleSpec::new(k).map_err(|e| e.to_string())?;
    let f = spec.build();
    let up = counterexample_upper(k, lambda, &counterexample_family(), 1e-8).map_err(|e| e.to_string())?;
    let lower = m2_lower_bound(k, lambda).map_err(|e| e.to_string())?;
    Ok(to_json(&Counterexample {
        k,
        starts: spec.starts(),
        breakpoints: f.breakpoints().to_vec(),
        values: f.values().to_vec(),
        f_norm_lo: up.value,
        f_norm_hi: up.upper_bound,
        mf_lower_bound: lower,
    }))
}

#[wasm_bindgen(js_name = envelope)]
pub fn envelope_js(f_json: &str, a: f64, b: f64, samples: usize) -> Result<String, JsError> {
    envelope(f_json, a, b, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = norm)]
pub fn norm_js(f_json: &str, kind: &str, p: f64, lambda: f64) -> Result<String, JsError> {
    norm(f_json, kind, p, lambda).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = counterexample)]
pub fn counterexample_js(k: usize, lambda: f64) -> Result<String, JsError> {
    counterexample(k, lambda).map_err(|e| JsError::new(&e))
}
