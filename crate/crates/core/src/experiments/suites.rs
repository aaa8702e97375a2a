//! Verification suites: seeded batches of checks with margins.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::constants::{
    pointwise_domination_suite, weak_morrey_m2_constant, weak_ratio_at, weak_type_constant, ConstantReport, Sample, WeakOp,
};
use super::corpus::{random_decreasing_profile, random_step_function, CorpusSpec};
use super::counterexample::{counterexample_family, counterexample_table, CounterexampleTable};
use crate::error::{domain, Error, Result};
use crate::family::FamilySpec;
use crate::maxops::{RadialProfile, RefinePolicy};
use crate::orlicz::{holder_check, llog_functional, luxemburg_bracket, OrliczGauge};
use crate::radial::{hardy_reduction_check, zm_radial_functional};
use crate::stepfn::{Interval, StepFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Pointwise,
    Weaktype,
    Holder,
    Radial,
    Counterexample,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Pointwise, Suite::Weaktype, Suite::Holder, Suite::Radial, Suite::Counterexample];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Pointwise => "pointwise",
            Suite::Weaktype => "weaktype",
            Suite::Holder => "holder",
            Suite::Radial => "radial",
            Suite::Counterexample => "counterexample",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Suite::All].iter().chain(&Suite::EACH).copied().find(|v| v.name() == s).ok_or_else(|| domain(format!("unknown suite {s:?}")))
    }
}

/// Suite inputs. `b` and `f`, when given, replace the random pairs of the pointwise suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Corpus size for the randomized suites.
    pub size: usize,
    pub ks: Vec<usize>,
    pub lambda: f64,
    pub tol: f64,
    pub policy: RefinePolicy,
    pub family: FamilySpec,
    pub b: Option<StepFunction>,
    pub f: Option<StepFunction>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            size: 12,
            ks: vec![8, 16, 32, 64],
            lambda: 0.5,
            tol: 1e-10,
            policy: RefinePolicy::default(),
            family: FamilySpec::dyadic(8),
            b: None,
            f: None,
        }
    }
}

/// One inequality `value ≤ bound` (or `≥` when `at_least`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    #[serde(default)]
    pub at_least: bool,
    /// Distance to failure; negative when the check fails.
    pub margin: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        let margin = bound - value;
        Self { name: name.into(), value, bound, at_least: false, margin, passed: margin >= 0.0, witness: None }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        let margin = value - bound;
        Self { name: name.into(), value, bound, at_least: true, margin, passed: margin >= 0.0, witness: None }
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub constants: Vec<ConstantReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<CounterexampleTable>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64) -> Self {
        Self { suite, seed, checks: Vec::new(), constants: Vec::new(), table: None, passed: true }
    }

    fn finish(mut self) -> Self {
        self.passed = self.checks.iter().all(|c| c.passed);
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    match suite {
        Suite::All => Suite::EACH.iter().map(|&s| run_one(s, cfg)).collect(),
        s => Ok(vec![run_one(s, cfg)?]),
    }
}

fn run_one(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match suite {
        Suite::Pointwise => pointwise(cfg),
        Suite::Weaktype => weaktype(cfg),
        Suite::Holder => holder(cfg),
        Suite::Radial => radial(cfg),
        Suite::Counterexample => counterexample(cfg),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

fn corpus(cfg: &SuiteConfig, signed: bool) -> CorpusSpec {
    CorpusSpec { signed, ..CorpusSpec::new(cfg.seed, cfg.size) }
}

/// Random `(b, f)` pairs; `b` is signed for odd indices.
pub fn random_pairs(seed: u64, count: usize) -> Vec<Sample> {
    let mut rng = CorpusSpec::new(seed, count).rng();
    (0..count)
        .map(|i| {
            let b = random_step_function(&mut rng, 24, i % 2 == 1, None);
            let f = random_step_function(&mut rng, 24, false, None);
            Sample { b, f }
        })
        .collect()
}

fn pointwise(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Pointwise, cfg.seed);
    let pairs = match (&cfg.b, &cfg.f) {
        (Some(b), Some(f)) => vec![Sample { b: b.clone(), f: f.clone() }],
        (None, Some(f)) => vec![Sample { b: StepFunction::zero(), f: f.clone() }],
        _ => random_pairs(cfg.seed, cfg.size),
    };
    let mut rng = CorpusSpec::new(cfg.seed ^ 0x5eed, 0).rng();
    let mut ratios = Vec::new();
    for (i, s) in pairs.iter().enumerate() {
        let hull = match (s.b.support(), s.f.support()) {
            (Some(x), Some(y)) => x.hull(&y),
            (Some(x), None) | (None, Some(x)) => x,
            (None, None) => Interval::new(0.0, 1.0)?,
        };
        let wide = hull.expanded(0.5 * hull.length());
        let points: Vec<f64> = (0..50).map(|_| rng.gen_range(wide.left()..wide.right())).collect();
        let r = pointwise_domination_suite(&s.b, &s.f, &points, &cfg.policy)?;
        let slack = 1e-12 * (1.0 + s.b.max_abs() * s.f.max_abs());
        if r.nonnegative_b {
            rep.checks.push(Check::at_most(format!("pair {i}: |[M,b]f| - C_b f"), r.worst_commutator_by_cb, slack));
        }
        let mut c = Check::at_most(format!("pair {i}: |[M,b]f| - C_b f - 2b^- Mf"), r.worst_commutator_general, slack);
        if let Some(v) = r.violations.first() {
            c = c.with_witness(format!("x={:.17e} lhs={:.17e} rhs={:.17e}", v.point, v.lhs, v.rhs));
        }
        rep.checks.push(c);
        if let Some(w) = r.cb_by_m2.witness {
            ratios.push((i, r.cb_by_m2.constant, w.point));
        }
    }
    let best = ratios.iter().fold(None, |acc: Option<&(usize, f64, Option<f64>)>, r| match acc {
        Some(a) if a.1 >= r.1 => Some(a),
        _ => Some(r),
    });
    let cb = ConstantReport {
        id: "cb-by-m2".into(),
        corpus: format!("random pairs seed={} count={}", cfg.seed, pairs.len()),
        constant: best.map_or(0.0, |b| b.1),
        witness: best.map(|b| super::constants::Witness { item: b.0, point: b.2, level: None, interval: None }),
        evaluated: ratios.len(),
    };
    rep.checks.push(Check::at_most("cb-by-m2 constant is finite", cb.constant, f64::MAX));
    rep.constants.push(cb);
    Ok(rep.finish())
}

/// Relative change of a weak-type constant when the whole corpus is dilated by `s`.
pub fn dilation_drift(op: WeakOp, corpus: &[Sample], s: f64, policy: &RefinePolicy) -> Result<f64> {
    let base = weak_type_constant(op, corpus, "", policy)?.constant;
    let dilated: Vec<Sample> = corpus.iter().map(|x| Ok(Sample { b: x.b.dilate(s)?, f: x.f.dilate(s)? })).collect::<Result<_>>()?;
    let scaled = weak_type_constant(op, &dilated, "", policy)?.constant;
    Ok(if base == 0.0 { scaled } else { (scaled / base - 1.0).abs() })
}

/// Allowed relative drift of a weak-type constant under dilation.
pub const DILATION_DRIFT: f64 = 2e-2;

fn weaktype(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Weaktype, cfg.seed);
    let samples = random_pairs(cfg.seed, cfg.size);
    let desc = format!("random pairs seed={} count={}", cfg.seed, cfg.size);
    for op in WeakOp::ALL {
        let r = weak_type_constant(op, &samples, &desc, &cfg.policy)?;
        rep.checks.push(Check::at_most(format!("{} constant is finite", r.id), r.constant, f64::MAX));
        if let Some(w) = &r.witness {
            let again = weak_ratio_at(op, &samples[w.item], w.level.unwrap_or(0.0), &cfg.policy)?;
            rep.checks.push(Check::at_most(format!("{} witness reproduces", r.id), (again - r.constant).abs(), 1e-9 * r.constant.max(1.0)));
        }
        rep.constants.push(r);
    }
    let drift = dilation_drift(WeakOp::M2, &samples, 2.0, &cfg.policy)?;
    rep.checks.push(Check::at_most("weak-M2 dilation by 2", drift, DILATION_DRIFT));
    let fs = corpus(cfg, false).generate();
    let wm = weak_morrey_m2_constant(&fs, &corpus(cfg, false).describe(), cfg.lambda, cfg.tol, &cfg.family, &cfg.policy)?;
    rep.checks.push(Check::at_most("weak-morrey-M2 constant is finite", wm.constant, f64::MAX));
    rep.constants.push(wm);
    Ok(rep.finish())
}

/// Random subinterval of `[0, 1]` of length at least `2⁻¹⁰`.
pub fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    loop {
        let (a, b) = (rng.gen::<f64>(), rng.gen::<f64>());
        if (a - b).abs() >= 1.0 / 1024.0 {
            return Interval::new(a.min(b), a.max(b)).expect("ordered");
        }
    }
}

fn holder(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Holder, cfg.seed);
    let spec = corpus(cfg, false);
    let mut rng = spec.rng();
    let q = Interval::new(0.0, 1.0)?;
    let (lo, hi) = luxemburg_bracket(&StepFunction::indicator(0.0, 1.0)?, &q, OrliczGauge::Llog, cfg.tol)?;
    rep.checks.push(Check::at_most("|| chi_Q ||_{LlogL,Q} - 1", (lo - 1.0).abs().max((hi - 1.0).abs()), 1e-8));
    for i in 0..cfg.size {
        let f = random_step_function(&mut rng, 24, true, None);
        let h = random_step_function(&mut rng, 24, true, None);
        let iv = random_interval(&mut rng);
        let r = holder_check(&f, &h, &iv, cfg.tol)?;
        rep.checks.push(Check::at_most(format!("pair {i}: holder"), r.lhs, r.rhs * (1.0 + 1e-8)));
        let (lo, hi) = luxemburg_bracket(&f, &iv, OrliczGauge::Llog, cfg.tol)?;
        let j = llog_functional(&f, &iv);
        rep.checks.push(Check::at_least(format!("pair {i}: functional >= luxemburg"), j * (1.0 + 1e-12), lo));
        rep.checks.push(Check::at_most(format!("pair {i}: functional <= 2 luxemburg"), j, 2.0 * hi * (1.0 + 1e-12)));
    }
    Ok(rep.finish())
}

fn radial(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Radial, cfg.seed);
    let unit = RadialProfile::new(StepFunction::indicator(0.0, 1.0)?, 1)?;
    let v = zm_radial_functional(&unit, 0.5)?.value;
    rep.checks.push(Check::at_most("chi profile closed form", (v - 2.0 * (-0.5f64).exp()).abs(), 1e-6));
    let mut rng = corpus(cfg, false).rng();
    for i in 0..cfg.size {
        for n in 1..=3u32 {
            let p = random_decreasing_profile(&mut rng, 12, n);
            for frac in [0.25, 0.5, 0.75] {
                let lambda = frac * n as f64;
                let r = hardy_reduction_check(&p, lambda)?;
                rep.checks.push(Check::at_most(format!("profile {i} n={n} lambda={lambda}: hardy"), r.lhs, r.bound * (1.0 + 1e-9)));
            }
        }
    }
    Ok(rep.finish())
}

fn counterexample(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(Suite::Counterexample, cfg.seed);
    let t = counterexample_table(&cfg.ks, cfg.lambda, &counterexample_family(), cfg.tol)?;
    rep.checks.push(Check::at_most("upper bracket spread max/min", t.upper_spread, 1.5));
    rep.checks.push(Check::at_least("lower bound growth last/first", t.lower_growth, 1.5));
    rep.checks.push(Check::at_least("lower bound slope against ln(K+e)", t.slope, 0.5));
    let mono = t.rows.windows(2).map(|w| w[1].mf_lower_bound - w[0].mf_lower_bound).fold(f64::INFINITY, f64::min);
    if t.rows.len() > 1 {
        rep.checks.push(Check::at_least("lower bound nondecreasing in K", mono, 0.0));
    }
    rep.table = Some(t);
    Ok(rep.finish())
}
