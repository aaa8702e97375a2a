//! Empirical constants of the weak-type and pointwise inequalities.
//!
//! Every ratio is formed from quantities that are attained (lower envelopes,
//! family values) over quantities that are certified upper bounds, so a
//! reported constant never exceeds the true best constant.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::family::FamilySpec;
use crate::maxops::{
    commutator, commutator_envelope, iterated_maximal, iterated_maximal_on, maximal, maximal_commutator,
    maximal_commutator_envelope, RefinePolicy,
};
use crate::norms::{bmo_seminorm, weak_zygmund_morrey_norm, zygmund_morrey_norm};
use crate::orlicz::OrliczGauge;
use crate::parallel::par_map;
use crate::stepfn::{Interval, StepFunction};

/// Where a constant was attained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Index into the corpus.
    pub item: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<Interval>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub id: String,
    pub corpus: String,
    /// Largest observed ratio; `0` when nothing contributed.
    pub constant: f64,
    pub witness: Option<Witness>,
    /// Number of corpus items that contributed a ratio.
    pub evaluated: usize,
}

impl ConstantReport {
    fn from_ratios(id: &str, corpus: &str, ratios: Vec<Option<(f64, Witness)>>) -> Self {
        let mut best: Option<(f64, Witness)> = None;
        let mut evaluated = 0;
        for r in ratios.into_iter().flatten() {
            evaluated += 1;
            // Strict comparison keeps the lowest index on ties.
            if best.as_ref().is_none_or(|(c, _)| r.0 > *c) {
                best = Some(r);
            }
        }
        let (constant, witness) = match best {
            Some((c, w)) => (c, Some(w)),
            None => (0.0, None),
        };
        Self { id: id.to_string(), corpus: corpus.to_string(), constant, witness, evaluated }
    }
}

/// Operators with a weak `L(1 + log⁺L)` estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeakOp {
    M2,
    Cb,
    MbCommutator,
}

impl WeakOp {
    pub const ALL: [WeakOp; 3] = [WeakOp::M2, WeakOp::Cb, WeakOp::MbCommutator];

    pub fn name(self) -> &'static str {
        match self {
            WeakOp::M2 => "M2",
            WeakOp::Cb => "Cb",
            WeakOp::MbCommutator => "MbCommutator",
        }
    }
}

impl fmt::Display for WeakOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeakOp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "m2" => Ok(WeakOp::M2),
            "cb" => Ok(WeakOp::Cb),
            "mbcommutator" | "mb" | "commutator" => Ok(WeakOp::MbCommutator),
            _ => Err(domain(format!("unknown operator {s:?}"))),
        }
    }
}

/// A symbol and an input; `b` is ignored by [`WeakOp::M2`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub b: StepFunction,
    pub f: StepFunction,
}

/// `∫ Φ(|f|/t)` with `Φ(s) = s(1 + log⁺s)`.
pub fn llog_mass(f: &StepFunction, t: f64) -> f64 {
    f.cells().map(|(l, r, v)| (r - l) * OrliczGauge::Llog.eval(v.abs() / t)).sum()
}

/// `c₀(1 + log⁺c₀)` with `c₀ = ‖b⁺‖_* + ‖b⁻‖_∞`, using the certified upper bound of `‖b⁺‖_*`.
pub fn commutator_factor(b: &StepFunction) -> Result<f64> {
    let (pos, neg) = b.pos_neg_parts();
    let c0 = bmo_seminorm(&pos, &FamilySpec::breakpoint_pairs())?.upper_bound + neg.max_abs();
    Ok(OrliczGauge::Llog.eval(c0))
}

fn lower_envelope(op: WeakOp, s: &Sample, policy: &RefinePolicy) -> StepFunction {
    match op {
        WeakOp::M2 => iterated_maximal(&s.f, policy).lower(),
        WeakOp::Cb => maximal_commutator_envelope(&s.b, &s.f, policy).lower(),
        WeakOp::MbCommutator => commutator_envelope(&s.b, &s.f, policy).lower(),
    }
}

fn rhs_factor(op: WeakOp, s: &Sample) -> Result<f64> {
    match op {
        WeakOp::MbCommutator => commutator_factor(&s.b),
        _ => Ok(1.0),
    }
}

/// Best ratio `|{T f > t}| / (factor · ∫Φ(|f|/t))` over the jump levels of the
/// lower envelope, as `(ratio, level)`. Just below a jump level `v` the left
/// side is at least `|{lower ≥ v}|` while the right side tends to its value at `v`.
fn weak_ratio(op: WeakOp, s: &Sample, policy: &RefinePolicy) -> Result<Option<(f64, f64)>> {
    if s.f.is_zero() {
        return Ok(None);
    }
    let factor = rhs_factor(op, s)?;
    if factor == 0.0 {
        return Ok(None);
    }
    let g = lower_envelope(op, s, policy);
    let mut cum = 0.0;
    let mut best: Option<(f64, f64)> = None;
    for lv in g.levels() {
        cum += lv.measure;
        let r = cum / (factor * llog_mass(&s.f, lv.value));
        if best.is_none_or(|(c, _)| r > c) {
            best = Some((r, lv.value));
        }
    }
    Ok(best)
}

/// Recomputes the ratio at a recorded level.
pub fn weak_ratio_at(op: WeakOp, s: &Sample, level: f64, policy: &RefinePolicy) -> Result<f64> {
    let factor = rhs_factor(op, s)?;
    let g = lower_envelope(op, s, policy);
    let measure: f64 = g.levels().iter().filter(|lv| lv.value >= level).map(|lv| lv.measure).sum();
    Ok(measure / (factor * llog_mass(&s.f, level)))
}

/// Empirical constant of the weak `L(1 + log⁺L)` estimate for `op` over `corpus`.
pub fn weak_type_constant(op: WeakOp, corpus: &[Sample], descriptor: &str, policy: &RefinePolicy) -> Result<ConstantReport> {
    if corpus.is_empty() {
        return Err(domain("weak-type constant needs a nonempty corpus"));
    }
    let ratios = par_map(corpus, |s| weak_ratio(op, s, policy));
    let ratios = ratios
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map(|o| o.map(|(c, t)| (c, Witness { item: i, point: None, level: Some(t), interval: None }))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantReport::from_ratios(&format!("weak-{op}"), descriptor, ratios))
}

/// Step minorant of `M²f` small enough for an all-pairs interval family.
fn m2_minorant(f: &StepFunction, policy: &RefinePolicy) -> StepFunction {
    iterated_maximal(f, policy).lower().merge_within(policy.merge, false).coarsen_below(96)
}

/// `‖M²f‖_{WM}` lower value over the `‖f‖_{ZM}` upper bound, with the interval attaining the numerator.
pub fn weak_morrey_m2_ratio(f: &StepFunction, lambda: f64, tol: f64, family: &FamilySpec, policy: &RefinePolicy) -> Result<Option<(f64, Option<Interval>)>> {
    if f.is_zero() {
        return Ok(None);
    }
    let g = m2_minorant(f, policy);
    let num = weak_zygmund_morrey_norm(&g, lambda, family, tol)?;
    let den = zygmund_morrey_norm(f, lambda, family, tol)?;
    Ok(Some((num.value / den.upper_bound, num.argmax)))
}

/// Empirical constant of `‖M²f‖_{WM_{LlogL,λ}} ≤ c ‖f‖_{M_{LlogL,λ}}`.
pub fn weak_morrey_m2_constant(
    corpus: &[StepFunction],
    descriptor: &str,
    lambda: f64,
    tol: f64,
    family: &FamilySpec,
    policy: &RefinePolicy,
) -> Result<ConstantReport> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(domain(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    if corpus.is_empty() {
        return Err(domain("weak Morrey constant needs a nonempty corpus"));
    }
    let ratios = par_map(corpus, |f| weak_morrey_m2_ratio(f, lambda, tol, family, policy));
    let ratios = ratios
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.map(|o| o.map(|(c, q)| (c, Witness { item: i, point: None, level: None, interval: q }))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstantReport::from_ratios("weak-morrey-M2", descriptor, ratios))
}

/// A pointwise inequality `lhs ≤ rhs` that failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub inequality: String,
    pub point: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub points: usize,
    /// Whether `|[M,b]f| ≤ C_b f` was checked (it needs `b ≥ 0`).
    pub nonnegative_b: bool,
    /// Largest `lhs − rhs` seen for each inequality.
    pub worst_commutator_by_cb: f64,
    pub worst_commutator_general: f64,
    pub violations: Vec<Violation>,
    /// Empirical `c` of `C_b f ≤ c ‖b‖_* M²f`.
    pub cb_by_m2: ConstantReport,
}

impl PointwiseReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `|[M,b]f| ≤ C_b f` (for `b ≥ 0`) and `|[M,b]f| ≤ C_b f + 2b⁻ Mf` at
/// `points`, both exactly up to `1e−12` of the scale `max|b|·max|f|`, and
/// records the ratio `C_b f / (‖b‖_* M²f)` with certified upper bounds in the
/// denominator.
pub fn pointwise_domination_suite(b: &StepFunction, f: &StepFunction, points: &[f64], policy: &RefinePolicy) -> Result<PointwiseReport> {
    if points.iter().any(|x| !x.is_finite()) {
        return Err(domain("points must be finite"));
    }
    let slack = 1e-12 * (1.0 + b.max_abs() * f.max_abs());
    let nonneg = b.values().iter().all(|&v| v >= 0.0);
    let mut worst14 = f64::NEG_INFINITY;
    let mut worst15 = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    let vals = par_map(points, |&x| {
        let cb = maximal_commutator(b, f, x);
        let mb = commutator(b, f, x).abs();
        let bneg = (-b.eval(x)).max(0.0);
        (x, cb, mb, cb + 2.0 * bneg * maximal(f, x))
    });
    for &(x, cb, mb, rhs15) in &vals {
        if nonneg {
            worst14 = worst14.max(mb - cb);
            if mb > cb + slack {
                violations.push(Violation { inequality: "|[M,b]f| <= C_b f".into(), point: x, lhs: mb, rhs: cb });
            }
        }
        worst15 = worst15.max(mb - rhs15);
        if mb > rhs15 + slack {
            violations.push(Violation { inequality: "|[M,b]f| <= C_b f + 2 b^- Mf".into(), point: x, lhs: mb, rhs: rhs15 });
        }
    }
    let bmo = if b.is_zero() { 0.0 } else { bmo_seminorm(b, &FamilySpec::breakpoint_pairs())?.upper_bound };
    let ratios = match (f.support(), bmo > 0.0) {
        (Some(s), true) => {
            let hull = points.iter().fold(s, |h, &x| h.including(x));
            let m2 = iterated_maximal_on(f, &policy.domain_for(&hull), policy);
            vals.iter()
                .map(|&(x, cb, _, _)| {
                    let den = bmo * m2.upper_at(x);
                    (den > 0.0).then(|| (cb / den, Witness { item: 0, point: Some(x), level: None, interval: None }))
                })
                .collect()
        }
        _ => Vec::new(),
    };
    Ok(PointwiseReport {
        points: points.len(),
        nonnegative_b: nonneg,
        worst_commutator_by_cb: if nonneg { worst14.max(0.0) } else { 0.0 },
        worst_commutator_general: worst15.max(0.0),
        violations,
        cb_by_m2: ConstantReport::from_ratios("cb-by-m2", "single pair", ratios),
    })
}

/// `lhs = min_x C_b(χ_{Q0})(x)` over sample points of `Q0`,
/// `rhs = (1/(2|Q0|)) ∫_{Q0} |b − b_{Q0}|`.
///
/// Sample points are the ends and quarter points of each piece of `Q0` cut by
/// the breakpoints of `b`.
pub fn cb_chi_lower_check(b: &StepFunction, q0: &Interval) -> (f64, f64) {
    let chi = StepFunction::indicator(q0.left(), q0.right()).expect("valid interval");
    let mean = b.average(q0);
    let osc = b.combine(&chi, |u, c| u - mean * c).integrate_abs_pow(q0, 1.0);
    let rhs = osc / (2.0 * q0.length());
    let mut cuts = vec![q0.left()];
    cuts.extend(b.breakpoints().iter().copied().filter(|&x| q0.left() < x && x < q0.right()));
    cuts.push(q0.right());
    let mut lhs = f64::INFINITY;
    for w in cuts.windows(2) {
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let x = w[0] + t * (w[1] - w[0]);
            lhs = lhs.min(maximal_commutator(b, &chi, x));
        }
    }
    (lhs, rhs)
}
