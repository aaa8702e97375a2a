//! Orlicz gauges, Luxemburg averages and the weak `L(1 + log⁺L)` average.
//!
//! Every average here depends on `f` only through the level data of `|f|` on the
//! interval (distinct values with their measures), so all evaluations are
//! finite sums. Logarithms are natural; `log⁺t = max(log t, 0)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::family::FamilySpec;
use crate::stepfn::{Interval, Level, StepFunction};

const TOL_ABS: f64 = 1e-12;
const MAX_ITER: usize = 200;

#[inline]
pub fn log_plus(t: f64) -> f64 {
    if t > 1.0 {
        t.ln()
    } else {
        0.0
    }
}

/// A convex gauge with `Φ(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrliczGauge {
    /// `Φ(t) = t(1 + log⁺t)`.
    Llog,
    /// `Ψ(t) = eᵗ − 1`.
    Exp,
}

impl OrliczGauge {
    #[inline]
    pub fn eval(self, t: f64) -> f64 {
        match self {
            OrliczGauge::Llog => t * (1.0 + log_plus(t)),
            OrliczGauge::Exp => t.exp_m1(),
        }
    }

    /// A level `α` with `Φ(max/α) ≤ 1`; the Luxemburg average never exceeds it
    /// when the normalizing length covers the support.
    fn upper_scale(self) -> f64 {
        match self {
            OrliczGauge::Llog => 1.0,
            OrliczGauge::Exp => 1.0 / std::f64::consts::LN_2,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("tolerance must be positive, got {tol}")))
    }
}

/// `(1/len) Σ μ_k Φ(v_k/α)`.
pub(crate) fn gauge_sum(levels: &[Level], len: f64, g: OrliczGauge, alpha: f64) -> f64 {
    levels.iter().map(|l| l.measure * g.eval(l.value / alpha)).sum::<f64>() / len
}

/// Bisects a nonincreasing `s(α)` for `inf{α : s(α) ≤ 1}` starting from `lo`
/// (where `s(lo) ≥ 1` is assumed) and `hi`, doubled until feasible.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, context: &str, s: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    let mut doublings = 0;
    while s(hi) > 1.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 || !hi.is_finite() {
            return Err(Error::NoConvergence { iterations: doublings, context: format!("{context}: no feasible level") });
        }
    }
    for _ in 0..MAX_ITER {
        if hi - lo <= (tol * hi).max(TOL_ABS) {
            return Ok((lo, hi));
        }
        let mid = 0.5 * (lo + hi);
        if s(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITER, context: context.into() })
}

/// Luxemburg bracket `(lo, hi)` from level data normalized by `len`.
pub(crate) fn luxemburg_from_levels(levels: &[Level], len: f64, g: OrliczGauge, tol: f64) -> Result<(f64, f64)> {
    if levels.is_empty() {
        return Ok((0.0, 0.0));
    }
    let mean = levels.iter().map(|l| l.value * l.measure).sum::<f64>() / len;
    let top = levels.iter().fold(0.0f64, |m, l| m.max(l.value));
    let hi = (top * g.upper_scale()).max(mean);
    bisect(mean.min(hi), hi, tol, "Luxemburg average", |a| gauge_sum(levels, len, g, a))
}

/// `S(α) = max_k (μ(|f| ≥ v_k)/len) / Φ(α/v_k)` for levels sorted by decreasing value.
pub(crate) fn weak_s(levels: &[Level], len: f64, alpha: f64) -> f64 {
    let mut cum = 0.0;
    let mut best = 0.0f64;
    for l in levels {
        cum += l.measure;
        best = best.max(cum / len / OrliczGauge::Llog.eval(alpha / l.value));
    }
    best
}

/// Weak average bracket from level data sorted by decreasing value.
pub(crate) fn weak_from_levels(levels: &[Level], len: f64, tol: f64) -> Result<(f64, f64)> {
    if levels.is_empty() {
        return Ok((0.0, 0.0));
    }
    // Each term exceeds 1 below v_k·min(ρ_k, 1), ρ_k the normalized cumulative measure.
    let mut cum = 0.0;
    let mut lo = 0.0f64;
    for l in levels {
        cum += l.measure;
        lo = lo.max(l.value * (cum / len).min(1.0));
    }
    bisect(lo, 2.0 * lo, tol, "weak L log L average", |a| weak_s(levels, len, a))
}

/// `(1/len) Σ μ_k v_k (1 + log⁺(v_k/m))` with `m` the mean.
pub(crate) fn llog_functional_from_levels(levels: &[Level], len: f64) -> f64 {
    let total: f64 = levels.iter().map(|l| l.value * l.measure).sum();
    if total == 0.0 {
        return 0.0;
    }
    let m = total / len;
    levels.iter().map(|l| l.measure * l.value * (1.0 + log_plus(l.value / m))).sum::<f64>() / len
}

/// `(1/|I|) ∫_I Φ(|f|/α)`.
pub fn gauge_average(f: &StepFunction, interval: &Interval, g: OrliczGauge, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(domain(format!("alpha must be positive, got {alpha}")));
    }
    Ok(gauge_sum(&f.levels_on(interval), interval.length(), g, alpha))
}

/// Bisection bracket `(lo, hi)` of the Luxemburg average; `hi` is feasible.
pub fn luxemburg_bracket(f: &StepFunction, interval: &Interval, g: OrliczGauge, tol: f64) -> Result<(f64, f64)> {
    check_tol(tol)?;
    luxemburg_from_levels(&f.levels_on(interval), interval.length(), g, tol)
}

/// `inf{α > 0 : (1/|I|)∫_I Φ(|f|/α) ≤ 1}`, to within `max(tol·α, 1e-12)`.
pub fn luxemburg_average(f: &StepFunction, interval: &Interval, g: OrliczGauge, tol: f64) -> Result<f64> {
    luxemburg_bracket(f, interval, g, tol).map(|b| b.1)
}

/// Bisection bracket of the weak average; `hi` is feasible.
pub fn weak_llog_bracket(f: &StepFunction, interval: &Interval, tol: f64) -> Result<(f64, f64)> {
    check_tol(tol)?;
    weak_from_levels(&f.levels_on(interval), interval.length(), tol)
}

/// Weak `L(1 + log⁺L)` average `inf{α : S(α) ≤ 1}`.
///
/// The superlevel measure at a jump `t_k = v_k/α` is taken as the left limit
/// `|{|f| ≥ v_k} ∩ I|`, which realizes the supremum over `t`.
pub fn weak_llog_average(f: &StepFunction, interval: &Interval, tol: f64) -> Result<f64> {
    weak_llog_bracket(f, interval, tol).map(|b| b.1)
}

/// `S(α)` for `f` on `I`; nonincreasing in `α`.
pub fn weak_llog_s(f: &StepFunction, interval: &Interval, alpha: f64) -> f64 {
    weak_s(&f.levels_on(interval), interval.length(), alpha)
}

/// `(1/|I|) ∫_I |f| (1 + log⁺(|f|/|f|_I))`, where `|f|_I` is the mean of `|f|`.
pub fn llog_functional(f: &StepFunction, interval: &Interval) -> f64 {
    llog_functional_from_levels(&f.levels_on(interval), interval.length())
}

/// Orlicz maximal function restricted to family intervals containing `x`.
pub fn orlicz_maximal(f: &StepFunction, g: OrliczGauge, x: f64, family: &FamilySpec, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let ivs = family.enumerate(f.breakpoints(), &f.support().unwrap().including(x), &[x])?;
    let mut best = 0.0f64;
    for q in ivs.iter().filter(|q| q.contains(x)) {
        best = best.max(luxemburg_bracket(f, q, g, tol)?.0);
    }
    Ok(best)
}

/// Both sides of the generalized Hölder inequality on `I`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs: f64,
}

/// `lhs = avg_I |f·h|`, `rhs = ‖f‖_{L log L, I} · ‖h‖_{exp L, I}`.
pub fn holder_check(f: &StepFunction, h: &StepFunction, interval: &Interval, tol: f64) -> Result<HolderCheck> {
    let lhs = f.combine(h, |a, b| (a * b).abs()).average(interval);
    let rhs = luxemburg_average(f, interval, OrliczGauge::Llog, tol)? * luxemburg_average(h, interval, OrliczGauge::Exp, tol)?;
    Ok(HolderCheck { lhs, rhs })
}
