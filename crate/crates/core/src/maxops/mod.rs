//! Maximal operators evaluated exactly at points, plus the radial Hardy operator.
//!
//! # Exactness
//!
//! Fix `x` and a nonnegative step function `g`. Moving one endpoint of an
//! interval through a cell of constant value `c` changes its average as
//! `Δ ↦ (A + cΔ)/(L + Δ)`, whose derivative `(cL − A)/(L + Δ)²` has constant
//! sign. Hence suprema over intervals are attained (or approached) at
//! breakpoints, at `x` itself, or at infinity.
//!
//! For `M` we go further: the average over `[u, v] ∋ x` is a convex
//! combination of the averages over `[u, x]` and `[x, v]`, so
//! `Mg(x) = max(sup_u avg[u, x], sup_v avg[x, v])`, which costs O(m) per point.

mod envelope;

pub use envelope::{
    commutator_envelope, iterated_maximal, iterated_maximal_on, m2_upper_at, maximal_commutator_envelope,
    maximal_envelope, maximal_envelope_on, M2Bracket, RefinePolicy,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::prefix::Prefix;
use crate::stepfn::StepFunction;

/// Exact Hardy-Littlewood maximal function `Mf(x)`.
pub fn maximal(f: &StepFunction, x: f64) -> f64 {
    Prefix::new(f).maximal_at(x)
}

/// `Mf` at many points, sharing one prefix table.
pub fn maximal_many(f: &StepFunction, xs: &[f64]) -> Vec<f64> {
    let p = Prefix::new(f);
    xs.iter().map(|&x| p.maximal_at(x)).collect()
}

/// Exact fractional maximal function `sup_{Q ∋ x} |Q|^{α−1} ∫_Q |f|` for `0 ≤ α < 1`.
pub fn fractional_maximal(f: &StepFunction, alpha: f64, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    let p = Prefix::new(f);
    if p.is_zero() {
        return Ok(0.0);
    }
    let bps = p.breakpoints();
    let mut us: Vec<f64> = bps.iter().copied().filter(|&b| b < x).collect();
    us.push(x);
    let mut vs: Vec<f64> = vec![x];
    vs.extend(bps.iter().copied().filter(|&b| b > x));

    let obj = |u: f64, v: f64| {
        let len = v - u;
        p.integral(u, v) * len.powf(alpha - 1.0)
    };
    // Degenerate intervals shrink to x: the limit is g(x±) for α = 0 and 0 otherwise.
    let mut best = if alpha == 0.0 { p.left_value(x).max(p.right_value(x)) } else { 0.0 };
    for &u in &us {
        for &v in &vs {
            if v > u {
                best = best.max(obj(u, v));
            }
        }
    }
    if alpha > 0.0 {
        // Stationary points of Δ ↦ (A + cΔ)(L + Δ)^{α−1} inside a cell; these are
        // minima of a quasi-convex map, kept as candidates for completeness.
        for &v in &vs {
            for w in us.windows(2) {
                let (cl, cr) = (w[0], w[1]);
                let c = p.right_value(cl);
                if c > 0.0 && v > cr {
                    let (a, len) = (p.integral(cr, v), v - cr);
                    let d = ((1.0 - alpha) * a - c * len) / (alpha * c);
                    if d > 0.0 && d < cr - cl {
                        best = best.max(obj(cr - d, v));
                    }
                }
            }
        }
        for &u in &us {
            for w in vs.windows(2) {
                let (cl, cr) = (w[0], w[1]);
                let c = p.right_value(cl);
                if c > 0.0 && cl > u {
                    let (a, len) = (p.integral(u, cl), cl - u);
                    let d = ((1.0 - alpha) * a - c * len) / (alpha * c);
                    if d > 0.0 && d < cr - cl {
                        best = best.max(obj(u, cl + d));
                    }
                }
            }
        }
    }
    Ok(best)
}

/// `g_x(y) = |b(x) − b(y)|·|f(y)|`, the integrand of `C_b f(x)`.
pub(crate) fn commutator_integrand(b: &StepFunction, f: &StepFunction, bx: f64) -> StepFunction {
    b.combine(f, |by, fy| (bx - by).abs() * fy.abs())
}

/// Exact maximal commutator `C_b(f)(x) = sup_{Q ∋ x} avg_Q |b(x) − b|·|f|`.
pub fn maximal_commutator(b: &StepFunction, f: &StepFunction, x: f64) -> f64 {
    maximal(&commutator_integrand(b, f, b.eval(x)), x)
}

/// Exact commutator `[M, b]f(x) = M(bf)(x) − b(x)·Mf(x)`.
pub fn commutator(b: &StepFunction, f: &StepFunction, x: f64) -> f64 {
    let bf = b.combine(f, |u, v| u * v);
    maximal(&bf, x) - b.eval(x) * maximal(f, x)
}

/// Radial profile `φ` on `[0, ∞)` of `f(x) = φ(|x|)` in dimension `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct RadialProfile {
    profile: StepFunction,
    dimension: u32,
    nonincreasing: bool,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    dimension: u32,
    profile: StepFunction,
    nonincreasing: bool,
}

impl TryFrom<RawProfile> for RadialProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        let p = RadialProfile::new(raw.profile, raw.dimension)?;
        if raw.nonincreasing && !p.nonincreasing {
            return Err(Error::InvalidStepFunction("profile flagged nonincreasing but its values increase".into()));
        }
        Ok(RadialProfile { nonincreasing: raw.nonincreasing, ..p })
    }
}

impl From<RadialProfile> for RawProfile {
    fn from(p: RadialProfile) -> Self {
        RawProfile { dimension: p.dimension, profile: p.profile, nonincreasing: p.nonincreasing }
    }
}

impl RadialProfile {
    /// Validates `breakpoints ≥ 0`, `n ≥ 1` and computes the monotonicity flag of `|φ|`.
    pub fn new(profile: StepFunction, dimension: u32) -> Result<Self> {
        if dimension == 0 {
            return Err(domain("dimension must be at least 1"));
        }
        if profile.breakpoints().first().is_some_and(|&b| b < 0.0) {
            return Err(domain("radial profile breakpoints must be nonnegative"));
        }
        let nonincreasing = is_nonincreasing_from_origin(&profile);
        Ok(Self { profile, dimension, nonincreasing })
    }

    pub fn profile(&self) -> &StepFunction {
        &self.profile
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.nonincreasing
    }

    /// True if some input value was negative; radial functionals use `|φ|`.
    pub fn had_negative(&self) -> bool {
        self.profile.values().iter().any(|&v| v < 0.0)
    }

    /// The even function `φ(|x|)` on the line (dimension is ignored).
    pub fn even_extension(&self) -> StepFunction {
        let cells: Vec<(f64, f64, f64)> = self
            .profile
            .cells()
            .flat_map(|(l, r, v)| {
                if l == 0.0 {
                    vec![(-r, r, v)]
                } else {
                    vec![(-r, -l, v), (l, r, v)]
                }
            })
            .collect();
        merge_center(cells)
    }
}

fn merge_center(mut cells: Vec<(f64, f64, f64)>) -> StepFunction {
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    StepFunction::from_cells(&cells).expect("mirrored cells are disjoint")
}

/// `|φ|` nonincreasing on `(0, ∞)`, counting a leading zero region on `[0, b₀)`
/// as an increase.
fn is_nonincreasing_from_origin(p: &StepFunction) -> bool {
    if p.is_zero() {
        return true;
    }
    if p.breakpoints()[0] > 0.0 {
        return false;
    }
    p.values().windows(2).all(|w| w[1].abs() <= w[0].abs())
}

/// Result of the Hardy operator; `at_origin` marks the removable limit at `x = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyValue {
    pub value: f64,
    pub at_origin: bool,
}

/// `Hf(x) = (n/|x|ⁿ) ∫_0^{|x|} |φ(ρ)| ρ^{n−1} dρ`, exact per cell.
pub fn hardy(p: &RadialProfile, x: f64) -> HardyValue {
    let r = x.abs();
    if r == 0.0 {
        let v = if p.profile.breakpoints().first() == Some(&0.0) { p.profile.values()[0].abs() } else { 0.0 };
        return HardyValue { value: v, at_origin: true };
    }
    let n = p.dimension as i32;
    let mut acc = 0.0;
    for (l, rr, v) in p.profile.cells() {
        if l >= r {
            break;
        }
        let hi = rr.min(r);
        // n·∫ ρ^{n−1} = hiⁿ − lⁿ, scaled relative to rⁿ to avoid overflow.
        acc += v.abs() * ((hi / r).powi(n) - (l / r).powi(n));
    }
    HardyValue { value: acc, at_origin: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(a: f64, b: f64) -> StepFunction {
        StepFunction::indicator(a, b).unwrap()
    }

    #[test]
    fn maximal_indicator_closed_forms() {
        let f = chi(0.0, 1.0);
        assert_eq!(maximal(&f, 0.5), 1.0);
        assert_eq!(maximal(&f, 2.0), 0.5);
        assert_eq!(maximal(&f, -1.0), 0.5);
        assert_eq!(maximal(&f, 1.0), 1.0);
        assert_eq!(maximal(&StepFunction::zero(), 1.0), 0.0);
    }

    #[test]
    fn fractional_examples() {
        let f = chi(0.0, 1.0);
        assert!((fractional_maximal(&f, 0.5, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fractional_maximal(&StepFunction::zero(), 0.3, 0.0).unwrap(), 0.0);
        assert!(fractional_maximal(&f, 1.0, 0.0).is_err());
        assert!(fractional_maximal(&f, -0.1, 0.0).is_err());
        for x in [-2.0, 0.0, 0.3, 1.0, 4.0] {
            let a = fractional_maximal(&f, 0.0, x).unwrap();
            assert!((a - maximal(&f, x)).abs() < 1e-15, "x = {x}");
        }
    }

    #[test]
    fn commutator_examples() {
        let f = chi(0.0, 1.0);
        let b = chi(0.0, 1.0);
        assert_eq!(maximal_commutator(&chi(-5.0, 5.0).scale(3.0), &f, 0.5), 0.0);
        assert_eq!(maximal_commutator(&b, &f, 0.5), 0.0);
        let v = maximal_commutator(&b, &chi(1.0, 2.0), 0.5);
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(commutator(&b, &f, 2.0), 0.5);
    }

    #[test]
    fn hardy_examples() {
        let phi = chi(0.0, 1.0);
        let p1 = RadialProfile::new(phi.clone(), 1).unwrap();
        let p2 = RadialProfile::new(phi, 2).unwrap();
        assert_eq!(hardy(&p1, 2.0).value, 0.5);
        assert_eq!(hardy(&p2, 2.0).value, 0.25);
        let c = RadialProfile::new(chi(0.0, 10.0).scale(3.0), 3).unwrap();
        assert!((hardy(&c, 7.0).value - 3.0).abs() < 1e-15);
        let h0 = hardy(&c, 0.0);
        assert!(h0.at_origin && h0.value == 3.0);
    }

    #[test]
    fn profile_flags() {
        let inc = RadialProfile::new(StepFunction::new(vec![0.0, 1.0, 2.0], vec![1.0, 2.0]).unwrap(), 1).unwrap();
        assert!(!inc.is_nonincreasing());
        let gap = RadialProfile::new(chi(1.0, 2.0), 1).unwrap();
        assert!(!gap.is_nonincreasing());
        let dec = RadialProfile::new(StepFunction::new(vec![0.0, 1.0, 2.0], vec![2.0, 1.0]).unwrap(), 2).unwrap();
        assert!(dec.is_nonincreasing());
        assert_eq!(
            dec.even_extension(),
            StepFunction::new(vec![-2.0, -1.0, 1.0, 2.0], vec![1.0, 2.0, 1.0]).unwrap()
        );
        let json = serde_json::to_string(&dec).unwrap();
        assert_eq!(serde_json::from_str::<RadialProfile>(&json).unwrap(), dec);
        let bad = json.replace("2.0,1.0", "1.0,2.0");
        assert!(serde_json::from_str::<RadialProfile>(&bad).is_err());
    }
}
