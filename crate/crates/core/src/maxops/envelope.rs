//! Certified envelopes of `Mf`, `M²f`, `C_b f` and `|[M, b]f|` as step functions.
//!
//! On a grid cell containing no breakpoint of `g`, `Mg` is a finite maximum of
//! functions monotone on the cell, so `max(Mg(l), Mg(r))` is its exact maximum
//! there. The lower side uses intervals that contain the whole cell:
//! `Mg ≥ avg[u, r]` for `u ≤ l` and `Mg ≥ avg[l, v]` for `v ≥ r`.
//!
//! Brackets hold on the envelope's grid domain only; outside it both are zero.

use serde::{Deserialize, Serialize};

use crate::parallel::par_map;
use crate::prefix::Prefix;
use crate::stepfn::{merge_sorted, EnvelopePair, Interval, StepFunction};

use super::maximal;

/// Refinement controls for envelope construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefinePolicy {
    /// Target relative width `(upper − lower)/upper` per cell.
    pub tol: f64,
    /// Maximum number of bisections of an initial cell.
    pub max_depth: u32,
    /// Domain half-width beyond the support, in multiples of the support length.
    pub reach: f64,
    /// Relative spread within which an intermediate envelope is merged before
    /// being fed to a second application of `M`.
    pub merge: f64,
    /// Overall cell budget; refinement stops early once it is spent.
    pub max_cells: usize,
}

impl Default for RefinePolicy {
    fn default() -> Self {
        Self { tol: 1e-3, max_depth: 24, reach: 64.0, merge: 1e-2, max_cells: 1 << 20 }
    }
}

impl RefinePolicy {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    /// Default domain for functions supported in `hull`.
    pub fn domain_for(&self, hull: &Interval) -> Interval {
        hull.expanded(self.reach * hull.length())
    }
}

struct Cell {
    l: f64,
    r: f64,
    lo: f64,
    hi: f64,
}

#[allow(clippy::too_many_arguments)]
fn refine_cell<F>(l: f64, r: f64, depth: u32, budget: &mut usize, policy: &RefinePolicy, floor: f64, bounds: &F, out: &mut Vec<Cell>)
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let (lo, hi) = bounds(l, r);
    let mid = 0.5 * (l + r);
    let done = hi - lo <= policy.tol * hi + floor || depth >= policy.max_depth || *budget <= 1 || !(l < mid && mid < r);
    if done {
        *budget = budget.saturating_sub(1);
        out.push(Cell { l, r, lo, hi });
        return;
    }
    refine_cell(l, mid, depth + 1, budget, policy, floor, bounds, out);
    refine_cell(mid, r, depth + 1, budget, policy, floor, bounds, out);
}

/// Bisects each cell of `grid` until its bracket from `bounds` is tight enough.
fn refine<F>(grid: &[f64], policy: &RefinePolicy, floor: f64, bounds: F) -> EnvelopePair
where
    F: Fn(f64, f64) -> (f64, f64) + Sync + Send,
{
    if grid.len() < 2 {
        return EnvelopePair::zero();
    }
    let cells: Vec<(f64, f64)> = grid.windows(2).map(|w| (w[0], w[1])).collect();
    let per_cell = (policy.max_cells / cells.len()).max(1);
    let pieces = par_map(&cells, |&(l, r)| {
        let mut out = Vec::new();
        let mut budget = per_cell;
        refine_cell(l, r, 0, &mut budget, policy, floor, &bounds, &mut out);
        out
    });
    let mut g = vec![grid[0]];
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for c in pieces.into_iter().flatten() {
        debug_assert_eq!(*g.last().unwrap(), c.l);
        g.push(c.r);
        lo.push(c.lo.max(0.0));
        hi.push(c.hi);
    }
    EnvelopePair::new(g, lo, hi).expect("refined grid is well formed")
}

fn initial_grid(domain: &Interval, breakpoints: &[f64]) -> Vec<f64> {
    let inner: Vec<f64> =
        breakpoints.iter().copied().filter(|&b| domain.left() < b && b < domain.right()).collect();
    merge_sorted(&[domain.left(), domain.right()], &inner)
}

/// Certified bracket of `Mf` on the default domain (support widened by `reach`).
pub fn maximal_envelope(f: &StepFunction, policy: &RefinePolicy) -> EnvelopePair {
    match f.support() {
        None => EnvelopePair::zero(),
        Some(s) => maximal_envelope_on(f, &policy.domain_for(&s), policy),
    }
}

/// Certified bracket of `Mf` on an explicit domain.
pub fn maximal_envelope_on(f: &StepFunction, domain: &Interval, policy: &RefinePolicy) -> EnvelopePair {
    if f.is_zero() {
        return EnvelopePair::zero();
    }
    let p = Prefix::new(f);
    let floor = 1e-14 * f.max_abs();
    refine(&initial_grid(domain, f.breakpoints()), policy, floor, |l, r| p.maximal_cell_bounds(l, r))
}

/// Two-sided enclosure of `M²f` on a domain `D`.
///
/// The upper side rests on `Mf ≤ g_upper` on `D` and `Mf(y) ≤ A/dist(y, supp f)`
/// off `D` (with `A = ∫|f|`); the latter tail contributes at most `A/d` to `M`
/// at points of `D`, where `d` is the gap between the support and that end of `D`.
#[derive(Clone, Debug)]
pub struct M2Bracket {
    pub envelope: EnvelopePair,
    /// Step majorant of `Mf` on the domain.
    pub g_upper: StepFunction,
    /// Step minorant of `Mf` on the domain.
    pub g_lower: StepFunction,
    /// Additive bound for the contribution of `Mf` outside the domain.
    pub tail_slack: f64,
}

impl M2Bracket {
    /// Pointwise certified upper bound of `M²f(x)` for `x` in the domain.
    pub fn upper_at(&self, x: f64) -> f64 {
        maximal(&self.g_upper, x) + self.tail_slack
    }

    /// Pointwise certified lower bound of `M²f(x)`.
    pub fn lower_at(&self, x: f64) -> f64 {
        maximal(&self.g_lower, x)
    }
}

/// Certified bracket of `M²f` on the default domain.
pub fn iterated_maximal(f: &StepFunction, policy: &RefinePolicy) -> EnvelopePair {
    match f.support() {
        None => EnvelopePair::zero(),
        Some(s) => iterated_maximal_on(f, &policy.domain_for(&s), policy).envelope,
    }
}

/// Bracket of `M²f` on `domain`, which must contain the support of `f` in its interior.
pub fn iterated_maximal_on(f: &StepFunction, domain: &Interval, policy: &RefinePolicy) -> M2Bracket {
    let zero = M2Bracket {
        envelope: EnvelopePair::zero(),
        g_upper: StepFunction::zero(),
        g_lower: StepFunction::zero(),
        tail_slack: 0.0,
    };
    let Some(s) = f.support() else { return zero };
    let first = maximal_envelope_on(f, domain, policy);
    let g_upper = first.upper().merge_within(policy.merge, true);
    let g_lower = first.lower().merge_within(policy.merge, false);
    let a = f.l1_norm();
    let mut tail_slack = 0.0;
    for d in [s.left() - domain.left(), domain.right() - s.right()] {
        tail_slack += if d > 0.0 { a / d } else { f64::INFINITY };
    }
    let up = maximal_envelope_on(&g_upper, domain, policy).upper().map(|v| v + tail_slack);
    let up = up.restrict(domain);
    let lo = maximal_envelope_on(&g_lower, domain, policy).lower();
    M2Bracket { envelope: EnvelopePair::from_sides(&lo, &up), g_upper, g_lower, tail_slack }
}

/// Pointwise certified upper bound of `M²f(x)` on the default domain.
pub fn m2_upper_at(f: &StepFunction, x: f64, policy: &RefinePolicy) -> f64 {
    match f.support() {
        None => 0.0,
        Some(s) => {
            let d = policy.domain_for(&s.including(x));
            iterated_maximal_on(f, &d, policy).upper_at(x)
        }
    }
}

/// Per distinct value `β` of `b`, a prefix table of some integrand built from `β`.
struct ByLevel {
    levels: Vec<(f64, Prefix)>,
}

impl ByLevel {
    fn new(b: &StepFunction, make: impl Fn(f64) -> Prefix) -> Self {
        let mut betas: Vec<f64> = b.values().to_vec();
        betas.push(0.0);
        betas.sort_by(f64::total_cmp);
        betas.dedup();
        Self { levels: betas.into_iter().map(|v| (v, make(v))).collect() }
    }

    fn get(&self, beta: f64) -> &Prefix {
        let i = self.levels.partition_point(|(v, _)| *v < beta);
        &self.levels[i].1
    }
}

fn commutator_domain(b: &StepFunction, f: &StepFunction, policy: &RefinePolicy) -> Option<Interval> {
    let s = f.support()?;
    let s = match b.support() {
        Some(t) => s.hull(&t),
        None => s,
    };
    Some(policy.domain_for(&s))
}

/// Certified bracket of `C_b f`: on a cell where `b = β`, `C_b f = M(|β − b|·|f|)`.
pub fn maximal_commutator_envelope(b: &StepFunction, f: &StepFunction, policy: &RefinePolicy) -> EnvelopePair {
    let Some(domain) = commutator_domain(b, f, policy) else { return EnvelopePair::zero() };
    let table = ByLevel::new(b, |beta| Prefix::new(&super::commutator_integrand(b, f, beta)));
    let floor = 1e-14 * f.max_abs() * (2.0 * b.max_abs()).max(1.0);
    let grid = initial_grid(&domain, &b.common_breakpoints(f));
    refine(&grid, policy, floor, |l, r| table.get(b.eval(0.5 * (l + r))).maximal_cell_bounds(l, r))
}

/// Certified bracket of `|[M, b]f| = |M(bf) − b·Mf|`.
pub fn commutator_envelope(b: &StepFunction, f: &StepFunction, policy: &RefinePolicy) -> EnvelopePair {
    let Some(domain) = commutator_domain(b, f, policy) else { return EnvelopePair::zero() };
    let pbf = Prefix::new(&b.combine(f, |u, v| u * v));
    let pf = Prefix::new(f);
    let floor = 1e-14 * f.max_abs() * (2.0 * b.max_abs()).max(1.0);
    let grid = initial_grid(&domain, &b.common_breakpoints(f));
    refine(&grid, policy, floor, |l, r| {
        let beta = b.eval(0.5 * (l + r));
        let (lo1, hi1) = pbf.maximal_cell_bounds(l, r);
        let (lo2, hi2) = pf.maximal_cell_bounds(l, r);
        let (a, c) = (beta * lo2, beta * hi2);
        let h_lo = lo1 - a.max(c);
        let h_hi = hi1 - a.min(c);
        let abs_hi = h_lo.abs().max(h_hi.abs());
        let abs_lo = if h_lo > 0.0 {
            h_lo
        } else if h_hi < 0.0 {
            -h_hi
        } else {
            0.0
        };
        (abs_lo, abs_hi)
    })
}
