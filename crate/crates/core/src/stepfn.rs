//! Compactly supported piecewise-constant functions on the real line.
//!
//! A [`StepFunction`] is stored in canonical form: breakpoints strictly
//! increasing, one value per cell, no two adjacent cells with the same value and
//! no zero-valued boundary cell. The function vanishes outside the outermost
//! breakpoints. Values at breakpoints carry no meaning for any integral or
//! measure; point evaluation at a breakpoint returns the right-cell value.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A nonempty open interval `(left, right)` of the real line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    left: f64,
    right: f64,
}

impl Interval {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        if !(left.is_finite() && right.is_finite()) {
            return Err(domain(format!("interval endpoints must be finite, got ({left}, {right})")));
        }
        if !(left < right) {
            return Err(domain(format!("interval requires left < right, got ({left}, {right})")));
        }
        Ok(Self { left, right })
    }

    #[inline]
    pub fn left(&self) -> f64 {
        self.left
    }

    #[inline]
    pub fn right(&self) -> f64 {
        self.right
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    /// Membership in the closure `[left, right]`.
    pub fn contains(&self, x: f64) -> bool {
        self.left <= x && x <= self.right
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { left: self.left.min(other.left), right: self.right.max(other.right) }
    }

    /// Extends the interval to include `x` (no-op if already inside).
    pub fn including(&self, x: f64) -> Interval {
        Interval { left: self.left.min(x), right: self.right.max(x) }
    }

    /// Widens the interval by `margin` on each side.
    pub fn expanded(&self, margin: f64) -> Interval {
        Interval { left: self.left - margin, right: self.right + margin }
    }

    /// Lexicographic order on `(left, right)`; used to break ties deterministically.
    pub fn lex_cmp(&self, other: &Interval) -> Ordering {
        self.left.total_cmp(&other.left).then(self.right.total_cmp(&other.right))
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.left, i.right]
    }
}

#[derive(Serialize, Deserialize)]
struct RawStepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// Compactly supported piecewise-constant function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepFunction", into = "RawStepFunction")]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawStepFunction> for StepFunction {
    type Error = Error;
    fn try_from(raw: RawStepFunction) -> Result<Self> {
        StepFunction::new(raw.breakpoints, raw.values)
    }
}

impl From<StepFunction> for RawStepFunction {
    fn from(f: StepFunction) -> Self {
        RawStepFunction { breakpoints: f.breakpoints, values: f.values }
    }
}

impl Default for StepFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl StepFunction {
    /// Builds a step function from `m + 1` breakpoints and `m` cell values, then
    /// canonicalizes. An empty breakpoint list (or a single breakpoint with no
    /// values) gives the zero function.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() <= 1 {
            if !values.is_empty() {
                return Err(Error::InvalidStepFunction(format!(
                    "{} values given for {} breakpoints",
                    values.len(),
                    breakpoints.len()
                )));
            }
            if let Some(b) = breakpoints.first() {
                if !b.is_finite() {
                    return Err(Error::InvalidStepFunction("non-finite breakpoint".into()));
                }
            }
            return Ok(Self::zero());
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidStepFunction(format!(
                "expected {} values for {} breakpoints, got {}",
                breakpoints.len() - 1,
                breakpoints.len(),
                values.len()
            )));
        }
        if let Some(b) = breakpoints.iter().find(|b| !b.is_finite()) {
            return Err(Error::InvalidStepFunction(format!("non-finite breakpoint {b}")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidStepFunction(format!("non-finite value {v}")));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidStepFunction(format!(
                "breakpoints must be strictly increasing, found {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self::canonical(breakpoints, values))
    }

    /// Builds from disjoint cells `(left, right, value)` in any order; gaps between
    /// cells are filled with zero.
    pub fn from_cells(cells: &[(f64, f64, f64)]) -> Result<Self> {
        let mut cells: Vec<(f64, f64, f64)> = cells.to_vec();
        cells.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut bps = Vec::with_capacity(2 * cells.len());
        let mut vals = Vec::with_capacity(2 * cells.len());
        for &(l, r, v) in &cells {
            if !(l < r) {
                return Err(Error::InvalidStepFunction(format!("empty cell ({l}, {r})")));
            }
            match bps.last().copied() {
                None => bps.push(l),
                Some(last) if last < l => {
                    vals.push(0.0);
                    bps.push(l);
                }
                Some(last) if last == l => {}
                Some(last) => {
                    return Err(Error::InvalidStepFunction(format!(
                        "cells overlap: one ends at {last}, next starts at {l}"
                    )))
                }
            }
            bps.push(r);
            vals.push(v);
        }
        Self::new(bps, vals)
    }

    /// Canonicalizes already-validated data.
    fn canonical(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        let mut bps: Vec<f64> = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        bps.push(breakpoints[0]);
        for (i, &v) in values.iter().enumerate() {
            let v = if v == 0.0 { 0.0 } else { v };
            if vals.last() == Some(&v) {
                *bps.last_mut().unwrap() = breakpoints[i + 1];
            } else {
                vals.push(v);
                bps.push(breakpoints[i + 1]);
            }
        }
        let first = vals.iter().position(|&v| v != 0.0);
        match first {
            None => Self::zero(),
            Some(first) => {
                let last = vals.iter().rposition(|&v| v != 0.0).unwrap();
                Self { breakpoints: bps[first..=last + 1].to_vec(), values: vals[first..=last].to_vec() }
            }
        }
    }

    pub fn zero() -> Self {
        Self { breakpoints: Vec::new(), values: Vec::new() }
    }

    /// `value · χ_[left, right]`.
    pub fn indicator_scaled(left: f64, right: f64, value: f64) -> Result<Self> {
        Interval::new(left, right)?;
        Self::new(vec![left, right], vec![value])
    }

    /// `χ_[left, right]`.
    pub fn indicator(left: f64, right: f64) -> Result<Self> {
        Self::indicator_scaled(left, right, 1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_cells(&self) -> usize {
        self.values.len()
    }

    /// Iterates over cells as `(left, right, value)`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.breakpoints[i], self.breakpoints[i + 1], v))
    }

    /// Convex hull of the support, `None` for the zero function.
    pub fn support(&self) -> Option<Interval> {
        if self.is_zero() {
            None
        } else {
            Some(Interval { left: self.breakpoints[0], right: *self.breakpoints.last().unwrap() })
        }
    }

    /// Index of the cell containing `x` (right-continuous convention).
    fn cell_index(&self, x: f64) -> Option<usize> {
        if self.is_zero() || x < self.breakpoints[0] || x >= *self.breakpoints.last().unwrap() {
            return None;
        }
        Some(self.breakpoints.partition_point(|&b| b <= x) - 1)
    }

    /// Point value; at a breakpoint the right-cell value is returned.
    pub fn eval(&self, x: f64) -> f64 {
        self.cell_index(x).map_or(0.0, |i| self.values[i])
    }

    /// Left limit `f(x⁻)`.
    pub fn eval_left(&self, x: f64) -> f64 {
        if self.is_zero() || x <= self.breakpoints[0] || x > *self.breakpoints.last().unwrap() {
            return 0.0;
        }
        self.values[self.breakpoints.partition_point(|&b| b < x) - 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(min, max)` of `f` over cells meeting `(a, b)`, counting the zero region
    /// outside the support when `(a, b)` reaches it. `(0, 0)` for empty input.
    pub fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        if self.is_zero() || !(a < b) {
            return (0.0, 0.0);
        }
        let (s, e) = (self.breakpoints[0], *self.breakpoints.last().unwrap());
        let (mut lo, mut hi) = if a < s || b > e { (0.0f64, 0.0f64) } else { (f64::INFINITY, f64::NEG_INFINITY) };
        let start = self.breakpoints.partition_point(|&x| x <= a).saturating_sub(1);
        for i in start..self.values.len() {
            if self.breakpoints[i] >= b {
                break;
            }
            if self.breakpoints[i + 1] > a {
                lo = lo.min(self.values[i]);
                hi = hi.max(self.values[i]);
            }
        }
        if lo > hi {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    /// `max |f|` over `(a, b)`.
    pub fn max_abs_on(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = self.range_on(a, b);
        lo.abs().max(hi.abs())
    }

    /// `∫ |f|`.
    pub fn l1_norm(&self) -> f64 {
        self.cells().map(|(l, r, v)| (r - l) * v.abs()).sum()
    }

    /// Exact `∫_a^b g(f)` for a cellwise map `g` with `g(0) = 0`.
    fn integrate_with(&self, a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
        if self.is_zero() || !(a < b) {
            return 0.0;
        }
        let start = self.breakpoints.partition_point(|&x| x <= a).saturating_sub(1);
        let mut sum = 0.0;
        for i in start..self.values.len() {
            let l = self.breakpoints[i];
            if l >= b {
                break;
            }
            let r = self.breakpoints[i + 1];
            let overlap = r.min(b) - l.max(a);
            if overlap > 0.0 {
                sum += overlap * g(self.values[i]);
            }
        }
        sum
    }

    /// Exact `∫_I f` as a finite sum of cell overlaps.
    pub fn integrate(&self, interval: &Interval) -> f64 {
        self.integrate_with(interval.left, interval.right, |v| v)
    }

    /// `∫_I |f|^p`.
    pub fn integrate_abs_pow(&self, interval: &Interval, p: f64) -> f64 {
        if p == 1.0 {
            self.integrate_with(interval.left, interval.right, f64::abs)
        } else {
            self.integrate_with(interval.left, interval.right, |v| v.abs().powf(p))
        }
    }

    /// Mean value `f_I`.
    pub fn average(&self, interval: &Interval) -> f64 {
        self.integrate(interval) / interval.length()
    }

    /// Applies `g` to every cell value.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> StepFunction {
        if self.is_zero() {
            return Self::zero();
        }
        Self::canonical(self.breakpoints.clone(), self.values.iter().map(|&v| g(v)).collect())
    }

    pub fn abs(&self) -> StepFunction {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> StepFunction {
        self.map(|v| c * v)
    }

    /// `x ↦ f(x / s)` for `s > 0`.
    pub fn dilate(&self, s: f64) -> Result<StepFunction> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(domain(format!("dilation factor must be positive, got {s}")));
        }
        Ok(Self { breakpoints: self.breakpoints.iter().map(|b| b * s).collect(), values: self.values.clone() })
    }

    /// `x ↦ f(x - h)`.
    pub fn translate(&self, h: f64) -> StepFunction {
        Self { breakpoints: self.breakpoints.iter().map(|b| b + h).collect(), values: self.values.clone() }
    }

    /// `f · χ_I`.
    pub fn restrict(&self, interval: &Interval) -> StepFunction {
        let mut bps = vec![interval.left];
        let mut vals = Vec::new();
        for (l, r, v) in self.cells() {
            let (l, r) = (l.max(interval.left), r.min(interval.right));
            if l < r {
                if *bps.last().unwrap() < l {
                    vals.push(0.0);
                    bps.push(l);
                }
                vals.push(v);
                bps.push(r);
            }
        }
        if vals.is_empty() {
            return Self::zero();
        }
        Self::canonical(bps, vals)
    }

    /// Merged sorted breakpoint set of `self` and `other`.
    pub fn common_breakpoints(&self, other: &StepFunction) -> Vec<f64> {
        merge_sorted(&self.breakpoints, &other.breakpoints)
    }

    /// Values of `self` on the cells of a sorted grid (cell `i` is `[grid[i], grid[i+1]]`).
    /// The grid is assumed to refine this function's breakpoints inside its range.
    pub fn values_on_grid(&self, grid: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(grid.len().saturating_sub(1));
        let mut j = 0usize;
        for w in grid.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if self.is_zero() || mid < self.breakpoints[0] || mid >= *self.breakpoints.last().unwrap() {
                out.push(0.0);
                continue;
            }
            while self.breakpoints[j + 1] <= mid {
                j += 1;
            }
            while self.breakpoints[j] > mid {
                j -= 1;
            }
            out.push(self.values[j]);
        }
        out
    }

    /// Pointwise `op(f, g)` on the common refinement. The result is restricted to
    /// the hull of both supports, so `op(0, 0)` should be `0`.
    pub fn combine(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> StepFunction {
        let grid = self.common_breakpoints(other);
        if grid.len() < 2 {
            return Self::zero();
        }
        let a = self.values_on_grid(&grid);
        let b = other.values_on_grid(&grid);
        let vals = a.iter().zip(&b).map(|(&x, &y)| op(x, y)).collect();
        Self::canonical(grid, vals)
    }

    /// `(b⁺, b⁻)` with `b = b⁺ − b⁻` and `|b| = b⁺ + b⁻`.
    pub fn pos_neg_parts(&self) -> (StepFunction, StepFunction) {
        (self.map(|v| v.max(0.0)), self.map(|v| (-v).max(0.0)))
    }

    /// Distinct values of `|f|` on `interval` with the measure each occupies,
    /// sorted by decreasing value. Zero values are omitted.
    pub fn levels_on(&self, interval: &Interval) -> Vec<Level> {
        let mut levels = Vec::new();
        if self.is_zero() {
            return levels;
        }
        let start = self.breakpoints.partition_point(|&x| x <= interval.left).saturating_sub(1);
        for i in start..self.values.len() {
            let l = self.breakpoints[i];
            if l >= interval.right {
                break;
            }
            let overlap = self.breakpoints[i + 1].min(interval.right) - l.max(interval.left);
            let v = self.values[i].abs();
            if overlap > 0.0 && v > 0.0 {
                levels.push(Level { value: v, measure: overlap });
            }
        }
        compress_levels(levels)
    }

    /// All levels of `|f|` over the whole line.
    pub fn levels(&self) -> Vec<Level> {
        match self.support() {
            Some(s) => self.levels_on(&s),
            None => Vec::new(),
        }
    }

    /// Exact Lebesgue measure of `{x : |f(x)| > s}`.
    pub fn distribution(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(domain(format!("distribution level must be nonnegative, got {s}")));
        }
        Ok(self.cells().filter(|c| c.2.abs() > s).map(|(l, r, _)| r - l).sum())
    }

    /// Nonincreasing rearrangement `f*` as a step function on `[0, |supp f|]`.
    pub fn rearrangement(&self) -> StepFunction {
        let levels = self.levels();
        if levels.is_empty() {
            return Self::zero();
        }
        let mut bps = Vec::with_capacity(levels.len() + 1);
        let mut vals = Vec::with_capacity(levels.len());
        let mut t = 0.0;
        bps.push(0.0);
        for lv in &levels {
            t += lv.measure;
            bps.push(t);
            vals.push(lv.value);
        }
        Self::canonical(bps, vals)
    }

    /// `f**(t) = (1/t) ∫_0^t f*(s) ds` for `t > 0`.
    pub fn double_star(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(domain(format!("f** requires t > 0, got {t}")));
        }
        let star = self.rearrangement();
        if star.is_zero() {
            return Ok(0.0);
        }
        Ok(star.integrate_with(0.0, t, |v| v) / t)
    }

    /// Greedily merges runs of adjacent cells of `|f|` whose spread stays within
    /// `rel · max`, keeping the run maximum (`keep_max`) or minimum. The result is
    /// a pointwise upper (resp. lower) bound of `|f|`.
    pub fn merge_within(&self, rel: f64, keep_max: bool) -> StepFunction {
        if self.is_zero() {
            return Self::zero();
        }
        let mut bps = vec![self.breakpoints[0]];
        let mut vals = Vec::new();
        let (mut lo, mut hi) = (self.values[0].abs(), self.values[0].abs());
        for i in 1..self.values.len() {
            let v = self.values[i].abs();
            let (nlo, nhi) = (lo.min(v), hi.max(v));
            if nhi - nlo <= rel * nhi {
                lo = nlo;
                hi = nhi;
            } else {
                vals.push(if keep_max { hi } else { lo });
                bps.push(self.breakpoints[i]);
                lo = v;
                hi = v;
            }
        }
        vals.push(if keep_max { hi } else { lo });
        bps.push(*self.breakpoints.last().unwrap());
        Self::canonical(bps, vals)
    }

    /// Replaces groups of adjacent cells by a single cell carrying the group
    /// minimum of `|f|` (so the result stays below `|f|`), leaving at most
    /// `max_cells` cells over the support hull.
    pub fn coarsen_below(&self, max_cells: usize) -> StepFunction {
        self.coarsen(max_cells, f64::min, f64::INFINITY)
    }

    /// As [`coarsen_below`](Self::coarsen_below) with the group maximum of `|f|`.
    pub fn coarsen_above(&self, max_cells: usize) -> StepFunction {
        self.coarsen(max_cells, f64::max, 0.0)
    }

    fn coarsen(&self, max_cells: usize, pick: fn(f64, f64) -> f64, init: f64) -> StepFunction {
        let m = self.values.len();
        let max_cells = max_cells.max(1);
        if m <= max_cells {
            return self.abs();
        }
        let group = m.div_ceil(max_cells);
        let mut bps = vec![self.breakpoints[0]];
        let mut vals = Vec::new();
        for chunk_start in (0..m).step_by(group) {
            let end = (chunk_start + group).min(m);
            let v = self.values[chunk_start..end].iter().fold(init, |acc, v| pick(acc, v.abs()));
            vals.push(v);
            bps.push(self.breakpoints[end]);
        }
        Self::canonical(bps, vals)
    }
}

/// A value of `|f|` and the measure of the set where it is attained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    pub value: f64,
    pub measure: f64,
}

/// Sorts by decreasing value and merges equal values.
pub(crate) fn compress_levels(mut levels: Vec<Level>) -> Vec<Level> {
    levels.sort_by(|a, b| b.value.total_cmp(&a.value));
    let mut out: Vec<Level> = Vec::with_capacity(levels.len());
    for lv in levels {
        match out.last_mut() {
            Some(last) if last.value == lv.value => last.measure += lv.measure,
            _ => out.push(lv),
        }
    }
    out
}

pub(crate) fn merge_sorted(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}

/// Certified two-sided bracket of a nonnegative function on a grid:
/// `lower[i] ≤ g ≤ upper[i]` on `[grid[i], grid[i+1]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopePair {
    grid: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl EnvelopePair {
    pub fn new(grid: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 {
            if lower.is_empty() && upper.is_empty() {
                return Ok(Self::zero());
            }
            return Err(Error::InvalidStepFunction("envelope grid needs at least two points".into()));
        }
        if lower.len() + 1 != grid.len() || upper.len() + 1 != grid.len() {
            return Err(Error::InvalidStepFunction("envelope lengths do not match its grid".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidStepFunction("envelope grid must be strictly increasing".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidStepFunction("envelope lower exceeds upper".into()));
        }
        Ok(Self { grid, lower, upper })
    }

    pub fn zero() -> Self {
        Self { grid: Vec::new(), lower: Vec::new(), upper: Vec::new() }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn lower_values(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper_values(&self) -> &[f64] {
        &self.upper
    }

    pub fn num_cells(&self) -> usize {
        self.lower.len()
    }

    pub fn domain(&self) -> Option<Interval> {
        if self.grid.len() < 2 {
            None
        } else {
            Some(Interval { left: self.grid[0], right: *self.grid.last().unwrap() })
        }
    }

    pub fn lower(&self) -> StepFunction {
        self.side(&self.lower)
    }

    pub fn upper(&self) -> StepFunction {
        self.side(&self.upper)
    }

    fn side(&self, vals: &[f64]) -> StepFunction {
        if self.grid.len() < 2 {
            return StepFunction::zero();
        }
        StepFunction::canonical(self.grid.clone(), vals.to_vec())
    }

    /// `(lower, upper)` at `x`; zero outside the grid.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        if self.grid.len() < 2 || x < self.grid[0] || x > *self.grid.last().unwrap() {
            return (0.0, 0.0);
        }
        let i = (self.grid.partition_point(|&b| b <= x).max(1) - 1).min(self.lower.len() - 1);
        (self.lower[i], self.upper[i])
    }

    /// Largest relative width `(upper − lower) / upper` over cells.
    pub fn max_relative_width(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| if *u > 0.0 { (u - l) / u } else { 0.0 })
            .fold(0.0, f64::max)
    }

    /// Re-expresses both sides on a common grid with another envelope.
    pub(crate) fn from_sides(lower: &StepFunction, upper: &StepFunction) -> Self {
        let grid = lower.common_breakpoints(upper);
        if grid.len() < 2 {
            return Self::zero();
        }
        let lo = lower.values_on_grid(&grid);
        let up = upper.values_on_grid(&grid);
        let lo = lo.iter().zip(&up).map(|(l, u)| l.min(*u)).collect();
        Self { grid, lower: lo, upper: up }
    }
}

#[derive(Serialize, Deserialize)]
struct RawEnvelope {
    lower: StepFunction,
    upper: StepFunction,
}

impl Serialize for EnvelopePair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawEnvelope { lower: self.lower(), upper: self.upper() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EnvelopePair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawEnvelope::deserialize(d)?;
        let grid = raw.lower.common_breakpoints(&raw.upper);
        if grid.len() < 2 {
            return Ok(Self::zero());
        }
        let lower = raw.lower.values_on_grid(&grid);
        let upper = raw.upper.values_on_grid(&grid);
        EnvelopePair::new(grid, lower, upper).map_err(serde::de::Error::custom)
    }
}
