//! Finite interval families standing in for "all intervals" in supremum norms.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::stepfn::{merge_sorted, Interval};

/// How intervals are generated over the enumeration hull `H`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyMode {
    /// All pairs of breakpoints (plus the hull ends).
    BreakpointPairs,
    /// A multi-scale ladder: at level `d` the grid of spacing `|H|/2^d` with spans
    /// of 8 to 18 cells (1 to 18 on the finest level).
    Dyadic { depth: u32 },
    /// All pairs from a uniform grid with `resolution` cells.
    Dense { resolution: u32 },
}

/// Interval family plus branch-and-bound controls for the certified upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilySpec {
    pub mode: FamilyMode,
    /// Maximum number of generated intervals (counted before de-duplication).
    pub cap: usize,
    /// Enumeration hull; defaults to the support widened by its length on each side.
    pub hull: Option<Interval>,
    /// Relative gap at which branch and bound stops.
    pub gap: f64,
    /// Maximum number of boxes branch and bound may split.
    pub budget: usize,
}

impl Default for FamilySpec {
    fn default() -> Self {
        Self { mode: FamilyMode::Dyadic { depth: 12 }, cap: 200_000, hull: None, gap: 1e-3, budget: 200_000 }
    }
}

const LADDER_MIN: u64 = 8;
const LADDER_MAX: u64 = 18;

fn span_range(level: u32, depth: u32) -> (u64, u64) {
    let n = 1u64 << level;
    let lo = if level == depth || n < LADDER_MIN { 1 } else { LADDER_MIN };
    (lo, LADDER_MAX.min(n))
}

impl FamilySpec {
    pub fn breakpoint_pairs() -> Self {
        Self { mode: FamilyMode::BreakpointPairs, ..Self::default() }
    }

    pub fn dyadic(depth: u32) -> Self {
        Self { mode: FamilyMode::Dyadic { depth }, ..Self::default() }
    }

    pub fn dense(resolution: u32) -> Self {
        Self { mode: FamilyMode::Dense { resolution }, ..Self::default() }
    }

    pub fn with_hull(mut self, hull: Interval) -> Self {
        self.hull = Some(hull);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.cap < 1 {
            return Err(domain("family cap must be at least 1"));
        }
        if !(self.gap >= 0.0) {
            return Err(domain("branch-and-bound gap must be nonnegative"));
        }
        if let FamilyMode::Dense { resolution: 0 } = self.mode {
            return Err(domain("dense family needs a positive resolution"));
        }
        if let FamilyMode::Dyadic { depth } = self.mode {
            if depth > 40 {
                return Err(domain("dyadic depth above 40 is not supported"));
            }
        }
        Ok(())
    }

    /// Enumeration hull for an input supported in `support`.
    pub fn hull_for(&self, support: &Interval) -> Interval {
        self.hull.unwrap_or_else(|| support.expanded(support.length()))
    }

    fn mode_count(&self) -> u64 {
        match self.mode {
            FamilyMode::BreakpointPairs => 0,
            FamilyMode::Dense { resolution } => {
                let n = resolution as u64;
                n * (n + 1) / 2
            }
            FamilyMode::Dyadic { depth } => (0..=depth)
                .map(|d| {
                    let n = 1u64 << d;
                    let (lo, hi) = span_range(d, depth);
                    (lo..=hi).map(|s| n + 1 - s).sum::<u64>()
                })
                .sum(),
        }
    }

    /// Number of intervals [`enumerate`](Self::enumerate) would generate.
    pub fn count(&self, breakpoints: &[f64], support: &Interval, extra: &[f64]) -> u64 {
        let e = self.endpoints(breakpoints, support, extra).len() as u64;
        e * e.saturating_sub(1) / 2 + self.mode_count()
    }

    fn endpoints(&self, breakpoints: &[f64], support: &Interval, extra: &[f64]) -> Vec<f64> {
        let h = self.hull_for(support);
        let mut pts: Vec<f64> = breakpoints.iter().chain(extra).copied().filter(|&x| h.contains(x)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        merge_sorted(&[h.left(), h.right()], &pts)
    }

    /// All family intervals, sorted lexicographically and de-duplicated. The
    /// breakpoint pairs (with `extra` points) are always included.
    pub fn enumerate(&self, breakpoints: &[f64], support: &Interval, extra: &[f64]) -> Result<Vec<Interval>> {
        self.validate()?;
        let count = self.count(breakpoints, support, extra);
        if count > self.cap as u64 {
            return Err(Error::CapExceeded { count: count as usize, cap: self.cap });
        }
        let e = self.endpoints(breakpoints, support, extra);
        let mut out = Vec::with_capacity(count as usize);
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                out.push(Interval::new(e[i], e[j])?);
            }
        }
        let h = self.hull_for(support);
        let at = |k: u64, n: u64| if k == n { h.right() } else { h.left() + h.length() * (k as f64) / (n as f64) };
        match self.mode {
            FamilyMode::BreakpointPairs => {}
            FamilyMode::Dense { resolution } => {
                let n = resolution as u64;
                for i in 0..n {
                    for j in i + 1..=n {
                        out.push(Interval::new(at(i, n), at(j, n))?);
                    }
                }
            }
            FamilyMode::Dyadic { depth } => {
                for d in 0..=depth {
                    let n = 1u64 << d;
                    let (lo, hi) = span_range(d, depth);
                    for s in lo..=hi {
                        for k in 0..=n - s {
                            out.push(Interval::new(at(k, n), at(k + s, n))?);
                        }
                    }
                }
            }
        }
        out.sort_by(|a, b| a.lex_cmp(b));
        out.dedup();
        Ok(out)
    }
}
