//! Prefix integrals of a nonnegative step function and one-sided average maxima.

use crate::stepfn::StepFunction;

/// `C(y) = ∫_{-∞}^y g` for `g = |f|` (or a transformed version), with O(log m) lookup.
#[derive(Clone, Debug)]
pub(crate) struct Prefix {
    bps: Vec<f64>,
    vals: Vec<f64>,
    cum: Vec<f64>,
}

impl Prefix {
    pub fn new(f: &StepFunction) -> Self {
        Self::with_map(f, f64::abs)
    }

    pub fn with_map(f: &StepFunction, g: impl Fn(f64) -> f64) -> Self {
        let bps = f.breakpoints().to_vec();
        let vals: Vec<f64> = f.values().iter().map(|&v| g(v)).collect();
        let mut cum = Vec::with_capacity(bps.len());
        let mut acc = 0.0;
        if !bps.is_empty() {
            cum.push(0.0);
            for (i, v) in vals.iter().enumerate() {
                acc += v * (bps[i + 1] - bps[i]);
                cum.push(acc);
            }
        }
        Self { bps, vals, cum }
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.bps
    }

    pub fn total(&self) -> f64 {
        self.cum.last().copied().unwrap_or(0.0)
    }

    pub fn at(&self, y: f64) -> f64 {
        if self.vals.is_empty() || y <= self.bps[0] {
            return 0.0;
        }
        let last = self.bps.len() - 1;
        if y >= self.bps[last] {
            return self.cum[last];
        }
        let i = self.bps.partition_point(|&b| b <= y) - 1;
        self.cum[i] + self.vals[i] * (y - self.bps[i])
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.at(b) - self.at(a)
    }

    /// Right limit `g(y⁺)`.
    pub fn right_value(&self, y: f64) -> f64 {
        if self.vals.is_empty() || y < self.bps[0] || y >= *self.bps.last().unwrap() {
            return 0.0;
        }
        self.vals[self.bps.partition_point(|&b| b <= y) - 1]
    }

    /// Left limit `g(y⁻)`.
    pub fn left_value(&self, y: f64) -> f64 {
        if self.vals.is_empty() || y <= self.bps[0] || y > *self.bps.last().unwrap() {
            return 0.0;
        }
        self.vals[self.bps.partition_point(|&b| b < y) - 1]
    }

    /// `sup { avg_[u, end] g : u ≤ u_max }` for `u_max ≤ end`. When `u_max == end`
    /// the degenerate interval contributes the limit `g(end⁻)`.
    ///
    /// On each cell the map `u ↦ (A + cΔ)/(L + Δ)` is monotone, so only cell
    /// ends and `u_max` itself need checking.
    pub fn sup_left(&self, end: f64, u_max: f64) -> f64 {
        if self.vals.is_empty() {
            return 0.0;
        }
        let c_end = self.at(end);
        let mut best = if u_max < end {
            (c_end - self.at(u_max)) / (end - u_max)
        } else {
            self.left_value(end)
        };
        let n = self.bps.partition_point(|&b| b < u_max);
        for i in 0..n {
            let u = self.bps[i];
            let a = (c_end - self.cum[i]) / (end - u);
            if a > best {
                best = a;
            }
        }
        best
    }

    /// `sup { avg_[start, v] g : v ≥ v_min }` for `v_min ≥ start`; mirror of [`sup_left`](Self::sup_left).
    pub fn sup_right(&self, start: f64, v_min: f64) -> f64 {
        if self.vals.is_empty() {
            return 0.0;
        }
        let c_start = self.at(start);
        let mut best = if v_min > start {
            (self.at(v_min) - c_start) / (v_min - start)
        } else {
            self.right_value(start)
        };
        let k = self.bps.partition_point(|&b| b <= v_min);
        for j in k..self.bps.len() {
            let v = self.bps[j];
            let a = (self.cum[j] - c_start) / (v - start);
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Exact `Mg(x)` as the larger one-sided supremum.
    pub fn maximal_at(&self, x: f64) -> f64 {
        self.sup_left(x, x).max(self.sup_right(x, x))
    }

    /// Certified `(min, max)` of `Mg` over the closed cell `[l, r]`, valid when no
    /// breakpoint of `g` lies strictly inside it.
    pub fn maximal_cell_bounds(&self, l: f64, r: f64) -> (f64, f64) {
        let hi = self.maximal_at(l).max(self.maximal_at(r));
        let lo = self.sup_left(r, l).max(self.sup_right(l, r));
        (lo.min(hi), hi)
    }
}
