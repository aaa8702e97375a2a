//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use morreylab::StepFunction;
use proptest::prelude::*;

/// Cumulative integral of `|f|` built from the raw cells, independent of the library's prefix tables.
pub struct Cumulative {
    xs: Vec<f64>,
    vals: Vec<f64>,
    cum: Vec<f64>,
}

impl Cumulative {
    pub fn new(f: &StepFunction) -> Self {
        Self::with(f, f64::abs)
    }

    pub fn with(f: &StepFunction, g: impl Fn(f64) -> f64) -> Self {
        let xs = f.breakpoints().to_vec();
        let vals: Vec<f64> = f.values().iter().map(|&v| g(v)).collect();
        let mut cum = vec![0.0];
        for i in 0..vals.len() {
            cum.push(cum[i] + (xs[i + 1] - xs[i]) * vals[i]);
        }
        Self { xs, vals, cum }
    }

    /// `∫_{-∞}^{y}`.
    pub fn at(&self, y: f64) -> f64 {
        if self.xs.is_empty() || y <= self.xs[0] {
            return 0.0;
        }
        let n = self.xs.len();
        if y >= self.xs[n - 1] {
            return self.cum[n - 1];
        }
        let i = self.xs.partition_point(|&b| b <= y) - 1;
        self.cum[i] + (y - self.xs[i]) * self.vals[i]
    }

    pub fn avg(&self, u: f64, v: f64) -> f64 {
        (self.at(v) - self.at(u)) / (v - u)
    }

    /// Average by summing the overlapped cells; no cancellation on short intervals.
    pub fn avg_direct(&self, u: f64, v: f64) -> f64 {
        if self.xs.is_empty() {
            return 0.0;
        }
        let n = self.xs.len();
        let mut i = self.xs.partition_point(|&b| b <= u).saturating_sub(1);
        let mut s = 0.0;
        while i + 1 < n && self.xs[i] < v {
            let l = self.xs[i].max(u);
            let r = self.xs[i + 1].min(v);
            if r > l {
                s += (r - l) * self.vals[i];
            }
            i += 1;
        }
        s / (v - u)
    }
}

/// `∫_a^b |f|^p` summed cell by cell.
pub fn integral_pow(f: &StepFunction, a: f64, b: f64, p: f64) -> f64 {
    let bp = f.breakpoints();
    let mut s = 0.0;
    for (i, v) in f.values().iter().enumerate() {
        let l = bp[i].max(a);
        let r = bp[i + 1].min(b);
        if r > l {
            s += (r - l) * v.abs().powf(p);
        }
    }
    s
}

pub fn chi(a: f64, b: f64) -> StepFunction {
    StepFunction::indicator(a, b).unwrap()
}

/// Step functions on a dyadic grid (exact arithmetic) with up to `max_cells` cells.
pub fn step_fn(max_cells: usize, signed: bool) -> impl Strategy<Value = StepFunction> {
    (1..=max_cells)
        .prop_flat_map(move |n| {
            let vals = if signed {
                prop::collection::vec(prop_oneof![-64i32..=-1, 1i32..=64], n).boxed()
            } else {
                prop::collection::vec(1i32..=64, n).boxed()
            };
            (prop::collection::btree_set(-64i32..=64, n + 1), vals)
        })
        .prop_map(|(bps, vals)| {
            let bps: Vec<f64> = bps.into_iter().map(|b| b as f64 / 32.0).collect();
            let vals: Vec<f64> = vals.into_iter().map(|v| v as f64 / 8.0).collect();
            StepFunction::new(bps, vals).unwrap()
        })
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
