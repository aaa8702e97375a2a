//! The even function `f = Σ_k χ_{[a_k, a_k+1]}` (mirrored) with `a_k = k² ln²(k+e)`.
//!
//! `f` has bounded Zygmund-Morrey norm while `Mf` has not. The contrast is
//! split into a certified upper bound of `‖f_K‖` (a norm bracket) and an
//! exact lower bound of `‖M²f_K‖_{M_{1,λ}}`, which is equivalent to
//! `‖Mf_K‖` in the Zygmund-Morrey norm.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::family::FamilySpec;
use crate::norms::{zygmund_morrey_norm, NormEstimate};
use crate::stepfn::StepFunction;

/// Hump geometry of the truncated counterexample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    #[serde(rename = "K")]
    pub k: usize,
}

impl CounterexampleSpec {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(domain("the counterexample needs at least one hump"));
        }
        Ok(Self { k })
    }

    /// Left end of hump `k`.
    pub fn hump_start(k: usize) -> f64 {
        let k = k as f64;
        let l = (k + E).ln();
        k * k * l * l
    }

    /// Half the gap between hump `k` and hump `k + 1`.
    pub fn gap(k: usize) -> f64 {
        (Self::hump_start(k + 1) - Self::hump_start(k) - 1.0) / 2.0
    }

    pub fn starts(&self) -> Vec<f64> {
        (0..self.k).map(Self::hump_start).collect()
    }

    pub fn build(&self) -> StepFunction {
        let mut cells = Vec::with_capacity(2 * self.k);
        for a in self.starts() {
            cells.push((a, a + 1.0, 1.0));
            if a > 0.0 {
                cells.push((-a - 1.0, -a, 1.0));
            } else {
                cells.push((-1.0, 0.0, 1.0));
            }
        }
        StepFunction::from_cells(&cells).expect("humps are disjoint")
    }
}

pub fn build_counterexample(k: usize) -> Result<StepFunction> {
    Ok(CounterexampleSpec::new(k)?.build())
}

/// Family used for the counterexample norms: every pair of hump endpoints
/// (always present) plus a coarse dyadic ladder for the long intervals.
pub fn counterexample_family() -> FamilySpec {
    FamilySpec::dyadic(10)
}

/// Zygmund-Morrey bracket of `f_K`.
pub fn counterexample_upper(k: usize, lambda: f64, family: &FamilySpec, tol: f64) -> Result<NormEstimate> {
    zygmund_morrey_norm(&build_counterexample(k)?, lambda, family, tol)
}

/// `sup_{2 ≤ k ≤ K} a_k^{λ−1} Σ_{j=1}^{k−1} (ln² m_j − 1)/2`.
///
/// On `[a_j + e, a_j + m_j]` one has `M²f(x) ≥ ln(x − a_j)/(x − a_j)`, whose
/// integral there is `(ln² m_j − 1)/2`, and these intervals lie in `[0, a_k]`
/// for `j < k`. So the value is a lower bound of `‖M²f_K‖_{M_{1,λ}}`.
pub fn m2_lower_bound(k: usize, lambda: f64) -> Result<f64> {
    if k < 2 {
        return Err(domain(format!("m2_lower_bound needs K >= 2, got {k}")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(domain(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    let mut sum = 0.0;
    let mut best = 0.0f64;
    for kk in 2..=k {
        let m = CounterexampleSpec::gap(kk - 1);
        if m >= E {
            let l = m.ln();
            sum += (l * l - 1.0) / 2.0;
        }
        best = best.max(CounterexampleSpec::hump_start(kk).powf(lambda - 1.0) * sum);
    }
    Ok(best)
}

/// One row of the divergence table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    #[serde(rename = "K")]
    pub k: usize,
    pub f_norm_lo: f64,
    pub f_norm_hi: f64,
    #[serde(rename = "Mf_lower_bound")]
    pub mf_lower_bound: f64,
    /// `Mf_lower_bound / f_norm_hi`.
    pub ratio: f64,
}

/// Growth summary over several truncations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleTable {
    pub lambda: f64,
    pub rows: Vec<CounterexampleRow>,
    /// Max over min of `f_norm_hi`.
    pub upper_spread: f64,
    /// `Mf_lower_bound` at the largest `K` over that at the smallest.
    pub lower_growth: f64,
    /// Least-squares slope of `Mf_lower_bound` against `ln(K + e)`.
    pub slope: f64,
}

impl CounterexampleTable {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fitted_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn counterexample_table(ks: &[usize], lambda: f64, family: &FamilySpec, tol: f64) -> Result<CounterexampleTable> {
    if ks.len() < 2 || ks.iter().any(|&k| k < 2) {
        return Err(domain("the table needs at least two truncations, each with K >= 2"));
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let up = counterexample_upper(k, lambda, family, tol)?;
        let lb = m2_lower_bound(k, lambda)?;
        rows.push(CounterexampleRow {
            k,
            f_norm_lo: up.value,
            f_norm_hi: up.upper_bound,
            mf_lower_bound: lb,
            ratio: lb / up.upper_bound,
        });
    }
    let his: Vec<f64> = rows.iter().map(|r| r.f_norm_hi).collect();
    let max = his.iter().copied().fold(f64::MIN, f64::max);
    let min = his.iter().copied().fold(f64::MAX, f64::min);
    let (first, last) = (rows.iter().min_by_key(|r| r.k).unwrap(), rows.iter().max_by_key(|r| r.k).unwrap());
    let xs: Vec<f64> = rows.iter().map(|r| (r.k as f64 + E).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mf_lower_bound).collect();
    Ok(CounterexampleTable {
        lambda,
        upper_spread: max / min,
        lower_growth: last.mf_lower_bound / first.mf_lower_bound,
        slope: fitted_slope(&xs, &ys),
        rows,
    })
}
