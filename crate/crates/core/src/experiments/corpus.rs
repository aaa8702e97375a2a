//! Seeded pseudo-random step functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::maxops::RadialProfile;
use crate::stepfn::StepFunction;

/// Parameters of a random corpus. Every report records the seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    /// Cells per function are drawn uniformly from `1..=max_cells`.
    pub max_cells: usize,
    /// Attach a random sign to each value.
    pub signed: bool,
    /// Round breakpoints to multiples of this step.
    pub quantum: Option<f64>,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self { seed: 0, count: 32, max_cells: 24, signed: false, quantum: None }
    }
}

impl CorpusSpec {
    pub fn new(seed: u64, count: usize) -> Self {
        Self { seed, count, ..Self::default() }
    }

    pub fn describe(&self) -> String {
        let mut s = format!("seed={} count={} max_cells={}", self.seed, self.count, self.max_cells);
        if self.signed {
            s.push_str(" signed");
        }
        if let Some(q) = self.quantum {
            s.push_str(&format!(" quantum={q:e}"));
        }
        s
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn generate(&self) -> Vec<StepFunction> {
        let mut rng = self.rng();
        (0..self.count).map(|_| random_step_function(&mut rng, self.max_cells, self.signed, self.quantum)).collect()
    }
}

/// Log-uniform magnitude in `[2⁻⁸, 2⁸]`.
pub fn random_value<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-8.0f64..=8.0).exp2()
}

/// Between 1 and `max_cells` cells with breakpoints uniform in `[0, 1]`.
pub fn random_step_function<R: Rng>(rng: &mut R, max_cells: usize, signed: bool, quantum: Option<f64>) -> StepFunction {
    let cells = rng.gen_range(1..=max_cells.max(1));
    let mut bps: Vec<f64> = (0..=cells).map(|_| rng.gen::<f64>()).collect();
    if let Some(q) = quantum {
        for b in &mut bps {
            *b = (*b / q).round() * q;
        }
    }
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    if bps.len() < 2 {
        let q = quantum.unwrap_or(0.5);
        bps = vec![bps[0], bps[0] + q];
    }
    let values = (1..bps.len())
        .map(|_| {
            let v = random_value(rng);
            if signed && rng.gen_bool(0.5) {
                -v
            } else {
                v
            }
        })
        .collect();
    StepFunction::new(bps, values).expect("sorted distinct breakpoints")
}

/// A random nonincreasing profile on `[0, r]` with `r ∈ [1/2, 2]` and up to `max_cells` cells.
pub fn random_decreasing_profile<R: Rng>(rng: &mut R, max_cells: usize, dimension: u32) -> RadialProfile {
    let cells = rng.gen_range(1..=max_cells.max(1));
    let r = rng.gen_range(0.5..=2.0);
    let mut inner: Vec<f64> = (1..cells).map(|_| rng.gen_range(0.0..r)).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    let mut bps = vec![0.0];
    bps.extend(inner.into_iter().filter(|&x| x > 0.0));
    bps.push(r);
    let mut values: Vec<f64> = (1..bps.len()).map(|_| random_value(rng)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let profile = StepFunction::new(bps, values).expect("sorted distinct breakpoints");
    RadialProfile::new(profile, dimension).expect("profile starts at the origin")
}
