//! Piecewise functions `t ↦ Σ a_k t^k + c₁ ln t + c₂ ln²t` on `[0, ∞)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxops::RadialProfile;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogPolyPiece {
    pub start: f64,
    /// `f64::INFINITY` for the last piece.
    pub end: f64,
    /// `a_0, a_1, ...`.
    pub coeffs: Vec<f64>,
    pub log1: f64,
    pub log2: f64,
}

impl LogPolyPiece {
    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &a in self.coeffs.iter().rev() {
            acc = acc * t + a;
        }
        if self.log1 != 0.0 || self.log2 != 0.0 {
            let l = t.ln();
            acc += self.log1 * l + self.log2 * l * l;
        }
        acc
    }

    /// `t·P'(t)`.
    pub fn t_deriv(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &a) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * t + k as f64 * a;
        }
        acc *= t;
        acc + self.log1 + if self.log2 != 0.0 { 2.0 * self.log2 * t.ln() } else { 0.0 }
    }

    fn is_constant_poly(&self) -> bool {
        self.coeffs.iter().skip(1).all(|&a| a == 0.0)
    }
}

/// Contiguous pieces covering `[0, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLogPoly {
    pieces: Vec<LogPolyPiece>,
}

impl PiecewiseLogPoly {
    pub fn new(pieces: Vec<LogPolyPiece>) -> Result<Self> {
        let ok = !pieces.is_empty()
            && pieces[0].start == 0.0
            && pieces.last().unwrap().end == f64::INFINITY
            && pieces.windows(2).all(|w| w[0].end == w[1].start)
            && pieces.iter().all(|p| p.start < p.end);
        if !ok {
            return Err(Error::Precondition("pieces must be contiguous and cover [0, ∞)".into()));
        }
        Ok(Self { pieces })
    }

    pub fn pieces(&self) -> &[LogPolyPiece] {
        &self.pieces
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let i = self.pieces.partition_point(|p| p.end <= t).min(self.pieces.len() - 1);
        self.pieces[i].eval(t)
    }

    /// Largest jump at a junction, relative to the larger side.
    pub fn max_junction_jump(&self) -> f64 {
        self.pieces
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0].eval(w[0].end), w[1].eval(w[1].start));
                (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    /// Is the last piece of the form `a₀ + c₁ ln t + c₂ ln²t`?
    pub(crate) fn tail_is_log_only(&self) -> bool {
        self.pieces.last().unwrap().is_constant_poly()
    }

    /// `x ↦ ∫_0^x P(t)/t dt`, exact. Requires `P` to vanish like a power at 0
    /// and at most one power of `ln t` per piece.
    pub fn antiderivative_over_t(&self) -> Result<PiecewiseLogPoly> {
        let mut out = Vec::with_capacity(self.pieces.len());
        let mut carry = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            if p.log2 != 0.0 {
                return Err(Error::Precondition("ln²t/t would need a ln³ term".into()));
            }
            let a0 = p.coeffs.first().copied().unwrap_or(0.0);
            if i == 0 && (a0 != 0.0 || p.log1 != 0.0) {
                return Err(Error::Precondition("integrand P(t)/t diverges at 0".into()));
            }
            let mut coeffs = vec![0.0; p.coeffs.len().max(1)];
            for k in 1..p.coeffs.len() {
                coeffs[k] = p.coeffs[k] / k as f64;
            }
            let mut q = LogPolyPiece { start: p.start, end: p.end, coeffs, log1: a0, log2: 0.5 * p.log1 };
            let at_start = if p.start == 0.0 { 0.0 } else { q.eval(p.start) };
            q.coeffs[0] = carry - at_start;
            if q.end.is_finite() {
                carry = q.eval(q.end);
            }
            out.push(q);
        }
        PiecewiseLogPoly::new(out)
    }
}

/// `I(t) = ∫_0^t |φ(ρ)| ρ^{n−1} dρ` as a piecewise polynomial of degree `n`.
pub fn inner_integral(p: &RadialProfile) -> PiecewiseLogPoly {
    let n = p.dimension() as usize;
    let nf = n as f64;
    let zero_piece = |start: f64, end: f64, c: f64| LogPolyPiece { start, end, coeffs: vec![c], log1: 0.0, log2: 0.0 };
    let prof = p.profile();
    let mut pieces = Vec::new();
    let Some(&b0) = prof.breakpoints().first() else {
        return PiecewiseLogPoly::new(vec![zero_piece(0.0, f64::INFINITY, 0.0)]).unwrap();
    };
    if b0 > 0.0 {
        pieces.push(zero_piece(0.0, b0, 0.0));
    }
    let mut acc = 0.0;
    for (l, r, v) in prof.cells() {
        let v = v.abs();
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = v / nf;
        coeffs[0] = acc - v * l.powi(n as i32) / nf;
        pieces.push(LogPolyPiece { start: l, end: r, coeffs, log1: 0.0, log2: 0.0 });
        acc += v * (r.powi(n as i32) - l.powi(n as i32)) / nf;
    }
    pieces.push(zero_piece(*prof.breakpoints().last().unwrap(), f64::INFINITY, acc));
    PiecewiseLogPoly::new(pieces).expect("profile cells are contiguous")
}
