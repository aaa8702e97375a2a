//! Certified upper bounds for `sup_Q J(Q)` over all intervals by branch and bound.
//!
//! Intervals meeting the support `[s_l, s_r]` either lie inside the
//! certification hull `C = [s_l − d, s_r + d]` or have length at least `d`; the
//! latter are covered by the objective's tail bound, the former by boxes of
//! endpoint pairs `(u, v) ∈ [u_lo, u_hi] × [v_lo, v_hi]`, each endpoint range
//! inside one cell of the input. Every interval `Q` in a box satisfies
//! `[u_hi, v_lo] ⊆ Q ⊆ [u_lo, v_hi]`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::parallel::par_map;
use crate::stepfn::{merge_sorted, Interval};

#[derive(Clone, Copy, Debug)]
pub(crate) struct EndpointBox {
    pub u_lo: f64,
    pub u_hi: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl EndpointBox {
    pub fn outer(&self) -> (f64, f64) {
        (self.u_lo, self.v_hi)
    }

    pub fn outer_len(&self) -> f64 {
        self.v_hi - self.u_lo
    }

    /// Length of the common part of all intervals, `0` if it is empty.
    pub fn inner_len(&self) -> f64 {
        (self.v_lo - self.u_hi).max(0.0)
    }

    fn split(&self) -> [EndpointBox; 2] {
        if self.u_hi - self.u_lo >= self.v_hi - self.v_lo {
            let m = 0.5 * (self.u_lo + self.u_hi);
            [EndpointBox { u_hi: m, ..*self }, EndpointBox { u_lo: m, ..*self }]
        } else {
            let m = 0.5 * (self.v_lo + self.v_hi);
            [EndpointBox { v_hi: m, ..*self }, EndpointBox { v_lo: m, ..*self }]
        }
    }

    fn is_tiny(&self) -> bool {
        let scale = self.u_lo.abs().max(self.v_hi.abs()).max(f64::MIN_POSITIVE);
        let eps = 8.0 * f64::EPSILON * scale;
        self.u_hi - self.u_lo <= eps && self.v_hi - self.v_lo <= eps
    }

    fn is_empty(&self) -> bool {
        !(self.u_lo < self.v_hi)
    }

    fn center(&self) -> Option<Interval> {
        let u = 0.5 * (self.u_lo + self.u_hi);
        let v = 0.5 * (self.v_lo + self.v_hi);
        Interval::new(u, v).ok()
    }
}

/// A nonnegative interval functional with box and tail bounds.
pub(crate) trait Objective: Sync {
    fn eval(&self, q: &Interval) -> f64;
    /// Upper bound of `J` over all intervals of the box.
    fn box_upper(&self, b: &EndpointBox) -> f64;
    /// Upper bound of `J(Q)` over intervals of length at least `min_len`.
    fn tail_upper(&self, min_len: f64) -> f64;
}

struct Node {
    ub: f64,
    seq: u64,
    b: EndpointBox,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub.total_cmp(&other.ub).then(other.seq.cmp(&self.seq))
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Certificate {
    pub upper: f64,
    /// True if the relative gap was reached within budget.
    pub converged: bool,
}

const SAFETY: f64 = 1.0 + 1e-12;

/// Upper bound of `sup_Q J(Q)` given the input's breakpoints, its support and a
/// known attained value `incumbent`. `min_gap` is the initial half-width of the
/// certification hull beyond the support.
pub(crate) fn certify<O: Objective>(
    obj: &O,
    breakpoints: &[f64],
    support: &Interval,
    incumbent: f64,
    min_gap: f64,
    gap: f64,
    budget: usize,
) -> Certificate {
    let mut d = min_gap.max(support.length());
    let mut tail = obj.tail_upper(d);
    for _ in 0..64 {
        if tail <= incumbent * (1.0 + gap) {
            break;
        }
        d *= 2.0;
        tail = obj.tail_upper(d);
    }
    let ends = [support.left() - d, support.right() + d];
    let e = merge_sorted(&ends, breakpoints);
    let mut boxes = Vec::with_capacity(e.len() * e.len() / 2);
    for i in 0..e.len() - 1 {
        for j in i..e.len() - 1 {
            boxes.push(EndpointBox { u_lo: e[i], u_hi: e[i + 1], v_lo: e[j], v_hi: e[j + 1] });
        }
    }
    let ubs = par_map(&boxes, |b| obj.box_upper(b));
    let mut inc = incumbent;
    let mut heap = BinaryHeap::with_capacity(boxes.len());
    let mut seq = 0u64;
    for (b, ub) in boxes.into_iter().zip(ubs) {
        if ub > inc {
            heap.push(Node { ub, seq, b });
        }
        seq += 1;
    }
    let mut converged = false;
    let mut floor = 0.0f64;
    let mut spent = 0usize;
    loop {
        let Some(top) = heap.peek() else {
            converged = true;
            break;
        };
        if top.ub <= inc * (1.0 + gap) {
            converged = true;
            break;
        }
        if spent >= budget {
            break;
        }
        spent += 1;
        let node = heap.pop().unwrap();
        if node.b.is_tiny() {
            // Further splitting cannot separate endpoints in floating point.
            if let Some(q) = node.b.center() {
                inc = inc.max(obj.eval(&q));
            }
            let (l, r) = node.b.outer();
            if let Ok(q) = Interval::new(l, r) {
                inc = inc.max(obj.eval(&q));
            }
            floor = floor.max(node.ub.min(inc * (1.0 + gap)));
            continue;
        }
        for child in node.b.split() {
            if child.is_empty() {
                continue;
            }
            if let Some(q) = child.center() {
                inc = inc.max(obj.eval(&q));
            }
            let ub = obj.box_upper(&child).min(node.ub);
            if ub > inc {
                heap.push(Node { ub, seq, b: child });
                seq += 1;
            }
        }
    }
    let open = heap.peek().map_or(0.0, |n| n.ub);
    Certificate { upper: open.max(inc).max(tail).max(floor) * SAFETY, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `J(Q) = |Q ∩ [0,1]| / |Q|^{1/2}`, maximized by `Q = [0, 1]` with value 1.
    struct Overlap;

    impl Objective for Overlap {
        fn eval(&self, q: &Interval) -> f64 {
            let ov = (q.right().min(1.0) - q.left().max(0.0)).max(0.0);
            ov / q.length().sqrt()
        }
        fn box_upper(&self, b: &EndpointBox) -> f64 {
            let (l, r) = b.outer();
            let ov = (r.min(1.0) - l.max(0.0)).max(0.0);
            let inner = b.inner_len();
            let by_len = if inner > 0.0 { ov / inner.sqrt() } else { f64::INFINITY };
            by_len.min(ov.sqrt())
        }
        fn tail_upper(&self, min_len: f64) -> f64 {
            1.0 / min_len.sqrt()
        }
    }

    #[test]
    fn certifies_known_supremum() {
        let s = Interval::new(0.0, 1.0).unwrap();
        let c = certify(&Overlap, &[0.0, 1.0], &s, 1.0, 1.0, 1e-4, 100_000);
        assert!(c.converged);
        assert!(c.upper >= 1.0 && c.upper <= 1.0 + 2e-4, "{}", c.upper);
        let loose = certify(&Overlap, &[0.0, 1.0], &s, 0.5, 1.0, 1e-4, 100_000);
        assert!(loose.upper >= 1.0);
    }
}
