//! Exact and certified numerics for maximal operators, Orlicz averages and
//! Morrey-type norms on compactly supported step functions of one variable.
//!
//! Everything operates on [`StepFunction`]. Pointwise maximal operators are
//! exact; function-valued outputs come as certified [`EnvelopePair`]s; norms
//! defined by a supremum over all intervals come as [`NormEstimate`]s holding a
//! value attained on an explicit interval and a certified upper bound.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod family;
pub mod io;
pub mod maxops;
pub mod norms;
pub mod orlicz;
pub mod radial;
pub mod stepfn;

mod certify;
mod parallel;
mod prefix;

pub use error::{Error, Result};
pub use maxops::{
    commutator, fractional_maximal, hardy, maximal, maximal_commutator, RadialProfile, RefinePolicy,
};
pub use family::{FamilyMode, FamilySpec};
pub use norms::NormEstimate;
pub use orlicz::OrliczGauge;
pub use stepfn::{EnvelopePair, Interval, Level, StepFunction};
