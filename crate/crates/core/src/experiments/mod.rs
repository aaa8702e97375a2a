//! Reproducible experiments: the divergence example, empirical constants of
//! the weak-type estimates and seeded verification suites.

pub mod constants;
pub mod corpus;
pub mod counterexample;
pub mod suites;

pub use constants::{
    cb_chi_lower_check, pointwise_domination_suite, weak_morrey_m2_constant, weak_type_constant, ConstantReport,
    PointwiseReport, Sample, WeakOp, Witness,
};
pub use corpus::CorpusSpec;
pub use counterexample::{
    build_counterexample, counterexample_family, counterexample_table, counterexample_upper, m2_lower_bound,
    CounterexampleSpec, CounterexampleTable,
};
pub use suites::{run_suite, Check, Suite, SuiteConfig, SuiteReport};
