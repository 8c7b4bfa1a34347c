//! Monotone functions on the real line and the estimates built on them.

mod interval;
mod maximal;
mod monotone;
mod stieltjes;

pub use interval::{
    interval_overlap_reduce, step_chebyshev, union_components, union_length, ChebyshevReport, IntervalSpec,
    StepFunction,
};
pub use maximal::{maximal_function, maximal_scan, maximal_superlevel, MaximalValue, Superlevel};
pub use monotone::{
    discontinuities, jordan_decomposition, mu_length, one_sided_limits, MonotoneFn, Node, PiecewiseLinear,
};
pub use stieltjes::{
    sample_variation, stieltjes_integral, stieltjes_integral_with, total_variation, Partition, StieltjesOptions,
    StieltjesOutcome, VariationEstimate,
};
