//! Closed-form probabilities, light-cone and sparse-error bounds, and the
//! cluster decomposition behind them.

mod closed_form;
mod sparse;
pub mod special;

pub(crate) use closed_form::check_prob;
pub use closed_form::{
    decay_time, flip_prob, lightcone_bound, lightcone_scaling_limit, ln_logical_fail_prob_with,
    log_depth_critical_rate, logical_fail_prob, logical_fail_prob_with, logical_fail_upper_bound,
    stabilized_survival, Bound, FailMethod, NoiseParams, ScalingRegime,
};
pub use sparse::{
    cluster_level_bound, decode_failure_bound, sparse_decompose, sparse_params,
    strictly_decreasing_tail, survival_bound_finite, Cluster, ClusterFamily, SparseBoundParams,
};
pub use special::{ln_reg_incomplete_beta, reg_incomplete_beta};
