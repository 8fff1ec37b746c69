//! Seeded Monte Carlo experiments: Bernoulli noise, decoding and first-flip
//! trials, parallel sweeps and their summary statistics.

mod rng;
mod sampling;
mod stats;
mod sweep;
mod trials;

pub use rng::{trial_rng, TrialRng};
pub use sampling::{sample_bernoulli, sample_mirrored_bernoulli};
pub use stats::{
    binomial_stderr, fit_line, geometric_gof, histogram, mean_stderr, median, GeometricModel,
    GofResult, HistBin, LineFit,
};
pub use sweep::{
    estimate_pdec, estimate_tff, exhaustive_pdec, validate_sparse_bound, ExperimentConfig,
    PdecPoint, SparseConfig, SparseLevelRow, SweepStats, TffPoint,
};
pub use trials::{
    run_decode_trial, run_ff_trial, run_ff_trial_full_state, FfMode, FfOutcome, TmaxPolicy,
    TrialClass, TrialOutcome, DEFAULT_FF_CAP,
};

#[allow(unused_imports)]
pub(crate) use sampling::fill_bernoulli;
#[allow(unused_imports)]
pub(crate) use trials::{decode_state, decode_stepper};
