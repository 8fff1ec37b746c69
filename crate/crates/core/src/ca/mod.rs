//! Cellular-automaton engine: local rules, boundaries, stepping and orbit
//! analysis.

mod analysis;
mod engine;
mod rules;

#[allow(unused_imports)]
pub(crate) use analysis::classify_with;
pub use analysis::{
    classify_evolution, default_cap, enumerate_fixed_points, measure_eroder, EroderRow,
    EroderTable, EvolutionOutcome, Terminal, EXHAUSTIVE_FIXED_POINT_LEN,
};
#[allow(unused_imports)]
pub(crate) use engine::check_causality;
pub use engine::{evolve, step, step_scalar, Stepper};
pub(crate) use rules::resolve_cell;
pub use rules::{
    gkl_local_rule, maj3, resolve_index, tlv_local_rule, BoundaryMode, Parity, Resolved,
    RuleFamily, RuleSet,
};
