//! Local cellular-automaton decoding of the one-dimensional repetition code.
//!
//! The crate is split into five areas:
//!
//! * [`ca`]: the TLV and GKL automata, boundary handling and orbit analysis;
//! * [`decoders`]: syndromes, global majority voting and the syndrome-delta
//!   form of the automaton;
//! * [`analytics`]: closed-form probabilities, light-cone and sparse-error
//!   bounds, and the cluster decomposition;
//! * [`noise_sim`]: seeded Monte Carlo experiments;
//! * [`circuit2d`]: the feed-forward register-stack decoding circuit.

pub mod analytics;
pub mod bits;
pub mod ca;
pub mod circuit2d;
pub mod decoders;
pub mod error;
pub mod noise_sim;

pub use bits::{BitString, ChainState, CorrectionMask, Syndrome};
pub use ca::{BoundaryMode, EvolutionOutcome, RuleFamily, RuleSet, Terminal};
pub use error::{Error, Result};
