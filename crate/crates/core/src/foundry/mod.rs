//! Empirical arms of the iterated axiomatic method: soundness sampling of
//! stored rules, purge of falsified axioms with their dependents, relabeling
//! of proved axioms, bounded axiom search and a round-robin driver.

mod mutants;
mod sample;
mod schedule;
mod search;
mod store;

use thiserror::Error;

pub use mutants::{mutants, Mutant, MUTATIONS};
pub use sample::{
    soundness_sample, typed_free_vars, Counterexample, Failure, Outcome, SoundnessTest, SoundnessVerdict, DEFAULT_AUTOMATON,
    DEFAULT_RETRIES,
};
pub use schedule::{Event, Foundry};
pub use search::{canonical_key, search_axioms, SearchConfig, SearchReport, MAX_ATOMS, MAX_PREMISE};
pub use store::{purge, relabel_sweep, rules_equivalent, SweepReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoundryError {
    #[error("atom `{0}` has no evaluator hook")]
    NoEvaluatorHook(String),
    #[error("no sampler for values of type `{0}`")]
    NoGenerator(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("search cap exceeded: {0}")]
    CapExceeded(String),
    #[error("{0}")]
    Invalid(String),
}
