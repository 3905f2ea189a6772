//! Programs-as-proofs: statements and program lists, data-driven theories,
//! extended program derivations, a proof-checking kernel and bounded evaluation.

pub mod engine;
pub mod equiv;
pub mod eval;
pub mod foundry;
pub mod kernel;
pub mod mach;
pub mod model;
pub mod theory;

pub use equiv::{io_equiv, Substitution};
pub use mach::MachParams;
pub use model::{ConstSet, Program, Statement, Token};
pub use theory::{Conclusion, RuleKind, RuleRecord, Theory};
