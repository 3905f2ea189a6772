//! The proof kernel: script parsing, line-by-line checking, connection list
//! reduction, theorem extraction and theorem connection lists.

mod check;
pub mod clr;
mod script;

pub use check::{
    check_batch, check_line, check_proof, citation_order, extract, inject_premise, prune, BatchError, BatchItem,
    CheckError, ExtractError, LineFault, LineVerdict, Report,
};
pub use clr::{dependents_of, reduce, reduce_literal, reduce_theorem, Reduction, TclError};
pub use script::{parse_line, stated_block, Justification, ProofScript, ScriptError, ScriptLine};
