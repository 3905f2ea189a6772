//! Names, statements, program lists and list utilities.

pub mod lists;
mod program;
mod statement;
mod token;

pub use program::{ConcatError, Program, ProgramWarning, StructuralError};
pub use statement::{ParseError, Statement};
pub(crate) use statement::lex;
pub use token::{ConstSet, Token};
pub(crate) use token::is_name;
