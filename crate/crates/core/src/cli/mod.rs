//! The `.gx` scripting language behind the `grhom` binary.

pub mod ast;
pub mod exec;
pub mod parser;

pub use ast::{Expr, Pos, Script, Statement};
pub use exec::{check, run_script, CliError, OutputRecord, Report, RingInfo, RunOptions, Session, Value};
pub use parser::{parse, ParseError};
