//! The controlled-English phrase language.

pub mod ast;
pub mod compile;
pub mod config;
pub mod lexer;
pub mod parser;

pub use ast::{Node, Sort};
pub use compile::{compile, compile_formula, CompileEnv, CompiledValue};
pub use config::ReasonablenessConfig;
pub use parser::{is_reserved, parse};
