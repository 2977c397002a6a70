//! The RU calculus: formulas, traces, and evaluation.

pub mod eval;
pub mod formula;
pub mod trace;

pub use eval::{EvalOptions, Evaluator, Lookup};
pub use formula::{Atom, Formula, SpanExpr, TimeExpr};
pub use trace::{Span, Trace};
