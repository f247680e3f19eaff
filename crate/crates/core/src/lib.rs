//! Core library of the non-standard-time verification toolchain: exact
//! arithmetic for instants `v + k*eps`, the temporal logic over that domain
//! (syntax, parser, ground-truth evaluator), the linear temporal logic with
//! past it translates into (syntax, lasso-trace evaluator), the translation
//! itself with its well-formedness axioms and the history/trace flattening,
//! and the counter-machine formula fixtures.

pub mod formula;
pub mod gadgets;
pub mod nstime;
pub mod oracle;
pub mod parser;
pub mod pltlb;
pub mod structure;
pub mod translate;
mod upseq;

pub use formula::{expand_derived, render_formula, DerivedOp, Formula};
pub use nstime::{ns_compare, NsInstant, StepKind};
pub use parser::{parse_formula, ParseError};
