//! A goal-directed logic engine, a query-relevance program slicer, and a
//! household task planner built on both.
//!
//! - [`term`], [`syntax`], [`parser`]: the rule language.
//! - [`engine`]: SLDNF resolution with variant loop checking, plus a bottom-up oracle.
//! - [`relevance`]: predicate dependency graphs and pruning.
//! - [`world`]: the discrete household simulator and its fact encoding.
//! - [`planner`]: the planning knowledge base and plan/execute loop.
//! - [`bench`]: pruned vs unpruned planning timings.

pub mod bench;
pub mod engine;
pub mod parser;
pub mod planner;
pub mod relevance;
pub mod syntax;
pub mod term;
pub mod world;

pub use engine::{solve, Answer, SolveConfig, SolveError};
pub use parser::{format_term, parse_program, parse_query, ParseError};
pub use syntax::{Clause, Literal, PredId, Program};
pub use term::{Substitution, Term, Var};
