//! Three-valued implicative interdependency rules and synchronous cascades.
//!
//! States are `0` (failed), `1` (degraded) and `2` (fully operational). A rule
//! `target <- hard: a & b | c` reads "target needs (a and b) or c"; conjunction
//! is `min`, disjunction is `max`. Hard rules pass the value through, soft rules
//! never push their target below degraded.

mod engine;
mod rules;

pub use engine::{cascade, evaluate_expression, step, CascadeTrace, RuleSet};
pub use rules::{parse_rules, DependencyRule, Expression, RuleKind};

use thiserror::Error;

pub type State = u8;

pub const FAILED: State = 0;
pub const DEGRADED: State = 1;
pub const OPERATIONAL: State = 2;

#[derive(Debug, Error)]
pub enum MiimError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: rule for `{target}` references itself")]
    SelfReference { line: usize, target: String },
    #[error("line {line}: unknown entity `{id}`")]
    UnknownEntity { line: usize, id: String },
    #[error("duplicate entity id `{0}`")]
    DuplicateEntity(String),
    #[error("state {state} of `{id}` is outside {{0, 1, 2}}")]
    InvalidState { id: String, state: State },
    #[error("cascade did not settle within {rounds} rounds; dynamics are not monotone")]
    NoFixedPoint { rounds: usize },
}
