//! Nonlinear programs whose optima bound the peaceable queens density from
//! above, a multi-start local solver for them, and a plain-text exchange
//! format.

pub mod export;
pub mod expr;
pub mod model;
pub mod solver;

use thiserror::Error;

pub use export::{export_model, parse_model};
pub use expr::{Expr, Lin, SqrtMode};
pub use model::{build_model, evaluate, Constraint, Evaluation, ModelKind, NlpModel, Rel, VarDecl};
pub use solver::{solve, SolveReport, SolverConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NlpError {
    #[error("point has {got} coordinates, model has {expected} variables")]
    Dimension { expected: usize, got: usize },
    #[error("unknown model {0:?}; expected odd-torus, even-torus or regular")]
    UnknownModel(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("at least one start is required")]
    NoStarts,
}
