use crate::syntax::Ident;

/// Failure of any evaluator, the working memory, or the abstract machine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    /// Every channel declined to supply a value.
    #[error("no value could be acquired for `{0}`")]
    Unvalued(Ident),
    #[error("`{op}` needs at least 2 entries, sequence has {len}")]
    Underflow { op: &'static str, len: usize },
    #[error("`{0}` is not supported by this evaluator")]
    Unsupported(&'static str),
    #[error("no goal named `{0}` is registered")]
    UnknownGoal(String),
    #[error("goal `{0}` is already registered")]
    DuplicateGoal(String),
}
