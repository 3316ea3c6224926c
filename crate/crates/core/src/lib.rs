//! Goal language of an NXP-style inference system, evaluated four ways
//! (standard, continuation-passing, sequence, monadic) and compiled to a
//! small stack machine. The evaluators are meant to be checked against each
//! other; [`diff`] does exactly that.

pub mod diff;
pub mod error;
pub mod machine;
pub mod monads;
pub mod semantics;
pub mod syntax;
pub mod wm;

pub use error::EvalError;
pub use semantics::BoolSeq;
pub use syntax::{parse, pretty, Expr, Ident};
pub use wm::WorkingMemory;
