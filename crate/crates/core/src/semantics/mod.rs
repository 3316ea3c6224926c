//! Direct evaluators.
//!
//! * [`eval_std`] maps an expression to its boolean value.
//! * [`eval_cps`] threads an explicit continuation, left to right.
//! * [`eval_seq`] threads a [`BoolSeq`]: values are pushed at the front,
//!   evoked goals are appended at the back.
//!
//! Identifiers are resolved through the [`WorkingMemory`], so all three see
//! the same memoized values within one session.

mod cps;
mod seq;

pub use cps::{eval_cps, Continuation, EvalOutput};
pub use seq::BoolSeq;

use crate::error::EvalError;
use crate::syntax::Expr;
use crate::wm::WorkingMemory;

/// Standard semantics. `;` yields its right operand, `post` its atom and
/// `context` its left operand; the other operand is still evaluated for its
/// working-memory effects.
pub fn eval_std(e: &Expr, wm: &mut WorkingMemory) -> Result<bool, EvalError> {
    Ok(match e {
        Expr::Const(b) => *b,
        Expr::Var(x) => wm.get(x)?,
        Expr::Or(l, r) => {
            let a = eval_std(l, wm)?;
            a | eval_std(r, wm)?
        }
        Expr::And(l, r) => {
            let a = eval_std(l, wm)?;
            a & eval_std(r, wm)?
        }
        Expr::Seq(l, r) => {
            eval_std(l, wm)?;
            eval_std(r, wm)?
        }
        Expr::Post(a, g) => {
            let v = eval_std(a, wm)?;
            eval_std(g, wm)?;
            v
        }
        Expr::Context(l, r) => {
            let v = eval_std(l, wm)?;
            eval_std(r, wm)?;
            v
        }
    })
}

/// Sequence semantics.
///
/// ```text
/// [[b]] s            = ⟨b⟩ + s
/// [[E1 or E2]] s     = Or([[E2]]([[E1]] s))
/// [[E1 and E2]] s    = And([[E2]]([[E1]] s))
/// [[E1 ; E2]] s      = [[E2]]([[E1]] s)
/// [[b post E]] s     = ⟨b⟩ + s + [[E]]⟨⟩
/// [[E1 context E2]] s = [[E1]] s + [[E2]]⟨⟩
/// ```
///
/// Every evoked goal is also recorded in the working memory's posted list.
pub fn eval_seq(e: &Expr, s: BoolSeq, wm: &mut WorkingMemory) -> Result<BoolSeq, EvalError> {
    match e {
        Expr::Const(b) => {
            let mut s = s;
            s.push_front(*b);
            Ok(s)
        }
        Expr::Var(x) => {
            let v = wm.get(x)?;
            let mut s = s;
            s.push_front(v);
            Ok(s)
        }
        Expr::Or(l, r) => {
            let s = eval_seq(l, s, wm)?;
            eval_seq(r, s, wm)?.or_step()
        }
        Expr::And(l, r) => {
            let s = eval_seq(l, s, wm)?;
            eval_seq(r, s, wm)?.and_step()
        }
        Expr::Seq(l, r) => {
            let s = eval_seq(l, s, wm)?;
            eval_seq(r, s, wm)
        }
        Expr::Post(a, g) => {
            let mut s = eval_seq(a, s, wm)?;
            wm.post((**g).clone());
            let evoked = eval_seq(g, BoolSeq::new(), wm)?;
            s.append(&evoked);
            Ok(s)
        }
        Expr::Context(l, r) => {
            let mut s = eval_seq(l, s, wm)?;
            wm.post((**r).clone());
            let evoked = eval_seq(r, BoolSeq::new(), wm)?;
            s.append(&evoked);
            Ok(s)
        }
    }
}

/// Value of `e`: the front of its sequence-semantics result.
pub fn value_of(e: &Expr, wm: &mut WorkingMemory) -> Result<bool, EvalError> {
    let s = eval_seq(e, BoolSeq::new(), wm)?;
    Ok(s.top().expect("every expression pushes at least one value"))
}

/// Number of entries `e` pushes at the front of the sequence (evoked goals
/// go to the back and are not counted).
pub fn stack_width(e: &Expr) -> usize {
    match e {
        Expr::Const(_) | Expr::Var(_) | Expr::Post(..) => 1,
        Expr::Or(l, r) | Expr::And(l, r) => stack_width(l) + stack_width(r) - 1,
        Expr::Seq(l, r) => stack_width(l) + stack_width(r),
        Expr::Context(l, _) => stack_width(l),
    }
}

/// Whether the front of `eval_seq(e, s)` is `eval_std(e)`.
///
/// `;` leaves both operand values in the sequence, so when it sits (at any
/// depth of the front) under the right operand of `and`/`or`, the combining
/// step pairs up the wrong entries.
pub fn front_is_value(e: &Expr) -> bool {
    match e {
        Expr::Const(_) | Expr::Var(_) | Expr::Post(..) => true,
        Expr::Or(l, r) | Expr::And(l, r) => {
            front_is_value(l) && front_is_value(r) && stack_width(r) == 1
        }
        Expr::Seq(_, r) => front_is_value(r),
        Expr::Context(l, _) => front_is_value(l),
    }
}

/// Evaluates the registered goal `name` under sequence semantics, recording
/// its antecedents.
pub fn eval_goal(name: &str, s: BoolSeq, wm: &mut WorkingMemory) -> Result<BoolSeq, EvalError> {
    wm.evaluate_goal(name, |e, wm| eval_seq(e, s, wm))
}
