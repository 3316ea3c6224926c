use serde::Serialize;

use crate::error::EvalError;
use crate::syntax::Expr;
use crate::wm::WorkingMemory;

/// What a continuation finally hands back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalOutput {
    pub value: bool,
    /// Whether control left through the distinguished `exit` continuation.
    pub via_exit: bool,
    pub log: Vec<String>,
}

type KFn<'a> = dyn Fn(bool, &mut WorkingMemory) -> Result<EvalOutput, EvalError> + 'a;

/// A continuation: what to do with a boolean result.
pub struct Continuation<'a>(Box<KFn<'a>>);

impl<'a> Continuation<'a> {
    pub fn new(k: impl Fn(bool, &mut WorkingMemory) -> Result<EvalOutput, EvalError> + 'a) -> Self {
        Continuation(Box::new(k))
    }

    /// Returns control to the caller of the top-level evaluation.
    pub fn exit() -> Self {
        Continuation::new(|v, _| {
            Ok(EvalOutput {
                value: v,
                via_exit: true,
                log: vec![format!("exit {v}")],
            })
        })
    }

    /// Hands the value back unchanged, without going through `exit`.
    pub fn identity() -> Self {
        Continuation::new(|v, _| Ok(EvalOutput { value: v, via_exit: false, log: Vec::new() }))
    }

    pub fn apply(&self, v: bool, wm: &mut WorkingMemory) -> Result<EvalOutput, EvalError> {
        (self.0)(v, wm)
    }
}

/// Continuation-passing evaluation, left to right:
///
/// ```text
/// [[b]] k          = k b
/// [[E1 or E2]] k   = [[E1]](λe1. [[E2]](λe2. k(e1 | e2)))
/// [[E1 and E2]] k  = [[E1]](λe1. [[E2]](λe2. k(e1 & e2)))
/// [[E1 ; E2]] k    = [[E1]](λ_. [[E2]] k)
/// ```
///
/// `post` and `context` are rejected.
pub fn eval_cps(e: &Expr, k: &Continuation<'_>, wm: &mut WorkingMemory) -> Result<EvalOutput, EvalError> {
    match e {
        Expr::Const(b) => k.apply(*b, wm),
        Expr::Var(x) => {
            let v = wm.get(x)?;
            k.apply(v, wm)
        }
        Expr::Or(l, r) => eval_cps(
            l,
            &Continuation::new(|e1, wm| {
                eval_cps(r, &Continuation::new(|e2, wm| k.apply(e1 | e2, wm)), wm)
            }),
            wm,
        ),
        Expr::And(l, r) => eval_cps(
            l,
            &Continuation::new(|e1, wm| {
                eval_cps(r, &Continuation::new(|e2, wm| k.apply(e1 & e2, wm)), wm)
            }),
            wm,
        ),
        Expr::Seq(l, r) => eval_cps(l, &Continuation::new(|_, wm| eval_cps(r, k, wm)), wm),
        Expr::Post(..) => Err(EvalError::Unsupported("post")),
        Expr::Context(..) => Err(EvalError::Unsupported("context")),
    }
}
