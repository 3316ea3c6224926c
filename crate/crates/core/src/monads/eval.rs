use super::sequence::{and_top, emit, fetch, or_top, post_op, seq_star, seq_unit, SeqComp};
use crate::error::EvalError;
use crate::semantics::BoolSeq;
use crate::syntax::Expr;
use crate::wm::WorkingMemory;

/// Builds the sequence-triple computation for `e`.
///
/// ```text
/// eval(b)              = emit b
/// eval(x)              = fetch x * emit
/// eval(E1 or E2)       = eval(E1) * λ_. eval(E2) * λ_. or_top
/// eval(E1 and E2)      = eval(E1) * λ_. eval(E2) * λ_. and_top
/// eval(E1 ; E2)        = eval(E1) * λ_. eval(E2)
/// eval(b post E)       = post E * λ(). eval(b)
/// eval(E1 context E2)  = eval(E1) * λv. post E2 * λ(). unit v
/// ```
///
/// `or_top`/`and_top` combine the two front entries and yield the result, which
/// is `x | y` (resp. `x & y`) whenever the front of each operand is its value.
pub(crate) fn monadic(e: &Expr) -> SeqComp<bool> {
    match e {
        Expr::Const(b) => emit(*b),
        Expr::Var(x) => seq_star(fetch(x.clone()), emit),
        Expr::Or(l, r) => {
            let r = (**r).clone();
            seq_star(monadic(l), move |_| seq_star(monadic(&r), |_| or_top()))
        }
        Expr::And(l, r) => {
            let r = (**r).clone();
            seq_star(monadic(l), move |_| seq_star(monadic(&r), |_| and_top()))
        }
        Expr::Seq(l, r) => {
            let r = (**r).clone();
            seq_star(monadic(l), move |_| monadic(&r))
        }
        Expr::Post(a, g) => {
            let a = (**a).clone();
            seq_star(post_op(g), move |()| monadic(&a))
        }
        Expr::Context(l, r) => {
            let r = (**r).clone();
            seq_star(monadic(l), move |v| seq_star(post_op(&r), move |()| seq_unit(v)))
        }
    }
}

/// Monadic evaluation from the empty sequence: the value and final sequence.
pub fn eval_monadic(e: &Expr, wm: &mut WorkingMemory) -> Result<(bool, BoolSeq), EvalError> {
    monadic(e).run(BoolSeq::new(), wm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::eval_seq;
    use crate::syntax::{parse, GenConfig, Ident};
    use crate::wm::Answers;

    fn answers() -> Answers {
        Answers::new()
            .with("x", true)
            .with("y", false)
            .with("z", true)
            .with("a", true)
            .with("b", false)
    }

    #[test]
    fn examples() {
        let mut wm = WorkingMemory::new();
        assert_eq!(eval_monadic(&Expr::Const(true), &mut wm), Ok((true, BoolSeq::from([1]))));

        let mut wm = WorkingMemory::scripted(answers());
        assert_eq!(
            eval_monadic(&parse("x post y ; z").unwrap(), &mut wm),
            Ok((true, BoolSeq::from([1, 1, 0])))
        );
    }

    #[test]
    fn context_goes_after_posted_goals() {
        let e = parse("(a post b) context y").unwrap();
        let got = eval_monadic(&e, &mut WorkingMemory::scripted(answers())).unwrap();
        assert_eq!(got, (true, BoolSeq::from([1, 0, 0])));
    }

    #[test]
    fn agrees_with_sequence_semantics() {
        let vocab: Vec<Ident> = ["x", "y", "z", "a", "b"].iter().map(|s| Ident::new(s).unwrap()).collect();
        let cfg = GenConfig::new(6, vocab).effects(true).sequencing(true);
        for e in cfg.stream(11).take(300) {
            let want = eval_seq(&e, BoolSeq::new(), &mut WorkingMemory::scripted(answers())).unwrap();
            let got = eval_monadic(&e, &mut WorkingMemory::scripted(answers())).unwrap();
            assert_eq!(got.1, want, "{e}");
            assert_eq!(Some(got.0), want.top(), "{e}");
        }
    }

    #[test]
    fn unvalued_propagates() {
        let e = parse("x or missing").unwrap();
        assert_eq!(
            eval_monadic(&e, &mut WorkingMemory::scripted(answers())),
            Err(EvalError::Unvalued(Ident::new("missing").unwrap()))
        );
    }
}
