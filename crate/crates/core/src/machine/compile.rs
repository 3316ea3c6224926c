use super::{Instr, Program};
use crate::syntax::Expr;
use crate::wm::constant_ident;

/// Compiles `e` given the main program `s` and posted program `p` built so
/// far, returning the extended pair.
///
/// ```text
/// C(x, s, p)              = (s + ⟨get x⟩, p)
/// C(E1 or E2, s, p)       = let (s', p') = C(E2, C(E1, s, p)) in (s' + ⟨or⟩, p')
/// C(E1 and E2, s, p)      = let (s', p') = C(E2, C(E1, s, p)) in (s' + ⟨and⟩, p')
/// C(E1 ; E2, s, p)        = C(E2, C(E1, s, p))
/// C(x post E, s, p)       = let (s0, p0) = C(E, ⟨⟩, ⟨⟩) in (s + ⟨get x⟩, p0 + s0 + p)
/// C(E1 context E2, s, p)  = let (s1, p1) = C(E1, s, p); (s2, p2) = C(E2, ⟨⟩, ⟨⟩)
///                           in (s1, p2 + s2 + p1)
/// ```
///
/// Posted code is prepended, so the most recently evoked goal runs first and
/// its values end up deepest in the stack. Literals compile to `get` of the
/// reserved identifiers `__true` / `__false`.
pub fn compile(e: &Expr, s: Program, p: Program) -> (Program, Program) {
    match e {
        Expr::Const(b) => {
            let mut s = s;
            s.push(Instr::Get(constant_ident(*b)));
            (s, p)
        }
        Expr::Var(x) => {
            let mut s = s;
            s.push(Instr::Get(x.clone()));
            (s, p)
        }
        Expr::Or(l, r) => {
            let (s, p) = compile(l, s, p);
            let (mut s, p) = compile(r, s, p);
            s.push(Instr::Or);
            (s, p)
        }
        Expr::And(l, r) => {
            let (s, p) = compile(l, s, p);
            let (mut s, p) = compile(r, s, p);
            s.push(Instr::And);
            (s, p)
        }
        Expr::Seq(l, r) => {
            let (s, p) = compile(l, s, p);
            compile(r, s, p)
        }
        Expr::Post(a, g) => {
            let (s0, p0) = compile(g, Program::new(), Program::new());
            let (s, _) = compile(a, s, Program::new());
            (s, p0.concat(&s0).concat(&p))
        }
        Expr::Context(l, r) => {
            let (s1, p1) = compile(l, s, p);
            let (s2, p2) = compile(r, Program::new(), Program::new());
            (s1, p2.concat(&s2).concat(&p1))
        }
    }
}

/// The program the machine runs: posted code first, then main code.
pub fn link(main: Program, posted: Program) -> Program {
    posted.concat(&main)
}

/// `link(compile(e, ⟨⟩, ⟨⟩))`.
pub fn compile_linked(e: &Expr) -> Program {
    let (main, posted) = compile(e, Program::new(), Program::new());
    link(main, posted)
}
