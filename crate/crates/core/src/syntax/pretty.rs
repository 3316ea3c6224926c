use super::Expr;

// Binding strength, loosest first.
const SEQ: u8 = 0;
const CONTEXT: u8 = 1;
const POST: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Seq(..) => SEQ,
        Expr::Context(..) => CONTEXT,
        Expr::Post(..) => POST,
        Expr::Or(..) => OR,
        Expr::And(..) => AND,
        Expr::Const(_) | Expr::Var(_) => ATOM,
    }
}

/// Renders `e` with the fewest parentheses that still parse back to `e`.
pub fn pretty(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn write_child(e: &Expr, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write_expr(e, out);
        out.push(')');
    } else {
        write_expr(e, out);
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    let (l, r, op) = match e {
        Expr::Const(b) => {
            out.push_str(if *b { "true" } else { "false" });
            return;
        }
        Expr::Var(x) => {
            out.push_str(x.as_str());
            return;
        }
        Expr::Post(a, g) => {
            write_expr(a, out);
            out.push_str(" post ");
            // right-associative on the goal side
            write_child(g, level(g) < POST, out);
            return;
        }
        Expr::Or(l, r) => (l, r, " or "),
        Expr::And(l, r) => (l, r, " and "),
        Expr::Seq(l, r) => (l, r, " ; "),
        Expr::Context(l, r) => (l, r, " context "),
    };
    let lv = level(e);
    write_child(l, level(l) < lv, out);
    out.push_str(op);
    write_child(r, level(r) <= lv, out);
}
