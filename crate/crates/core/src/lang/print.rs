use super::{Alternative, Announcement, Formula, Repeat};

const IMPL: u8 = 0;
const DISJ: u8 = 1;
const CONJ: u8 = 2;
const UNARY: u8 = 3;

pub(super) fn print(f: &Formula) -> String {
    let mut out = String::new();
    go(f, IMPL, true, &mut out);
    out
}

fn own_level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => IMPL,
        Formula::Or(..) => DISJ,
        Formula::And(..) => CONJ,
        _ => UNARY,
    }
}

/// `rightmost` is false when more input follows at the same nesting depth;
/// fixpoint binders extend as far right as possible and need parentheses then.
fn go(f: &Formula, level: u8, rightmost: bool, out: &mut String) {
    let binder = matches!(f, Formula::Gfp(..) | Formula::Lfp(..));
    if own_level(f) < level || (binder && !rightmost) {
        out.push('(');
        go(f, IMPL, true, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Top => out.push_str("true"),
        Formula::Bottom => out.push_str("false"),
        Formula::Atom(p) => out.push_str(p.as_str()),
        Formula::Invariant(p) => {
            out.push_str("Inv{");
            out.push_str(p.as_str());
            out.push('}');
        }
        Formula::Not(a) => {
            out.push('~');
            go(a, UNARY, rightmost, out);
        }
        Formula::And(a, b) => binary(a, " & ", b, CONJ, UNARY, rightmost, out),
        Formula::Or(a, b) => binary(a, " | ", b, DISJ, CONJ, rightmost, out),
        Formula::Implies(a, b) => binary(a, " -> ", b, DISJ, IMPL, rightmost, out),
        Formula::Know(ag, a) | Formula::Possible(ag, a) => {
            out.push_str(if matches!(f, Formula::Know(..)) {
                "K{"
            } else {
                "Khat{"
            });
            out.push_str(ag.as_str());
            out.push_str("} ");
            go(a, UNARY, rightmost, out);
        }
        Formula::Announce(ann, rep, body) | Formula::Diamond(ann, rep, body) => {
            let (open, close) = if matches!(f, Formula::Announce(..)) {
                ('[', ']')
            } else {
                ('<', '>')
            };
            out.push(open);
            announcement(ann, out);
            out.push(close);
            match rep {
                Repeat::Once => {}
                Repeat::Times(n) => {
                    out.push('^');
                    out.push_str(&n.to_string());
                }
                Repeat::Star => out.push('*'),
            }
            out.push(' ');
            go(body, UNARY, rightmost, out);
        }
        Formula::Gfp(x, a) | Formula::Lfp(x, a) => {
            out.push_str(if matches!(f, Formula::Gfp(..)) {
                "nu "
            } else {
                "mu "
            });
            out.push_str(x.as_str());
            out.push_str(". ");
            go(a, IMPL, true, out);
        }
        Formula::Assign(sigma, body) => {
            out.push('[');
            for (i, (p, g)) in sigma.pairs().iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(p.as_str());
                out.push_str(" := ");
                go(g, IMPL, true, out);
            }
            out.push_str("] ");
            go(body, UNARY, rightmost, out);
        }
    }
}

fn binary(
    a: &Formula,
    op: &str,
    b: &Formula,
    left: u8,
    right: u8,
    rightmost: bool,
    out: &mut String,
) {
    go(a, left, false, out);
    out.push_str(op);
    go(b, right, rightmost, out);
}

fn announcement(ann: &Announcement, out: &mut String) {
    for (i, alt) in ann.alternatives().iter().enumerate() {
        if i > 0 {
            out.push_str(" u ");
        }
        match alt {
            Alternative::Formula(g) => go(g, IMPL, true, out),
            Alternative::Test(g) => {
                if matches!(g, Formula::Atom(_)) {
                    go(g, IMPL, true, out);
                } else {
                    out.push('(');
                    go(g, IMPL, true, out);
                    out.push(')');
                }
                out.push('?');
            }
            Alternative::Bell(b) => out.push_str(&b.name),
        }
    }
}
