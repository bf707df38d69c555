//! Infix rendering for humans. Not meant to be parsed back.

use crate::model::{Arg, AtomArgs, Symbol, Tree};

pub fn pretty(t: &Tree) -> String {
    let mut out = String::new();
    go(t, &mut out, 0);
    out
}

// Binding strength: quantifiers/let 0, or 1, and 2, not/atoms 3.
fn prec(t: &Tree) -> u8 {
    match t.symbol {
        Symbol::Or => 1,
        Symbol::And => 2,
        Symbol::Exists(_) | Symbol::Forall(_) | Symbol::LetRel { .. } | Symbol::LetFun { .. } => 0,
        _ => 3,
    }
}

fn args(a: &AtomArgs, kids: &[Tree]) -> String {
    match a {
        AtomArgs::Inline(list) => list.iter().map(Arg::name).collect::<Vec<_>>().join(","),
        AtomArgs::Terms(_) => kids.iter().map(pretty).collect::<Vec<_>>().join(","),
    }
}

fn go(t: &Tree, out: &mut String, ctx: u8) {
    let p = prec(t);
    let paren = p < ctx;
    if paren {
        out.push('(');
    }
    match &t.symbol {
        Symbol::And | Symbol::Or => {
            go(&t.children[0], out, p);
            out.push_str(if t.symbol == Symbol::And { " ∧ " } else { " ∨ " });
            go(&t.children[1], out, p + 1);
        }
        Symbol::Not => {
            out.push('¬');
            go(&t.children[0], out, 3);
        }
        Symbol::Exists(v) | Symbol::Forall(v) => {
            out.push(if matches!(t.symbol, Symbol::Exists(_)) { '∃' } else { '∀' });
            out.push_str(v);
            out.push_str(". ");
            go(&t.children[0], out, 0);
        }
        Symbol::Atom { rel, args: a } | Symbol::UseRel { rel, args: a } => {
            out.push_str(rel);
            out.push('(');
            out.push_str(&args(a, &t.children));
            out.push(')');
        }
        Symbol::Eq(a) => {
            let s = args(a, &t.children);
            let (l, r) = s.split_once(',').unwrap_or((&s, ""));
            if matches!(a, AtomArgs::Inline(_)) {
                out.push_str(&format!("{l} = {r}"));
            } else {
                out.push_str(&format!("{} = {}", pretty(&t.children[0]), pretty(&t.children[1])));
            }
        }
        Symbol::Var(n) | Symbol::Const(n) => out.push_str(n),
        Symbol::Func { name, .. } | Symbol::UseFun { fun: name, .. } => {
            out.push_str(name);
            out.push('(');
            out.push_str(&t.children.iter().map(pretty).collect::<Vec<_>>().join(", "));
            out.push(')');
        }
        Symbol::Ite => {
            out.push_str("ite(");
            out.push_str(&t.children.iter().map(pretty).collect::<Vec<_>>().join(", "));
            out.push(')');
        }
        Symbol::LetRel { rel: name, params } | Symbol::LetFun { fun: name, params } => {
            out.push_str(&format!("let {name}({}) = ", params.join(",")));
            go(&t.children[0], out, 0);
            out.push_str(" in ");
            go(&t.children[1], out, 0);
        }
    }
    if paren {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tree::{c, v};

    #[test]
    fn renders_infix() {
        let t = Tree::forall(
            "x",
            Tree::implies(
                Tree::atom("E", &[c("s"), v("x")]),
                Tree::exists("y", Tree::and(Tree::atom("E", &[v("x"), v("y")]), Tree::atom("E", &[v("y"), c("t")]))),
            ),
        );
        assert_eq!(pretty(&t), "∀x. ¬E(s,x) ∨ (∃y. E(x,y) ∧ E(y,t))");
        let u = Tree::and(
            Tree::or(Tree::eq(v("x"), v("y")), Tree::not(Tree::eq(v("x"), v("x")))),
            Tree::atom("U", &[v("x")]),
        );
        assert_eq!(pretty(&u), "(x = y ∨ ¬x = x) ∧ U(x)");
    }
}
