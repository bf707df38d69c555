//! Canonical s-expression form of formula and term trees.
//!
//! ```text
//! (and A B) (or A B) (not A) (exists x A) (forall x A) (ite C T E)
//! (atom E x s)            inline atom over variables and constants
//! (atom E (var x) (fn f (var y)))   atom with term children
//! (= x y) (= T1 T2)
//! (var x) (const c) (fn f T ...)
//! (let-rel P (x y) BODY CONT) (use-rel P x y) (use-rel P T ...)
//! (let-fun g (x) BODY CONT) (use-fun g T ...)
//! ```

use std::collections::BTreeSet;

use super::SyntaxError;
use crate::model::{Arg, AtomArgs, Symbol, Tree};

#[derive(Clone, Debug, PartialEq, Eq)]
enum SExp {
    Atom(String, usize, usize),
    List(Vec<SExp>, usize, usize),
}

impl SExp {
    fn pos(&self) -> (usize, usize) {
        match self {
            SExp::Atom(_, l, c) | SExp::List(_, l, c) => (*l, *c),
        }
    }
}

pub fn to_sexpr(t: &Tree) -> String {
    let mut out = String::new();
    write(t, &mut out);
    out
}

fn write_args(args: &AtomArgs, children: &[Tree], out: &mut String) {
    match args {
        AtomArgs::Inline(list) => {
            for a in list {
                out.push(' ');
                out.push_str(a.name());
            }
        }
        AtomArgs::Terms(_) => {
            for c in children {
                out.push(' ');
                write(c, out);
            }
        }
    }
}

fn write(t: &Tree, out: &mut String) {
    let kids = |out: &mut String| {
        for c in &t.children {
            out.push(' ');
            write(c, out);
        }
    };
    match &t.symbol {
        Symbol::And | Symbol::Or | Symbol::Not | Symbol::Ite => {
            out.push('(');
            out.push_str(&t.symbol.head().to_lowercase());
            kids(out);
            out.push(')');
        }
        Symbol::Exists(v) | Symbol::Forall(v) => {
            out.push('(');
            out.push_str(&t.symbol.head().to_lowercase());
            out.push(' ');
            out.push_str(v);
            kids(out);
            out.push(')');
        }
        Symbol::Atom { rel, args } => {
            out.push_str("(atom ");
            out.push_str(rel);
            write_args(args, &t.children, out);
            out.push(')');
        }
        Symbol::Eq(args) => {
            out.push_str("(=");
            write_args(args, &t.children, out);
            out.push(')');
        }
        Symbol::Var(v) => {
            out.push_str("(var ");
            out.push_str(v);
            out.push(')');
        }
        Symbol::Const(c) => {
            out.push_str("(const ");
            out.push_str(c);
            out.push(')');
        }
        Symbol::Func { name, .. } => {
            out.push_str("(fn ");
            out.push_str(name);
            kids(out);
            out.push(')');
        }
        Symbol::LetRel { rel: name, params } | Symbol::LetFun { fun: name, params } => {
            out.push_str(if matches!(t.symbol, Symbol::LetRel { .. }) { "(let-rel " } else { "(let-fun " });
            out.push_str(name);
            out.push_str(" (");
            out.push_str(&params.join(" "));
            out.push(')');
            kids(out);
            out.push(')');
        }
        Symbol::UseRel { rel, args } => {
            out.push_str("(use-rel ");
            out.push_str(rel);
            write_args(args, &t.children, out);
            out.push(')');
        }
        Symbol::UseFun { fun, .. } => {
            out.push_str("(use-fun ");
            out.push_str(fun);
            kids(out);
            out.push(')');
        }
    }
}

fn lex(text: &str) -> Result<SExp, SyntaxError> {
    let mut stack: Vec<(Vec<SExp>, usize, usize)> = Vec::new();
    let mut done: Option<SExp> = None;
    let mut chars = text.char_indices().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let err = |line, col, msg: &str| SyntaxError::new(line, col, msg);
    while let Some(&(i, ch)) = chars.peek() {
        if ch == ';' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if ch.is_whitespace() {
            chars.next();
            if ch == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            continue;
        }
        if done.is_some() {
            return Err(err(line, col, "trailing input after expression"));
        }
        match ch {
            '(' => {
                stack.push((Vec::new(), line, col));
                chars.next();
                col += 1;
            }
            ')' => {
                let (items, l, c) = stack.pop().ok_or_else(|| err(line, col, "unbalanced `)`"))?;
                let list = SExp::List(items, l, c);
                match stack.last_mut() {
                    Some(top) => top.0.push(list),
                    None => done = Some(list),
                }
                chars.next();
                col += 1;
            }
            _ => {
                let start = i;
                let (l, c) = (line, col);
                let mut end = i;
                while let Some(&(j, c2)) = chars.peek() {
                    if c2.is_whitespace() || c2 == '(' || c2 == ')' || c2 == ';' {
                        break;
                    }
                    end = j + c2.len_utf8();
                    chars.next();
                    col += 1;
                }
                let atom = SExp::Atom(text[start..end].to_string(), l, c);
                match stack.last_mut() {
                    Some(top) => top.0.push(atom),
                    None => done = Some(atom),
                }
            }
        }
    }
    if let Some((_, l, c)) = stack.last() {
        return Err(err(*l, *c, "unclosed `(`"));
    }
    done.ok_or_else(|| err(line, col, "empty input"))
}

/// Parses the s-expression form. Bare names in inline atoms are constants
/// when listed in `constants`, variables otherwise.
pub fn parse_sexpr(text: &str, constants: &BTreeSet<String>) -> Result<Tree, SyntaxError> {
    let e = lex(text)?;
    convert(&e, constants)
}

fn convert(e: &SExp, constants: &BTreeSet<String>) -> Result<Tree, SyntaxError> {
    let (line, col) = e.pos();
    let err = |msg: String| SyntaxError::new(line, col, &msg);
    let items = match e {
        SExp::List(items, ..) => items,
        SExp::Atom(a, ..) => return Err(err(format!("expected a list, found `{a}`"))),
    };
    let head = match items.first() {
        Some(SExp::Atom(h, ..)) => h.as_str(),
        _ => return Err(err("expected an operator name".into())),
    };
    let name_at = |i: usize| -> Result<String, SyntaxError> {
        match items.get(i) {
            Some(SExp::Atom(n, ..)) => Ok(n.clone()),
            _ => Err(err(format!("`{head}` expects a name at position {i}"))),
        }
    };
    let subtrees = |from: usize| -> Result<Vec<Tree>, SyntaxError> {
        items[from..].iter().map(|x| convert(x, constants)).collect()
    };
    let want = |n: usize| -> Result<(), SyntaxError> {
        if items.len() == n {
            Ok(())
        } else {
            Err(err(format!("`{head}` expects {} operands, found {}", n - 1, items.len() - 1)))
        }
    };
    // Inline if every operand is a bare name; term children if every operand is a list.
    let args = |from: usize| -> Result<(AtomArgs, Vec<Tree>), SyntaxError> {
        let rest = &items[from..];
        if rest.iter().all(|x| matches!(x, SExp::Atom(..))) {
            let list = rest
                .iter()
                .map(|x| match x {
                    SExp::Atom(n, ..) if constants.contains(n) => Arg::Const(n.clone()),
                    SExp::Atom(n, ..) => Arg::Var(n.clone()),
                    SExp::List(..) => unreachable!(),
                })
                .collect();
            Ok((AtomArgs::Inline(list), Vec::new()))
        } else if rest.iter().all(|x| matches!(x, SExp::List(..))) {
            let kids = subtrees(from)?;
            Ok((AtomArgs::Terms(kids.len()), kids))
        } else {
            Err(err("atom arguments must be all names or all terms".into()))
        }
    };
    let tree = match head {
        "and" | "or" => {
            want(3)?;
            let mut k = subtrees(1)?;
            let b = k.pop().unwrap();
            let a = k.pop().unwrap();
            if head == "and" {
                Tree::and(a, b)
            } else {
                Tree::or(a, b)
            }
        }
        "not" => {
            want(2)?;
            Tree::not(subtrees(1)?.pop().unwrap())
        }
        "exists" | "forall" => {
            want(3)?;
            let v = name_at(1)?;
            let body = subtrees(2)?.pop().unwrap();
            if head == "exists" {
                Tree::exists(&v, body)
            } else {
                Tree::forall(&v, body)
            }
        }
        "ite" => {
            want(4)?;
            let k = subtrees(1)?;
            Tree::new(Symbol::Ite, k)
        }
        "atom" => {
            let rel = name_at(1)?;
            let (args, kids) = args(2)?;
            Tree::new(Symbol::Atom { rel, args }, kids)
        }
        "=" => {
            want(3)?;
            let (args, kids) = args(1)?;
            Tree::new(Symbol::Eq(args), kids)
        }
        "var" => {
            want(2)?;
            Tree::var(&name_at(1)?)
        }
        "const" => {
            want(2)?;
            Tree::constant(&name_at(1)?)
        }
        "fn" => {
            let f = name_at(1)?;
            let kids = subtrees(2)?;
            if kids.is_empty() {
                return Err(err("`fn` needs arguments; use `const` for constants".into()));
            }
            Tree::func(&f, kids)
        }
        "let-rel" | "let-fun" => {
            want(5)?;
            let name = name_at(1)?;
            let params = match &items[2] {
                SExp::List(ps, ..) => ps
                    .iter()
                    .map(|p| match p {
                        SExp::Atom(n, ..) => Ok(n.clone()),
                        SExp::List(..) => Err(err("parameters must be names".into())),
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                SExp::Atom(..) => return Err(err("expected a parameter list".into())),
            };
            let kids = subtrees(3)?;
            let sym = if head == "let-rel" {
                Symbol::LetRel { rel: name, params }
            } else {
                Symbol::LetFun { fun: name, params }
            };
            Tree::new(sym, kids)
        }
        "use-rel" => {
            let rel = name_at(1)?;
            let (args, kids) = args(2)?;
            Tree::new(Symbol::UseRel { rel, args }, kids)
        }
        "use-fun" => {
            let fun = name_at(1)?;
            let kids = subtrees(2)?;
            Tree::use_fun(&fun, kids)
        }
        other => return Err(err(format!("unknown operator `{other}`"))),
    };
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tree::{c, v};

    fn consts() -> BTreeSet<String> {
        ["s", "t", "nil"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn round_trips() {
        let phi = Tree::forall(
            "x",
            Tree::implies(
                Tree::atom("E", &[c("s"), v("x")]),
                Tree::exists("y", Tree::and(Tree::atom("E", &[v("x"), v("y")]), Tree::atom("E", &[v("y"), c("t")]))),
            ),
        );
        let text = to_sexpr(&phi);
        assert_eq!(text, "(forall x (or (not (atom E s x)) (exists y (and (atom E x y) (atom E y t)))))");
        assert_eq!(parse_sexpr(&text, &consts()).unwrap(), phi);

        let term = Tree::let_fun(
            "g",
            &["x"],
            Tree::ite(
                Tree::eq_terms(Tree::var("x"), Tree::constant("nil")),
                Tree::constant("nil"),
                Tree::use_fun("g", vec![Tree::func("tail", vec![Tree::var("x")])]),
            ),
            Tree::use_fun("g", vec![Tree::constant("s")]),
        );
        let text = to_sexpr(&term);
        assert_eq!(parse_sexpr(&text, &consts()).unwrap(), term);

        let lfp =
            Tree::let_rel("P", &["x"], Tree::atom("U", &[v("x")]), Tree::exists("x", Tree::use_rel("P", &[v("x")])));
        assert_eq!(parse_sexpr(&to_sexpr(&lfp), &consts()).unwrap(), lfp);
    }

    #[test]
    fn reports_positions() {
        let e = parse_sexpr("(and (atom E x y)\n  (frob))", &consts()).unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert!(parse_sexpr("(not (atom E x y)", &consts()).is_err());
        assert!(parse_sexpr("(and (atom E x y))", &consts()).is_err());
    }
}
