//! Prefix text syntax shared by trees and grammar right-hand sides:
//! `And(Exists[x](Atom[E](x,y)), Not(Eq(x,y)))`.

use std::collections::BTreeSet;

use super::{ParseError, SyntaxError};
use crate::model::{Arg, AtomArgs, Symbol, Tree};

/// A tree with named holes (nonterminals) at some leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    Node(Symbol, Vec<Pattern>),
    Hole(String),
}

impl Pattern {
    pub fn from_tree(t: &Tree) -> Pattern {
        Pattern::Node(t.symbol.clone(), t.children.iter().map(Pattern::from_tree).collect())
    }

    /// The tree, if the pattern has no holes.
    pub fn to_tree(&self) -> Option<Tree> {
        match self {
            Pattern::Hole(_) => None,
            Pattern::Node(s, kids) => {
                Some(Tree::new(s.clone(), kids.iter().map(Pattern::to_tree).collect::<Option<Vec<_>>>()?))
            }
        }
    }

    /// Number of symbol nodes (holes excluded).
    pub fn symbol_count(&self) -> usize {
        match self {
            Pattern::Hole(_) => 0,
            Pattern::Node(_, kids) => 1 + kids.iter().map(Pattern::symbol_count).sum::<usize>(),
        }
    }

    pub fn holes(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn go<'a>(p: &'a Pattern, out: &mut Vec<&'a str>) {
            match p {
                Pattern::Hole(n) => out.push(n),
                Pattern::Node(_, kids) => kids.iter().for_each(|k| go(k, out)),
            }
        }
        go(self, &mut out);
        out
    }
}

pub fn to_prefix(t: &Tree) -> String {
    pattern_to_prefix(&Pattern::from_tree(t))
}

pub fn pattern_to_prefix(p: &Pattern) -> String {
    let mut out = String::new();
    write(p, &mut out);
    out
}

fn write_list(items: &[Pattern], out: &mut String) {
    out.push('(');
    for (i, k) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write(k, out);
    }
    out.push(')');
}

fn write_args(args: &AtomArgs, kids: &[Pattern], out: &mut String) {
    match args {
        AtomArgs::Inline(list) => {
            out.push('(');
            out.push_str(&list.iter().map(Arg::name).collect::<Vec<_>>().join(","));
            out.push(')');
        }
        AtomArgs::Terms(_) => write_list(kids, out),
    }
}

fn write(p: &Pattern, out: &mut String) {
    let (sym, kids) = match p {
        Pattern::Hole(n) => {
            out.push_str(n);
            return;
        }
        Pattern::Node(s, k) => (s, k),
    };
    out.push_str(sym.head());
    match sym {
        Symbol::And | Symbol::Or | Symbol::Not | Symbol::Ite => write_list(kids, out),
        Symbol::Exists(v) | Symbol::Forall(v) => {
            out.push('[');
            out.push_str(v);
            out.push(']');
            write_list(kids, out);
        }
        Symbol::Atom { rel: name, args } | Symbol::UseRel { rel: name, args } => {
            out.push('[');
            out.push_str(name);
            out.push(']');
            write_args(args, kids, out);
        }
        Symbol::Eq(args) => write_args(args, kids, out),
        Symbol::Var(n) | Symbol::Const(n) => {
            out.push('[');
            out.push_str(n);
            out.push(']');
        }
        Symbol::Func { name, .. } | Symbol::UseFun { fun: name, .. } => {
            out.push('[');
            out.push_str(name);
            out.push(']');
            write_list(kids, out);
        }
        Symbol::LetRel { rel: name, params } | Symbol::LetFun { fun: name, params } => {
            out.push('[');
            out.push_str(name);
            out.push_str("](");
            out.push_str(&params.join(","));
            out.push(')');
            write_list(kids, out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Punct(char),
    Arrow,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '-' || c == '.'
}

/// Tokenizes one line (no comments) starting at the given position.
pub(crate) fn tokenize(text: &str, line0: usize) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let mut line = line0;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        if ch == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if ch == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        let (l, c) = (line, col);
        if ch == '-' {
            chars.next();
            col += 1;
            if chars.peek() == Some(&'>') {
                chars.next();
                col += 1;
                out.push(Token { tok: Tok::Arrow, line: l, col: c });
                continue;
            }
            return Err(SyntaxError::new(l, c, "unexpected `-`"));
        }
        if is_ident_char(ch) {
            let mut s = String::new();
            while let Some(&c2) = chars.peek() {
                if !is_ident_char(c2) || (c2 == '-' && s.is_empty()) {
                    break;
                }
                // `->` ends an identifier.
                if c2 == '-' {
                    let mut look = chars.clone();
                    look.next();
                    if look.peek() == Some(&'>') {
                        break;
                    }
                }
                s.push(c2);
                chars.next();
                col += 1;
            }
            out.push(Token { tok: Tok::Ident(s), line: l, col: c });
            continue;
        }
        if "()[]{},|;/=".contains(ch) {
            chars.next();
            col += 1;
            out.push(Token { tok: Tok::Punct(ch), line: l, col: c });
            continue;
        }
        return Err(SyntaxError::new(l, c, &format!("unexpected character `{ch}`")));
    }
    Ok(out)
}

/// Recursive-descent parser over a token slice.
pub(crate) struct PatternParser<'a> {
    pub toks: &'a [Token],
    pub pos: usize,
    pub end: (usize, usize),
    pub is_hole: &'a dyn Fn(&str) -> bool,
    pub is_constant: &'a dyn Fn(&str) -> bool,
}

enum ArgItem {
    Name(String, usize, usize),
    Pat(Pattern),
}

impl<'a> PatternParser<'a> {
    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.col))
    }

    fn err(&self, msg: &str) -> ParseError {
        let (l, c) = self.here();
        ParseError::Syntax(SyntaxError::new(l, c, msg))
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn punct(&mut self, ch: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Punct(c)) if *c == ch => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(&format!("expected `{ch}`"))),
        }
    }

    fn eat(&mut self, ch: char) -> bool {
        if matches!(self.peek(), Some(Tok::Punct(c)) if *c == ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err("expected a name")),
        }
    }

    fn bracket_name(&mut self) -> Result<String, ParseError> {
        self.punct('[')?;
        let n = self.ident()?;
        self.punct(']')?;
        Ok(n)
    }

    fn name_list(&mut self) -> Result<Vec<String>, ParseError> {
        self.punct('(')?;
        let mut out = Vec::new();
        if self.eat(')') {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if self.eat(')') {
                return Ok(out);
            }
            self.punct(',')?;
        }
    }

    fn items(&mut self) -> Result<Vec<ArgItem>, ParseError> {
        self.punct('(')?;
        let mut out = Vec::new();
        if self.eat(')') {
            return Ok(out);
        }
        loop {
            let (l, c) = self.here();
            let is_bare = matches!(self.peek(), Some(Tok::Ident(_)))
                && !matches!(
                    self.toks.get(self.pos + 1).map(|t| &t.tok),
                    Some(Tok::Punct('[')) | Some(Tok::Punct('('))
                );
            if is_bare {
                let n = self.ident()?;
                if (self.is_hole)(&n) {
                    out.push(ArgItem::Pat(Pattern::Hole(n)));
                } else {
                    out.push(ArgItem::Name(n, l, c));
                }
            } else {
                out.push(ArgItem::Pat(self.pattern()?));
            }
            if self.eat(')') {
                return Ok(out);
            }
            self.punct(',')?;
        }
    }

    fn patterns(&mut self) -> Result<Vec<Pattern>, ParseError> {
        self.items()?
            .into_iter()
            .map(|it| match it {
                ArgItem::Pat(p) => Ok(p),
                ArgItem::Name(n, l, c) => {
                    Err(ParseError::Syntax(SyntaxError::new(l, c, &format!("`{n}` is not a nonterminal or a symbol"))))
                }
            })
            .collect()
    }

    fn atom_args(&mut self) -> Result<(AtomArgs, Vec<Pattern>), ParseError> {
        let items = self.items()?;
        if items.iter().all(|i| matches!(i, ArgItem::Name(..))) {
            let list = items
                .into_iter()
                .map(|i| match i {
                    ArgItem::Name(n, ..) if (self.is_constant)(&n) => Arg::Const(n),
                    ArgItem::Name(n, ..) => Arg::Var(n),
                    ArgItem::Pat(_) => unreachable!(),
                })
                .collect();
            return Ok((AtomArgs::Inline(list), Vec::new()));
        }
        let mut kids = Vec::new();
        for it in items {
            match it {
                ArgItem::Pat(p) => kids.push(p),
                ArgItem::Name(n, l, c) => {
                    return Err(ParseError::Syntax(SyntaxError::new(
                        l,
                        c,
                        &format!("bare name `{n}` among term arguments; write Var[{n}] or Const[{n}]"),
                    )))
                }
            }
        }
        Ok((AtomArgs::Terms(kids.len()), kids))
    }

    fn arity(&self, sym: &str, expected: usize, found: usize, at: (usize, usize)) -> Result<(), ParseError> {
        if expected == found {
            Ok(())
        } else {
            Err(ParseError::Arity { line: at.0, col: at.1, symbol: sym.to_string(), expected, found })
        }
    }

    pub fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let at = self.here();
        let head = self.ident()?;
        let fixed = |p: &mut Self, sym: Symbol, n: usize| -> Result<Pattern, ParseError> {
            let kids = p.patterns()?;
            p.arity(sym.head(), n, kids.len(), at)?;
            Ok(Pattern::Node(sym, kids))
        };
        match head.as_str() {
            "And" => fixed(self, Symbol::And, 2),
            "Or" => fixed(self, Symbol::Or, 2),
            "Not" => fixed(self, Symbol::Not, 1),
            "Ite" => fixed(self, Symbol::Ite, 3),
            "Exists" | "Forall" => {
                let v = self.bracket_name()?;
                let sym = if head == "Exists" { Symbol::Exists(v) } else { Symbol::Forall(v) };
                fixed(self, sym, 1)
            }
            "Atom" | "UseRel" => {
                let name = self.bracket_name()?;
                let (args, kids) = if matches!(self.peek(), Some(Tok::Punct('('))) {
                    self.atom_args()?
                } else {
                    (AtomArgs::Inline(Vec::new()), Vec::new())
                };
                let sym =
                    if head == "Atom" { Symbol::Atom { rel: name, args } } else { Symbol::UseRel { rel: name, args } };
                Ok(Pattern::Node(sym, kids))
            }
            "Eq" => {
                let (args, kids) = self.atom_args()?;
                self.arity("Eq", 2, args.len(), at)?;
                Ok(Pattern::Node(Symbol::Eq(args), kids))
            }
            "Var" => Ok(Pattern::Node(Symbol::Var(self.bracket_name()?), Vec::new())),
            "Const" => Ok(Pattern::Node(Symbol::Const(self.bracket_name()?), Vec::new())),
            "Func" | "UseFun" => {
                let name = self.bracket_name()?;
                let kids = if matches!(self.peek(), Some(Tok::Punct('('))) { self.patterns()? } else { Vec::new() };
                let arity = kids.len();
                if head == "Func" && arity == 0 {
                    return Err(self.err("Func needs arguments; use Const[...] for constants"));
                }
                let sym =
                    if head == "Func" { Symbol::Func { name, arity } } else { Symbol::UseFun { fun: name, arity } };
                Ok(Pattern::Node(sym, kids))
            }
            "LetRel" | "LetFun" => {
                let name = self.bracket_name()?;
                let params = self.name_list()?;
                let sym = if head == "LetRel" {
                    Symbol::LetRel { rel: name, params }
                } else {
                    Symbol::LetFun { fun: name, params }
                };
                fixed(self, sym, 2)
            }
            other if (self.is_hole)(other) => Ok(Pattern::Hole(other.to_string())),
            other => Err(ParseError::Syntax(SyntaxError::new(at.0, at.1, &format!("unknown symbol `{other}`")))),
        }
    }
}

/// Parses a tree in prefix syntax. Bare names in inline atoms are
/// constants when listed in `constants`.
pub fn parse_prefix(text: &str, constants: &BTreeSet<String>) -> Result<Tree, ParseError> {
    let toks = tokenize(text, 1).map_err(ParseError::Syntax)?;
    let no_holes = |_: &str| false;
    let is_const = |n: &str| constants.contains(n);
    let mut p =
        PatternParser { toks: &toks, pos: 0, end: (1, text.len() + 1), is_hole: &no_holes, is_constant: &is_const };
    let pat = p.pattern()?;
    if !p.at_end() {
        return Err(p.err("trailing input"));
    }
    Ok(pat.to_tree().expect("no holes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tree::{c, v};

    #[test]
    fn prefix_round_trip() {
        let consts: BTreeSet<String> = ["s".to_string()].into_iter().collect();
        let t = Tree::forall("x", Tree::or(Tree::not(Tree::atom("E", &[c("s"), v("x")])), Tree::eq(v("x"), v("x"))));
        let s = to_prefix(&t);
        assert_eq!(s, "Forall[x](Or(Not(Atom[E](s,x)),Eq(x,x)))");
        assert_eq!(parse_prefix(&s, &consts).unwrap(), t);
        let term = Tree::let_fun(
            "g",
            &["x", "y"],
            Tree::ite(
                Tree::atom_terms("lt", vec![Tree::var("x"), Tree::var("y")]),
                Tree::var("x"),
                Tree::use_fun("g", vec![Tree::var("y"), Tree::func("f", vec![Tree::var("x")])]),
            ),
            Tree::use_fun("g", vec![Tree::constant("s"), Tree::constant("s")]),
        );
        assert_eq!(parse_prefix(&to_prefix(&term), &consts).unwrap(), term);
    }

    #[test]
    fn arity_errors() {
        let e = parse_prefix("And(Eq(x,y))", &BTreeSet::new()).unwrap_err();
        assert!(matches!(e, ParseError::Arity { expected: 2, found: 1, .. }));
    }
}
