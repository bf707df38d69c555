//! Ranked alphabet symbols for formula and term trees.
//!
//! The derived `Ord` on [`Symbol`] is the fixed symbol order used for
//! canonical tie-breaking throughout the crate.

use std::fmt;

/// An argument of an inline atom: a variable or a constant name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Var(String),
    Const(String),
}

impl Arg {
    pub fn name(&self) -> &str {
        match self {
            Arg::Var(n) | Arg::Const(n) => n,
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How an atom-like symbol receives its arguments.
///
/// `Inline` atoms are nullary symbols with their arguments baked in
/// (relational core). `Terms(r)` atoms take `r` term children.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomArgs {
    Inline(Vec<Arg>),
    Terms(usize),
}

impl AtomArgs {
    pub fn len(&self) -> usize {
        match self {
            AtomArgs::Inline(a) => a.len(),
            AtomArgs::Terms(r) => *r,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of tree children this argument style contributes.
    pub fn child_count(&self) -> usize {
        match self {
            AtomArgs::Inline(_) => 0,
            AtomArgs::Terms(r) => *r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    And,
    Or,
    Not,
    Exists(String),
    Forall(String),
    Atom { rel: String, args: AtomArgs },
    Eq(AtomArgs),
    Var(String),
    Const(String),
    Func { name: String, arity: usize },
    Ite,
    LetRel { rel: String, params: Vec<String> },
    UseRel { rel: String, args: AtomArgs },
    LetFun { fun: String, params: Vec<String> },
    UseFun { fun: String, arity: usize },
}

/// Syntactic category of a symbol's output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Formula,
    Term,
    /// Let nodes take the sort of their continuation.
    Inherit,
}

impl Symbol {
    pub fn arity(&self) -> usize {
        match self {
            Symbol::And | Symbol::Or => 2,
            Symbol::Not | Symbol::Exists(_) | Symbol::Forall(_) => 1,
            Symbol::Atom { args, .. } | Symbol::UseRel { args, .. } => args.child_count(),
            Symbol::Eq(args) => args.child_count(),
            Symbol::Var(_) | Symbol::Const(_) => 0,
            Symbol::Func { arity, .. } | Symbol::UseFun { arity, .. } => *arity,
            Symbol::Ite => 3,
            Symbol::LetRel { .. } | Symbol::LetFun { .. } => 2,
        }
    }

    pub fn sort(&self) -> Sort {
        match self {
            Symbol::Var(_) | Symbol::Const(_) | Symbol::Func { .. } | Symbol::Ite | Symbol::UseFun { .. } => Sort::Term,
            Symbol::LetRel { .. } | Symbol::LetFun { .. } => Sort::Inherit,
            _ => Sort::Formula,
        }
    }

    /// Sort expected of child `i` (0-based).
    pub fn child_sort(&self, i: usize) -> Sort {
        match self {
            Symbol::And | Symbol::Or | Symbol::Not | Symbol::Exists(_) | Symbol::Forall(_) => Sort::Formula,
            Symbol::Ite => {
                if i == 0 {
                    Sort::Formula
                } else {
                    Sort::Term
                }
            }
            Symbol::LetRel { .. } => {
                if i == 0 {
                    Sort::Formula
                } else {
                    Sort::Inherit
                }
            }
            Symbol::LetFun { .. } => {
                if i == 0 {
                    Sort::Term
                } else {
                    Sort::Inherit
                }
            }
            _ => Sort::Term,
        }
    }

    /// Short head name used by the textual syntaxes.
    pub fn head(&self) -> &'static str {
        match self {
            Symbol::And => "And",
            Symbol::Or => "Or",
            Symbol::Not => "Not",
            Symbol::Exists(_) => "Exists",
            Symbol::Forall(_) => "Forall",
            Symbol::Atom { .. } => "Atom",
            Symbol::Eq(_) => "Eq",
            Symbol::Var(_) => "Var",
            Symbol::Const(_) => "Const",
            Symbol::Func { .. } => "Func",
            Symbol::Ite => "Ite",
            Symbol::LetRel { .. } => "LetRel",
            Symbol::UseRel { .. } => "UseRel",
            Symbol::LetFun { .. } => "LetFun",
            Symbol::UseFun { .. } => "UseFun",
        }
    }

    /// Constant names mentioned by this symbol (not by its children).
    pub fn constants(&self) -> Vec<&str> {
        fn inline(a: &AtomArgs) -> Vec<&str> {
            match a {
                AtomArgs::Inline(args) => args
                    .iter()
                    .filter_map(|x| match x {
                        Arg::Const(c) => Some(c.as_str()),
                        Arg::Var(_) => None,
                    })
                    .collect(),
                AtomArgs::Terms(_) => Vec::new(),
            }
        }
        match self {
            Symbol::Atom { args, .. } | Symbol::UseRel { args, .. } | Symbol::Eq(args) => inline(args),
            Symbol::Const(c) => vec![c.as_str()],
            _ => Vec::new(),
        }
    }
}
