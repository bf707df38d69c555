//! Finite-variable logics as ranked alphabets: which symbols a tree may use.

use std::collections::BTreeMap;
use std::fmt;

use super::signature::Signature;
use super::symbol::{Arg, AtomArgs, Sort, Symbol};
use super::tree::Tree;
use super::ModelError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogicKind {
    Fo,
    FoLfp,
    FoTerm,
}

impl LogicKind {
    pub fn name(self) -> &'static str {
        match self {
            LogicKind::Fo => "fo",
            LogicKind::FoLfp => "folfp",
            LogicKind::FoTerm => "foterm",
        }
    }
}

impl fmt::Display for LogicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `Core`: atoms are nullary symbols over variables and constants.
/// `Full`: atoms, equality and function symbols take term children.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    Core,
    Full,
}

/// A logic instance: variable names, definable symbols, and encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Logic {
    pub kind: LogicKind,
    pub vars: Vec<String>,
    pub rel_defs: BTreeMap<String, usize>,
    pub fun_defs: BTreeMap<String, usize>,
    pub encoding: Encoding,
}

/// Default variable names for `k` variables.
pub fn default_vars(k: usize) -> Vec<String> {
    const NAMES: [&str; 6] = ["x", "y", "z", "u", "w", "v"];
    if k <= NAMES.len() {
        NAMES[..k].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=k).map(|i| format!("x{i}")).collect()
    }
}

impl Logic {
    pub fn fo(k: usize) -> Self {
        Logic {
            kind: LogicKind::Fo,
            vars: default_vars(k),
            rel_defs: BTreeMap::new(),
            fun_defs: BTreeMap::new(),
            encoding: Encoding::Core,
        }
    }

    pub fn folfp(k: usize, defs: &[(&str, usize)]) -> Self {
        Logic {
            kind: LogicKind::FoLfp,
            rel_defs: defs.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
            ..Logic::fo(k)
        }
    }

    pub fn foterm(k: usize, rel_defs: &[(&str, usize)], fun_defs: &[(&str, usize)]) -> Self {
        Logic {
            kind: LogicKind::FoTerm,
            vars: default_vars(k),
            rel_defs: rel_defs.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
            fun_defs: fun_defs.iter().map(|(n, a)| (n.to_string(), *a)).collect(),
            encoding: Encoding::Full,
        }
    }

    pub fn with_vars(mut self, vars: &[&str]) -> Self {
        self.vars = vars.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_encoding(mut self, encoding: Encoding) -> Self {
        self.encoding = encoding;
        self
    }

    pub fn k(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, v: &str) -> Option<usize> {
        self.vars.iter().position(|x| x == v)
    }

    /// Checks one symbol against the logic and a signature.
    pub fn check_symbol(&self, sig: &Signature, sym: &Symbol) -> Result<(), ModelError> {
        let unknown = |n: &str| Err(ModelError::UnknownSymbol(n.to_string()));
        let var_ok = |v: &str| -> Result<(), ModelError> {
            if self.var_index(v).is_some() {
                Ok(())
            } else {
                Err(ModelError::UnknownSymbol(v.to_string()))
            }
        };
        let args_ok = |args: &AtomArgs, arity: usize, name: &str| -> Result<(), ModelError> {
            if args.len() != arity {
                return Err(ModelError::ArityMismatch { symbol: name.to_string(), expected: arity, found: args.len() });
            }
            match args {
                AtomArgs::Inline(list) => {
                    for a in list {
                        match a {
                            Arg::Var(v) => var_ok(v)?,
                            Arg::Const(c) if sig.is_constant(c) => {}
                            Arg::Const(c) => return Err(ModelError::UnknownSymbol(c.clone())),
                        }
                    }
                    Ok(())
                }
                AtomArgs::Terms(_) if self.encoding == Encoding::Full => Ok(()),
                AtomArgs::Terms(_) => {
                    Err(ModelError::NotInLogic(format!("{name} with term arguments needs the full encoding")))
                }
            }
        };
        let needs_full = |what: &str| -> Result<(), ModelError> {
            if self.encoding == Encoding::Full {
                Ok(())
            } else {
                Err(ModelError::NotInLogic(format!("{what} needs the full encoding")))
            }
        };
        match sym {
            Symbol::And | Symbol::Or | Symbol::Not => Ok(()),
            Symbol::Exists(v) | Symbol::Forall(v) | Symbol::Var(v) => {
                if matches!(sym, Symbol::Var(_)) {
                    needs_full("Var")?;
                }
                var_ok(v)
            }
            Symbol::Atom { rel, args } => match sig.relation_arity(rel) {
                Some(r) => args_ok(args, r, rel),
                None => unknown(rel),
            },
            Symbol::Eq(args) => args_ok(args, 2, "Eq"),
            Symbol::Const(c) => {
                needs_full("Const")?;
                if sig.is_constant(c) {
                    Ok(())
                } else {
                    unknown(c)
                }
            }
            Symbol::Func { name, arity } => {
                needs_full("Func")?;
                match sig.function_arity(name) {
                    Some(d) if d == *arity => Ok(()),
                    Some(d) => Err(ModelError::ArityMismatch { symbol: name.clone(), expected: d, found: *arity }),
                    None => unknown(name),
                }
            }
            Symbol::Ite => needs_full("Ite"),
            Symbol::LetRel { rel, params } => {
                self.check_def(&self.rel_defs, rel, params.len(), "LetRel")?;
                self.check_params(params)
            }
            Symbol::UseRel { rel, args } => {
                let r = self.check_def(&self.rel_defs, rel, args.len(), "UseRel")?;
                args_ok(args, r, rel)
            }
            Symbol::LetFun { fun, params } => {
                self.check_def(&self.fun_defs, fun, params.len(), "LetFun")?;
                self.check_params(params)
            }
            Symbol::UseFun { fun, arity } => self.check_def(&self.fun_defs, fun, *arity, "UseFun").map(|_| ()),
        }
    }

    fn check_def(
        &self,
        defs: &BTreeMap<String, usize>,
        name: &str,
        arity: usize,
        what: &str,
    ) -> Result<usize, ModelError> {
        let allowed = match what {
            "LetRel" | "UseRel" => self.kind != LogicKind::Fo,
            _ => self.kind == LogicKind::FoTerm,
        };
        if !allowed {
            return Err(ModelError::NotInLogic(format!("{what} is not part of {}", self.kind)));
        }
        match defs.get(name) {
            Some(&r) if r == arity => Ok(r),
            Some(&r) => Err(ModelError::ArityMismatch { symbol: name.to_string(), expected: r, found: arity }),
            None => Err(ModelError::UnknownSymbol(name.to_string())),
        }
    }

    fn check_params(&self, params: &[String]) -> Result<(), ModelError> {
        for (i, p) in params.iter().enumerate() {
            if self.var_index(p).is_none() {
                return Err(ModelError::UnknownSymbol(p.clone()));
            }
            if params[..i].contains(p) {
                return Err(ModelError::NotInLogic(format!("repeated parameter {p}")));
            }
        }
        Ok(())
    }

    /// Checks every symbol and the formula/term sort discipline of a tree.
    /// Returns the sort of the root.
    pub fn check_tree(&self, sig: &Signature, t: &Tree) -> Result<Sort, ModelError> {
        self.check_symbol(sig, &t.symbol)?;
        if t.children.len() != t.symbol.arity() {
            return Err(ModelError::ArityMismatch {
                symbol: t.symbol.head().to_string(),
                expected: t.symbol.arity(),
                found: t.children.len(),
            });
        }
        let mut child_sorts = Vec::with_capacity(t.children.len());
        for c in &t.children {
            child_sorts.push(self.check_tree(sig, c)?);
        }
        for (i, s) in child_sorts.iter().enumerate() {
            let want = t.symbol.child_sort(i);
            if want != Sort::Inherit && *s != want {
                return Err(ModelError::SortMismatch(t.symbol.head().to_string()));
            }
        }
        Ok(match t.symbol.sort() {
            Sort::Inherit => child_sorts[1],
            s => s,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tree::{c, v};

    fn sig() -> Signature {
        Signature::new().with_relation("E", 2).with_constant("s").with_function("f", 1)
    }

    #[test]
    fn core_logic_accepts_inline_atoms_only() {
        let l = Logic::fo(2);
        let t = Tree::exists("x", Tree::atom("E", &[v("x"), c("s")]));
        assert_eq!(l.check_tree(&sig(), &t).unwrap(), Sort::Formula);
        let bad = Tree::atom("E", &[v("z"), c("s")]);
        assert!(l.check_tree(&sig(), &bad).is_err());
        let full = Tree::atom_terms("E", vec![Tree::var("x"), Tree::constant("s")]);
        assert!(l.check_tree(&sig(), &full).is_err());
        assert!(l.with_encoding(Encoding::Full).check_tree(&sig(), &full).is_ok());
    }

    #[test]
    fn definitions_need_the_right_logic() {
        let t = Tree::let_rel(
            "P",
            &["x"],
            Tree::atom("E", &[v("x"), v("x")]),
            Tree::exists("x", Tree::use_rel("P", &[v("x")])),
        );
        assert!(Logic::fo(2).check_tree(&sig(), &t).is_err());
        assert!(Logic::folfp(2, &[("P", 1)]).check_tree(&sig(), &t).is_ok());
        assert!(Logic::folfp(2, &[("P", 2)]).check_tree(&sig(), &t).is_err());
    }

    #[test]
    fn sorts_are_checked() {
        let l = Logic::foterm(1, &[], &[]);
        let bad = Tree::and(Tree::var("x"), Tree::eq(v("x"), v("x")));
        assert!(matches!(l.check_tree(&sig(), &bad), Err(ModelError::SortMismatch(_))));
        let ok = Tree::ite(Tree::eq(v("x"), c("s")), Tree::func("f", vec![Tree::var("x")]), Tree::constant("s"));
        assert_eq!(l.check_tree(&sig(), &ok).unwrap(), Sort::Term);
    }
}
