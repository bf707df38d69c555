//! Ranked ordered trees over [`Symbol`]s.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::symbol::{Arg, AtomArgs, Symbol};

/// A formula or term tree. Child count always equals the symbol's arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    pub symbol: Symbol,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn new(symbol: Symbol, children: Vec<Tree>) -> Self {
        debug_assert_eq!(symbol.arity(), children.len(), "arity mismatch for {symbol:?}");
        Tree { symbol, children }
    }

    pub fn leaf(symbol: Symbol) -> Self {
        Tree::new(symbol, Vec::new())
    }

    /// Node count.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(Tree::depth).max().unwrap_or(0)
    }

    /// Checks that every node has as many children as its symbol's arity.
    pub fn is_well_ranked(&self) -> bool {
        self.children.len() == self.symbol.arity() && self.children.iter().all(Tree::is_well_ranked)
    }

    /// Pre-order traversal.
    pub fn nodes(&self) -> Vec<&Tree> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            stack.extend(t.children.iter().rev());
        }
        out
    }

    /// Subtree at a path of 0-based child indices.
    pub fn at(&self, path: &[usize]) -> Option<&Tree> {
        let mut t = self;
        for &i in path {
            t = t.children.get(i)?;
        }
        Some(t)
    }

    /// Free first-order variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut note = |v: &str, bound: &Vec<String>| {
            if !bound.iter().any(|b| b == v) {
                out.insert(v.to_string());
            }
        };
        match &self.symbol {
            Symbol::Exists(v) | Symbol::Forall(v) => {
                bound.push(v.clone());
                self.children[0].collect_free(bound, out);
                bound.pop();
                return;
            }
            Symbol::LetRel { params, .. } | Symbol::LetFun { params, .. } => {
                // Body sees only its parameters.
                let mut inner = params.clone();
                self.children[0].collect_free(&mut inner, out);
                self.children[1].collect_free(bound, out);
                return;
            }
            Symbol::Var(v) => note(v, bound),
            Symbol::Atom { args: AtomArgs::Inline(args), .. }
            | Symbol::UseRel { args: AtomArgs::Inline(args), .. }
            | Symbol::Eq(AtomArgs::Inline(args)) => {
                for a in args {
                    if let Arg::Var(v) = a {
                        note(v, bound);
                    }
                }
            }
            _ => {}
        }
        for c in &self.children {
            c.collect_free(bound, out);
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    // Convenience constructors.

    pub fn and(a: Tree, b: Tree) -> Tree {
        Tree::new(Symbol::And, vec![a, b])
    }

    pub fn or(a: Tree, b: Tree) -> Tree {
        Tree::new(Symbol::Or, vec![a, b])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Tree) -> Tree {
        Tree::new(Symbol::Not, vec![a])
    }

    /// `a -> b` encoded as `Or(Not(a), b)`.
    pub fn implies(a: Tree, b: Tree) -> Tree {
        Tree::or(Tree::not(a), b)
    }

    pub fn exists(v: &str, a: Tree) -> Tree {
        Tree::new(Symbol::Exists(v.into()), vec![a])
    }

    pub fn forall(v: &str, a: Tree) -> Tree {
        Tree::new(Symbol::Forall(v.into()), vec![a])
    }

    /// Inline atom over variables and constants.
    pub fn atom(rel: &str, args: &[Arg]) -> Tree {
        Tree::leaf(Symbol::Atom { rel: rel.into(), args: AtomArgs::Inline(args.to_vec()) })
    }

    pub fn atom_terms(rel: &str, terms: Vec<Tree>) -> Tree {
        let r = terms.len();
        Tree::new(Symbol::Atom { rel: rel.into(), args: AtomArgs::Terms(r) }, terms)
    }

    pub fn eq(a: Arg, b: Arg) -> Tree {
        Tree::leaf(Symbol::Eq(AtomArgs::Inline(vec![a, b])))
    }

    pub fn eq_terms(a: Tree, b: Tree) -> Tree {
        Tree::new(Symbol::Eq(AtomArgs::Terms(2)), vec![a, b])
    }

    pub fn var(v: &str) -> Tree {
        Tree::leaf(Symbol::Var(v.into()))
    }

    pub fn constant(c: &str) -> Tree {
        Tree::leaf(Symbol::Const(c.into()))
    }

    pub fn func(f: &str, args: Vec<Tree>) -> Tree {
        let arity = args.len();
        Tree::new(Symbol::Func { name: f.into(), arity }, args)
    }

    pub fn ite(c: Tree, t: Tree, e: Tree) -> Tree {
        Tree::new(Symbol::Ite, vec![c, t, e])
    }

    pub fn let_rel(rel: &str, params: &[&str], body: Tree, cont: Tree) -> Tree {
        let params = params.iter().map(|p| p.to_string()).collect();
        Tree::new(Symbol::LetRel { rel: rel.into(), params }, vec![body, cont])
    }

    pub fn use_rel(rel: &str, args: &[Arg]) -> Tree {
        Tree::leaf(Symbol::UseRel { rel: rel.into(), args: AtomArgs::Inline(args.to_vec()) })
    }

    pub fn use_rel_terms(rel: &str, terms: Vec<Tree>) -> Tree {
        let r = terms.len();
        Tree::new(Symbol::UseRel { rel: rel.into(), args: AtomArgs::Terms(r) }, terms)
    }

    pub fn let_fun(fun: &str, params: &[&str], body: Tree, cont: Tree) -> Tree {
        let params = params.iter().map(|p| p.to_string()).collect();
        Tree::new(Symbol::LetFun { fun: fun.into(), params }, vec![body, cont])
    }

    pub fn use_fun(fun: &str, args: Vec<Tree>) -> Tree {
        let arity = args.len();
        Tree::new(Symbol::UseFun { fun: fun.into(), arity }, args)
    }
}

/// Shorthand for a variable argument.
pub fn v(name: &str) -> Arg {
    Arg::Var(name.into())
}

/// Shorthand for a constant argument.
pub fn c(name: &str) -> Arg {
    Arg::Const(name.into())
}

impl Ord for Tree {
    /// Canonical order: node count, then root symbol, then children left to right.
    fn cmp(&self, other: &Self) -> Ordering {
        self.size().cmp(&other.size()).then_with(|| self.cmp_same_size(other))
    }
}

impl Tree {
    fn cmp_same_size(&self, other: &Self) -> Ordering {
        self.symbol.cmp(&other.symbol).then_with(|| {
            for (a, b) in self.children.iter().zip(&other.children) {
                let o = a.cmp(b);
                if o != Ordering::Equal {
                    return o;
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_counts_nodes() {
        let t = Tree::forall("x", Tree::exists("y", Tree::atom("E", &[v("x"), v("y")])));
        assert_eq!(t.size(), 3);
        assert_eq!(t.depth(), 3);
        assert!(t.is_sentence());
    }

    #[test]
    fn free_vars_respect_binders_and_let_params() {
        let t = Tree::and(Tree::atom("E", &[v("x"), c("s")]), Tree::exists("x", Tree::atom("U", &[v("x")])));
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);
        let l =
            Tree::let_rel("P", &["x"], Tree::atom("U", &[v("x")]), Tree::exists("y", Tree::use_rel("P", &[v("y")])));
        assert!(l.is_sentence());
    }

    #[test]
    fn canonical_order_prefers_smaller_then_symbol() {
        let a = Tree::atom("E", &[v("x"), v("y")]);
        let b = Tree::not(Tree::atom("E", &[v("x"), v("x")]));
        assert!(a < b);
        let e1 = Tree::exists("x", a.clone());
        let f1 = Tree::forall("x", a.clone());
        assert!(e1 < f1);
        let n = Tree::not(a.clone());
        assert!(n < e1);
    }
}
