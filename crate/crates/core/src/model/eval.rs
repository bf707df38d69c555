//! Classical semantics for FO and FO with least-fixpoint definitions.

use std::cell::OnceCell;
use std::collections::BTreeSet;
use std::rc::Rc;

use super::structure::{all_tuples, Elem, Relation, Structure};
use super::symbol::{Arg, AtomArgs, Symbol};
use super::tree::Tree;
use super::{Assignment, EvalError};

enum RelDef<'t> {
    Closure { params: &'t [String], body: &'t Tree, env: RelEnv<'t>, value: OnceCell<Result<Rc<Relation>, EvalError>> },
    Fixed(Rc<Relation>),
}

struct RelEntry<'t> {
    name: String,
    def: RelDef<'t>,
    next: RelEnv<'t>,
}

/// Persistent environment of relation definitions.
#[derive(Clone, Default)]
pub struct RelEnv<'t>(Option<Rc<RelEntry<'t>>>);

impl<'t> RelEnv<'t> {
    pub fn empty() -> Self {
        RelEnv(None)
    }

    /// Binds `name` to a fixed relation.
    pub fn bind_fixed(&self, name: &str, rel: Relation) -> Self {
        self.push(name, RelDef::Fixed(Rc::new(rel)))
    }

    /// Binds `name` to the least fixpoint of `body` over `params`, closed over `self`.
    pub fn bind_def(&self, name: &str, params: &'t [String], body: &'t Tree) -> Self {
        self.push(name, RelDef::Closure { params, body, env: self.clone(), value: OnceCell::new() })
    }

    fn push(&self, name: &str, def: RelDef<'t>) -> Self {
        RelEnv(Some(Rc::new(RelEntry { name: name.to_string(), def, next: self.clone() })))
    }

    fn lookup(&self, name: &str) -> Option<&RelEntry<'t>> {
        let mut cur = self.0.as_deref();
        while let Some(e) = cur {
            if e.name == name {
                return Some(e);
            }
            cur = e.next.0.as_deref();
        }
        None
    }

    fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = self.0.as_deref();
        while let Some(e) = cur {
            out.push(e.name.clone());
            cur = e.next.0.as_deref();
        }
        out
    }
}

/// Evaluates an FO formula (no definitions).
pub fn eval_fo(a: &Structure, gamma: &Assignment, phi: &Tree) -> Result<bool, EvalError> {
    precheck(a, gamma, &[], phi, false)?;
    let mut frame = Frame::from(gamma);
    Evaluator { a }.formula(&mut frame, &RelEnv::empty(), phi)
}

/// Evaluates an FO formula with least-fixpoint relation definitions.
pub fn eval_folfp<'t>(a: &Structure, gamma: &Assignment, env: &RelEnv<'t>, phi: &'t Tree) -> Result<bool, EvalError> {
    precheck(a, gamma, &env.names(), phi, true)?;
    let mut frame = Frame::from(gamma);
    Evaluator { a }.formula(&mut frame, env, phi)
}

/// Least fixpoint of `psi` as an operator on relations of arity `params.len()`.
pub fn compute_lfp<'t>(
    a: &Structure,
    psi: &'t Tree,
    p: &str,
    params: &'t [String],
    env: &RelEnv<'t>,
) -> Result<Relation, EvalError> {
    Ok(kleene_stages(a, psi, p, params, env)?.pop().unwrap_or_default())
}

/// All Kleene stages `F^0(∅)=∅, F^1(∅), …` up to and including the fixpoint.
pub fn kleene_stages<'t>(
    a: &Structure,
    psi: &'t Tree,
    p: &str,
    params: &'t [String],
    env: &RelEnv<'t>,
) -> Result<Vec<Relation>, EvalError> {
    if !check_positivity(psi, p) {
        return Err(EvalError::NotPositive(p.to_string()));
    }
    let mut names = env.names();
    names.push(p.to_string());
    let scope_gamma = Assignment::from_pairs(params.iter().map(|x| (x.as_str(), 0)));
    precheck(a, &scope_gamma, &names, psi, true)?;
    let ev = Evaluator { a };
    let tuples = all_tuples(a.size(), params.len());
    let mut stages = vec![Relation::new()];
    loop {
        let cur = stages.last().unwrap().clone();
        let inner = env.bind_fixed(p, cur.clone());
        let next = ev.apply_operator(&inner, params, psi, &tuples)?;
        if next == cur {
            return Ok(stages);
        }
        stages.push(next);
    }
}

/// True iff every free occurrence of `p` in `psi` is under an even number of
/// negations and outside any if-then-else condition.
pub fn check_positivity(psi: &Tree, p: &str) -> bool {
    fn walk(t: &Tree, p: &str, negs: usize, in_cond: bool) -> bool {
        match &t.symbol {
            Symbol::UseRel { rel, .. } if rel == p => {
                if negs % 2 == 1 || in_cond {
                    return false;
                }
            }
            // Both the body and the continuation refer to the inner definition.
            Symbol::LetRel { rel, .. } if rel == p => return true,
            _ => {}
        }
        t.children.iter().enumerate().all(|(i, c)| {
            let negs = negs + usize::from(t.symbol == Symbol::Not);
            let cond = in_cond || (t.symbol == Symbol::Ite && i == 0);
            walk(c, p, negs, cond)
        })
    }
    walk(psi, p, 0, false)
}

/// Static checks so that errors do not depend on evaluation order.
fn precheck(
    a: &Structure,
    gamma: &Assignment,
    env_names: &[String],
    phi: &Tree,
    allow_lfp: bool,
) -> Result<(), EvalError> {
    for v in phi.free_vars() {
        if gamma.get(&v).is_none() {
            return Err(EvalError::UnboundVariable(v));
        }
    }
    let mut scope: Vec<String> = env_names.to_vec();
    check_symbols(a, phi, &mut scope, allow_lfp)
}

fn check_symbols(a: &Structure, t: &Tree, scope: &mut Vec<String>, allow_lfp: bool) -> Result<(), EvalError> {
    let sig = a.signature();
    let check_args = |args: &AtomArgs| -> Result<(), EvalError> {
        if let AtomArgs::Inline(list) = args {
            for x in list {
                if let Arg::Const(c) = x {
                    if !sig.is_constant(c) {
                        return Err(EvalError::SymbolUnknown(c.clone()));
                    }
                }
            }
        }
        Ok(())
    };
    match &t.symbol {
        Symbol::Atom { rel, args } => {
            if sig.relation_arity(rel) != Some(args.len()) {
                return Err(EvalError::SymbolUnknown(rel.clone()));
            }
            check_args(args)?;
        }
        Symbol::Eq(args) => check_args(args)?,
        Symbol::Const(c) => {
            if !sig.is_constant(c) {
                return Err(EvalError::SymbolUnknown(c.clone()));
            }
        }
        Symbol::Func { name, arity } => {
            if sig.function_arity(name) != Some(*arity) {
                return Err(EvalError::SymbolUnknown(name.clone()));
            }
        }
        Symbol::LetRel { rel, params } => {
            if !allow_lfp {
                return Err(EvalError::Unsupported("LetRel".into()));
            }
            if !check_positivity(&t.children[0], rel) {
                return Err(EvalError::NotPositive(rel.clone()));
            }
            let _ = params;
            scope.push(rel.clone());
            check_symbols(a, &t.children[0], scope, allow_lfp)?;
            check_symbols(a, &t.children[1], scope, allow_lfp)?;
            scope.pop();
            return Ok(());
        }
        Symbol::UseRel { rel, args } => {
            if !allow_lfp {
                return Err(EvalError::Unsupported("UseRel".into()));
            }
            if !scope.contains(rel) {
                return Err(EvalError::UndefinedRelation(rel.clone()));
            }
            check_args(args)?;
        }
        Symbol::LetFun { .. } | Symbol::UseFun { .. } => {
            return Err(EvalError::Unsupported(t.symbol.head().into()));
        }
        _ => {}
    }
    for c in &t.children {
        check_symbols(a, c, scope, allow_lfp)?;
    }
    Ok(())
}

/// Variable bindings as a shadowing stack.
struct Frame(Vec<(String, Elem)>);

impl From<&Assignment> for Frame {
    fn from(g: &Assignment) -> Self {
        Frame(g.iter().map(|(k, v)| (k.clone(), *v)).collect())
    }
}

impl Frame {
    fn get(&self, v: &str) -> Result<Elem, EvalError> {
        self.0
            .iter()
            .rev()
            .find(|(k, _)| k == v)
            .map(|(_, e)| *e)
            .ok_or_else(|| EvalError::UnboundVariable(v.to_string()))
    }
}

struct Evaluator<'a> {
    a: &'a Structure,
}

impl<'a> Evaluator<'a> {
    fn apply_operator<'t>(
        &self,
        env: &RelEnv<'t>,
        params: &[String],
        body: &'t Tree,
        tuples: &[Vec<Elem>],
    ) -> Result<Relation, EvalError> {
        let mut out = BTreeSet::new();
        for t in tuples {
            let mut frame = Frame(params.iter().cloned().zip(t.iter().copied()).collect());
            if self.formula(&mut frame, env, body)? {
                out.insert(t.clone());
            }
        }
        Ok(out)
    }

    fn args(&self, frame: &Frame, args: &[Arg]) -> Result<Vec<Elem>, EvalError> {
        args.iter()
            .map(|x| match x {
                Arg::Var(v) => frame.get(v),
                Arg::Const(c) => self.a.constant(c).ok_or_else(|| EvalError::SymbolUnknown(c.clone())),
            })
            .collect()
    }

    fn arg_values<'t>(
        &self,
        frame: &mut Frame,
        env: &RelEnv<'t>,
        args: &AtomArgs,
        children: &'t [Tree],
    ) -> Result<Vec<Elem>, EvalError> {
        match args {
            AtomArgs::Inline(list) => self.args(frame, list),
            AtomArgs::Terms(_) => children.iter().map(|c| self.term(frame, env, c)).collect(),
        }
    }

    fn formula<'t>(&self, frame: &mut Frame, env: &RelEnv<'t>, t: &'t Tree) -> Result<bool, EvalError> {
        match &t.symbol {
            Symbol::And => Ok(self.formula(frame, env, &t.children[0])? && self.formula(frame, env, &t.children[1])?),
            Symbol::Or => Ok(self.formula(frame, env, &t.children[0])? || self.formula(frame, env, &t.children[1])?),
            Symbol::Not => Ok(!self.formula(frame, env, &t.children[0])?),
            Symbol::Exists(v) | Symbol::Forall(v) => {
                let want = matches!(t.symbol, Symbol::Exists(_));
                for e in self.a.elements() {
                    frame.0.push((v.clone(), e));
                    let r = self.formula(frame, env, &t.children[0]);
                    frame.0.pop();
                    if r? == want {
                        return Ok(want);
                    }
                }
                Ok(!want)
            }
            Symbol::Atom { rel, args } => {
                let vals = self.arg_values(frame, env, args, &t.children)?;
                self.a.holds(rel, &vals).ok_or_else(|| EvalError::SymbolUnknown(rel.clone()))
            }
            Symbol::Eq(args) => {
                let vals = self.arg_values(frame, env, args, &t.children)?;
                Ok(vals[0] == vals[1])
            }
            Symbol::LetRel { rel, params } => {
                let inner = env.bind_def(rel, params, &t.children[0]);
                self.formula(frame, &inner, &t.children[1])
            }
            Symbol::UseRel { rel, args } => {
                let vals = self.arg_values(frame, env, args, &t.children)?;
                let entry = env.lookup(rel).ok_or_else(|| EvalError::UndefinedRelation(rel.clone()))?;
                let relation = match &entry.def {
                    RelDef::Fixed(r) => r.clone(),
                    RelDef::Closure { params, body, env: captured, value } => value
                        .get_or_init(|| {
                            kleene_stages(self.a, body, rel, params, captured)
                                .map(|mut s| Rc::new(s.pop().unwrap_or_default()))
                        })
                        .clone()?,
                };
                Ok(relation.contains(&vals))
            }
            _ => Err(EvalError::Unsupported(format!("{} in formula position", t.symbol.head()))),
        }
    }

    fn term<'t>(&self, frame: &mut Frame, env: &RelEnv<'t>, t: &'t Tree) -> Result<Elem, EvalError> {
        match &t.symbol {
            Symbol::Var(v) => frame.get(v),
            Symbol::Const(c) => self.a.constant(c).ok_or_else(|| EvalError::PartialFunction(c.clone())),
            Symbol::Func { name, .. } => {
                let vals = t.children.iter().map(|c| self.term(frame, env, c)).collect::<Result<Vec<_>, _>>()?;
                self.a.apply(name, &vals).ok_or_else(|| EvalError::PartialFunction(name.clone()))
            }
            Symbol::Ite => {
                if self.formula(frame, env, &t.children[0])? {
                    self.term(frame, env, &t.children[1])
                } else {
                    self.term(frame, env, &t.children[2])
                }
            }
            _ => Err(EvalError::Unsupported(format!("{} in term position", t.symbol.head()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::signature::Signature;
    use crate::model::tree::{c, v};

    fn digraph(n: usize, edges: &[(Elem, Elem)]) -> Structure {
        let mut a = Structure::new(Signature::new().with_relation("E", 2), n);
        for &(x, y) in edges {
            a.add_tuple("E", &[x, y]);
        }
        a
    }

    fn reach_body() -> Tree {
        // E(x,y) ∨ ∃z.(E(x,z) ∧ ∃x.(x=z ∧ P(x,y)))
        Tree::or(
            Tree::atom("E", &[v("x"), v("y")]),
            Tree::exists(
                "z",
                Tree::and(
                    Tree::atom("E", &[v("x"), v("z")]),
                    Tree::exists("x", Tree::and(Tree::eq(v("x"), v("z")), Tree::use_rel("P", &[v("x"), v("y")]))),
                ),
            ),
        )
    }

    #[test]
    fn fo_examples() {
        let a = digraph(2, &[(0, 1)]);
        let phi = Tree::forall(
            "x",
            Tree::exists("y", Tree::or(Tree::atom("E", &[v("x"), v("y")]), Tree::atom("E", &[v("y"), v("x")]))),
        );
        assert_eq!(eval_fo(&a, &Assignment::new(), &phi), Ok(true));
        let loops = Tree::exists("x", Tree::atom("E", &[v("x"), v("x")]));
        assert_eq!(eval_fo(&digraph(3, &[]), &Assignment::new(), &loops), Ok(false));
    }

    #[test]
    fn fo_errors() {
        let a = digraph(2, &[]);
        let free = Tree::atom("E", &[v("x"), v("y")]);
        assert_eq!(
            eval_fo(&a, &Assignment::from_pairs([("x", 0)]), &free),
            Err(EvalError::UnboundVariable("y".into()))
        );
        let unknown = Tree::atom("F", &[c("s")]);
        assert!(matches!(eval_fo(&a, &Assignment::new(), &unknown), Err(EvalError::SymbolUnknown(_))));
    }

    #[test]
    fn lfp_on_three_cycle_is_total() {
        let a = digraph(3, &[(0, 1), (1, 2), (2, 0)]);
        let params = vec!["x".to_string(), "y".to_string()];
        let body = reach_body();
        let stages = kleene_stages(&a, &body, "P", &params, &RelEnv::empty()).unwrap();
        assert_eq!(stages.last().unwrap().len(), 9);
        // Stages: ∅, E, paths ≤ 2, paths ≤ 3 (= all pairs).
        assert_eq!(stages.len(), 4);
    }

    #[test]
    fn lfp_trivial_bodies() {
        let a = digraph(3, &[(0, 1), (1, 2)]);
        let params = vec!["x".to_string(), "y".to_string()];
        let e = Tree::atom("E", &[v("x"), v("y")]);
        assert_eq!(compute_lfp(&a, &e, "P", &params, &RelEnv::empty()).unwrap(), a.relation("E").unwrap().clone());
        let selfref = Tree::use_rel("P", &[v("x"), v("y")]);
        assert!(compute_lfp(&a, &selfref, "P", &params, &RelEnv::empty()).unwrap().is_empty());
        let neg = Tree::not(selfref);
        assert!(matches!(compute_lfp(&a, &neg, "P", &params, &RelEnv::empty()), Err(EvalError::NotPositive(_))));
    }

    #[test]
    fn folfp_sentences() {
        let cyc = digraph(3, &[(0, 1), (1, 2), (2, 0)]);
        let phi =
            Tree::let_rel("P", &["x", "y"], reach_body(), Tree::exists("x", Tree::use_rel("P", &[v("x"), v("x")])));
        assert_eq!(eval_folfp(&cyc, &Assignment::new(), &RelEnv::empty(), &phi), Ok(true));
        let path = digraph(3, &[(0, 1), (1, 2)]);
        assert_eq!(eval_folfp(&path, &Assignment::new(), &RelEnv::empty(), &phi), Ok(false));

        let empty = Tree::let_rel(
            "P",
            &["x"],
            Tree::use_rel("P", &[v("x")]),
            Tree::forall("x", Tree::not(Tree::use_rel("P", &[v("x")]))),
        );
        assert_eq!(eval_folfp(&path, &Assignment::new(), &RelEnv::empty(), &empty), Ok(true));

        let dangling = Tree::exists("x", Tree::use_rel("P", &[v("x")]));
        assert_eq!(
            eval_folfp(&path, &Assignment::new(), &RelEnv::empty(), &dangling),
            Err(EvalError::UndefinedRelation("P".into()))
        );
    }

    #[test]
    fn positivity() {
        let p = || Tree::use_rel("P", &[v("x"), v("y")]);
        assert!(check_positivity(&Tree::not(Tree::not(p())), "P"));
        assert!(!check_positivity(&Tree::not(p()), "P"));
        assert!(check_positivity(&reach_body(), "P"));
        // Shadowed occurrences belong to the inner definition.
        let shadow = Tree::let_rel("P", &["x", "y"], p(), Tree::not(p()));
        assert!(check_positivity(&shadow, "P"));
    }
}
