//! Three-valued semantics for formulas and terms with recursive relation
//! and function definitions over structures with partial functions.
//!
//! Undefinedness is a value here, never an error: unbound variables,
//! undefined function applications and uses without an enclosing
//! definition all evaluate to `Undef`.

use std::cell::OnceCell;
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use super::structure::{all_tuples, Elem, Relation, Structure, Tuple};
use super::symbol::{Arg, AtomArgs, Sort, Symbol};
use super::tree::Tree;
use super::Assignment;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truth3 {
    True,
    False,
    Undef,
}

impl Truth3 {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth3::True
        } else {
            Truth3::False
        }
    }

    pub fn and(self, o: Truth3) -> Truth3 {
        match (self, o) {
            (Truth3::True, Truth3::True) => Truth3::True,
            (Truth3::False, _) | (_, Truth3::False) => Truth3::False,
            _ => Truth3::Undef,
        }
    }

    pub fn or(self, o: Truth3) -> Truth3 {
        self.not().and(o.not()).not()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Truth3 {
        match self {
            Truth3::True => Truth3::False,
            Truth3::False => Truth3::True,
            Truth3::Undef => Truth3::Undef,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Truth3::True => "true",
            Truth3::False => "false",
            Truth3::Undef => "undef",
        }
    }
}

/// Result of [`eval_fun3`]: a truth value for formulas, an optional element for terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Value3 {
    Truth(Truth3),
    Elem(Option<Elem>),
}

pub type FunGraph = BTreeMap<Tuple, Elem>;

enum Def3<'t> {
    Rel { params: &'t [String], body: &'t Tree, env: Env3<'t>, value: OnceCell<Rc<Relation>> },
    Fun { params: &'t [String], body: &'t Tree, env: Env3<'t>, value: OnceCell<Rc<FunGraph>> },
    FixedRel(Rc<Relation>),
    FixedFun(Rc<FunGraph>),
}

struct Entry3<'t> {
    name: String,
    def: Def3<'t>,
    next: Env3<'t>,
}

/// Persistent definition environment for the 3-valued evaluator.
#[derive(Clone, Default)]
pub struct Env3<'t>(Option<Rc<Entry3<'t>>>);

impl<'t> Env3<'t> {
    pub fn empty() -> Self {
        Env3(None)
    }

    pub fn bind_rel(&self, name: &str, params: &'t [String], body: &'t Tree) -> Self {
        self.push(name, Def3::Rel { params, body, env: self.clone(), value: OnceCell::new() })
    }

    pub fn bind_fun(&self, name: &str, params: &'t [String], body: &'t Tree) -> Self {
        self.push(name, Def3::Fun { params, body, env: self.clone(), value: OnceCell::new() })
    }

    pub fn bind_fixed_rel(&self, name: &str, rel: Relation) -> Self {
        self.push(name, Def3::FixedRel(Rc::new(rel)))
    }

    pub fn bind_fixed_fun(&self, name: &str, graph: FunGraph) -> Self {
        self.push(name, Def3::FixedFun(Rc::new(graph)))
    }

    fn push(&self, name: &str, def: Def3<'t>) -> Self {
        Env3(Some(Rc::new(Entry3 { name: name.to_string(), def, next: self.clone() })))
    }

    fn lookup(&self, name: &str) -> Option<&Entry3<'t>> {
        let mut cur = self.0.as_deref();
        while let Some(e) = cur {
            if e.name == name {
                return Some(e);
            }
            cur = e.next.0.as_deref();
        }
        None
    }
}

/// Evaluates a formula or a term.
pub fn eval_fun3<'t>(a: &Structure, gamma: &Assignment, env: &Env3<'t>, e: &'t Tree) -> Value3 {
    let mut frame: Vec<(String, Elem)> = gamma.iter().map(|(k, v)| (k.clone(), *v)).collect();
    let ev = Eval3 { a };
    if is_term(e) {
        Value3::Elem(ev.term(&mut frame, env, e))
    } else {
        Value3::Truth(ev.formula(&mut frame, env, e))
    }
}

/// Evaluates a term; `None` means undefined (including ill-sorted input).
pub fn eval_term3<'t>(a: &Structure, gamma: &Assignment, env: &Env3<'t>, t: &'t Tree) -> Option<Elem> {
    match eval_fun3(a, gamma, env, t) {
        Value3::Elem(e) => e,
        Value3::Truth(_) => None,
    }
}

fn is_term(t: &Tree) -> bool {
    match t.symbol.sort() {
        Sort::Term => true,
        Sort::Formula => false,
        Sort::Inherit => is_term(&t.children[1]),
    }
}

/// Least fixpoint of a recursive function definition, from the everywhere
/// undefined map.
pub fn compute_lfp_fun<'t>(a: &Structure, body: &'t Tree, g: &str, params: &'t [String], env: &Env3<'t>) -> FunGraph {
    lfp_fun_stages(a, body, g, params, env).pop().unwrap_or_default()
}

/// All stages of the function iteration, from the empty map to the fixpoint.
pub fn lfp_fun_stages<'t>(
    a: &Structure,
    body: &'t Tree,
    g: &str,
    params: &'t [String],
    env: &Env3<'t>,
) -> Vec<FunGraph> {
    let ev = Eval3 { a };
    let tuples = all_tuples(a.size(), params.len());
    let mut stages = vec![FunGraph::new()];
    // The chain is bounded by the number of argument tuples; the extra
    // rounds only matter for non-monotone bodies.
    for _ in 0..=tuples.len() + 1 {
        let cur = stages.last().unwrap().clone();
        let inner = env.bind_fixed_fun(g, cur.clone());
        let mut next = FunGraph::new();
        for t in &tuples {
            let mut frame: Vec<(String, Elem)> = params.iter().cloned().zip(t.iter().copied()).collect();
            if let Some(v) = ev.term(&mut frame, &inner, body) {
                next.insert(t.clone(), v);
            }
        }
        if next == cur {
            break;
        }
        stages.push(next);
    }
    stages
}

/// Least fixpoint of a relation definition under the 3-valued reading:
/// a tuple enters when the body evaluates to true.
pub fn compute_lfp_rel3<'t>(a: &Structure, body: &'t Tree, p: &str, params: &'t [String], env: &Env3<'t>) -> Relation {
    let ev = Eval3 { a };
    let tuples = all_tuples(a.size(), params.len());
    let mut cur = Relation::new();
    for _ in 0..=tuples.len() + 1 {
        let inner = env.bind_fixed_rel(p, cur.clone());
        let mut next = BTreeSet::new();
        for t in &tuples {
            let mut frame: Vec<(String, Elem)> = params.iter().cloned().zip(t.iter().copied()).collect();
            if ev.formula(&mut frame, &inner, body) == Truth3::True {
                next.insert(t.clone());
            }
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

struct Eval3<'a> {
    a: &'a Structure,
}

fn lookup(frame: &[(String, Elem)], v: &str) -> Option<Elem> {
    frame.iter().rev().find(|(k, _)| k == v).map(|(_, e)| *e)
}

impl<'a> Eval3<'a> {
    fn values<'t>(
        &self,
        frame: &mut Vec<(String, Elem)>,
        env: &Env3<'t>,
        args: &AtomArgs,
        children: &'t [Tree],
    ) -> Option<Vec<Elem>> {
        match args {
            AtomArgs::Inline(list) => list
                .iter()
                .map(|x| match x {
                    Arg::Var(v) => lookup(frame, v),
                    Arg::Const(c) => self.a.constant(c),
                })
                .collect(),
            AtomArgs::Terms(_) => children.iter().map(|c| self.term(frame, env, c)).collect(),
        }
    }

    fn formula<'t>(&self, frame: &mut Vec<(String, Elem)>, env: &Env3<'t>, t: &'t Tree) -> Truth3 {
        match &t.symbol {
            // A false conjunct or a true disjunct settles the value.
            Symbol::And => match self.formula(frame, env, &t.children[0]) {
                Truth3::False => Truth3::False,
                l => l.and(self.formula(frame, env, &t.children[1])),
            },
            Symbol::Or => match self.formula(frame, env, &t.children[0]) {
                Truth3::True => Truth3::True,
                l => l.or(self.formula(frame, env, &t.children[1])),
            },
            Symbol::Not => self.formula(frame, env, &t.children[0]).not(),
            Symbol::Exists(v) | Symbol::Forall(v) => {
                let exists = matches!(t.symbol, Symbol::Exists(_));
                let mut acc = Truth3::from_bool(!exists);
                for e in self.a.elements() {
                    frame.push((v.clone(), e));
                    let r = self.formula(frame, env, &t.children[0]);
                    frame.pop();
                    acc = if exists { acc.or(r) } else { acc.and(r) };
                    if acc == Truth3::from_bool(exists) {
                        break;
                    }
                }
                acc
            }
            Symbol::Atom { rel, args } => match self.values(frame, env, args, &t.children) {
                Some(vals) => match self.a.holds(rel, &vals) {
                    Some(b) => Truth3::from_bool(b),
                    None => Truth3::Undef,
                },
                None => Truth3::Undef,
            },
            Symbol::Eq(args) => match self.values(frame, env, args, &t.children) {
                Some(vals) => Truth3::from_bool(vals[0] == vals[1]),
                None => Truth3::Undef,
            },
            Symbol::LetRel { rel, params } => {
                let inner = env.bind_rel(rel, params, &t.children[0]);
                self.formula(frame, &inner, &t.children[1])
            }
            Symbol::LetFun { fun, params } => {
                let inner = env.bind_fun(fun, params, &t.children[0]);
                self.formula(frame, &inner, &t.children[1])
            }
            Symbol::UseRel { rel, args } => {
                let Some(vals) = self.values(frame, env, args, &t.children) else {
                    return Truth3::Undef;
                };
                let relation = match env.lookup(rel).map(|e| &e.def) {
                    Some(Def3::FixedRel(r)) => r.clone(),
                    Some(Def3::Rel { params, body, env: captured, value }) => {
                        value.get_or_init(|| Rc::new(compute_lfp_rel3(self.a, body, rel, params, captured))).clone()
                    }
                    _ => return Truth3::Undef,
                };
                Truth3::from_bool(relation.contains(&vals))
            }
            _ => Truth3::Undef,
        }
    }

    fn term<'t>(&self, frame: &mut Vec<(String, Elem)>, env: &Env3<'t>, t: &'t Tree) -> Option<Elem> {
        match &t.symbol {
            Symbol::Var(v) => lookup(frame, v),
            Symbol::Const(c) => self.a.constant(c),
            Symbol::Func { name, .. } => {
                let vals = t.children.iter().map(|c| self.term(frame, env, c)).collect::<Option<Vec<_>>>()?;
                self.a.apply(name, &vals)
            }
            Symbol::Ite => match self.formula(frame, env, &t.children[0]) {
                Truth3::True => self.term(frame, env, &t.children[1]),
                Truth3::False => self.term(frame, env, &t.children[2]),
                Truth3::Undef => None,
            },
            Symbol::LetRel { rel, params } => {
                let inner = env.bind_rel(rel, params, &t.children[0]);
                self.term(frame, &inner, &t.children[1])
            }
            Symbol::LetFun { fun, params } => {
                let inner = env.bind_fun(fun, params, &t.children[0]);
                self.term(frame, &inner, &t.children[1])
            }
            Symbol::UseFun { fun, .. } => {
                let vals = t.children.iter().map(|c| self.term(frame, env, c)).collect::<Option<Vec<_>>>()?;
                let graph = match env.lookup(fun).map(|e| &e.def) {
                    Some(Def3::FixedFun(g)) => g.clone(),
                    Some(Def3::Fun { params, body, env: captured, value }) => {
                        value.get_or_init(|| Rc::new(compute_lfp_fun(self.a, body, fun, params, captured))).clone()
                    }
                    _ => return None,
                };
                graph.get(&vals).copied()
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::signature::Signature;
    use crate::model::tree::v;

    /// Elements: 0 = nil, 1 = a, 2 = [a], 3 = [a,a]; head/tail partial.
    fn lists() -> Structure {
        let mut sig =
            Signature::new().with_constant("nil").with_constant("c").with_function("head", 1).with_function("tail", 1);
        sig.partial_functions_allowed = true;
        let mut a = Structure::with_names(sig, vec!["nil".into(), "a".into(), "[a]".into(), "[a,a]".into()]);
        a.set_constant("nil", 0).set_constant("c", 1);
        a.set_value("head", &[2], 1).set_value("head", &[3], 1).set_partial("head", true);
        a.set_value("tail", &[2], 0).set_value("tail", &[3], 2).set_partial("tail", true);
        a
    }

    #[test]
    fn connectives_follow_the_table() {
        use Truth3::*;
        assert_eq!(True.and(Undef), Undef);
        assert_eq!(False.and(Undef), False);
        assert_eq!(True.or(Undef), True);
        assert_eq!(False.or(Undef), Undef);
        assert_eq!(Undef.not(), Undef);
    }

    #[test]
    fn partial_application_is_undefined() {
        let a = lists();
        let t = Tree::func("head", vec![Tree::constant("nil")]);
        assert_eq!(eval_fun3(&a, &Assignment::new(), &Env3::empty(), &t), Value3::Elem(None));
        let phi = Tree::and(
            Tree::eq(v("x"), v("x")),
            Tree::eq_terms(Tree::var("x"), Tree::func("head", vec![Tree::var("x")])),
        );
        let g = Assignment::from_pairs([("x", 0)]);
        assert_eq!(eval_fun3(&a, &g, &Env3::empty(), &phi), Value3::Truth(Truth3::Undef));
    }

    #[test]
    fn recursive_function_to_nil() {
        // g(x) = ite(x = nil, nil, g(tail(x)))
        let a = lists();
        let body = Tree::ite(
            Tree::eq_terms(Tree::var("x"), Tree::constant("nil")),
            Tree::constant("nil"),
            Tree::use_fun("g", vec![Tree::func("tail", vec![Tree::var("x")])]),
        );
        let params = vec!["x".to_string()];
        let graph = compute_lfp_fun(&a, &body, "g", &params, &Env3::empty());
        let expected: FunGraph = [(vec![0], 0), (vec![2], 0), (vec![3], 0)].into_iter().collect();
        assert_eq!(graph, expected);

        let constant = Tree::constant("c");
        let graph = compute_lfp_fun(&a, &constant, "g", &params, &Env3::empty());
        assert_eq!(graph.len(), 4);
        let selfcall = Tree::use_fun("g", vec![Tree::var("x")]);
        assert!(compute_lfp_fun(&a, &selfcall, "g", &params, &Env3::empty()).is_empty());
    }

    #[test]
    fn let_fun_and_use() {
        let a = lists();
        let t = Tree::let_fun(
            "g",
            &["x"],
            Tree::ite(
                Tree::eq_terms(Tree::var("x"), Tree::constant("nil")),
                Tree::constant("nil"),
                Tree::use_fun("g", vec![Tree::func("tail", vec![Tree::var("x")])]),
            ),
            Tree::use_fun("g", vec![Tree::constant("c")]),
        );
        // g(a): a ≠ nil and tail(a) is undefined.
        assert_eq!(eval_fun3(&a, &Assignment::new(), &Env3::empty(), &t), Value3::Elem(None));
    }
}
