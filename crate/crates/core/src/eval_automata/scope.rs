//! A deterministic one-way automaton accepting the trees whose free
//! variables lie within a given set.

use std::collections::BTreeSet;

use crate::automata::{AlternatingAutomaton, Pbf};
use crate::model::{Arg, AtomArgs, Symbol};

/// States are the sets of variables in scope.
#[derive(Clone, Debug)]
pub struct ScopeAutomaton {
    initial: BTreeSet<String>,
}

impl ScopeAutomaton {
    /// Accepts trees with no free variables outside `allowed`.
    pub fn new(allowed: impl IntoIterator<Item = String>) -> Self {
        ScopeAutomaton { initial: allowed.into_iter().collect() }
    }

    pub fn closed() -> Self {
        ScopeAutomaton { initial: BTreeSet::new() }
    }
}

fn inline_ok(scope: &BTreeSet<String>, args: &AtomArgs) -> bool {
    match args {
        AtomArgs::Inline(list) => list.iter().all(|a| match a {
            Arg::Var(v) => scope.contains(v),
            Arg::Const(_) => true,
        }),
        AtomArgs::Terms(_) => true,
    }
}

impl AlternatingAutomaton for ScopeAutomaton {
    type State = BTreeSet<String>;

    fn initial_states(&self) -> Vec<Self::State> {
        vec![self.initial.clone()]
    }

    fn transition(&self, q: &Self::State, s: &Symbol) -> Pbf<Self::State> {
        let all_children = |k: usize| Pbf::and((1..=k).map(|i| Pbf::atom(q.clone(), i as i32)));
        match s {
            Symbol::Exists(x) | Symbol::Forall(x) => {
                let mut inner = q.clone();
                inner.insert(x.clone());
                Pbf::atom(inner, 1)
            }
            Symbol::Var(x) => Pbf::from_bool(q.contains(x)),
            Symbol::Atom { args, .. } | Symbol::UseRel { args, .. } | Symbol::Eq(args) => {
                if inline_ok(q, args) {
                    all_children(s.arity())
                } else {
                    Pbf::False
                }
            }
            Symbol::LetRel { params, .. } | Symbol::LetFun { params, .. } => {
                Pbf::and(vec![Pbf::atom(params.iter().cloned().collect(), 1), Pbf::atom(q.clone(), 2)])
            }
            _ => all_children(s.arity()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::ata_membership;
    use crate::model::tree::v;
    use crate::model::Tree;

    #[test]
    fn accepts_exactly_closed_trees() {
        let a = ScopeAutomaton::closed();
        let open = Tree::exists("x", Tree::atom("E", &[v("x"), v("y")]));
        let closed = Tree::forall("y", open.clone());
        assert!(!ata_membership(&a, &open));
        assert!(ata_membership(&a, &closed));
        assert!(ata_membership(&ScopeAutomaton::new(["y".to_string()]), &open));
        let def = Tree::let_rel(
            "P",
            &["x"],
            Tree::atom("E", &[v("x"), v("x")]),
            Tree::exists("y", Tree::use_rel("P", &[v("y")])),
        );
        assert!(ata_membership(&a, &def));
        assert_eq!(open.free_vars().len(), 1);
    }
}
