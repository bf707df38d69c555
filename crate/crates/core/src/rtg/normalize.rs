//! Flattening to simple rules and chain-rule elimination.

use std::collections::{BTreeMap, BTreeSet};

use super::{NormalProduction, NormalRtg, Rtg};
use crate::syntax::Pattern;

/// Produces an equivalent grammar whose rules all read one symbol.
///
/// Nested subpatterns get fresh nonterminals named `{lhs}_{i}`; identical
/// subpatterns share one. Chain rules `A -> B` are replaced by copies of
/// `B`'s symbol rules.
pub fn normalize(g: &Rtg) -> NormalRtg {
    let mut names = g.nonterminals();
    let mut index: BTreeMap<String, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    let mut fresh: BTreeMap<Pattern, usize> = BTreeMap::new();
    let mut counters: BTreeMap<String, usize> = BTreeMap::new();
    let mut simple: BTreeSet<NormalProduction> = BTreeSet::new();
    let mut chains: BTreeSet<(usize, usize)> = BTreeSet::new();

    struct Ctx<'a> {
        names: &'a mut Vec<String>,
        index: &'a mut BTreeMap<String, usize>,
        fresh: &'a mut BTreeMap<Pattern, usize>,
        counters: &'a mut BTreeMap<String, usize>,
        simple: &'a mut BTreeSet<NormalProduction>,
        order: Vec<NormalProduction>,
    }

    impl Ctx<'_> {
        fn emit(&mut self, p: NormalProduction) {
            if self.simple.insert(p.clone()) {
                self.order.push(p);
            }
        }

        fn child(&mut self, lhs: &str, p: &Pattern) -> usize {
            match p {
                Pattern::Hole(n) => self.index[n],
                Pattern::Node(..) => {
                    if let Some(&id) = self.fresh.get(p) {
                        return id;
                    }
                    let c = self.counters.entry(lhs.to_string()).or_insert(0);
                    let name = loop {
                        *c += 1;
                        let cand = format!("{lhs}_{c}");
                        if !self.index.contains_key(&cand) {
                            break cand;
                        }
                    };
                    let id = self.names.len();
                    self.names.push(name.clone());
                    self.index.insert(name.clone(), id);
                    self.fresh.insert(p.clone(), id);
                    self.flatten(id, &name, p);
                    id
                }
            }
        }

        fn flatten(&mut self, lhs: usize, lhs_name: &str, p: &Pattern) {
            if let Pattern::Node(sym, kids) = p {
                let children = kids.iter().map(|k| self.child(lhs_name, k)).collect();
                self.emit(NormalProduction { lhs, symbol: sym.clone(), children });
            }
        }
    }

    let mut ctx = Ctx {
        names: &mut names,
        index: &mut index,
        fresh: &mut fresh,
        counters: &mut counters,
        simple: &mut simple,
        order: Vec::new(),
    };
    for p in &g.productions {
        let lhs = ctx.index[&p.lhs];
        match &p.rhs {
            Pattern::Hole(b) => {
                let b = ctx.index[b];
                if b != lhs {
                    chains.insert((lhs, b));
                }
            }
            rhs => ctx.flatten(lhs, &p.lhs, rhs),
        }
    }
    let mut productions = ctx.order;
    let n = names.len();

    // Chain closure: A derives every symbol rule of each B reachable by chains.
    let mut reach: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(a, b) in &chains {
        reach[a].insert(b);
    }
    loop {
        let mut changed = false;
        for a in 0..n {
            let next: Vec<usize> = reach[a].iter().flat_map(|&b| reach[b].iter().copied()).collect();
            for c in next {
                if c != a && reach[a].insert(c) {
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let base = productions.clone();
    for (a, targets) in reach.iter().enumerate() {
        for &b in targets {
            for p in base.iter().filter(|p| p.lhs == b) {
                let q = NormalProduction { lhs: a, symbol: p.symbol.clone(), children: p.children.clone() };
                if simple.insert(q.clone()) {
                    productions.push(q);
                }
            }
        }
    }
    let axiom = index[&g.axiom];
    NormalRtg { logic: g.logic.clone(), signature: g.signature.clone(), nonterminals: names, axiom, productions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rtg::{enumerate, parse_grammar};

    const HEAD: &str = "logic fo(k=2)\nsignature { rel E/2 }\n";

    #[test]
    fn flattens_nested_patterns() {
        let g = parse_grammar(&format!("{HEAD}S -> And(S, Or(S,S)) | Atom[E](x,y)")).unwrap();
        let n = normalize(&g);
        assert_eq!(n.nonterminals, vec!["S".to_string(), "S_1".to_string()]);
        assert_eq!(n.productions.len(), 3);
        let and = n.productions.iter().find(|p| p.symbol == crate::model::Symbol::And).unwrap();
        assert_eq!((and.lhs, and.children.clone()), (0, vec![0, 1]));
        let or = n.productions.iter().find(|p| p.symbol == crate::model::Symbol::Or).unwrap();
        assert_eq!(or.lhs, 1);
        let a: BTreeSet<_> = enumerate(&g, 9).into_iter().collect();
        let b: BTreeSet<_> = enumerate(&n.to_rtg(), 9).into_iter().collect();
        assert_eq!(a, b);
        assert!(a.len() > 3);
    }

    #[test]
    fn eliminates_chain_rules() {
        let g = parse_grammar(&format!("{HEAD}S -> T | Not(S)\nT -> U | Exists[x](S)\nU -> Atom[E](x,x) | S")).unwrap();
        let n = normalize(&g);
        assert!(n.productions.iter().all(|p| p.symbol.arity() == p.children.len()));
        for max in 1..=6 {
            let a: BTreeSet<_> = enumerate(&g, max).into_iter().collect();
            let b: BTreeSet<_> = enumerate(&n.to_rtg(), max).into_iter().collect();
            assert_eq!(a, b, "bound {max}");
        }
    }

    #[test]
    fn simple_grammar_is_unchanged() {
        let g = parse_grammar(crate::rtg::dsl::tests::FIG4).unwrap();
        let n = normalize(&g);
        assert_eq!(n.productions.len(), 11);
        assert_eq!(n.to_rtg(), g);
    }
}
