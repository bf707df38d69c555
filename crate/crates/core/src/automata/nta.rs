//! Nondeterministic top-down tree automata.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Alphabet, AutomatonError, SymbolId};
use crate::model::Tree;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NtaRule {
    pub state: u32,
    pub symbol: SymbolId,
    pub children: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Nta {
    alphabet: Alphabet,
    num_states: usize,
    initial: Vec<u32>,
    rules: Vec<NtaRule>,
    by_symbol: HashMap<SymbolId, Vec<usize>>,
}

impl Nta {
    pub fn new(alphabet: Alphabet, num_states: usize, initial: Vec<u32>, mut rules: Vec<NtaRule>) -> Self {
        rules.sort();
        rules.dedup();
        for r in &rules {
            debug_assert_eq!(alphabet.symbol(r.symbol).arity(), r.children.len());
        }
        let mut by_symbol: HashMap<SymbolId, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_symbol.entry(r.symbol).or_default().push(i);
        }
        let mut initial = initial;
        initial.sort();
        initial.dedup();
        Nta { alphabet, num_states, initial, rules, by_symbol }
    }

    /// Accepts every tree over the alphabet with a single state.
    pub fn universal(alphabet: Alphabet) -> Self {
        let rules = (0..alphabet.len() as SymbolId)
            .map(|s| NtaRule { state: 0, symbol: s, children: vec![0; alphabet.symbol(s).arity()] })
            .collect();
        Nta::new(alphabet, 1, vec![0], rules)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> &[u32] {
        &self.initial
    }

    pub fn rules(&self) -> &[NtaRule] {
        &self.rules
    }

    /// States from which `t` has an accepting run, computed bottom-up.
    pub fn run_states(&self, t: &Tree) -> Result<BTreeSet<u32>, AutomatonError> {
        let sym =
            self.alphabet.id(&t.symbol).ok_or_else(|| AutomatonError::AlphabetMismatch(format!("{:?}", t.symbol)))?;
        let kids: Vec<BTreeSet<u32>> = t.children.iter().map(|c| self.run_states(c)).collect::<Result<_, _>>()?;
        let mut out = BTreeSet::new();
        for &i in self.by_symbol.get(&sym).map(Vec::as_slice).unwrap_or(&[]) {
            let r = &self.rules[i];
            if r.children.iter().zip(&kids).all(|(c, set)| set.contains(c)) {
                out.insert(r.state);
            }
        }
        Ok(out)
    }

    pub fn membership(&self, t: &Tree) -> Result<bool, AutomatonError> {
        let root = self.run_states(t)?;
        Ok(self.initial.iter().any(|q| root.contains(q)))
    }

    /// Product automaton, built from the initial pairs downward so only
    /// reachable pairs are materialized. Alphabets are merged by symbol.
    pub fn product(&self, other: &Nta) -> Nta {
        let alphabet = self.alphabet.intersect(&other.alphabet);
        let mut index: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        let mut queue = Vec::new();
        let mut rules = Vec::new();
        let id = |p: (u32, u32), index: &mut BTreeMap<(u32, u32), u32>, queue: &mut Vec<(u32, u32)>| {
            let n = index.len() as u32;
            *index.entry(p).or_insert_with(|| {
                queue.push(p);
                n
            })
        };
        let mut initial = Vec::new();
        for &a in &self.initial {
            for &b in &other.initial {
                initial.push(id((a, b), &mut index, &mut queue));
            }
        }
        let mut by_state_a: HashMap<u32, Vec<&NtaRule>> = HashMap::new();
        for r in &self.rules {
            by_state_a.entry(r.state).or_default().push(r);
        }
        let mut by_state_b: HashMap<(u32, SymbolId), Vec<&NtaRule>> = HashMap::new();
        for r in &other.rules {
            by_state_b.entry((r.state, r.symbol)).or_default().push(r);
        }
        while let Some((a, b)) = queue.pop() {
            let here = index[&(a, b)];
            for ra in by_state_a.get(&a).map(Vec::as_slice).unwrap_or(&[]) {
                let sym = self.alphabet.symbol(ra.symbol);
                let (Some(s), Some(sb)) = (alphabet.id(sym), other.alphabet.id(sym)) else { continue };
                for rb in by_state_b.get(&(b, sb)).map(Vec::as_slice).unwrap_or(&[]) {
                    let children = ra
                        .children
                        .iter()
                        .zip(&rb.children)
                        .map(|(&x, &y)| id((x, y), &mut index, &mut queue))
                        .collect();
                    rules.push(NtaRule { state: here, symbol: s, children });
                }
            }
        }
        Nta::new(alphabet, index.len(), initial, rules)
    }

    /// Smallest accepted tree, with ties broken by the canonical tree order,
    /// or `None` when the language is empty.
    pub fn emptiness_smallest(&self) -> Option<(Tree, usize)> {
        let n = self.num_states;
        let mut best: Vec<Option<usize>> = vec![None; n];
        loop {
            let mut changed = false;
            for r in &self.rules {
                let sum: Option<usize> =
                    r.children.iter().map(|&c| best[c as usize]).try_fold(1usize, |acc, x| x.map(|v| acc + v));
                if let Some(s) = sum {
                    let slot = &mut best[r.state as usize];
                    if slot.is_none_or(|old| s < old) {
                        *slot = Some(s);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        // Canonical representatives, built in order of increasing size: a
        // smallest tree for a state uses smallest trees for its children, and
        // the least such tree uses each child's least representative.
        let mut order: Vec<usize> = (0..n).filter(|&q| best[q].is_some()).collect();
        order.sort_by_key(|&q| best[q]);
        let mut rep: Vec<Option<Tree>> = vec![None; n];
        let mut by_state: HashMap<u32, Vec<&NtaRule>> = HashMap::new();
        for r in &self.rules {
            by_state.entry(r.state).or_default().push(r);
        }
        for q in order {
            let target = best[q].unwrap();
            let mut cand: Option<Tree> = None;
            for r in by_state.get(&(q as u32)).map(Vec::as_slice).unwrap_or(&[]) {
                let ok = r.children.iter().map(|&c| best[c as usize]).try_fold(1usize, |acc, x| x.map(|v| acc + v));
                if ok != Some(target) {
                    continue;
                }
                let kids: Option<Vec<Tree>> = r.children.iter().map(|&c| rep[c as usize].clone()).collect();
                let Some(kids) = kids else { continue };
                let t = Tree::new(self.alphabet.symbol(r.symbol).clone(), kids);
                if cand.as_ref().is_none_or(|c| t < *c) {
                    cand = Some(t);
                }
            }
            rep[q] = cand;
        }
        self.initial.iter().filter_map(|&q| rep[q as usize].clone()).min().map(|t| {
            let s = t.size();
            (t, s)
        })
    }

    /// Drops states that accept no tree, and rules that mention them.
    pub fn trim(&self) -> Nta {
        let mut productive = vec![false; self.num_states];
        loop {
            let mut changed = false;
            for r in &self.rules {
                if !productive[r.state as usize] && r.children.iter().all(|&c| productive[c as usize]) {
                    productive[r.state as usize] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut remap = vec![u32::MAX; self.num_states];
        let mut next = 0u32;
        for q in 0..self.num_states {
            if productive[q] {
                remap[q] = next;
                next += 1;
            }
        }
        let rules = self
            .rules
            .iter()
            .filter(|r| productive[r.state as usize] && r.children.iter().all(|&c| productive[c as usize]))
            .map(|r| NtaRule {
                state: remap[r.state as usize],
                symbol: r.symbol,
                children: r.children.iter().map(|&c| remap[c as usize]).collect(),
            })
            .collect();
        let initial = self.initial.iter().filter(|&&q| productive[q as usize]).map(|&q| remap[q as usize]).collect();
        Nta::new(self.alphabet.clone(), next as usize, initial, rules)
    }
}

impl Alphabet {
    pub fn intersect(&self, other: &Alphabet) -> Alphabet {
        Alphabet::new(self.symbols().iter().filter(|s| other.id(s).is_some()).cloned())
    }
}
