//! Conversions from alternating automata to nondeterministic ones.

use std::collections::{BTreeMap, BTreeSet};

use super::engine::{Budget, Engine};
use super::{Alphabet, AlternatingAutomaton, AutomatonError, Nta, NtaRule, SymbolId};
use crate::model::Logic;
use crate::model::Signature;
use crate::rtg::{NormalProduction, NormalRtg};

/// Subset construction for a one-way alternating automaton. An NTA state is
/// a set of ATA states that must all accept; its rules come from the
/// minimal models of the conjoined transitions. Only sets reachable from the
/// initial states are built, and at most `max_states` of them.
pub fn ata_to_nta<A: AlternatingAutomaton>(
    a: &A,
    alphabet: &Alphabet,
    max_states: usize,
) -> Result<Nta, AutomatonError> {
    fn intern<S: Ord + Clone>(
        s: BTreeSet<S>,
        index: &mut BTreeMap<BTreeSet<S>, u32>,
        states: &mut Vec<BTreeSet<S>>,
    ) -> u32 {
        if let Some(&i) = index.get(&s) {
            return i;
        }
        let i = states.len() as u32;
        index.insert(s.clone(), i);
        states.push(s);
        i
    }
    let mut index: BTreeMap<BTreeSet<A::State>, u32> = BTreeMap::new();
    let mut states: Vec<BTreeSet<A::State>> = Vec::new();
    let initial: Vec<u32> =
        a.initial_states().into_iter().map(|q| intern(BTreeSet::from([q]), &mut index, &mut states)).collect();
    let mut rules = Vec::new();
    let mut done = 0usize;
    while done < states.len() {
        if states.len() > max_states {
            return Err(AutomatonError::StateBudgetExceeded(max_states));
        }
        let set = states[done].clone();
        let here = done as u32;
        done += 1;
        for sid in 0..alphabet.len() as SymbolId {
            let sym = alphabet.symbol(sid);
            let k = sym.arity();
            let f = super::Pbf::and(set.iter().map(|q| a.transition(q, sym)));
            'models: for model in f.minimal_models() {
                let mut kids: Vec<BTreeSet<A::State>> = vec![BTreeSet::new(); k];
                for (q, d) in model {
                    if d < 1 || d as usize > k {
                        continue 'models;
                    }
                    kids[d as usize - 1].insert(q);
                }
                let children = kids.into_iter().map(|s| intern(s, &mut index, &mut states)).collect();
                rules.push(NtaRule { state: here, symbol: sid, children });
            }
        }
    }
    Ok(Nta::new(alphabet.clone(), states.len(), initial, rules).trim())
}

/// Conversion of a two-way (or one-way) alternating automaton through the
/// class construction over the universal grammar: each class of trees with
/// the same behaviour becomes one state.
pub fn twata_to_nta<A: AlternatingAutomaton>(
    a: &A,
    alphabet: &Alphabet,
    budget: Budget,
) -> Result<Nta, AutomatonError> {
    let grammar = NormalRtg {
        logic: Logic::fo(0),
        signature: Signature::default(),
        nonterminals: vec!["S".into()],
        axiom: 0,
        productions: alphabet
            .symbols()
            .iter()
            .map(|s| NormalProduction { lhs: 0, symbol: s.clone(), children: vec![0; s.arity()] })
            .collect(),
    };
    let comps = std::slice::from_ref(a);
    let mut e = Engine::new(&grammar, comps, budget);
    e.record_rules();
    if !e.saturate() {
        return Err(AutomatonError::StateBudgetExceeded(budget.max_classes));
    }
    let (rules, goals) = e.recorded().expect("recording enabled");
    let rules = rules
        .into_iter()
        .map(|(c, p, kids)| NtaRule {
            state: c,
            symbol: alphabet.id(e.production_symbol(p)).expect("symbol in alphabet"),
            children: kids.into_vec(),
        })
        .collect();
    Ok(Nta::new(alphabet.clone(), e.class_count(), goals, rules))
}
