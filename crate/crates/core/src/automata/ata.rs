//! Explicit alternating automata, intersection, and one-way membership.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{game, Alphabet, AlternatingAutomaton, AutomatonError, Pbf, Positions, SymbolId};
use crate::model::{Symbol, Tree};

/// A one-way alternating automaton with an explicit transition table.
/// Missing entries are `False`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ata {
    pub alphabet: Alphabet,
    pub num_states: u32,
    pub initial: Vec<u32>,
    pub delta: BTreeMap<(u32, SymbolId), Pbf<u32>>,
}

impl Ata {
    pub fn new(alphabet: Alphabet, num_states: u32, initial: Vec<u32>) -> Self {
        Ata { alphabet, num_states, initial, delta: BTreeMap::new() }
    }

    pub fn set(&mut self, q: u32, symbol: &Symbol, f: Pbf<u32>) {
        let id = self.alphabet.id(symbol).expect("symbol in alphabet");
        self.delta.insert((q, id), f);
    }

    /// Expands an on-demand automaton over an alphabet into an explicit
    /// table, numbering states in discovery order.
    pub fn explicit<A: AlternatingAutomaton>(a: &A, alphabet: &Alphabet) -> (Ata, Vec<A::State>) {
        let (states, initial, delta) = expand(a, alphabet);
        (Ata { alphabet: alphabet.clone(), num_states: states.len() as u32, initial, delta }, states)
    }
}

impl AlternatingAutomaton for Ata {
    type State = u32;
    fn initial_states(&self) -> Vec<u32> {
        self.initial.clone()
    }
    fn transition(&self, q: &u32, symbol: &Symbol) -> Pbf<u32> {
        self.alphabet.id(symbol).and_then(|s| self.delta.get(&(*q, s)).cloned()).unwrap_or(Pbf::False)
    }
}

/// A two-way alternating automaton with reachability acceptance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoWayAta {
    pub alphabet: Alphabet,
    pub num_states: u32,
    pub initial: Vec<u32>,
    pub finals: BTreeSet<u32>,
    pub delta: BTreeMap<(u32, SymbolId), Pbf<u32>>,
}

impl TwoWayAta {
    pub fn new(alphabet: Alphabet, num_states: u32, initial: Vec<u32>, finals: BTreeSet<u32>) -> Self {
        TwoWayAta { alphabet, num_states, initial, finals, delta: BTreeMap::new() }
    }

    pub fn set(&mut self, q: u32, symbol: &Symbol, f: Pbf<u32>) {
        let id = self.alphabet.id(symbol).expect("symbol in alphabet");
        self.delta.insert((q, id), f);
    }

    /// Views a one-way automaton as a two-way one with no final states.
    pub fn from_one_way(a: &Ata) -> Self {
        TwoWayAta {
            alphabet: a.alphabet.clone(),
            num_states: a.num_states,
            initial: a.initial.clone(),
            finals: BTreeSet::new(),
            delta: a.delta.clone(),
        }
    }

    pub fn explicit<A: AlternatingAutomaton>(a: &A, alphabet: &Alphabet) -> (TwoWayAta, Vec<A::State>) {
        let (states, initial, delta) = expand(a, alphabet);
        let finals = states.iter().enumerate().filter(|(_, q)| a.is_final(q)).map(|(i, _)| i as u32).collect();
        (TwoWayAta { alphabet: alphabet.clone(), num_states: states.len() as u32, initial, finals, delta }, states)
    }
}

impl AlternatingAutomaton for TwoWayAta {
    type State = u32;
    fn initial_states(&self) -> Vec<u32> {
        self.initial.clone()
    }
    fn transition(&self, q: &u32, symbol: &Symbol) -> Pbf<u32> {
        if self.finals.contains(q) {
            return Pbf::True;
        }
        self.alphabet.id(symbol).and_then(|s| self.delta.get(&(*q, s)).cloned()).unwrap_or(Pbf::False)
    }
    fn is_final(&self, q: &u32) -> bool {
        self.finals.contains(q)
    }
    fn is_two_way(&self) -> bool {
        true
    }
}

type Expanded<S> = (Vec<S>, Vec<u32>, BTreeMap<(u32, SymbolId), Pbf<u32>>);

fn expand<A: AlternatingAutomaton>(a: &A, alphabet: &Alphabet) -> Expanded<A::State> {
    let mut states: Vec<A::State> = Vec::new();
    let mut index: HashMap<A::State, u32> = HashMap::new();
    let mut intern = |q: &A::State, states: &mut Vec<A::State>| -> u32 {
        if let Some(&i) = index.get(q) {
            return i;
        }
        let i = states.len() as u32;
        index.insert(q.clone(), i);
        states.push(q.clone());
        i
    };
    let initial: Vec<u32> = a.initial_states().iter().map(|q| intern(q, &mut states)).collect();
    let mut delta = BTreeMap::new();
    let mut next = 0;
    while next < states.len() {
        let q = states[next].clone();
        for (sid, sym) in alphabet.symbols().iter().enumerate() {
            let f = a.transition(&q, sym);
            let g = f.map(&mut |s| intern(s, &mut states));
            if g != Pbf::False {
                delta.insert((next as u32, sid as SymbolId), g);
            }
        }
        next += 1;
    }
    (states, initial, delta)
}

/// State of an [`Intersection`]: the fresh initial state or a component's state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntersectionState<S> {
    Init,
    Comp(usize, S),
}

/// Language intersection through one fresh initial state whose transition
/// conjoins the components' initial transitions.
#[derive(Clone, Debug)]
pub struct Intersection<A> {
    pub components: Vec<A>,
}

impl<A: AlternatingAutomaton> AlternatingAutomaton for Intersection<A> {
    type State = IntersectionState<A::State>;

    fn initial_states(&self) -> Vec<Self::State> {
        vec![IntersectionState::Init]
    }

    fn transition(&self, q: &Self::State, symbol: &Symbol) -> Pbf<Self::State> {
        match q {
            IntersectionState::Init => Pbf::and(self.components.iter().enumerate().map(|(i, c)| {
                Pbf::or(
                    c.initial_states()
                        .iter()
                        .map(|q0| c.transition(q0, symbol).map(&mut |s| IntersectionState::Comp(i, s.clone()))),
                )
            })),
            IntersectionState::Comp(i, s) => {
                self.components[*i].transition(s, symbol).map(&mut |t| IntersectionState::Comp(*i, t.clone()))
            }
        }
    }

    fn is_final(&self, q: &Self::State) -> bool {
        match q {
            IntersectionState::Init => false,
            IntersectionState::Comp(i, s) => self.components[*i].is_final(s),
        }
    }

    fn is_two_way(&self) -> bool {
        self.components.iter().any(|c| c.is_two_way())
    }
}

/// Explicit intersection: states are `0` (fresh) followed by each
/// component's states in turn, so the count is `1 + Σ|Q_i|`.
pub fn ata_intersect(parts: &[Ata]) -> Result<Ata, AutomatonError> {
    let alphabet = parts.first().map(|a| a.alphabet.clone()).unwrap_or_default();
    if let Some(bad) = parts.iter().find(|a| a.alphabet != alphabet) {
        let sym = bad
            .alphabet
            .symbols()
            .iter()
            .chain(alphabet.symbols())
            .find(|s| bad.alphabet.id(s).is_none() || alphabet.id(s).is_none())
            .map(|s| format!("{s:?}"))
            .unwrap_or_default();
        return Err(AutomatonError::AlphabetMismatch(sym));
    }
    let mut out = Ata::new(alphabet.clone(), 1 + parts.iter().map(|a| a.num_states).sum::<u32>(), vec![0]);
    let mut offset = 1;
    let mut init_parts: Vec<Vec<Pbf<u32>>> = vec![Vec::new(); alphabet.len()];
    for a in parts {
        for (&(q, s), f) in &a.delta {
            out.delta.insert((q + offset, s), f.map(&mut |t| t + offset));
        }
        for (s, part) in init_parts.iter_mut().enumerate() {
            let f =
                Pbf::or(a.initial.iter().map(|&q0| {
                    a.delta.get(&(q0, s as SymbolId)).cloned().unwrap_or(Pbf::False).map(&mut |t| t + offset)
                }));
            part.push(f);
        }
        offset += a.num_states;
    }
    for (s, fs) in init_parts.into_iter().enumerate() {
        let f = Pbf::and(fs);
        if f != Pbf::False {
            out.delta.insert((0, s as SymbolId), f);
        }
    }
    Ok(out)
}

/// Whether some initial state accepts `t`. Two-way automata are decided
/// through the acceptance game.
pub fn ata_membership<A: AlternatingAutomaton>(a: &A, t: &Tree) -> bool {
    a.initial_states().iter().any(|q| ata_membership_from(a, q, t))
}

/// Whether `t` is accepted from state `q`.
pub fn ata_membership_from<A: AlternatingAutomaton>(a: &A, q: &A::State, t: &Tree) -> bool {
    if a.is_two_way() {
        return game::twata_membership_from(a, q, t);
    }
    let pos = Positions::new(t);
    let mut memo: HashMap<(A::State, usize), bool> = HashMap::new();
    accepts(a, &pos, q, 0, &mut memo)
}

fn accepts<A: AlternatingAutomaton>(
    a: &A,
    pos: &Positions,
    q: &A::State,
    at: usize,
    memo: &mut HashMap<(A::State, usize), bool>,
) -> bool {
    if let Some(&b) = memo.get(&(q.clone(), at)) {
        return b;
    }
    let f = a.transition(q, &pos.nodes[at].symbol);
    let b = f.eval(&mut |s, d| match pos.step(at, d) {
        Some(c) if d >= 1 => accepts(a, pos, s, c, memo),
        _ => false,
    });
    memo.insert((q.clone(), at), b);
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tree::v;
    use crate::model::AtomArgs;

    fn atom() -> Symbol {
        Symbol::Atom { rel: "E".into(), args: AtomArgs::Inline(vec![v("x"), v("y")]) }
    }

    fn alpha() -> Alphabet {
        Alphabet::new([Symbol::And, Symbol::Not, atom()])
    }

    fn accept_all() -> Ata {
        let mut a = Ata::new(alpha(), 1, vec![0]);
        for s in alpha().symbols().to_vec() {
            a.set(0, &s, Pbf::True);
        }
        a
    }

    /// Accepts trees with no `Not` node: state 0 descends into all children.
    fn no_not() -> Ata {
        let mut a = Ata::new(alpha(), 1, vec![0]);
        a.set(0, &Symbol::And, Pbf::and([Pbf::atom(0, 1), Pbf::atom(0, 2)]));
        a.set(0, &atom(), Pbf::True);
        a
    }

    #[test]
    fn true_everywhere_accepts_all() {
        let t = Tree::not(Tree::and(Tree::leaf(atom()), Tree::leaf(atom())));
        assert!(ata_membership(&accept_all(), &t));
        assert!(!ata_membership(&no_not(), &t));
        assert!(ata_membership(&no_not(), &Tree::and(Tree::leaf(atom()), Tree::leaf(atom()))));
    }

    #[test]
    fn intersection_is_conjunction() {
        let i = ata_intersect(&[accept_all(), no_not()]).unwrap();
        assert_eq!(i.num_states, 3);
        let lazy = Intersection { components: vec![accept_all(), no_not()] };
        let trees = [
            Tree::leaf(atom()),
            Tree::not(Tree::leaf(atom())),
            Tree::and(Tree::leaf(atom()), Tree::not(Tree::leaf(atom()))),
            Tree::and(Tree::leaf(atom()), Tree::leaf(atom())),
        ];
        for t in &trees {
            let want = ata_membership(&no_not(), t);
            assert_eq!(ata_membership(&i, t), want);
            assert_eq!(ata_membership(&lazy, t), want);
        }
        let other = Ata::new(Alphabet::new([Symbol::Or]), 1, vec![0]);
        assert!(matches!(ata_intersect(&[accept_all(), other]), Err(AutomatonError::AlphabetMismatch(_))));
    }
}
