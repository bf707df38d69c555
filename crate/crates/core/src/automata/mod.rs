//! Tree automata over formula trees: positive Boolean formulas, one-way
//! nondeterministic and alternating automata, two-way alternating automata
//! with reachability acceptance, conversions, products, membership, and
//! emptiness with smallest-witness extraction.

pub mod ata;
pub mod convert;
pub mod dump;
pub mod engine;
pub mod game;
pub mod mono;
pub mod nta;
pub mod pbf;

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::model::{Symbol, Tree};

pub use ata::{ata_intersect, ata_membership, ata_membership_from, Ata, Intersection, IntersectionState, TwoWayAta};
pub use convert::{ata_to_nta, twata_to_nta};
pub use engine::{Budget, Engine, EngineStats, SearchOutcome};
pub use game::{twata_membership, twata_membership_from};
pub use nta::{Nta, NtaRule};
pub use pbf::{Dir, Pbf, STAY, UP};

pub type SymbolId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("symbol `{0}` is not in the automaton's alphabet")]
    AlphabetMismatch(String),
    #[error("state budget of {0} exceeded")]
    StateBudgetExceeded(usize),
}

/// A finite ranked alphabet. Ids follow the canonical symbol order, so
/// comparing ids compares symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
    index: BTreeMap<Symbol, SymbolId>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> Self {
        let mut symbols: Vec<Symbol> = symbols.into_iter().collect();
        symbols.sort();
        symbols.dedup();
        let index = symbols.iter().cloned().enumerate().map(|(i, s)| (s, i as SymbolId)).collect();
        Alphabet { symbols, index }
    }

    pub fn id(&self, s: &Symbol) -> Option<SymbolId> {
        self.index.get(s).copied()
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id as usize]
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(Symbol::arity).max().unwrap_or(0)
    }

    pub fn union(&self, other: &Alphabet) -> Alphabet {
        Alphabet::new(self.symbols.iter().chain(other.symbols.iter()).cloned())
    }

    /// Checks every node of `t` against the alphabet.
    pub fn check_tree(&self, t: &Tree) -> Result<(), AutomatonError> {
        for n in t.nodes() {
            if self.id(&n.symbol).is_none() {
                return Err(AutomatonError::AlphabetMismatch(format!("{:?}", n.symbol)));
            }
        }
        Ok(())
    }
}

/// An alternating automaton, one-way or two-way, given by its transition
/// function. States may be generated on demand.
pub trait AlternatingAutomaton {
    type State: Clone + Eq + Hash + Ord + Debug;

    fn initial_states(&self) -> Vec<Self::State>;

    /// The transition formula on reading `symbol` in state `q`. Directions
    /// range over `1..=arity`; two-way automata may also use `-1` and `0`.
    fn transition(&self, q: &Self::State, symbol: &Symbol) -> Pbf<Self::State>;

    /// Reaching a final state wins a play of the acceptance game.
    fn is_final(&self, _q: &Self::State) -> bool {
        false
    }

    fn is_two_way(&self) -> bool {
        false
    }
}

impl<A: AlternatingAutomaton + ?Sized> AlternatingAutomaton for &A {
    type State = A::State;
    fn initial_states(&self) -> Vec<Self::State> {
        (**self).initial_states()
    }
    fn transition(&self, q: &Self::State, symbol: &Symbol) -> Pbf<Self::State> {
        (**self).transition(q, symbol)
    }
    fn is_final(&self, q: &Self::State) -> bool {
        (**self).is_final(q)
    }
    fn is_two_way(&self) -> bool {
        (**self).is_two_way()
    }
}

/// Pre-order node table of a tree with parent links.
pub(crate) struct Positions<'t> {
    pub nodes: Vec<&'t Tree>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

impl<'t> Positions<'t> {
    pub fn new(t: &'t Tree) -> Self {
        let mut p = Positions { nodes: Vec::new(), parent: Vec::new(), children: Vec::new() };
        p.add(t, None);
        p
    }

    fn add(&mut self, t: &'t Tree, parent: Option<usize>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(t);
        self.parent.push(parent);
        self.children.push(Vec::new());
        for c in &t.children {
            let cid = self.add(c, Some(id));
            self.children[id].push(cid);
        }
        id
    }

    /// The node reached from `at` in direction `d`, if any.
    pub fn step(&self, at: usize, d: Dir) -> Option<usize> {
        match d {
            0 => Some(at),
            d if d < 0 => self.parent[at],
            d => self.children[at].get(d as usize - 1).copied(),
        }
    }
}
