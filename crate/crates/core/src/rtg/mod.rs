//! Regular tree grammars over a logic's ranked alphabet: the textual DSL,
//! normalization to simple rules, bounded enumeration, and compilation to
//! a nondeterministic tree automaton.

mod dsl;
pub mod enumerate;
mod normalize;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automata::nta::{Nta, NtaRule};
use crate::automata::Alphabet;
use crate::model::{Logic, Signature, Symbol};
use crate::syntax::{ParseError, Pattern, SyntaxError};

pub use dsl::{parse_grammar, print_grammar};
pub use enumerate::{count_trees, enumerate, Enumerator};
pub use normalize::normalize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("syntax error at {0}")]
    Syntax(SyntaxError),
    #[error("{line}:{col}: `{symbol}` expects {expected} arguments, found {found}")]
    ArityMismatch { line: usize, col: usize, symbol: String, expected: usize, found: usize },
    #[error("{line}:{col}: unknown symbol `{name}`")]
    UnknownSymbol { line: usize, col: usize, name: String },
    #[error("{line}:{col}: {msg}")]
    Invalid { line: usize, col: usize, msg: String },
}

impl From<ParseError> for GrammarError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Syntax(s) => GrammarError::Syntax(s),
            ParseError::Arity { line, col, symbol, expected, found } => {
                GrammarError::ArityMismatch { line, col, symbol, expected, found }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub lhs: String,
    pub rhs: Pattern,
}

/// A regular tree grammar. Right-hand sides may nest symbols and may be a
/// bare nonterminal (chain rule).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rtg {
    pub logic: Logic,
    pub signature: Signature,
    pub axiom: String,
    pub productions: Vec<Production>,
}

impl Rtg {
    /// Nonterminals in order of first appearance as a left-hand side
    /// (the axiom first).
    pub fn nonterminals(&self) -> Vec<String> {
        let mut out = vec![self.axiom.clone()];
        for p in &self.productions {
            if !out.contains(&p.lhs) {
                out.push(p.lhs.clone());
            }
        }
        out
    }

    /// Every symbol used in some right-hand side.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        fn go(p: &Pattern, out: &mut BTreeSet<Symbol>) {
            if let Pattern::Node(s, kids) = p {
                out.insert(s.clone());
                kids.iter().for_each(|k| go(k, out));
            }
        }
        for p in &self.productions {
            go(&p.rhs, &mut out);
        }
        out
    }
}

/// A simple rule `lhs -> symbol(children…)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalProduction {
    pub lhs: usize,
    pub symbol: Symbol,
    pub children: Vec<usize>,
}

/// A grammar whose productions all have the shape `B -> f(B1,…,Bn)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalRtg {
    pub logic: Logic,
    pub signature: Signature,
    pub nonterminals: Vec<String>,
    pub axiom: usize,
    pub productions: Vec<NormalProduction>,
}

impl NormalRtg {
    pub fn to_rtg(&self) -> Rtg {
        Rtg {
            logic: self.logic.clone(),
            signature: self.signature.clone(),
            axiom: self.nonterminals[self.axiom].clone(),
            productions: self
                .productions
                .iter()
                .map(|p| Production {
                    lhs: self.nonterminals[p.lhs].clone(),
                    rhs: Pattern::Node(
                        p.symbol.clone(),
                        p.children.iter().map(|&c| Pattern::Hole(self.nonterminals[c].clone())).collect(),
                    ),
                })
                .collect(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.productions.iter().map(|p| p.symbol.clone()))
    }

    /// Nonterminals that derive at least one tree.
    pub fn productive(&self) -> Vec<bool> {
        let mut prod = vec![false; self.nonterminals.len()];
        loop {
            let mut changed = false;
            for p in &self.productions {
                if !prod[p.lhs] && p.children.iter().all(|&c| prod[c]) {
                    prod[p.lhs] = true;
                    changed = true;
                }
            }
            if !changed {
                return prod;
            }
        }
    }

    /// Drops unproductive and unreachable nonterminals. The axiom is kept
    /// even when it derives nothing.
    pub fn reduced(&self) -> NormalRtg {
        let prod = self.productive();
        let useful: Vec<&NormalProduction> =
            self.productions.iter().filter(|p| prod[p.lhs] && p.children.iter().all(|&c| prod[c])).collect();
        let mut reach = vec![false; self.nonterminals.len()];
        reach[self.axiom] = true;
        let mut stack = vec![self.axiom];
        while let Some(n) = stack.pop() {
            for p in useful.iter().filter(|p| p.lhs == n) {
                for &c in &p.children {
                    if !reach[c] {
                        reach[c] = true;
                        stack.push(c);
                    }
                }
            }
        }
        let mut remap = vec![usize::MAX; self.nonterminals.len()];
        let mut names = Vec::new();
        for (i, n) in self.nonterminals.iter().enumerate() {
            if reach[i] {
                remap[i] = names.len();
                names.push(n.clone());
            }
        }
        NormalRtg {
            logic: self.logic.clone(),
            signature: self.signature.clone(),
            axiom: remap[self.axiom],
            nonterminals: names,
            productions: useful
                .into_iter()
                .filter(|p| reach[p.lhs])
                .map(|p| NormalProduction {
                    lhs: remap[p.lhs],
                    symbol: p.symbol.clone(),
                    children: p.children.iter().map(|&c| remap[c]).collect(),
                })
                .collect(),
        }
    }
}

/// The grammar automaton: states are nonterminals, the axiom is initial,
/// and each production becomes one rule.
pub fn grammar_to_nta(g: &NormalRtg) -> Nta {
    let alphabet = g.alphabet();
    let rules = g
        .productions
        .iter()
        .map(|p| NtaRule {
            state: p.lhs as u32,
            symbol: alphabet.id(&p.symbol).expect("symbol in alphabet"),
            children: p.children.iter().map(|&c| c as u32).collect(),
        })
        .collect();
    Nta::new(alphabet, g.nonterminals.len(), vec![g.axiom as u32], rules)
}
