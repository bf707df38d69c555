//! Bounded enumeration of a grammar's language in canonical order.
//!
//! Works on the raw grammar (nested right-hand sides and chain rules
//! included) so it can serve as an oracle for [`super::normalize`].

use std::collections::{BTreeMap, BTreeSet};

use super::{normalize, Rtg};
use crate::model::Tree;
use crate::syntax::Pattern;

/// Level-by-level generator: `level(s)` holds, per nonterminal, every
/// derivable tree with exactly `s` nodes, sorted and deduplicated.
pub struct Enumerator<'g> {
    grammar: &'g Rtg,
    index: BTreeMap<String, usize>,
    axiom: usize,
    // levels[s][nt]
    levels: Vec<Vec<BTreeSet<Tree>>>,
}

impl<'g> Enumerator<'g> {
    pub fn new(grammar: &'g Rtg) -> Self {
        let nts = grammar.nonterminals();
        let index: BTreeMap<String, usize> = nts.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let axiom = index[&grammar.axiom];
        Enumerator { grammar, levels: vec![vec![BTreeSet::new(); nts.len()]], index, axiom }
    }

    /// Trees of exactly `size` nodes derivable from the axiom, in order.
    pub fn level(&mut self, size: usize) -> &BTreeSet<Tree> {
        self.ensure(size);
        &self.levels[size][self.axiom]
    }

    /// Trees of exactly `size` nodes derivable from the named nonterminal.
    pub fn level_of(&mut self, nonterminal: &str, size: usize) -> Option<&BTreeSet<Tree>> {
        let i = *self.index.get(nonterminal)?;
        self.ensure(size);
        Some(&self.levels[size][i])
    }

    fn ensure(&mut self, size: usize) {
        while self.levels.len() <= size {
            let s = self.levels.len();
            let mut level = vec![BTreeSet::new(); self.index.len()];
            // Chain rules add trees of the same size, so iterate to a fixpoint.
            loop {
                let mut changed = false;
                for p in &self.grammar.productions {
                    let lhs = self.index[&p.lhs];
                    let made: Vec<Tree> = match &p.rhs {
                        Pattern::Hole(b) => level[self.index[b]].iter().cloned().collect(),
                        rhs => self.instantiate(rhs, s),
                    };
                    for t in made {
                        changed |= level[lhs].insert(t);
                    }
                }
                if !changed {
                    break;
                }
            }
            self.levels.push(level);
        }
    }

    /// All trees of `size` nodes matching a pattern with at least one symbol.
    fn instantiate(&self, p: &Pattern, size: usize) -> Vec<Tree> {
        let holes = p.holes();
        let fixed = p.symbol_count();
        if size < fixed + holes.len() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut sizes = vec![0usize; holes.len()];
        self.split(p, &holes, 0, size - fixed, &mut sizes, &mut out);
        out
    }

    fn split(&self, p: &Pattern, holes: &[&str], i: usize, left: usize, sizes: &mut Vec<usize>, out: &mut Vec<Tree>) {
        if i == holes.len() {
            if left == 0 {
                let pools: Vec<&BTreeSet<Tree>> =
                    holes.iter().zip(sizes.iter()).map(|(h, &s)| &self.levels[s][self.index[*h]]).collect();
                if pools.iter().all(|p| !p.is_empty()) {
                    let mut pick = Vec::with_capacity(pools.len());
                    fill(p, &pools, &mut pick, out);
                }
            }
            return;
        }
        let rest = holes.len() - i - 1;
        for s in 1..=left.saturating_sub(rest) {
            if s >= self.levels.len() {
                break;
            }
            sizes[i] = s;
            self.split(p, holes, i + 1, left - s, sizes, out);
        }
    }
}

fn fill(p: &Pattern, pools: &[&BTreeSet<Tree>], pick: &mut Vec<Tree>, out: &mut Vec<Tree>) {
    if pick.len() == pools.len() {
        let mut it = pick.iter();
        out.push(substitute(p, &mut it));
        return;
    }
    for t in pools[pick.len()] {
        pick.push(t.clone());
        fill(p, pools, pick, out);
        pick.pop();
    }
}

fn substitute<'a>(p: &Pattern, holes: &mut impl Iterator<Item = &'a Tree>) -> Tree {
    match p {
        Pattern::Hole(_) => holes.next().expect("hole count").clone(),
        Pattern::Node(s, kids) => Tree::new(s.clone(), kids.iter().map(|k| substitute(k, holes)).collect()),
    }
}

/// Every tree of the language with at most `max_size` nodes, each once,
/// ordered by size and then by the canonical tree order.
pub fn enumerate(g: &Rtg, max_size: usize) -> Vec<Tree> {
    let mut e = Enumerator::new(g);
    let mut out = Vec::new();
    for s in 1..=max_size {
        out.extend(e.level(s).iter().cloned());
    }
    out
}

/// Number of derivations of size at most `max_size`, by dynamic programming
/// over the normalized rules. Equals the tree count for unambiguous grammars.
pub fn count_trees(g: &Rtg, max_size: usize) -> u128 {
    let n = normalize(g);
    let k = n.nonterminals.len();
    // count[s][nt]
    let mut count = vec![vec![0u128; k]; max_size + 1];
    for s in 1..=max_size {
        for p in &n.productions {
            let c = ways(&count, &p.children, s - 1);
            count[s][p.lhs] += c;
        }
    }
    (1..=max_size).map(|s| count[s][n.axiom]).sum()
}

fn ways(count: &[Vec<u128>], children: &[usize], total: usize) -> u128 {
    match children.split_first() {
        None => u128::from(total == 0),
        Some((&c, rest)) => {
            (1..=total).filter(|&s| s < count.len()).map(|s| count[s][c] * ways(count, rest, total - s)).sum()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tree::v;
    use crate::rtg::parse_grammar;

    fn fig4() -> Rtg {
        parse_grammar(crate::rtg::dsl::tests::FIG4).unwrap()
    }

    #[test]
    fn size_one_is_the_atoms() {
        let g = fig4();
        let got = enumerate(&g, 1);
        let want = vec![
            Tree::atom("E", &[v("x"), v("x")]),
            Tree::atom("E", &[v("x"), v("y")]),
            Tree::atom("E", &[v("y"), v("x")]),
            Tree::atom("E", &[v("y"), v("y")]),
        ];
        assert_eq!(got, want);
        assert!(enumerate(&g, 0).is_empty());
    }

    #[test]
    fn order_and_uniqueness() {
        let trees = enumerate(&fig4(), 4);
        assert!(trees.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn counts_agree_with_dynamic_programming() {
        let g = fig4();
        // Hand count: size 1 has 4 atoms; size 2 has 5 unary symbols over 4
        // atoms; size 3 has 5 unary over 20 trees plus 2 binary over 4 * 4.
        assert_eq!(count_trees(&g, 3), 4 + 20 + (100 + 32));
        for m in 1..=5 {
            assert_eq!(count_trees(&g, m), enumerate(&g, m).len() as u128);
        }
    }
}
