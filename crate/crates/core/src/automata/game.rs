//! Membership for two-way automata as a finite reachability game.
//!
//! Positions are `(state, node)`. The protagonist picks a satisfying set of
//! the transition formula, the antagonist picks one of its atoms. The
//! protagonist wins by reaching a final state or a `True` transition; plays
//! that never get there are lost. The winning region is the least fixpoint
//! of the position formulas, computed by a worklist attractor.

use std::collections::HashMap;

use super::{AlternatingAutomaton, Pbf, Positions};
use crate::model::Tree;

pub fn twata_membership<A: AlternatingAutomaton>(a: &A, t: &Tree) -> bool {
    a.initial_states().iter().any(|q| twata_membership_from(a, q, t))
}

/// Whether the protagonist wins from `(q, root)`.
pub fn twata_membership_from<A: AlternatingAutomaton>(a: &A, q: &A::State, t: &Tree) -> bool {
    let pos = Positions::new(t);
    solve(a, &pos, q, 0)
}

/// Whether the protagonist wins from `(q, node)`, nodes numbered in pre-order.
pub fn twata_membership_at<A: AlternatingAutomaton>(a: &A, q: &A::State, t: &Tree, node: usize) -> bool {
    let pos = Positions::new(t);
    node < pos.nodes.len() && solve(a, &pos, q, node)
}

fn solve<A: AlternatingAutomaton>(a: &A, pos: &Positions, q0: &A::State, n0: usize) -> bool {
    let mut index: HashMap<(A::State, usize), usize> = HashMap::new();
    let mut formulas: Vec<Pbf<usize>> = Vec::new();
    let mut todo: Vec<(A::State, usize)> = vec![(q0.clone(), n0)];
    index.insert((q0.clone(), n0), 0);
    formulas.push(Pbf::False);
    while let Some((q, n)) = todo.pop() {
        let id = index[&(q.clone(), n)];
        let f = if a.is_final(&q) { Pbf::True } else { a.transition(&q, &pos.nodes[n].symbol) };
        let g = f.substitute(&mut |s, d| match pos.step(n, d) {
            None => Pbf::False,
            Some(m) => {
                let key = (s.clone(), m);
                let next = index.len();
                let j = *index.entry(key.clone()).or_insert_with(|| {
                    todo.push(key);
                    next
                });
                if j == formulas.len() {
                    formulas.push(Pbf::False);
                }
                Pbf::Atom(j, 0)
            }
        });
        formulas[id] = g;
    }
    let n = formulas.len();
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, f) in formulas.iter().enumerate() {
        f.visit_atoms(&mut |&j, _| dependents[j].push(i));
    }
    let mut win = vec![false; n];
    let mut queue: Vec<usize> = (0..n).collect();
    let mut queued = vec![true; n];
    while let Some(i) = queue.pop() {
        queued[i] = false;
        if win[i] {
            continue;
        }
        if formulas[i].eval(&mut |&j, _| win[j]) {
            win[i] = true;
            for &d in &dependents[i] {
                if !win[d] && !queued[d] {
                    queued[d] = true;
                    queue.push(d);
                }
            }
        }
    }
    win[0]
}
