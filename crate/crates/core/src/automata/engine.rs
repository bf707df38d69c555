//! The fused conversion, product, and emptiness procedure.
//!
//! Trees derivable from a grammar nonterminal are grouped into classes by
//! their observable behaviour in every component automaton: for each state a
//! parent can send into the subtree, which combinations of states the
//! subtree sends back up to the parent make it accept. One-way components
//! need only the set of accepting states; two-way components keep a
//! monotone function over the upward exits. Classes are discovered in order
//! of their smallest tree, layer by layer, so the first goal class found
//! yields a smallest accepted tree. When no new class can appear any more
//! the language is empty.
//!
//! All transitions are positive, so a class whose summary is pointwise
//! weaker than that of an existing class of the same nonterminal can be
//! dropped: any tree using it stays accepted with the stronger class in its
//! place, at no greater size. Rule recording keeps every class.

use std::rc::Rc;

use rustc_hash::{FxHashMap, FxHashSet};

use super::mono::Mono;
use super::{Alphabet, AlternatingAutomaton, Pbf, SymbolId};
use crate::model::{Symbol, Tree};
use crate::rtg::NormalRtg;

/// Resource limits. Exceeding either yields [`SearchOutcome::BudgetExceeded`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of materialized classes (product states).
    pub max_classes: usize,
    /// Maximum number of minterms in one up-exit function.
    pub max_terms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_classes: 5_000_000, max_terms: 4096 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EngineStats {
    /// Classes materialized.
    pub classes: usize,
    /// Automaton states touched by the demand analysis, over all components.
    pub states: usize,
    /// Child-class combinations evaluated.
    pub combinations: u64,
    /// Size layers completed.
    pub layers: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { tree: Tree, size: usize },
    Empty,
    BudgetExceeded,
}

type ClassId = u32;

/// Dominance checks in one layer are skipped for a nonterminal when they
/// would take more pairwise comparisons than this. Skipping only costs
/// pruning, never correctness.
const DOMINANCE_PAIRS: usize = 20_000_000;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Part {
    Bits(Box<[u64]>),
    Funs(Box<[(u32, Mono)]>),
}

type Summary = Box<[Part]>;

struct Class {
    nt: u32,
    rank: u32,
    production: u32,
    children: Box<[ClassId]>,
    summary: Rc<Summary>,
}

/// Compiled transition of a one-way component at one production.
#[derive(Clone, Debug)]
enum Gate {
    Const(bool),
    Atom { child: u8, bit: u32 },
    And(Box<[Gate]>),
    Or(Box<[Gate]>),
}

impl Gate {
    fn eval(&self, kids: &[&[u64]]) -> bool {
        match self {
            Gate::Const(b) => *b,
            Gate::Atom { child, bit } => {
                let w = kids[*child as usize];
                (w[(*bit >> 6) as usize] >> (*bit & 63)) & 1 == 1
            }
            Gate::And(gs) => gs.iter().all(|g| g.eval(kids)),
            Gate::Or(gs) => gs.iter().any(|g| g.eval(kids)),
        }
    }
}

struct StateTable<S> {
    states: Vec<S>,
    index: FxHashMap<S, u32>,
}

impl<S: Clone + Eq + std::hash::Hash> StateTable<S> {
    fn new() -> Self {
        StateTable { states: Vec::new(), index: FxHashMap::default() }
    }
    fn intern(&mut self, s: &S) -> u32 {
        if let Some(&i) = self.index.get(s) {
            return i;
        }
        let i = self.states.len() as u32;
        self.states.push(s.clone());
        self.index.insert(s.clone(), i);
        i
    }
}

/// Per-component data.
struct Comp<A: AlternatingAutomaton> {
    table: StateTable<A::State>,
    general: bool,
    initial: Vec<u32>,
    /// δ(q, symbol) over interned states, cached.
    delta: FxHashMap<(SymbolId, u32), Rc<Pbf<u32>>>,
    /// Ext(N), sorted.
    ext: Vec<Vec<u32>>,
    /// Position of each state in Ext(N).
    ext_pos: Vec<FxHashMap<u32, u32>>,
    /// One-way only: gates per production, indexed like Ext(lhs).
    gates: Vec<Vec<Gate>>,
}

/// A class key: nonterminal and summary.
type Key = (u32, Rc<Summary>);
/// A recorded rule: parent class, production, child classes.
type Rule = (ClassId, u32, Box<[ClassId]>);
/// Candidates of one layer by key: canonical tree key, production, children.
type Candidate = (Vec<u32>, u32, Box<[ClassId]>);
type Found = FxHashMap<Key, Candidate>;

/// The search over one grammar and a list of component automata whose
/// languages are intersected.
pub struct Engine<'a, A: AlternatingAutomaton> {
    grammar: &'a NormalRtg,
    alphabet: Alphabet,
    automata: &'a [A],
    comps: Vec<Comp<A>>,
    prod_symbol: Vec<SymbolId>,
    budget: Budget,
    classes: Vec<Class>,
    lookup: FxHashMap<Key, ClassId>,
    by_nt_size: Vec<Vec<Vec<ClassId>>>,
    stats: EngineStats,
    record: Option<Vec<Rule>>,
    pending: Vec<(Key, u32, Box<[ClassId]>)>,
    over_budget: bool,
    prune: bool,
    /// Summaries found dominated, so they are not checked again.
    dominated: FxHashSet<Key>,
    by_nt: Vec<Vec<ClassId>>,
}

impl<'a, A: AlternatingAutomaton> Engine<'a, A> {
    pub fn new(grammar: &'a NormalRtg, automata: &'a [A], budget: Budget) -> Self {
        let alphabet = grammar.alphabet();
        let prod_symbol = grammar.productions.iter().map(|p| alphabet.id(&p.symbol).unwrap()).collect();
        let mut e = Engine {
            grammar,
            alphabet,
            automata,
            comps: Vec::new(),
            prod_symbol,
            budget,
            classes: Vec::new(),
            lookup: FxHashMap::default(),
            by_nt_size: vec![vec![Vec::new()]; grammar.nonterminals.len()],
            stats: EngineStats::default(),
            record: None,
            pending: Vec::new(),
            over_budget: false,
            prune: true,
            dominated: FxHashSet::default(),
            by_nt: vec![Vec::new(); grammar.nonterminals.len()],
        };
        for a in automata {
            let c = e.analyse(a);
            e.comps.push(c);
        }
        e.stats.states = e.comps.iter().map(|c| c.table.states.len()).sum();
        e
    }

    /// Keeps every evaluated combination as a rule, for NTA extraction.
    pub fn record_rules(&mut self) {
        self.record = Some(Vec::new());
        self.prune = false;
    }

    pub fn stats(&self) -> &EngineStats {
        &self.stats
    }

    fn symbol(&self, p: usize) -> &Symbol {
        &self.grammar.productions[p].symbol
    }

    /// Demand analysis: which states can be asked of each nonterminal, and
    /// compiled gates for one-way components.
    fn analyse(&self, a: &A) -> Comp<A> {
        let g = self.grammar;
        let nts = g.nonterminals.len();
        let mut c = Comp {
            table: StateTable::new(),
            general: a.is_two_way(),
            initial: Vec::new(),
            delta: FxHashMap::default(),
            ext: vec![Vec::new(); nts],
            ext_pos: vec![FxHashMap::default(); nts],
            gates: Vec::new(),
        };
        c.initial = a.initial_states().iter().map(|q| c.table.intern(q)).collect();
        let mut ext: Vec<FxHashSet<u32>> = vec![FxHashSet::default(); nts];
        let mut int: Vec<FxHashSet<u32>> = vec![FxHashSet::default(); nts];
        let mut parents: Vec<Vec<usize>> = vec![Vec::new(); nts];
        for p in &g.productions {
            for &ch in &p.children {
                if !parents[ch].contains(&p.lhs) {
                    parents[ch].push(p.lhs);
                }
            }
        }
        let mut work: Vec<(usize, u32)> = Vec::new();
        for &q in &c.initial {
            ext[g.axiom].insert(q);
            if int[g.axiom].insert(q) {
                work.push((g.axiom, q));
            }
        }
        let mut by_lhs: Vec<Vec<usize>> = vec![Vec::new(); nts];
        for (i, p) in g.productions.iter().enumerate() {
            by_lhs[p.lhs].push(i);
        }
        while let Some((n, q)) = work.pop() {
            for &pi in &by_lhs[n] {
                let sid = self.prod_symbol[pi];
                let f = Self::delta_of(a, &mut c, sid, q, self.alphabet.symbol(sid));
                let p = &g.productions[pi];
                let mut atoms = Vec::new();
                f.visit_atoms(&mut |&s, d| atoms.push((s, d)));
                for (s, d) in atoms {
                    if d == 0 {
                        if int[n].insert(s) {
                            work.push((n, s));
                        }
                    } else if d > 0 {
                        if let Some(&b) = p.children.get(d as usize - 1) {
                            ext[b].insert(s);
                            if int[b].insert(s) {
                                work.push((b, s));
                            }
                        }
                    } else {
                        c.general = true;
                        for &m in &parents[n] {
                            if int[m].insert(s) {
                                work.push((m, s));
                            }
                        }
                    }
                }
            }
        }
        for (n, states) in ext.iter().enumerate().take(nts) {
            let mut v: Vec<u32> = states.iter().copied().collect();
            v.sort_unstable();
            c.ext_pos[n] = v.iter().enumerate().map(|(i, &q)| (q, i as u32)).collect();
            c.ext[n] = v;
        }
        if !c.general {
            for (pi, p) in g.productions.iter().enumerate() {
                let sid = self.prod_symbol[pi];
                let gates = c.ext[p.lhs]
                    .clone()
                    .into_iter()
                    .map(|q| {
                        let f = Self::delta_of(a, &mut c, sid, q, self.alphabet.symbol(sid));
                        compile(&f, &p.children, &c.ext_pos)
                    })
                    .collect();
                c.gates.push(gates);
            }
        }
        c
    }

    fn delta_of(a: &A, c: &mut Comp<A>, sid: SymbolId, q: u32, sym: &Symbol) -> Rc<Pbf<u32>> {
        if let Some(f) = c.delta.get(&(sid, q)) {
            return f.clone();
        }
        let state = c.table.states[q as usize].clone();
        let f = if a.is_final(&state) { Pbf::True } else { a.transition(&state, sym) };
        let table = &mut c.table;
        let g = Rc::new(f.map(&mut |s| table.intern(s)));
        c.delta.insert((sid, q), g.clone());
        g
    }

    /// Runs the layered search to the first goal layer, or to saturation.
    pub fn run(&mut self) -> SearchOutcome {
        let g = self.grammar;
        let kmax = g.productions.iter().map(|p| p.children.len()).max().unwrap_or(0);
        let mut last_new = 0usize;
        let mut size = 0usize;
        loop {
            size += 1;
            if size > kmax * last_new + 1 && size > 1 {
                return SearchOutcome::Empty;
            }
            let new = self.layer(size);
            if self.over_budget {
                return SearchOutcome::BudgetExceeded;
            }
            self.stats.layers = size;
            if !new.is_empty() {
                last_new = size;
            }
            let goal =
                new.iter().copied().find(|&c| self.classes[c as usize].nt as usize == g.axiom && self.is_goal(c));
            if let Some(c) = goal {
                if self.record.is_none() {
                    let tree = self.tree(c);
                    return SearchOutcome::Found { size: tree.size(), tree };
                }
            }
            if kmax == 0 && size >= 1 {
                return self.finish_without_goal();
            }
        }
    }

    fn finish_without_goal(&self) -> SearchOutcome {
        let goal = self
            .classes
            .iter()
            .enumerate()
            .find(|(i, c)| c.nt as usize == self.grammar.axiom && self.is_goal(*i as ClassId));
        match goal {
            Some((i, _)) if self.record.is_none() => {
                let tree = self.tree(i as ClassId);
                SearchOutcome::Found { size: tree.size(), tree }
            }
            _ => SearchOutcome::Empty,
        }
    }

    /// Runs to saturation regardless of goals (for automaton extraction).
    pub fn saturate(&mut self) -> bool {
        let kmax = self.grammar.productions.iter().map(|p| p.children.len()).max().unwrap_or(0);
        let mut last_new = 0usize;
        let mut size = 0usize;
        loop {
            size += 1;
            if size > kmax * last_new + 1 && size > 1 {
                return true;
            }
            let new = self.layer(size);
            if self.over_budget {
                return false;
            }
            if !new.is_empty() {
                last_new = size;
            }
        }
    }

    fn is_goal(&self, c: ClassId) -> bool {
        let cl = &self.classes[c as usize];
        self.comps.iter().zip(cl.summary.iter()).all(|(comp, part)| {
            comp.initial.iter().any(|q| match part {
                Part::Bits(bits) => match comp.ext_pos[cl.nt as usize].get(q) {
                    Some(&i) => (bits[(i >> 6) as usize] >> (i & 63)) & 1 == 1,
                    None => false,
                },
                Part::Funs(funs) => match funs.binary_search_by_key(q, |(s, _)| *s) {
                    Ok(i) => funs[i].1.eval(&mut |_| false),
                    Err(_) => false,
                },
            })
        })
    }

    /// Rebuilds the least tree of a class.
    pub fn tree_of(&self, c: u32) -> Tree {
        self.tree(c)
    }

    fn tree(&self, c: ClassId) -> Tree {
        let cl = &self.classes[c as usize];
        Tree::new(self.symbol(cl.production as usize).clone(), cl.children.iter().map(|&k| self.tree(k)).collect())
    }

    /// Discovers every class whose least tree has `size` nodes. Returns the
    /// new class ids in canonical order.
    fn layer(&mut self, size: usize) -> Vec<ClassId> {
        let g = self.grammar;
        for row in &mut self.by_nt_size {
            row.push(Vec::new());
        }
        // New classes of this layer: (nt, summary) -> (key, production, children)
        let mut found: Found = FxHashMap::default();
        let mut order: Vec<Key> = Vec::new();
        for pi in 0..g.productions.len() {
            let p = &g.productions[pi];
            let k = p.children.len();
            if k == 0 {
                if size == 1 {
                    self.combine(pi, &[], &mut found, &mut order);
                }
                continue;
            }
            if size < k + 1 {
                continue;
            }
            let mut sizes = vec![0usize; k];
            self.compositions(pi, 0, size - 1, &mut sizes, &mut found, &mut order);
            if self.over_budget {
                return Vec::new();
            }
        }
        // Canonical order of the new classes, then ranks: equal keys mean
        // equal trees and share a rank.
        let mut fresh: Vec<(Key, Candidate)> = order
            .into_iter()
            .map(|k| {
                let v = found.remove(&k).unwrap();
                (k, v)
            })
            .collect();
        fresh.sort_by(|a, b| (a.1).0.cmp(&(b.1).0).then(a.0 .0.cmp(&b.0 .0)));
        if self.prune {
            let mut per_nt: FxHashMap<u32, usize> = FxHashMap::default();
            for ((nt, _), _) in &fresh {
                *per_nt.entry(*nt).or_default() += 1;
            }
            let checked = |nt: u32| {
                let f = per_nt[&nt];
                f * (f + self.by_nt[nt as usize].len()) <= DOMINANCE_PAIRS
            };
            let mut kept = Vec::with_capacity(fresh.len());
            for (i, (k, v)) in fresh.iter().enumerate() {
                let (nt, sum) = k;
                let beaten = checked(*nt)
                    && (self.by_nt[*nt as usize].iter().any(|&c| weaker(sum, &self.classes[c as usize].summary))
                        || fresh.iter().enumerate().any(|(j, ((nt2, s2), _))| j != i && nt2 == nt && weaker(sum, s2)));
                if beaten {
                    self.dominated.insert(k.clone());
                } else {
                    kept.push((k.clone(), v.clone()));
                }
            }
            fresh = kept;
        }
        let mut next_rank = self.classes.last().map_or(0, |c| c.rank + 1);
        let mut prev_key: Option<Vec<u32>> = None;
        let mut out = Vec::with_capacity(fresh.len());
        for ((nt, summary), (key, prod, children)) in fresh {
            if prev_key.as_ref().is_some_and(|k| *k != key) {
                next_rank += 1;
            }
            let id = self.classes.len() as ClassId;
            self.lookup.insert((nt, summary.clone()), id);
            self.by_nt_size[nt as usize][size].push(id);
            self.by_nt[nt as usize].push(id);
            self.classes.push(Class { nt, rank: next_rank, production: prod, children, summary });
            prev_key = Some(key);
            out.push(id);
        }
        if let Some(r) = self.record.as_mut() {
            for (key, pi, kids) in self.pending.drain(..) {
                r.push((self.lookup[&key], pi, kids));
            }
        }
        self.stats.classes = self.classes.len();
        if self.classes.len() > self.budget.max_classes {
            self.over_budget = true;
        }
        out
    }

    fn compositions(
        &mut self,
        pi: usize,
        i: usize,
        left: usize,
        sizes: &mut Vec<usize>,
        found: &mut Found,
        order: &mut Vec<Key>,
    ) {
        let k = sizes.len();
        let child = self.grammar.productions[pi].children[i];
        if i + 1 == k {
            if left >= self.by_nt_size[child].len() || self.by_nt_size[child][left].is_empty() {
                return;
            }
            sizes[i] = left;
            self.product(pi, sizes, found, order);
            return;
        }
        for s in 1..=left - (k - i - 1) {
            if s >= self.by_nt_size[child].len() {
                break;
            }
            if self.by_nt_size[child][s].is_empty() {
                continue;
            }
            sizes[i] = s;
            self.compositions(pi, i + 1, left - s, sizes, found, order);
            if self.over_budget {
                return;
            }
        }
    }

    fn product(&mut self, pi: usize, sizes: &[usize], found: &mut Found, order: &mut Vec<Key>) {
        let children = &self.grammar.productions[pi].children;
        let lists: Vec<Vec<ClassId>> =
            children.iter().zip(sizes).map(|(&c, &s)| self.by_nt_size[c][s].clone()).collect();
        let mut idx = vec![0usize; lists.len()];
        let mut pick: Vec<ClassId> = lists.iter().map(|l| l[0]).collect();
        loop {
            self.combine(pi, &pick, found, order);
            if self.over_budget {
                return;
            }
            // Odometer, last position fastest.
            let mut j = lists.len();
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < lists[j].len() {
                    pick[j] = lists[j][idx[j]];
                    break;
                }
                idx[j] = 0;
                pick[j] = lists[j][0];
            }
        }
    }

    fn combine(&mut self, pi: usize, kids: &[ClassId], found: &mut Found, order: &mut Vec<Key>) {
        self.stats.combinations += 1;
        let Some(summary) = self.evaluate(pi, kids) else {
            self.over_budget = true;
            return;
        };
        let nt = self.grammar.productions[pi].lhs as u32;
        let key = (nt, Rc::new(summary));
        if self.dominated.contains(&key) {
            return;
        }
        if let Some(&old) = self.lookup.get(&key) {
            if let Some(r) = self.record.as_mut() {
                r.push((old, pi as u32, kids.into()));
            }
            return;
        }
        if self.record.is_some() {
            // Resolved to a class id once the layer is numbered.
            self.pending.push((key.clone(), pi as u32, kids.into()));
        }
        let mut tkey = Vec::with_capacity(kids.len() + 1);
        tkey.push(self.prod_symbol[pi]);
        tkey.extend(kids.iter().map(|&c| self.classes[c as usize].rank));
        match found.get_mut(&key) {
            Some(slot) => {
                if tkey < slot.0 {
                    *slot = (tkey, pi as u32, kids.into());
                }
            }
            None => {
                order.push(key.clone());
                found.insert(key, (tkey, pi as u32, kids.into()));
            }
        }
    }

    /// The class summary of `production(kids)`, or `None` over budget.
    fn evaluate(&mut self, pi: usize, kids: &[ClassId]) -> Option<Summary> {
        let mut parts = Vec::with_capacity(self.comps.len());
        for ci in 0..self.comps.len() {
            let part = if self.comps[ci].general {
                Part::Funs(self.eval_general(ci, pi, kids)?)
            } else {
                let comp = &self.comps[ci];
                let kid_bits: Vec<&[u64]> = kids
                    .iter()
                    .map(|&k| match &self.classes[k as usize].summary[ci] {
                        Part::Bits(b) => &b[..],
                        Part::Funs(_) => unreachable!(),
                    })
                    .collect();
                let gates = &comp.gates[pi];
                let mut bits = vec![0u64; gates.len().div_ceil(64)];
                for (i, gate) in gates.iter().enumerate() {
                    if gate.eval(&kid_bits) {
                        bits[i >> 6] |= 1 << (i & 63);
                    }
                }
                Part::Bits(bits.into_boxed_slice())
            };
            parts.push(part);
        }
        Some(parts.into_boxed_slice())
    }

    /// Two-way evaluation at one node: the value of every demanded state as
    /// a monotone function of the states sent to the parent.
    fn eval_general(&mut self, ci: usize, pi: usize, kids: &[ClassId]) -> Option<Box<[(u32, Mono)]>> {
        let lhs = self.grammar.productions[pi].lhs;
        let sid = self.prod_symbol[pi];
        let max_terms = self.budget.max_terms;
        let automaton = &self.automata[ci];
        let roots = self.comps[ci].ext[lhs].clone();
        let kid_funs: Vec<&[(u32, Mono)]> = kids
            .iter()
            .map(|&k| match &self.classes[k as usize].summary[ci] {
                Part::Funs(f) => &f[..],
                Part::Bits(_) => unreachable!(),
            })
            .collect();
        let comp = &mut self.comps[ci];
        let sym = self.alphabet.symbol(sid);

        // Discover node-local states and their dependencies.
        let mut slot_of: FxHashMap<u32, usize> = FxHashMap::default();
        let mut states: Vec<u32> = Vec::new();
        let mut formulas: Vec<Rc<Pbf<u32>>> = Vec::new();
        let mut deps: Vec<Vec<usize>> = Vec::new();
        for &q in &roots {
            if let std::collections::hash_map::Entry::Vacant(e) = slot_of.entry(q) {
                e.insert(states.len());
                states.push(q);
            }
        }
        let mut done = 0;
        while done < states.len() {
            let q = states[done];
            let f = Self::delta_of(automaton, comp, sid, q, sym);
            let mut targets: Vec<u32> = Vec::new();
            f.visit_atoms(&mut |&s, d| {
                if d == 0 {
                    targets.push(s);
                } else if d > 0 {
                    if let Some(funs) = kid_funs.get(d as usize - 1) {
                        if let Ok(i) = funs.binary_search_by_key(&s, |(x, _)| *x) {
                            targets.extend(funs[i].1.vars());
                        }
                    }
                }
            });
            let mut ds = Vec::with_capacity(targets.len());
            for t in targets {
                let slot = *slot_of.entry(t).or_insert_with(|| {
                    states.push(t);
                    states.len() - 1
                });
                ds.push(slot);
            }
            ds.sort_unstable();
            ds.dedup();
            deps.push(ds);
            formulas.push(f);
            done += 1;
        }

        // Evaluate strongly connected components, dependencies first.
        let n = states.len();
        let sccs = tarjan(n, &deps);
        let mut value: Vec<Mono> = vec![Mono::falsum(); n];
        let mut over = false;
        for scc in sccs {
            let cyclic = scc.len() > 1 || deps[scc[0]].contains(&scc[0]);
            loop {
                let mut changed = false;
                for &v in &scc {
                    let nv = pbf_value(&formulas[v], &kid_funs, &slot_of, &value, max_terms, &mut over);
                    if over {
                        return None;
                    }
                    if nv != value[v] {
                        value[v] = nv;
                        changed = true;
                    }
                }
                if !cyclic || !changed {
                    break;
                }
            }
        }
        let mut out: Vec<(u32, Mono)> = Vec::new();
        for &q in &roots {
            let v = std::mem::take(&mut value[slot_of[&q]]);
            if !v.is_false() {
                out.push((q, v));
            }
        }
        Some(out.into_boxed_slice())
    }

    /// The explored classes as an automaton: one state per class, one rule
    /// per evaluated combination, initial states the goal classes.
    pub(crate) fn recorded(&self) -> Option<(Vec<Rule>, Vec<ClassId>)> {
        let r = self.record.as_ref()?;
        let goals = (0..self.classes.len() as ClassId)
            .filter(|&c| self.classes[c as usize].nt as usize == self.grammar.axiom && self.is_goal(c))
            .collect();
        Some((r.clone(), goals))
    }

    pub(crate) fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub(crate) fn production_symbol(&self, p: u32) -> &Symbol {
        self.symbol(p as usize)
    }
}

/// Whether every part of `a` is pointwise below the same part of `b`.
fn weaker(a: &Summary, b: &Summary) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| match (x, y) {
        (Part::Bits(x), Part::Bits(y)) => x.iter().zip(y.iter()).all(|(p, q)| p & !q == 0),
        (Part::Funs(x), Part::Funs(y)) => x.iter().all(|(q, f)| match y.binary_search_by_key(q, |(s, _)| *s) {
            Ok(i) => f.implies(&y[i].1),
            Err(_) => false,
        }),
        _ => false,
    })
}

fn pbf_value(
    f: &Pbf<u32>,
    kid_funs: &[&[(u32, Mono)]],
    slot_of: &FxHashMap<u32, usize>,
    value: &[Mono],
    max_terms: usize,
    over: &mut bool,
) -> Mono {
    match f {
        Pbf::True => Mono::verum(),
        Pbf::False => Mono::falsum(),
        Pbf::Atom(s, d) => {
            let d = *d;
            if d == 0 {
                value[slot_of[s]].clone()
            } else if d < 0 {
                Mono::var(*s)
            } else {
                let Some(funs) = kid_funs.get(d as usize - 1) else { return Mono::falsum() };
                match funs.binary_search_by_key(s, |(x, _)| *x) {
                    Ok(i) => funs[i].1.compose(&mut |u| value[slot_of[&u]].clone()),
                    Err(_) => Mono::falsum(),
                }
            }
        }
        Pbf::And(ps) => {
            let mut acc = Mono::verum();
            for p in ps {
                let v = pbf_value(p, kid_funs, slot_of, value, max_terms, over);
                acc = acc.and(&v);
                if acc.is_false() || *over {
                    return acc;
                }
                if acc.term_count() > max_terms {
                    *over = true;
                    return acc;
                }
            }
            acc
        }
        Pbf::Or(ps) => {
            let mut acc = Mono::falsum();
            for p in ps {
                let v = pbf_value(p, kid_funs, slot_of, value, max_terms, over);
                acc = acc.or(&v);
                if acc.is_true() || *over {
                    return acc;
                }
                if acc.term_count() > max_terms {
                    *over = true;
                    return acc;
                }
            }
            acc
        }
    }
}

fn compile(f: &Pbf<u32>, children: &[usize], ext_pos: &[FxHashMap<u32, u32>]) -> Gate {
    match f {
        Pbf::True => Gate::Const(true),
        Pbf::False => Gate::Const(false),
        Pbf::Atom(s, d) => {
            let d = *d;
            if d < 1 || d as usize > children.len() {
                return Gate::Const(false);
            }
            let b = children[d as usize - 1];
            match ext_pos[b].get(s) {
                Some(&bit) => Gate::Atom { child: (d - 1) as u8, bit },
                None => Gate::Const(false),
            }
        }
        Pbf::And(ps) => Gate::And(ps.iter().map(|p| compile(p, children, ext_pos)).collect()),
        Pbf::Or(ps) => Gate::Or(ps.iter().map(|p| compile(p, children, ext_pos)).collect()),
    }
}

/// Tarjan's algorithm; components come out dependencies first.
fn tarjan(n: usize, deps: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // Iterative DFS: (node, next dependency position).
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < deps[v].len() {
                let w = deps[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Convenience: smallest tree of `grammar` accepted by every automaton.
pub fn smallest_common<A: AlternatingAutomaton>(
    grammar: &NormalRtg,
    automata: &[A],
    budget: Budget,
) -> (SearchOutcome, EngineStats) {
    let mut e = Engine::new(grammar, automata, budget);
    let out = e.run();
    (out, e.stats().clone())
}
