//! Structure-specific evaluation automata.
//!
//! For a fixed finite structure these automata read a formula or term tree
//! and accept it exactly when it has a prescribed value there. A `Down`
//! state holds a partial assignment and a dual mark: unmarked states accept
//! formulas that are true under the assignment, marked ones accept formulas
//! that are false. Quantifiers branch over the domain, atoms are checked
//! directly. `Goal` states accept terms whose value is a given element,
//! guessing argument values and checking them in the children.
//!
//! Recursive definitions are handled by walking up the tree. Reading a use
//! of a defined symbol, the automaton moves to the parent carrying the
//! argument values, climbs to the node that defines the symbol, and
//! evaluates its body there with the parameters bound. A counter bounds the
//! number of unfoldings: the body entered with counter `j` computes the
//! `j`-th stage of the fixpoint iteration, and `n^arity` stages always
//! reach the least fixpoint. At counter zero a use denotes the empty stage.
//!
//! Function definitions need no counter. A `Goal` play only ever proves
//! that a term has a value, so a run that recurses forever never accepts,
//! which is exactly the undefined value of a diverging call.

use std::collections::BTreeSet;
use std::rc::Rc;

mod scope;

pub use scope::ScopeAutomaton;

use thiserror::Error;

use crate::automata::{Alphabet, AlternatingAutomaton, Pbf, UP};
use crate::model::{all_tuples, Arg, AtomArgs, Elem, Encoding, Logic, LogicKind, Structure, Symbol, Tuple};

/// Marks an unbound variable in an [`Env`].
pub const UNBOUND: Elem = Elem::MAX;

/// A partial assignment indexed by variable position.
pub type Env = Box<[Elem]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Verify,
    Falsify,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalAutomatonError {
    #[error("symbol `{0}` is not interpreted by the structure")]
    SignatureMismatch(String),
    #[error("answer tuples have arity {found} but {expected} answer variables were given")]
    ArityMismatch { expected: usize, found: usize },
    #[error("unknown answer variable `{0}`")]
    UnknownVariable(String),
}

/// Automaton states. `defn` indexes the definable symbols (relations first,
/// then functions); `None` means outside every definition body.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EvalState {
    /// Query automata only: conjunction over the answer-set assignments.
    Query,
    Down {
        env: Env,
        dual: bool,
        count: u32,
        defn: Option<u16>,
    },
    Up {
        vals: Tuple,
        dual: bool,
        count: u32,
        defn: u16,
    },
    Goal {
        env: Env,
        count: u32,
        defn: Option<u16>,
        target: Elem,
    },
    UpGoal {
        vals: Tuple,
        count: u32,
        defn: u16,
        target: Elem,
    },
    Final,
}

#[derive(Clone, Debug)]
enum Start {
    Formula(Mode),
    Term(Elem),
    Query { answers: Vec<Env>, others: Vec<Env> },
}

/// One evaluation automaton for one structure.
#[derive(Clone, Debug)]
pub struct EvalAutomaton {
    a: Rc<Structure>,
    logic: Logic,
    /// Definable symbols: name, arity, whether it is a function.
    defs: Vec<(String, usize, bool)>,
    start: Start,
}

impl EvalAutomaton {
    fn new(a: &Structure, logic: &Logic, start: Start) -> Self {
        let mut defs: Vec<(String, usize, bool)> = logic.rel_defs.iter().map(|(n, &r)| (n.clone(), r, false)).collect();
        defs.extend(logic.fun_defs.iter().map(|(n, &r)| (n.clone(), r, true)));
        EvalAutomaton { a: Rc::new(a.clone()), logic: logic.clone(), defs, start }
    }

    pub fn structure(&self) -> &Structure {
        &self.a
    }

    pub fn logic(&self) -> &Logic {
        &self.logic
    }

    fn n(&self) -> usize {
        self.a.size()
    }

    fn k(&self) -> usize {
        self.logic.vars.len()
    }

    fn defn_index(&self, name: &str, function: bool) -> Option<u16> {
        self.defs.iter().position(|(n, _, f)| n == name && *f == function).map(|i| i as u16)
    }

    /// Counter cap of a definable symbol: the number of its argument tuples.
    pub fn cap(&self, defn: u16) -> u32 {
        self.n().pow(self.defs[defn as usize].1 as u32) as u32
    }

    /// Largest arity over definable symbols.
    pub fn max_def_arity(&self) -> usize {
        self.defs.iter().map(|d| d.1).max().unwrap_or(0)
    }

    pub fn empty_env(&self) -> Env {
        vec![UNBOUND; self.k()].into_boxed_slice()
    }

    /// The `Down` state for a named assignment.
    pub fn down(&self, gamma: &crate::model::Assignment, mode: Mode) -> EvalState {
        let mut env = self.empty_env();
        for (v, &e) in gamma.iter() {
            if let Some(i) = self.logic.var_index(v) {
                env[i] = e;
            }
        }
        EvalState::Down { env, dual: mode == Mode::Falsify, count: 0, defn: None }
    }

    /// Checks that every relation, function, and constant of `alphabet` is
    /// interpreted by the structure.
    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<(), EvalAutomatonError> {
        let a = &self.a;
        for s in alphabet.symbols() {
            let missing = match s {
                Symbol::Atom { rel, .. } => a.relation(rel).is_none() && a.signature().relation_arity(rel).is_none(),
                Symbol::Func { name, .. } => !a.knows_function(name),
                _ => false,
            } || s.constants().iter().any(|c| a.constant(c).is_none());
            if missing {
                return Err(EvalAutomatonError::SignatureMismatch(format!("{s:?}")));
            }
        }
        Ok(())
    }

    /// The nominal state space: every `Down` and `Up` state for counters up
    /// to `n^r` (r the largest definable arity) and every definition index
    /// or none, `Goal` and `UpGoal` states when terms are in play, and the
    /// final state when definitions are.
    pub fn enumerate_states(&self) -> Vec<EvalState> {
        let n = self.n();
        let k = self.k();
        let has_defs = !self.defs.is_empty();
        let terms = self.logic.kind == LogicKind::FoTerm || self.logic.encoding == Encoding::Full;
        let r = self.max_def_arity();
        let max_count = if has_defs { n.pow(r as u32) as u32 } else { 0 };
        let defns: Vec<Option<u16>> = std::iter::once(None).chain((0..self.defs.len() as u16).map(Some)).collect();
        let envs: Vec<Env> = all_tuples(n + 1, k)
            .into_iter()
            .map(|t| t.into_iter().map(|e| if e as usize == n { UNBOUND } else { e }).collect())
            .collect();
        let mut out = Vec::new();
        if matches!(self.start, Start::Query { .. }) {
            out.push(EvalState::Query);
        }
        for env in &envs {
            for dual in [false, true] {
                for count in 0..=max_count {
                    for &defn in &defns {
                        out.push(EvalState::Down { env: env.clone(), dual, count, defn });
                    }
                }
            }
        }
        if has_defs {
            for vals in all_tuples(n, r) {
                for dual in [false, true] {
                    for count in 0..=max_count {
                        for d in &defns {
                            // The nominal space keeps an up state per
                            // definition slot, the empty slot included.
                            let defn = d.map_or(u16::MAX, |x| x);
                            out.push(EvalState::Up { vals: vals.clone(), dual, count, defn });
                        }
                    }
                }
            }
        }
        if terms {
            for env in &envs {
                for count in 0..=max_count {
                    for &defn in &defns {
                        for target in 0..n as Elem {
                            out.push(EvalState::Goal { env: env.clone(), count, defn, target });
                        }
                    }
                }
            }
            if has_defs {
                for vals in all_tuples(n, r) {
                    for count in 0..=max_count {
                        for d in 0..self.defs.len() as u16 {
                            for target in 0..n as Elem {
                                out.push(EvalState::UpGoal { vals: vals.clone(), count, defn: d, target });
                            }
                        }
                    }
                }
            }
        }
        if has_defs {
            out.push(EvalState::Final);
        }
        out
    }

    fn lookup(&self, env: &Env, arg: &Arg) -> Option<Elem> {
        match arg {
            Arg::Var(v) => self.logic.var_index(v).map(|i| env[i]).filter(|&e| e != UNBOUND),
            Arg::Const(c) => self.a.constant(c),
        }
    }

    fn inline(&self, env: &Env, args: &[Arg]) -> Option<Tuple> {
        args.iter().map(|x| self.lookup(env, x)).collect()
    }

    fn bind(&self, params: &[String], vals: &[Elem]) -> Option<Env> {
        if params.len() != vals.len() {
            return None;
        }
        let mut env = self.empty_env();
        for (p, &v) in params.iter().zip(vals) {
            env[self.logic.var_index(p)?] = v;
        }
        Some(env)
    }

    /// Children `1..=r` evaluate to `vals`.
    fn goals(&self, env: &Env, count: u32, defn: Option<u16>, vals: &[Elem]) -> Vec<Pbf<EvalState>> {
        vals.iter()
            .enumerate()
            .map(|(i, &v)| Pbf::atom(EvalState::Goal { env: env.clone(), count, defn, target: v }, i as i32 + 1))
            .collect()
    }

    /// A use of a defined relation on `vals`.
    fn use_rel(&self, rel: &str, vals: Tuple, dual: bool, count: u32, defn: Option<u16>) -> Pbf<EvalState> {
        let Some(d) = self.defn_index(rel, false) else { return Pbf::False };
        if self.defs[d as usize].1 != vals.len() {
            return Pbf::False;
        }
        let count = if defn == Some(d) {
            if count == 0 {
                // The empty stage: nothing holds.
                return Pbf::from_bool(dual);
            }
            count
        } else {
            self.cap(d)
        };
        Pbf::atom(EvalState::Up { vals, dual, count, defn: d }, UP)
    }

    fn use_fun(&self, fun: &str, vals: Tuple, target: Elem) -> Pbf<EvalState> {
        let Some(d) = self.defn_index(fun, true) else { return Pbf::False };
        if self.defs[d as usize].1 != vals.len() {
            return Pbf::False;
        }
        Pbf::atom(EvalState::UpGoal { vals, count: 0, defn: d, target }, UP)
    }

    fn step_down(&self, env: &Env, dual: bool, count: u32, defn: Option<u16>, s: &Symbol) -> Pbf<EvalState> {
        let n = self.n() as Elem;
        let st = |env: Env, dual: bool| EvalState::Down { env, dual, count, defn };
        // Conjunction when verifying, disjunction when falsifying, and back.
        let all = |parts: Vec<Pbf<EvalState>>, conj: bool| if conj { Pbf::and(parts) } else { Pbf::or(parts) };
        match s {
            Symbol::And | Symbol::Or => {
                let conj = matches!(s, Symbol::And) != dual;
                all(vec![Pbf::atom(st(env.clone(), dual), 1), Pbf::atom(st(env.clone(), dual), 2)], conj)
            }
            Symbol::Not => Pbf::atom(st(env.clone(), !dual), 1),
            Symbol::Exists(x) | Symbol::Forall(x) => {
                let Some(i) = self.logic.var_index(x) else { return Pbf::False };
                let conj = matches!(s, Symbol::Forall(_)) != dual;
                let parts = (0..n)
                    .map(|a| {
                        let mut e = env.clone();
                        e[i] = a;
                        Pbf::atom(st(e, dual), 1)
                    })
                    .collect();
                all(parts, conj)
            }
            Symbol::Atom { rel, args: AtomArgs::Inline(args) } => match self.inline(env, args) {
                Some(vals) => match self.a.holds(rel, &vals) {
                    Some(h) => Pbf::from_bool(h != dual),
                    None => Pbf::False,
                },
                None => Pbf::False,
            },
            Symbol::Atom { rel, args: AtomArgs::Terms(r) } => {
                let parts: Vec<Pbf<EvalState>> = all_tuples(n as usize, *r)
                    .into_iter()
                    .filter(|t| self.a.holds(rel, t).is_some_and(|h| h != dual))
                    .map(|t| Pbf::and(self.goals(env, count, defn, &t)))
                    .collect();
                Pbf::or(parts)
            }
            Symbol::Eq(AtomArgs::Inline(args)) => match self.inline(env, args) {
                Some(vals) => Pbf::from_bool((vals[0] == vals[1]) != dual),
                None => Pbf::False,
            },
            Symbol::Eq(AtomArgs::Terms(_)) => {
                let mut parts = Vec::new();
                for a in 0..n {
                    for b in 0..n {
                        if (a == b) != dual {
                            parts.push(Pbf::and(self.goals(env, count, defn, &[a, b])));
                        }
                    }
                }
                Pbf::or(parts)
            }
            Symbol::LetRel { .. } | Symbol::LetFun { .. } => Pbf::atom(st(env.clone(), dual), 2),
            Symbol::UseRel { rel, args: AtomArgs::Inline(args) } => match self.inline(env, args) {
                Some(vals) => self.use_rel(rel, vals, dual, count, defn),
                None => Pbf::False,
            },
            Symbol::UseRel { rel, args: AtomArgs::Terms(r) } => {
                let parts: Vec<Pbf<EvalState>> = all_tuples(n as usize, *r)
                    .into_iter()
                    .map(|t| {
                        let mut g = self.goals(env, count, defn, &t);
                        g.push(self.use_rel(rel, t, dual, count, defn));
                        Pbf::and(g)
                    })
                    .collect();
                Pbf::or(parts)
            }
            _ => Pbf::False,
        }
    }

    fn goal(&self, env: &Env, count: u32, defn: Option<u16>, target: Elem, s: &Symbol) -> Pbf<EvalState> {
        let n = self.n();
        match s {
            Symbol::Var(v) => Pbf::from_bool(self.lookup(env, &Arg::Var(v.clone())) == Some(target)),
            Symbol::Const(c) => Pbf::from_bool(self.a.constant(c) == Some(target)),
            Symbol::Func { name, arity } => {
                let parts: Vec<Pbf<EvalState>> = all_tuples(n, *arity)
                    .into_iter()
                    .filter(|t| self.a.apply(name, t) == Some(target))
                    .map(|t| Pbf::and(self.goals(env, count, defn, &t)))
                    .collect();
                Pbf::or(parts)
            }
            Symbol::Ite => {
                let cond = |dual| EvalState::Down { env: env.clone(), dual, count, defn };
                let g = EvalState::Goal { env: env.clone(), count, defn, target };
                Pbf::or(vec![
                    Pbf::and(vec![Pbf::atom(cond(false), 1), Pbf::atom(g.clone(), 2)]),
                    Pbf::and(vec![Pbf::atom(cond(true), 1), Pbf::atom(g, 3)]),
                ])
            }
            Symbol::LetRel { .. } | Symbol::LetFun { .. } => {
                Pbf::atom(EvalState::Goal { env: env.clone(), count, defn, target }, 2)
            }
            Symbol::UseFun { fun, arity } => {
                let parts: Vec<Pbf<EvalState>> = all_tuples(n, *arity)
                    .into_iter()
                    .map(|t| {
                        let mut g = self.goals(env, count, defn, &t);
                        g.push(self.use_fun(fun, t, target));
                        Pbf::and(g)
                    })
                    .collect();
                Pbf::or(parts)
            }
            _ => Pbf::False,
        }
    }
}

impl AlternatingAutomaton for EvalAutomaton {
    type State = EvalState;

    fn initial_states(&self) -> Vec<EvalState> {
        match &self.start {
            Start::Formula(m) => {
                vec![EvalState::Down { env: self.empty_env(), dual: *m == Mode::Falsify, count: 0, defn: None }]
            }
            Start::Term(t) => vec![EvalState::Goal { env: self.empty_env(), count: 0, defn: None, target: *t }],
            Start::Query { .. } => vec![EvalState::Query],
        }
    }

    fn transition(&self, q: &EvalState, s: &Symbol) -> Pbf<EvalState> {
        match q {
            EvalState::Query => {
                let Start::Query { answers, others } = &self.start else { return Pbf::False };
                let mut parts = Vec::with_capacity(answers.len() + others.len());
                for env in answers {
                    parts.push(self.step_down(env, false, 0, None, s));
                }
                for env in others {
                    parts.push(self.step_down(env, true, 0, None, s));
                }
                Pbf::and(parts)
            }
            EvalState::Down { env, dual, count, defn } => self.step_down(env, *dual, *count, *defn, s),
            EvalState::Goal { env, count, defn, target } => self.goal(env, *count, *defn, *target, s),
            EvalState::Up { vals, dual, count, defn } => match s {
                Symbol::LetRel { rel, params } if self.defn_index(rel, false) == Some(*defn) => {
                    if *count == 0 {
                        return Pbf::from_bool(*dual);
                    }
                    match self.bind(params, vals) {
                        Some(env) => {
                            Pbf::atom(EvalState::Down { env, dual: *dual, count: count - 1, defn: Some(*defn) }, 1)
                        }
                        None => Pbf::False,
                    }
                }
                _ => Pbf::atom(q.clone(), UP),
            },
            EvalState::UpGoal { vals, count, defn, target } => match s {
                Symbol::LetFun { fun, params } if self.defn_index(fun, true) == Some(*defn) => {
                    match self.bind(params, vals) {
                        Some(env) => {
                            Pbf::atom(EvalState::Goal { env, count: *count, defn: Some(*defn), target: *target }, 1)
                        }
                        None => Pbf::False,
                    }
                }
                _ => Pbf::atom(q.clone(), UP),
            },
            EvalState::Final => Pbf::True,
        }
    }

    fn is_final(&self, q: &EvalState) -> bool {
        matches!(q, EvalState::Final)
    }

    fn is_two_way(&self) -> bool {
        !self.defs.is_empty()
    }
}

/// The first-order evaluation automaton of a structure: accepts the
/// sentences true in it (`Verify`) or false in it (`Falsify`).
pub fn build_fo_eval_ata(a: &Structure, mode: Mode, logic: &Logic) -> EvalAutomaton {
    let plain = Logic { rel_defs: Default::default(), fun_defs: Default::default(), ..logic.clone() };
    EvalAutomaton::new(a, &plain, Start::Formula(mode))
}

/// Accepts the formulas whose answer set over `answer_vars` is exactly
/// `answers`.
pub fn build_fo_query_ata(
    a: &Structure,
    answers: &BTreeSet<Tuple>,
    answer_vars: &[String],
    logic: &Logic,
) -> Result<EvalAutomaton, EvalAutomatonError> {
    let r = answer_vars.len();
    if let Some(t) = answers.iter().find(|t| t.len() != r) {
        return Err(EvalAutomatonError::ArityMismatch { expected: r, found: t.len() });
    }
    let plain = Logic { rel_defs: Default::default(), fun_defs: Default::default(), ..logic.clone() };
    let idx: Vec<usize> = answer_vars
        .iter()
        .map(|v| plain.var_index(v).ok_or_else(|| EvalAutomatonError::UnknownVariable(v.clone())))
        .collect::<Result<_, _>>()?;
    let k = plain.vars.len();
    let env_of = |t: &Tuple| {
        let mut env = vec![UNBOUND; k].into_boxed_slice();
        for (&i, &e) in idx.iter().zip(t) {
            env[i] = e;
        }
        env
    };
    let mut yes = Vec::new();
    let mut no = Vec::new();
    for t in all_tuples(a.size(), r) {
        if answers.contains(&t) {
            yes.push(env_of(&t));
        } else {
            no.push(env_of(&t));
        }
    }
    Ok(EvalAutomaton::new(a, &plain, Start::Query { answers: yes, others: no }))
}

/// The two-way evaluation automaton for formulas with recursive
/// definitions.
pub fn build_folfp_eval_2ata(a: &Structure, mode: Mode, logic: &Logic) -> EvalAutomaton {
    EvalAutomaton::new(a, logic, Start::Formula(mode))
}

/// Accepts the closed terms whose value in `a` is `target`.
pub fn build_term_eval_2ata(a: &Structure, target: Elem, logic: &Logic) -> EvalAutomaton {
    EvalAutomaton::new(a, logic, Start::Term(target))
}

/// The closed-form size of the nominal state space with definitions:
/// `(2(n+1)^k + 2n^r)(n^r+1)(k'+1) + 1`.
pub fn folfp_state_count(n: usize, k: usize, r: usize, defs: usize) -> usize {
    let nr = n.pow(r as u32);
    (2 * (n + 1).pow(k as u32) + 2 * nr) * (nr + 1) * (defs + 1) + 1
}
