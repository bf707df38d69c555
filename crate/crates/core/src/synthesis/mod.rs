//! End-to-end learning pipelines: separating labeled structures, matching
//! answer sets, and synthesizing terms with prescribed values.
//!
//! Every pipeline builds one evaluation automaton per structure plus a
//! scope automaton that rules out free variables, and hands them with the
//! normalized grammar to the class engine. A found witness is re-checked
//! against the grammar and the direct evaluators before it is returned.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{AlternatingAutomaton, Budget, Engine, Pbf, SearchOutcome};
use crate::eval_automata::{
    build_fo_eval_ata, build_fo_query_ata, build_folfp_eval_2ata, build_term_eval_2ata, EvalAutomaton, EvalState, Mode,
    ScopeAutomaton,
};
use crate::model::{
    all_tuples, eval_fo, eval_folfp, eval_fun3, Assignment, Env3, Label, LogicKind, RelEnv, Structure, Symbol, Tree,
    Value3,
};
use crate::rtg::{grammar_to_nta, normalize, NormalRtg, Rtg};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    /// A sentence true on every positive and false on every negative structure.
    Separability,
    /// A formula whose answer set over `vars` is each structure's label.
    Query { vars: Vec<String> },
    /// A closed term whose value is the constant `output` in every structure.
    Term { output: String },
}

#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub problem: Problem,
    pub grammar: Rtg,
    pub structures: Vec<Structure>,
    pub budget: Budget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Realizable,
    Unrealizable,
    /// The class budget ran out before a decision; says nothing either way.
    BudgetExceeded,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthStats {
    /// Automaton states reached by the demand analysis.
    pub states: usize,
    /// Classes of grammar trees materialized.
    pub classes: usize,
    pub combinations: u64,
    pub layers: usize,
    pub millis: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthResult {
    pub verdict: Verdict,
    pub witness: Option<Tree>,
    pub size: Option<usize>,
    pub stats: SynthStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("the grammar can derive a definition of `{0}` that uses it under a negation")]
    NotPositive(String),
    #[error("the grammar mentions the output constant `{0}`")]
    GrammarUsesOut(String),
    #[error("internal error: witness {0:?} failed verification")]
    Unverified(Tree),
}

/// One component of the product: an evaluation automaton or the scope check.
#[derive(Clone, Debug)]
pub enum Component {
    Eval(EvalAutomaton),
    Scope(ScopeAutomaton),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentState {
    Eval(EvalState),
    Scope(BTreeSet<String>),
}

impl AlternatingAutomaton for Component {
    type State = ComponentState;

    fn initial_states(&self) -> Vec<ComponentState> {
        match self {
            Component::Eval(a) => a.initial_states().into_iter().map(ComponentState::Eval).collect(),
            Component::Scope(a) => a.initial_states().into_iter().map(ComponentState::Scope).collect(),
        }
    }

    fn transition(&self, q: &ComponentState, s: &Symbol) -> Pbf<ComponentState> {
        match (self, q) {
            (Component::Eval(a), ComponentState::Eval(q)) => {
                a.transition(q, s).map(&mut |x| ComponentState::Eval(x.clone()))
            }
            (Component::Scope(a), ComponentState::Scope(q)) => {
                a.transition(q, s).map(&mut |x| ComponentState::Scope(x.clone()))
            }
            _ => Pbf::False,
        }
    }

    fn is_final(&self, q: &ComponentState) -> bool {
        match (self, q) {
            (Component::Eval(a), ComponentState::Eval(q)) => a.is_final(q),
            _ => false,
        }
    }

    fn is_two_way(&self) -> bool {
        match self {
            Component::Eval(a) => a.is_two_way(),
            Component::Scope(_) => false,
        }
    }
}

/// Checks the instance against the problem's requirements.
pub fn validate(inst: &ProblemInstance) -> Result<(), SynthError> {
    let g = &inst.grammar;
    let invalid = |m: String| Err(SynthError::Validation(m));
    if inst.structures.is_empty() {
        return invalid("no structures given".into());
    }
    for (i, a) in inst.structures.iter().enumerate() {
        a.validate().map_err(|e| SynthError::Validation(format!("structure {i}: {e}")))?;
        if !g.signature.is_subsignature_of(a.signature()) {
            return invalid(format!("structure {i} does not interpret the grammar's signature"));
        }
        if a.has_partial_functions() && g.logic.kind != LogicKind::FoTerm {
            return invalid(format!("structure {i} has partial functions, which only term synthesis allows"));
        }
    }
    match &inst.problem {
        Problem::Separability => {
            if g.logic.kind == LogicKind::FoTerm {
                return invalid("separability needs logic fo or folfp".into());
            }
            for (i, a) in inst.structures.iter().enumerate() {
                if !matches!(a.label, Label::Pos | Label::Neg) {
                    return invalid(format!("structure {i} is not labeled pos or neg"));
                }
            }
        }
        Problem::Query { vars } => {
            if g.logic.kind != LogicKind::Fo {
                return invalid("query synthesis needs logic fo".into());
            }
            let distinct: HashSet<&String> = vars.iter().collect();
            if distinct.len() != vars.len() {
                return invalid("answer variables must be distinct".into());
            }
            if let Some(v) = vars.iter().find(|v| g.logic.var_index(v).is_none()) {
                return invalid(format!("answer variable `{v}` is not a variable of the logic"));
            }
            for (i, a) in inst.structures.iter().enumerate() {
                match &a.label {
                    Label::Answers(ans) => {
                        if let Some(t) = ans.iter().find(|t| t.len() != vars.len()) {
                            return invalid(format!(
                                "structure {i}: answer tuple of arity {} for {} variables",
                                t.len(),
                                vars.len()
                            ));
                        }
                    }
                    _ => return invalid(format!("structure {i} has no answer set")),
                }
            }
        }
        Problem::Term { output } => {
            if g.logic.kind != LogicKind::FoTerm {
                return invalid("term synthesis needs logic foterm".into());
            }
            if g.symbols().iter().any(|s| s.constants().contains(&output.as_str())) {
                return Err(SynthError::GrammarUsesOut(output.clone()));
            }
            for (i, a) in inst.structures.iter().enumerate() {
                if a.constant(output).is_none() {
                    return invalid(format!("structure {i} does not interpret `{output}`"));
                }
            }
        }
    }
    check_positivity(&normalize(g))
}

/// Rejects grammars that can derive a relation definition whose body uses
/// the relation under an odd number of negations. If-then-else conditions
/// count as both polarities.
pub fn check_positivity(g: &NormalRtg) -> Result<(), SynthError> {
    for p in &g.productions {
        let Symbol::LetRel { rel, .. } = &p.symbol else { continue };
        let mut seen: HashSet<(usize, bool)> = HashSet::new();
        let mut stack = vec![(p.children[0], false)];
        while let Some((n, neg)) = stack.pop() {
            if !seen.insert((n, neg)) {
                continue;
            }
            for q in g.productions.iter().filter(|q| q.lhs == n) {
                match &q.symbol {
                    Symbol::UseRel { rel: r, .. } if r == rel && neg => {
                        return Err(SynthError::NotPositive(rel.clone()));
                    }
                    // An inner definition of the same name shadows this one.
                    Symbol::LetRel { rel: r, .. } if r == rel => continue,
                    Symbol::Not => stack.push((q.children[0], !neg)),
                    Symbol::Ite => {
                        stack.push((q.children[0], neg));
                        stack.push((q.children[0], !neg));
                        stack.push((q.children[1], neg));
                        stack.push((q.children[2], neg));
                    }
                    _ => stack.extend(q.children.iter().map(|&c| (c, neg))),
                }
            }
        }
    }
    Ok(())
}

/// The automata whose common language is the solution set, in structure
/// order, followed by the scope automaton.
pub fn components(inst: &ProblemInstance) -> Vec<Component> {
    let logic = &inst.grammar.logic;
    let mut out: Vec<Component> = inst
        .structures
        .iter()
        .map(|a| {
            Component::Eval(match &inst.problem {
                Problem::Separability => {
                    let mode = if a.label == Label::Neg { Mode::Falsify } else { Mode::Verify };
                    if logic.kind == LogicKind::Fo {
                        build_fo_eval_ata(a, mode, logic)
                    } else {
                        build_folfp_eval_2ata(a, mode, logic)
                    }
                }
                Problem::Query { vars } => {
                    let ans = match &a.label {
                        Label::Answers(s) => s.clone(),
                        _ => BTreeSet::new(),
                    };
                    build_fo_query_ata(a, &ans, vars, logic).expect("validated answer arity")
                }
                Problem::Term { output } => {
                    build_term_eval_2ata(a, a.constant(output).expect("validated output"), logic)
                }
            })
        })
        .collect();
    let scope = match &inst.problem {
        Problem::Query { vars } => ScopeAutomaton::new(vars.iter().cloned()),
        _ => ScopeAutomaton::closed(),
    };
    out.push(Component::Scope(scope));
    out
}

/// Runs the pipeline matching the instance's problem.
pub fn synthesize(inst: &ProblemInstance) -> Result<SynthResult, SynthError> {
    validate(inst)?;
    let start = Instant::now();
    let grammar = normalize(&inst.grammar).reduced();
    let comps = components(inst);
    let mut engine = Engine::new(&grammar, &comps, inst.budget);
    let outcome = engine.run();
    let s = engine.stats();
    let stats = SynthStats {
        states: s.states,
        classes: s.classes,
        combinations: s.combinations,
        layers: s.layers,
        millis: start.elapsed().as_millis(),
    };
    match outcome {
        SearchOutcome::Found { tree, size } => {
            if !verify_result(inst, &tree) {
                return Err(SynthError::Unverified(tree));
            }
            Ok(SynthResult { verdict: Verdict::Realizable, witness: Some(tree), size: Some(size), stats })
        }
        SearchOutcome::Empty => Ok(SynthResult { verdict: Verdict::Unrealizable, witness: None, size: None, stats }),
        SearchOutcome::BudgetExceeded => {
            Ok(SynthResult { verdict: Verdict::BudgetExceeded, witness: None, size: None, stats })
        }
    }
}

pub fn synth_separator(inst: &ProblemInstance) -> Result<SynthResult, SynthError> {
    if inst.problem != Problem::Separability {
        return Err(SynthError::Validation("not a separability instance".into()));
    }
    synthesize(inst)
}

pub fn synth_query(inst: &ProblemInstance) -> Result<SynthResult, SynthError> {
    if !matches!(inst.problem, Problem::Query { .. }) {
        return Err(SynthError::Validation("not a query instance".into()));
    }
    synthesize(inst)
}

pub fn synth_term(inst: &ProblemInstance) -> Result<SynthResult, SynthError> {
    if !matches!(inst.problem, Problem::Term { .. }) {
        return Err(SynthError::Validation("not a term instance".into()));
    }
    synthesize(inst)
}

/// The answer set of `phi` over `vars` in `a`, or `None` if evaluation fails.
pub fn answer_set(a: &Structure, phi: &Tree, vars: &[String]) -> Option<BTreeSet<Vec<u32>>> {
    let mut out = BTreeSet::new();
    for t in all_tuples(a.size(), vars.len()) {
        let gamma = Assignment::from_pairs(vars.iter().map(String::as_str).zip(t.iter().copied()));
        if eval_fo(a, &gamma, phi).ok()? {
            out.insert(t);
        }
    }
    Some(out)
}

/// Whether `witness` is in the grammar's language and solves the instance
/// under the direct evaluators.
pub fn verify_result(inst: &ProblemInstance, witness: &Tree) -> bool {
    let g = &inst.grammar;
    if !grammar_to_nta(&normalize(g)).membership(witness).unwrap_or(false) {
        return false;
    }
    if g.logic.check_tree(&g.signature, witness).is_err() {
        return false;
    }
    solves(inst, witness)
}

/// The instance's defining condition alone, without the grammar check.
pub fn solves(inst: &ProblemInstance, witness: &Tree) -> bool {
    let logic = &inst.grammar.logic;
    match &inst.problem {
        Problem::Separability => {
            witness.is_sentence()
                && inst.structures.iter().all(|a| {
                    let want = a.label == Label::Pos;
                    let got = if logic.kind == LogicKind::Fo {
                        eval_fo(a, &Assignment::new(), witness)
                    } else {
                        eval_folfp(a, &Assignment::new(), &RelEnv::empty(), witness)
                    };
                    got == Ok(want)
                })
        }
        Problem::Query { vars } => {
            witness.free_vars().iter().all(|v| vars.contains(v))
                && inst.structures.iter().all(|a| match &a.label {
                    Label::Answers(ans) => answer_set(a, witness, vars).as_ref() == Some(ans),
                    _ => false,
                })
        }
        Problem::Term { output } => {
            witness.free_vars().is_empty()
                && inst.structures.iter().all(|a| {
                    eval_fun3(a, &Assignment::new(), &Env3::empty(), witness) == Value3::Elem(a.constant(output))
                })
        }
    }
}
