//! Brute-force reference for the synthesis pipeline.
//!
//! The oracle never touches automata. It enumerates the grammar language in
//! canonical order, evaluates candidates with the direct semantics, and
//! compares the outcome with what the tool reports. Agreement is one-sided
//! because enumeration stops at a size bound: an unrealizable verdict must
//! leave the bounded language without solutions, and a realizable one must
//! come with a verified witness no larger than the first solution found.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod generate;

pub use generate::{random_instance, GenConfig};

use crate::model::eval3::{eval_fun3, Env3, Value3};
use crate::model::{all_tuples, Assignment, Symbol, Tree};
use crate::rtg::{enumerate, normalize};
use crate::synthesis::{solves, synthesize, verify_result, ProblemInstance, SynthError, SynthResult, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("semantic enumeration does not support recursive definitions")]
    Definitions,
}

/// How the tool's answer relates to the bounded brute-force search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Comparison {
    /// Unrealizable, and nothing solves the instance within the bound.
    NoneWithinBound,
    /// Both sides found a solution of the same (minimal) size.
    SameSize {
        size: usize,
    },
    /// A verified witness larger than the bound, which enumeration could not reach.
    BeyondBound {
        tool_size: usize,
    },
    /// The tool ran out of budget; nothing to compare.
    Exhausted,
    Mismatch {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub id: String,
    pub tool_verdict: Option<Verdict>,
    pub tool_size: Option<usize>,
    /// Size of the first brute-force solution within the bound.
    pub oracle_size: Option<usize>,
    pub max_size: usize,
    pub comparison: Comparison,
    pub agree: bool,
    pub millis: u128,
}

/// The procedure under test.
pub type Tool<'a> = &'a dyn Fn(&ProblemInstance) -> Result<SynthResult, SynthError>;

/// The first tree in canonical order, of at most `max_size` nodes, that
/// passes [`verify_result`].
pub fn brute_force_separator(inst: &ProblemInstance, max_size: usize) -> Option<Tree> {
    enumerate(&inst.grammar, max_size).into_iter().find(|t| verify_result(inst, t))
}

/// Runs the real pipeline against the brute-force oracle.
pub fn cross_check(inst: &ProblemInstance, id: &str, max_size: usize) -> OracleReport {
    cross_check_with(inst, id, max_size, &synthesize)
}

/// Runs `tool` against the brute-force oracle.
pub fn cross_check_with(inst: &ProblemInstance, id: &str, max_size: usize, tool: Tool) -> OracleReport {
    let start = Instant::now();
    let brute = brute_force_separator(inst, max_size);
    let oracle_size = brute.as_ref().map(Tree::size);
    let result = tool(inst);
    let comparison = match &result {
        Err(e) => Comparison::Mismatch { reason: format!("tool error: {e}") },
        Ok(r) => compare(inst, r, oracle_size, max_size),
    };
    let (tool_verdict, tool_size) = match &result {
        Ok(r) => (Some(r.verdict), r.size),
        Err(_) => (None, None),
    };
    OracleReport {
        id: id.to_string(),
        tool_verdict,
        tool_size,
        oracle_size,
        max_size,
        agree: !matches!(comparison, Comparison::Mismatch { .. }),
        comparison,
        millis: start.elapsed().as_millis(),
    }
}

fn compare(inst: &ProblemInstance, r: &SynthResult, oracle_size: Option<usize>, max_size: usize) -> Comparison {
    let mismatch = |reason: &str| Comparison::Mismatch { reason: reason.to_string() };
    match r.verdict {
        Verdict::BudgetExceeded => Comparison::Exhausted,
        Verdict::Unrealizable => match oracle_size {
            None => Comparison::NoneWithinBound,
            Some(s) => Comparison::Mismatch { reason: format!("unrealizable, but a solution of size {s} exists") },
        },
        Verdict::Realizable => {
            let Some(w) = &r.witness else { return mismatch("realizable without a witness") };
            if r.size != Some(w.size()) {
                return mismatch("reported size differs from the witness size");
            }
            if !verify_result(inst, w) {
                return mismatch("witness fails verification");
            }
            match oracle_size {
                Some(s) if s == w.size() => Comparison::SameSize { size: s },
                Some(s) => Comparison::Mismatch {
                    reason: format!("witness of size {} but brute force finds size {s}", w.size()),
                },
                None if w.size() > max_size => Comparison::BeyondBound { tool_size: w.size() },
                None => mismatch("brute force misses a witness within the bound"),
            }
        }
    }
}

/// A tool that reports the opposite of the real pipeline; the harness must
/// flag it.
pub fn corrupted_tool(inst: &ProblemInstance) -> Result<SynthResult, SynthError> {
    let mut r = synthesize(inst)?;
    match r.verdict {
        Verdict::Realizable => {
            r.verdict = Verdict::Unrealizable;
            r.witness = None;
            r.size = None;
        }
        Verdict::Unrealizable => {
            let any = enumerate(&inst.grammar, 9).into_iter().next();
            r.verdict = Verdict::Realizable;
            r.size = any.as_ref().map(Tree::size);
            r.witness = any;
        }
        Verdict::BudgetExceeded => {}
    }
    Ok(r)
}

/// Reports for `count` random instances drawn from `seed`.
pub fn run_suite(seed: u64, count: usize, max_size: usize, config: &GenConfig, tool: Tool) -> Vec<OracleReport> {
    (0..count)
        .map(|i| {
            let inst = random_instance(seed, i as u64, config);
            cross_check_with(&inst, &format!("{seed}:{i}"), max_size, tool)
        })
        .collect()
}

/// Whether no tree with fewer than `size` nodes solves the instance.
///
/// Plain enumeration is used when the grammar defines symbols; otherwise
/// [`smallest_solution`] reaches much larger bounds.
pub fn nothing_smaller(inst: &ProblemInstance, size: usize) -> bool {
    match smallest_solution(inst, size.saturating_sub(1)) {
        Ok(found) => found.is_none(),
        Err(OracleError::Definitions) => brute_force_separator(inst, size.saturating_sub(1)).is_none(),
    }
}

/// The smallest solution with at most `max_size` nodes, found by enumerating
/// the grammar up to observational equivalence.
///
/// Two trees derived from the same nonterminal, with the same free
/// variables and the same three-valued value under every partial assignment
/// on every structure, can replace each other in any context. Keeping one
/// representative per such class, in order of size, preserves the size of
/// the smallest solution. Grammars with recursive definitions are refused,
/// since a body's value depends on the defined symbol.
pub fn smallest_solution(inst: &ProblemInstance, max_size: usize) -> Result<Option<Tree>, OracleError> {
    let g = normalize(&inst.grammar);
    if g.productions.iter().any(|p| defines(&p.symbol)) {
        return Err(OracleError::Definitions);
    }
    // A tree's value depends only on its free variables, so it is tabulated
    // over partial assignments to those alone.
    let mut frames: HashMap<BTreeSet<String>, Vec<Vec<Assignment>>> = HashMap::new();
    let mut meaning = |t: &Tree| -> (BTreeSet<String>, Vec<Value3>) {
        let free = t.free_vars();
        let per_structure = frames.entry(free.clone()).or_insert_with(|| {
            inst.structures
                .iter()
                .map(|a| {
                    all_tuples(a.size() + 1, free.len())
                        .into_iter()
                        .map(|t| {
                            let bound = free.iter().zip(t).filter(|(_, e)| (*e as usize) < a.size());
                            Assignment::from_pairs(bound.map(|(v, e)| (v.as_str(), e)))
                        })
                        .collect()
                })
                .collect()
        });
        let mut values = Vec::new();
        for (a, gammas) in inst.structures.iter().zip(per_structure.iter()) {
            values.extend(gammas.iter().map(|gamma| eval_fun3(a, gamma, &Env3::empty(), t)));
        }
        (free, values)
    };
    let nts = g.nonterminals.len();
    // reps[size][nt]: one representative per new class, in canonical order.
    let mut reps: Vec<Vec<Vec<Tree>>> = vec![vec![Vec::new(); nts]];
    let mut seen: Vec<HashSet<(BTreeSet<String>, Vec<Value3>)>> = vec![HashSet::new(); nts];
    for size in 1..=max_size {
        let mut level: Vec<BTreeSet<Tree>> = vec![BTreeSet::new(); nts];
        for p in &g.productions {
            for kids in combinations(&reps, &p.children, size - 1) {
                level[p.lhs].insert(Tree::new(p.symbol.clone(), kids));
            }
        }
        let mut fresh = vec![Vec::new(); nts];
        for (nt, trees) in level.into_iter().enumerate() {
            for t in trees {
                if seen[nt].insert(meaning(&t)) {
                    fresh[nt].push(t);
                }
            }
        }
        if let Some(t) = fresh[g.axiom].iter().find(|t| solves(inst, t)) {
            return Ok(Some(t.clone()));
        }
        reps.push(fresh);
    }
    Ok(None)
}

fn defines(s: &Symbol) -> bool {
    matches!(s, Symbol::LetRel { .. } | Symbol::LetFun { .. } | Symbol::UseRel { .. } | Symbol::UseFun { .. })
}

/// Every choice of representatives for `children` whose sizes sum to `total`.
fn combinations(reps: &[Vec<Vec<Tree>>], children: &[usize], total: usize) -> Vec<Vec<Tree>> {
    fn go(reps: &[Vec<Vec<Tree>>], children: &[usize], left: usize, pick: &mut Vec<Tree>, out: &mut Vec<Vec<Tree>>) {
        let i = pick.len();
        if i == children.len() {
            if left == 0 {
                out.push(pick.clone());
            }
            return;
        }
        let rest = children.len() - i - 1;
        for s in 1..=left.saturating_sub(rest).min(reps.len() - 1) {
            for t in &reps[s][children[i]] {
                pick.push(t.clone());
                go(reps, children, left - s, pick, out);
                pick.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(reps, children, total, &mut Vec::new(), &mut out);
    out
}

/// Reports as line-delimited JSON.
pub fn reports_to_lines(reports: &[OracleReport]) -> String {
    reports.iter().map(|r| serde_json::to_string(r).expect("report serializes") + "\n").collect()
}

#[cfg(test)]
mod tests;
