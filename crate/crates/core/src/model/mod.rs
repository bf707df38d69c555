//! Signatures, finite structures, formula and term trees, and the direct
//! reference semantics (classical, least fixpoint, and 3-valued).

pub mod eval;
pub mod eval3;
pub mod logic;
pub mod signature;
pub mod structure;
pub mod symbol;
pub mod tree;

use std::collections::BTreeMap;

use thiserror::Error;

pub use eval::{check_positivity, compute_lfp, eval_fo, eval_folfp, kleene_stages, RelEnv};
pub use eval3::{compute_lfp_fun, eval_fun3, eval_term3, Env3, Truth3, Value3};
pub use logic::{Encoding, Logic, LogicKind};
pub use signature::Signature;
pub use structure::{all_tuples, Elem, FunctionTable, Label, Relation, Structure, Tuple};
pub use symbol::{Arg, AtomArgs, Sort, Symbol};
pub use tree::Tree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` expects {expected} arguments, found {found}")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("`{symbol}` mentions element {elem} outside the domain")]
    ElementOutOfRange { symbol: String, elem: Elem },
    #[error("function `{0}` is not total and not marked partial")]
    FunctionNotTotal(String),
    #[error("function `{0}` is partial but the signature forbids partial functions")]
    PartialNotAllowed(String),
    #[error("constant `{0}` has no value")]
    UndefinedConstant(String),
    #[error("no interpretation for `{0}`")]
    MissingInterpretation(String),
    #[error("domain must be nonempty")]
    EmptyDomain,
    #[error("element names must be distinct")]
    DuplicateElement,
    #[error("answer-set tuples must share one arity")]
    AnswerArity,
    #[error("{0}")]
    NotInLogic(String),
    #[error("sort mismatch below `{0}`")]
    SortMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("symbol `{0}` is not in the structure's signature")]
    SymbolUnknown(String),
    #[error("relation `{0}` used outside any definition")]
    UndefinedRelation(String),
    #[error("function `{0}` used outside any definition")]
    UndefinedFunction(String),
    #[error("definition of `{0}` is not positive")]
    NotPositive(String),
    #[error("function `{0}` is undefined on its arguments")]
    PartialFunction(String),
    #[error("`{0}` is not supported by this evaluator")]
    Unsupported(String),
    #[error("arity mismatch at `{0}`")]
    Arity(String),
}

/// A partial map from variable names to elements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(BTreeMap<String, Elem>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Elem)>) -> Self {
        Assignment(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn get(&self, var: &str) -> Option<Elem> {
        self.0.get(var).copied()
    }

    pub fn set(&mut self, var: &str, e: Elem) {
        self.0.insert(var.to_string(), e);
    }

    pub fn with(&self, var: &str, e: Elem) -> Self {
        let mut g = self.clone();
        g.set(var, e);
        g
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Elem)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}
