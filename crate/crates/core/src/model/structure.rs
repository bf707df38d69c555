//! Finite structures over a [`Signature`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rustc_hash::FxHashMap;

use super::signature::Signature;
use super::ModelError;

/// Domain elements are dense ids `0..n`.
pub type Elem = u32;
pub type Tuple = Vec<Elem>;
pub type Relation = BTreeSet<Tuple>;

/// Interpretation of a function symbol as a (possibly partial) graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FunctionTable {
    pub partial: bool,
    pub graph: BTreeMap<Tuple, Elem>,
}

/// What a structure is labeled with in a learning instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Label {
    #[default]
    None,
    Pos,
    Neg,
    Answers(BTreeSet<Tuple>),
}

#[derive(Debug, Default)]
struct Index {
    rel_slot: FxHashMap<String, usize>,
    rels: Vec<(usize, Vec<bool>)>,
    fun_slot: FxHashMap<String, usize>,
    funs: Vec<(usize, Vec<Option<Elem>>)>,
}

#[derive(Debug, Default)]
pub struct Structure {
    signature: Signature,
    size: usize,
    names: Vec<String>,
    relations: BTreeMap<String, Relation>,
    functions: BTreeMap<String, FunctionTable>,
    pub label: Label,
    index: OnceLock<Index>,
}

impl Clone for Structure {
    fn clone(&self) -> Self {
        Structure {
            signature: self.signature.clone(),
            size: self.size,
            names: self.names.clone(),
            relations: self.relations.clone(),
            functions: self.functions.clone(),
            label: self.label.clone(),
            index: OnceLock::new(),
        }
    }
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
            && self.size == other.size
            && self.names == other.names
            && self.relations == other.relations
            && self.functions == other.functions
            && self.label == other.label
    }
}

impl Eq for Structure {}

impl Structure {
    /// A structure with `n` elements named `0..n` and empty interpretations.
    pub fn new(signature: Signature, n: usize) -> Self {
        let names = (0..n).map(|i| i.to_string()).collect();
        Self::with_names(signature, names)
    }

    pub fn with_names(signature: Signature, names: Vec<String>) -> Self {
        let relations = signature.relations.keys().map(|r| (r.clone(), Relation::new())).collect();
        let functions = signature.functions.keys().map(|f| (f.clone(), FunctionTable::default())).collect();
        Structure {
            size: names.len(),
            signature,
            names,
            relations,
            functions,
            label: Label::None,
            index: OnceLock::new(),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size as Elem
    }

    pub fn name_of(&self, e: Elem) -> &str {
        &self.names[e as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn elem(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name).map(|i| i as Elem)
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn functions(&self) -> &BTreeMap<String, FunctionTable> {
        &self.functions
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn add_tuple(&mut self, rel: &str, tuple: &[Elem]) -> &mut Self {
        self.index = OnceLock::new();
        self.relations.entry(rel.to_string()).or_default().insert(tuple.to_vec());
        self
    }

    /// Adds `(a,b)` and `(b,a)`.
    pub fn add_edge_sym(&mut self, rel: &str, a: Elem, b: Elem) -> &mut Self {
        self.add_tuple(rel, &[a, b]);
        self.add_tuple(rel, &[b, a])
    }

    pub fn set_value(&mut self, fun: &str, args: &[Elem], value: Elem) -> &mut Self {
        self.index = OnceLock::new();
        self.functions.entry(fun.to_string()).or_default().graph.insert(args.to_vec(), value);
        self
    }

    pub fn set_constant(&mut self, name: &str, value: Elem) -> &mut Self {
        self.set_value(name, &[], value)
    }

    pub fn set_partial(&mut self, fun: &str, partial: bool) -> &mut Self {
        self.index = OnceLock::new();
        self.functions.entry(fun.to_string()).or_default().partial = partial;
        self
    }

    pub fn constant(&self, name: &str) -> Option<Elem> {
        self.apply(name, &[])
    }

    fn index(&self) -> &Index {
        self.index.get_or_init(|| {
            let n = self.size;
            let mut ix = Index::default();
            for (name, tuples) in &self.relations {
                let r =
                    self.signature.relation_arity(name).unwrap_or_else(|| tuples.iter().next().map_or(0, |t| t.len()));
                let mut bits = vec![false; n.pow(r as u32)];
                for t in tuples {
                    if t.len() == r && t.iter().all(|&e| (e as usize) < n) {
                        bits[encode(t, n)] = true;
                    }
                }
                ix.rel_slot.insert(name.clone(), ix.rels.len());
                ix.rels.push((r, bits));
            }
            for (name, table) in &self.functions {
                let d = self
                    .signature
                    .function_arity(name)
                    .unwrap_or_else(|| table.graph.keys().next().map_or(0, |t| t.len()));
                let mut vals = vec![None; n.pow(d as u32)];
                for (args, &val) in &table.graph {
                    if args.len() == d && args.iter().all(|&e| (e as usize) < n) {
                        vals[encode(args, n)] = Some(val);
                    }
                }
                ix.fun_slot.insert(name.clone(), ix.funs.len());
                ix.funs.push((d, vals));
            }
            ix
        })
    }

    /// Membership test; `None` if the relation is unknown or the arity is off.
    pub fn holds(&self, rel: &str, tuple: &[Elem]) -> Option<bool> {
        let ix = self.index();
        let &(r, ref bits) = ix.rels.get(*ix.rel_slot.get(rel)?)?;
        if r != tuple.len() {
            return None;
        }
        Some(bits[encode(tuple, self.size)])
    }

    /// Function application; `None` if undefined (or unknown).
    pub fn apply(&self, fun: &str, args: &[Elem]) -> Option<Elem> {
        let ix = self.index();
        let &(d, ref vals) = ix.funs.get(*ix.fun_slot.get(fun)?)?;
        if d != args.len() {
            return None;
        }
        vals[encode(args, self.size)]
    }

    pub fn knows_function(&self, fun: &str) -> bool {
        self.functions.contains_key(fun)
    }

    /// All tuples of `dom^r` in lexicographic order.
    pub fn tuples(&self, r: usize) -> Vec<Tuple> {
        all_tuples(self.size, r)
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.signature.validate()?;
        if self.size == 0 {
            return Err(ModelError::EmptyDomain);
        }
        let distinct: BTreeSet<&String> = self.names.iter().collect();
        if distinct.len() != self.names.len() {
            return Err(ModelError::DuplicateElement);
        }
        for (name, tuples) in &self.relations {
            let r = self.signature.relation_arity(name).ok_or_else(|| ModelError::UnknownSymbol(name.clone()))?;
            for t in tuples {
                self.check_tuple(name, r, t)?;
            }
        }
        for (name, table) in &self.functions {
            let d = self.signature.function_arity(name).ok_or_else(|| ModelError::UnknownSymbol(name.clone()))?;
            for (args, &val) in &table.graph {
                self.check_tuple(name, d, args)?;
                if val as usize >= self.size {
                    return Err(ModelError::ElementOutOfRange { symbol: name.clone(), elem: val });
                }
            }
            if d == 0 && table.graph.is_empty() {
                return Err(ModelError::UndefinedConstant(name.clone()));
            }
            let total = table.graph.len() == self.size.pow(d as u32);
            if !total {
                if !table.partial {
                    return Err(ModelError::FunctionNotTotal(name.clone()));
                }
                if !self.signature.partial_functions_allowed {
                    return Err(ModelError::PartialNotAllowed(name.clone()));
                }
            }
        }
        for name in self.signature.functions.keys() {
            if !self.functions.contains_key(name) {
                return Err(ModelError::MissingInterpretation(name.clone()));
            }
        }
        if let Label::Answers(ans) = &self.label {
            let mut arities = ans.iter().map(|t| t.len()).collect::<BTreeSet<_>>();
            if arities.len() > 1 {
                return Err(ModelError::AnswerArity);
            }
            if let Some(r) = arities.pop_first() {
                for t in ans {
                    self.check_tuple("answer set", r, t)?;
                }
            }
        }
        Ok(())
    }

    fn check_tuple(&self, name: &str, arity: usize, t: &[Elem]) -> Result<(), ModelError> {
        if t.len() != arity {
            return Err(ModelError::ArityMismatch { symbol: name.to_string(), expected: arity, found: t.len() });
        }
        if let Some(&e) = t.iter().find(|&&e| e as usize >= self.size) {
            return Err(ModelError::ElementOutOfRange { symbol: name.to_string(), elem: e });
        }
        Ok(())
    }

    /// True when some function symbol is interpreted partially.
    pub fn has_partial_functions(&self) -> bool {
        self.functions.iter().any(|(name, t)| {
            let d = self.signature.function_arity(name).unwrap_or(0);
            t.graph.len() != self.size.pow(d as u32)
        })
    }
}

pub(crate) fn encode(t: &[Elem], n: usize) -> usize {
    t.iter().fold(0usize, |acc, &e| acc * n + e as usize)
}

/// All tuples of `[0,n)^r` in lexicographic order.
pub fn all_tuples(n: usize, r: usize) -> Vec<Tuple> {
    let mut out = vec![Vec::with_capacity(r)];
    for _ in 0..r {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for e in 0..n as Elem {
                let mut t2 = t.clone();
                t2.push(e);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}
