//! JSON files for structures and results.
//!
//! A structure file holds one structure object or an array of them:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "signature": { "relations": {"E": 2}, "functions": {"f": 1}, "constants": ["s"] },
//!   "elements": ["a", "b", "c"],
//!   "relations": { "E": [["a", "b"], ["b", "c"]] },
//!   "symmetric": ["E"],
//!   "functions": { "f": { "partial": true, "graph": [[["a"], "b"]] } },
//!   "constants": { "s": "a" },
//!   "label": "pos"
//! }
//! ```
//!
//! `domain_size` may replace `elements`, naming elements `0..n`. Element
//! references are names or dense ids. Relations listed in `symmetric` get
//! both orientations of every tuple. Instead of `label`, a structure may
//! carry `answer_set` (a list of tuples) or `io` (input and output constant
//! names for term synthesis).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::model::{Elem, Label, Signature, Structure, Tree};
use crate::syntax::{pretty, to_prefix, to_sexpr};
use crate::synthesis::{SynthResult, SynthStats, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("structure {index}: {msg}")]
    Invalid { index: usize, msg: String },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SignatureBlock {
    #[serde(default)]
    pub relations: BTreeMap<String, usize>,
    #[serde(default)]
    pub functions: BTreeMap<String, usize>,
    #[serde(default)]
    pub constants: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FunctionBlock {
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub partial: bool,
    pub graph: Vec<(Vec<Value>, Value)>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IoBlock {
    #[serde(default)]
    pub inputs: Vec<String>,
    pub output: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub signature: SignatureBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_size: Option<usize>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<Value>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symmetric: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, FunctionBlock>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_set: Option<Vec<Vec<Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub io: Option<IoBlock>,
}

/// A loaded structure with its term-synthesis roles, if any.
#[derive(Clone, Debug)]
pub struct LoadedStructure {
    pub structure: Structure,
    pub io: Option<IoBlock>,
}

fn elem(names: &[String], v: &Value) -> Result<Elem, String> {
    match v {
        Value::String(s) => {
            names.iter().position(|n| n == s).map(|i| i as Elem).ok_or_else(|| format!("unknown element `{s}`"))
        }
        Value::Number(n) => match n.as_u64() {
            Some(i) if (i as usize) < names.len() => Ok(i as Elem),
            _ => Err(format!("element id {n} out of range")),
        },
        other => Err(format!("bad element reference {other}")),
    }
}

fn tuple(names: &[String], vs: &[Value]) -> Result<Vec<Elem>, String> {
    vs.iter().map(|v| elem(names, v)).collect()
}

impl StructureFile {
    pub fn to_structure(&self) -> Result<LoadedStructure, String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!("unsupported schema_version {}", self.schema_version));
        }
        let names: Vec<String> = match (&self.elements, self.domain_size) {
            (Some(e), None) => e.clone(),
            (None, Some(n)) => (0..n).map(|i| i.to_string()).collect(),
            (Some(_), Some(_)) => return Err("give either `elements` or `domain_size`, not both".into()),
            (None, None) => return Err("missing `elements` or `domain_size`".into()),
        };
        let mut sig = Signature::new();
        for (r, &a) in &self.signature.relations {
            sig = sig.with_relation(r, a);
        }
        for (f, &a) in &self.signature.functions {
            sig = sig.with_function(f, a);
        }
        for c in &self.signature.constants {
            sig = sig.with_constant(c);
        }
        sig.partial_functions_allowed = self.functions.values().any(|f| f.partial);
        let mut a = Structure::with_names(sig.clone(), names.clone());
        for (r, tuples) in &self.relations {
            if sig.relation_arity(r).is_none() {
                return Err(format!("relation `{r}` is not in the signature"));
            }
            let sym = self.symmetric.contains(r);
            for t in tuples {
                let t = tuple(&names, t)?;
                a.add_tuple(r, &t);
                if sym {
                    let rev: Vec<Elem> = t.iter().rev().copied().collect();
                    a.add_tuple(r, &rev);
                }
            }
        }
        if let Some(r) = self.symmetric.iter().find(|r| sig.relation_arity(r) != Some(2)) {
            return Err(format!("symmetric relation `{r}` must be binary"));
        }
        for (f, block) in &self.functions {
            if sig.function_arity(f).is_none() {
                return Err(format!("function `{f}` is not in the signature"));
            }
            for (args, val) in &block.graph {
                a.set_value(f, &tuple(&names, args)?, elem(&names, val)?);
            }
            a.set_partial(f, block.partial);
        }
        for (c, v) in &self.constants {
            if !sig.is_constant(c) {
                return Err(format!("constant `{c}` is not in the signature"));
            }
            a.set_constant(c, elem(&names, v)?);
        }
        let labels = [self.label.is_some(), self.answer_set.is_some()].iter().filter(|&&b| b).count();
        if labels > 1 {
            return Err("a structure carries at most one of `label` and `answer_set`".into());
        }
        a.label = match (&self.label, &self.answer_set) {
            (Some(l), _) => match l.as_str() {
                "pos" => Label::Pos,
                "neg" => Label::Neg,
                other => return Err(format!("label must be \"pos\" or \"neg\", found \"{other}\"")),
            },
            (None, Some(ans)) => {
                Label::Answers(ans.iter().map(|t| tuple(&names, t)).collect::<Result<BTreeSet<_>, _>>()?)
            }
            (None, None) => Label::None,
        };
        if let Some(io) = &self.io {
            for c in io.inputs.iter().chain(std::iter::once(&io.output)) {
                if a.constant(c).is_none() {
                    return Err(format!("io constant `{c}` is not interpreted"));
                }
            }
        }
        a.validate().map_err(|e| e.to_string())?;
        Ok(LoadedStructure { structure: a, io: self.io.clone() })
    }

    pub fn from_structure(a: &Structure, io: Option<&IoBlock>) -> Self {
        let sig = a.signature();
        let name = |e: Elem| Value::String(a.name_of(e).to_string());
        let mut out = StructureFile {
            schema_version: SCHEMA_VERSION,
            signature: SignatureBlock {
                relations: sig.relations.clone(),
                functions: sig.functions.iter().filter(|(_, &ar)| ar > 0).map(|(n, &ar)| (n.clone(), ar)).collect(),
                constants: sig.constants().map(str::to_string).collect(),
            },
            elements: Some(a.names().to_vec()),
            io: io.cloned(),
            ..Default::default()
        };
        for (r, tuples) in a.relations() {
            out.relations.insert(r.clone(), tuples.iter().map(|t| t.iter().map(|&e| name(e)).collect()).collect());
        }
        for (f, table) in a.functions() {
            if sig.is_constant(f) {
                if let Some(&v) = table.graph.get(&Vec::new()) {
                    out.constants.insert(f.clone(), name(v));
                }
                continue;
            }
            out.functions.insert(
                f.clone(),
                FunctionBlock {
                    partial: table.partial,
                    graph: table.graph.iter().map(|(k, &v)| (k.iter().map(|&e| name(e)).collect(), name(v))).collect(),
                },
            );
        }
        match &a.label {
            Label::Pos => out.label = Some("pos".into()),
            Label::Neg => out.label = Some("neg".into()),
            Label::Answers(ans) => {
                out.answer_set = Some(ans.iter().map(|t| t.iter().map(|&e| name(e)).collect()).collect())
            }
            Label::None => {}
        }
        out
    }
}

/// Parses a structure file: one object or an array of objects.
pub fn load_structures(text: &str) -> Result<Vec<LoadedStructure>, IoError> {
    let v: Value = serde_json::from_str(text)?;
    let items = match v {
        Value::Array(items) => items,
        other => vec![other],
    };
    items
        .into_iter()
        .enumerate()
        .map(|(index, item)| {
            let file: StructureFile = serde_json::from_value(item)?;
            file.to_structure().map_err(|msg| IoError::Invalid { index, msg })
        })
        .collect()
}

pub fn structures_to_json(items: &[LoadedStructure]) -> String {
    let files: Vec<StructureFile> =
        items.iter().map(|l| StructureFile::from_structure(&l.structure, l.io.as_ref())).collect();
    serde_json::to_string_pretty(&files).expect("serializable")
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResultFile {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub problem: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sexpr: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pretty: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    pub stats: SynthStats,
    pub instance_digest: String,
}

impl ResultFile {
    /// Wall time is dropped unless `timings` is set, so repeated runs give
    /// identical files.
    pub fn new(problem: &str, r: &SynthResult, digest: String, timings: bool) -> Self {
        let mut stats = r.stats.clone();
        if !timings {
            stats.millis = 0;
        }
        let w: Option<&Tree> = r.witness.as_ref();
        ResultFile {
            schema_version: SCHEMA_VERSION,
            tool: "fvl".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            problem: problem.into(),
            verdict: r.verdict,
            formula: w.map(to_prefix),
            sexpr: w.map(to_sexpr),
            pretty: w.map(pretty),
            size: r.size,
            stats,
            instance_digest: digest,
        }
    }
}

/// 64-bit FNV-1a over the given parts, as 16 hex digits.
pub fn digest<'a>(parts: impl IntoIterator<Item = &'a str>) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in parts {
        for b in p.bytes().chain(std::iter::once(0)) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"[
      {"schema_version": 1, "signature": {"relations": {"E": 2}, "constants": ["s"]},
       "elements": ["a", "b", "c"], "relations": {"E": [["a", "b"], [1, 2]]}, "symmetric": ["E"],
       "constants": {"s": "c"}, "label": "pos"},
      {"schema_version": 1, "signature": {"functions": {"f": 1}}, "domain_size": 2,
       "functions": {"f": {"partial": true, "graph": [[[0], 1]]}}, "answer_set": [[0]]}
    ]"#;

    #[test]
    fn loads_and_round_trips() {
        let items = load_structures(SAMPLE).unwrap();
        let a = &items[0].structure;
        assert_eq!(a.size(), 3);
        assert_eq!(a.holds("E", &[1, 0]), Some(true));
        assert_eq!(a.holds("E", &[2, 1]), Some(true));
        assert_eq!(a.constant("s"), Some(2));
        assert_eq!(a.label, Label::Pos);
        let b = &items[1].structure;
        assert_eq!(b.apply("f", &[1]), None);
        assert_eq!(b.label, Label::Answers(BTreeSet::from([vec![0]])));
        let again = load_structures(&structures_to_json(&items)).unwrap();
        for (x, y) in items.iter().zip(&again) {
            assert_eq!(x.structure, y.structure);
        }
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(load_structures("{"), Err(IoError::Json(_))));
        let bad = r#"{"schema_version": 1, "signature": {"relations": {"E": 2}}, "domain_size": 2,
                      "relations": {"E": [["0", "7"]]}}"#;
        assert!(matches!(load_structures(bad), Err(IoError::Invalid { .. })));
        let unlabeled = r#"{"schema_version": 2, "signature": {}, "domain_size": 1}"#;
        assert!(load_structures(unlabeled).is_err());
        let total = r#"{"schema_version": 1, "signature": {"functions": {"f": 1}}, "domain_size": 2,
                        "functions": {"f": {"graph": [[[0], 1]]}}}"#;
        assert!(load_structures(total).is_err());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(["a", "b"]), digest(["a", "b"]));
        assert_ne!(digest(["ab"]), digest(["a", "b"]));
    }
}
