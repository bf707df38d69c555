//! Signatures: relation and function symbols with arities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub relations: BTreeMap<String, usize>,
    /// Constants are functions of arity 0.
    pub functions: BTreeMap<String, usize>,
    #[serde(default)]
    pub partial_functions_allowed: bool,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Self {
        self.relations.insert(name.into(), arity);
        self
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Self {
        self.functions.insert(name.into(), arity);
        self
    }

    pub fn with_constant(self, name: &str) -> Self {
        self.with_function(name, 0)
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).copied()
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.functions.get(name) == Some(&0)
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.functions.iter().filter(|(_, &a)| a == 0).map(|(n, _)| n.as_str())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for name in self.relations.keys() {
            if self.functions.contains_key(name) {
                return Err(ModelError::DuplicateSymbol(name.clone()));
            }
        }
        Ok(())
    }

    /// True when every symbol of `self` occurs in `other` with the same arity.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.relations.iter().all(|(n, a)| other.relations.get(n) == Some(a))
            && self.functions.iter().all(|(n, a)| other.functions.get(n) == Some(a))
    }
}
