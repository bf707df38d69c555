//! Monotone Boolean functions as antichains of minterms.
//!
//! A function is the disjunction of its terms, each term the conjunction of
//! its variables. Terms are sorted, and no term contains another, so equal
//! functions have equal representations.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono {
    terms: Vec<Box<[u32]>>,
}

impl Mono {
    pub fn falsum() -> Self {
        Mono { terms: Vec::new() }
    }

    pub fn verum() -> Self {
        Mono { terms: vec![Box::new([])] }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Self::verum()
        } else {
            Self::falsum()
        }
    }

    pub fn var(v: u32) -> Self {
        Mono { terms: vec![Box::new([v])] }
    }

    pub fn is_false(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].is_empty()
    }

    pub fn terms(&self) -> &[Box<[u32]>] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Every variable mentioned.
    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.iter().flat_map(|t| t.iter().copied())
    }

    pub fn or(&self, other: &Mono) -> Mono {
        if self.is_false() || other.is_true() {
            return other.clone();
        }
        if other.is_false() || self.is_true() {
            return self.clone();
        }
        if self.implies(other) {
            return other.clone();
        }
        if other.implies(self) {
            return self.clone();
        }
        let mut terms: Vec<Box<[u32]>> = self.terms.iter().chain(other.terms.iter()).cloned().collect();
        minimize(&mut terms);
        Mono { terms }
    }

    pub fn and(&self, other: &Mono) -> Mono {
        if self.is_false() || other.is_true() {
            return self.clone();
        }
        if other.is_false() || self.is_true() {
            return other.clone();
        }
        if self.implies(other) {
            return self.clone();
        }
        if other.implies(self) {
            return other.clone();
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(union(a, b));
            }
        }
        // Products of antichains over disjoint variables are antichains.
        let (mut va, mut vb): (Vec<u32>, Vec<u32>) = (self.vars().collect(), other.vars().collect());
        va.sort_unstable();
        va.dedup();
        vb.sort_unstable();
        vb.dedup();
        if disjoint(&va, &vb) {
            terms.sort();
        } else {
            minimize(&mut terms);
        }
        Mono { terms }
    }

    /// Replaces each variable by a function.
    pub fn compose(&self, f: &mut impl FnMut(u32) -> Mono) -> Mono {
        let mut vars: Vec<u32> = self.vars().collect();
        vars.sort_unstable();
        vars.dedup();
        let images: Vec<Mono> = vars.iter().map(|&v| f(v)).collect();
        let image = |v: u32| &images[vars.binary_search(&v).unwrap()];
        // A renaming that is injective on the variables keeps the antichain.
        let single: Option<Vec<u32>> =
            images.iter().map(|m| (m.terms.len() == 1 && m.terms[0].len() == 1).then(|| m.terms[0][0])).collect();
        if let Some(targets) = single {
            let mut sorted = targets.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() == targets.len() {
                let mut terms: Vec<Box<[u32]>> = self
                    .terms
                    .iter()
                    .map(|t| {
                        let mut v: Vec<u32> = t.iter().map(|&x| image(x).terms[0][0]).collect();
                        v.sort_unstable();
                        v.into_boxed_slice()
                    })
                    .collect();
                terms.sort();
                return Mono { terms };
            }
        }
        let mut all: Vec<Box<[u32]>> = Vec::new();
        for t in &self.terms {
            let mut conj = Mono::verum();
            for &v in t.iter() {
                conj = conj.and(image(v));
                if conj.is_false() {
                    break;
                }
            }
            if conj.is_true() {
                return conj;
            }
            all.extend(conj.terms);
        }
        minimize(&mut all);
        Mono { terms: all }
    }

    /// Whether `self` entails `other`: every term of `self` contains some
    /// term of `other`.
    pub fn implies(&self, other: &Mono) -> bool {
        self.terms.iter().all(|t| other.terms.iter().any(|u| subset(u, t)))
    }

    pub fn eval(&self, val: &mut impl FnMut(u32) -> bool) -> bool {
        self.terms.iter().any(|t| t.iter().all(|&v| val(v)))
    }

    /// Renames variables through a map; the result is re-normalized.
    pub fn rename(&self, f: &mut impl FnMut(u32) -> u32) -> Mono {
        let mut terms: Vec<Box<[u32]>> = self
            .terms
            .iter()
            .map(|t| {
                let mut v: Vec<u32> = t.iter().map(|&x| f(x)).collect();
                v.sort_unstable();
                v.dedup();
                v.into_boxed_slice()
            })
            .collect();
        minimize(&mut terms);
        Mono { terms }
    }
}

fn union(a: &[u32], b: &[u32]) -> Box<[u32]> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out.into_boxed_slice()
}

fn subset(a: &[u32], b: &[u32]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

fn disjoint(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

fn signature(t: &[u32]) -> u64 {
    t.iter().fold(0, |acc, &v| acc | 1u64 << (v.wrapping_mul(0x9e37_79b9) >> 26))
}

fn minimize(terms: &mut Vec<Box<[u32]>>) {
    terms.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    terms.dedup();
    let mut keep: Vec<(u64, Box<[u32]>)> = Vec::with_capacity(terms.len());
    for t in terms.drain(..) {
        let sig = signature(&t);
        if !keep.iter().any(|(ks, k)| ks & !sig == 0 && subset(k, &t)) {
            keep.push((sig, t));
        }
    }
    let mut out: Vec<Box<[u32]>> = keep.into_iter().map(|(_, t)| t).collect();
    out.sort();
    *terms = out;
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_false() {
            return f.write_str("⊥");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                if t.is_empty() {
                    "⊤".to_string()
                } else {
                    t.iter().map(|v| format!("v{v}")).collect::<Vec<_>>().join("∧")
                }
            })
            .collect();
        f.write_str(&parts.join(" ∨ "))
    }
}
