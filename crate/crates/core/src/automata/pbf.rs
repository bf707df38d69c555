//! Positive Boolean formulas over `(state, direction)` atoms.

use std::collections::BTreeSet;
use std::fmt;

/// Direction of an atom: `-1` parent, `0` stay, `1..=κ` children.
pub type Dir = i32;

pub const UP: Dir = -1;
pub const STAY: Dir = 0;

/// A negation-free formula. The smart constructors [`Pbf::and`] and
/// [`Pbf::or`] flatten nested connectives and fold constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pbf<S> {
    True,
    False,
    Atom(S, Dir),
    And(Vec<Pbf<S>>),
    Or(Vec<Pbf<S>>),
}

impl<S: Clone> Pbf<S> {
    pub fn atom(s: S, d: Dir) -> Self {
        Pbf::Atom(s, d)
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Pbf::True
        } else {
            Pbf::False
        }
    }

    pub fn and(parts: impl IntoIterator<Item = Pbf<S>>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Pbf::True => {}
                Pbf::False => return Pbf::False,
                Pbf::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Pbf::True,
            1 => out.pop().unwrap(),
            _ => Pbf::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Pbf<S>>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Pbf::False => {}
                Pbf::True => return Pbf::True,
                Pbf::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Pbf::False,
            1 => out.pop().unwrap(),
            _ => Pbf::Or(out),
        }
    }

    pub fn and2(a: Pbf<S>, b: Pbf<S>) -> Self {
        Pbf::and([a, b])
    }

    pub fn or2(a: Pbf<S>, b: Pbf<S>) -> Self {
        Pbf::or([a, b])
    }

    /// Evaluates under a valuation of the atoms.
    pub fn eval(&self, val: &mut impl FnMut(&S, Dir) -> bool) -> bool {
        match self {
            Pbf::True => true,
            Pbf::False => false,
            Pbf::Atom(s, d) => val(s, *d),
            Pbf::And(ps) => ps.iter().all(|p| p.eval(val)),
            Pbf::Or(ps) => ps.iter().any(|p| p.eval(val)),
        }
    }

    /// Replaces atoms by formulas and simplifies.
    pub fn substitute<T: Clone>(&self, f: &mut impl FnMut(&S, Dir) -> Pbf<T>) -> Pbf<T> {
        match self {
            Pbf::True => Pbf::True,
            Pbf::False => Pbf::False,
            Pbf::Atom(s, d) => f(s, *d),
            Pbf::And(ps) => Pbf::and(ps.iter().map(|p| p.substitute(f))),
            Pbf::Or(ps) => Pbf::or(ps.iter().map(|p| p.substitute(f))),
        }
    }

    pub fn map<T: Clone>(&self, f: &mut impl FnMut(&S) -> T) -> Pbf<T> {
        self.substitute(&mut |s, d| Pbf::Atom(f(s), d))
    }

    pub fn atoms(&self) -> Vec<(S, Dir)> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |s, d| out.push((s.clone(), d)));
        out
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&S, Dir)) {
        match self {
            Pbf::True | Pbf::False => {}
            Pbf::Atom(s, d) => f(s, *d),
            Pbf::And(ps) | Pbf::Or(ps) => ps.iter().for_each(|p| p.visit_atoms(f)),
        }
    }

    pub fn max_dir(&self) -> Option<Dir> {
        let mut m = None;
        self.visit_atoms(&mut |_, d| m = Some(m.map_or(d, |x: Dir| x.max(d))));
        m
    }

    pub fn min_dir(&self) -> Option<Dir> {
        let mut m = None;
        self.visit_atoms(&mut |_, d| m = Some(m.map_or(d, |x: Dir| x.min(d))));
        m
    }
}

impl<S: Clone + Ord> Pbf<S> {
    /// Minimal satisfying sets of atoms, each sorted, the list sorted.
    /// `True` has the single model `{}`; `False` has none.
    pub fn minimal_models(&self) -> Vec<Vec<(S, Dir)>> {
        let mut out: Vec<Vec<(S, Dir)>> =
            minimize(self.models()).into_iter().map(|s| s.into_iter().collect()).collect();
        out.sort();
        out
    }

    fn models(&self) -> BTreeSet<BTreeSet<(S, Dir)>> {
        match self {
            Pbf::True => [BTreeSet::new()].into_iter().collect(),
            Pbf::False => BTreeSet::new(),
            Pbf::Atom(s, d) => [[(s.clone(), *d)].into_iter().collect()].into_iter().collect(),
            Pbf::Or(ps) => ps.iter().flat_map(|p| p.models()).collect(),
            Pbf::And(ps) => {
                let mut acc: BTreeSet<BTreeSet<(S, Dir)>> = [BTreeSet::new()].into_iter().collect();
                for p in ps {
                    let m = p.models();
                    let mut next = BTreeSet::new();
                    for a in &acc {
                        for b in &m {
                            next.insert(a.union(b).cloned().collect());
                        }
                    }
                    acc = minimize(next);
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        }
    }
}

fn minimize<T: Ord + Clone>(sets: BTreeSet<BTreeSet<T>>) -> BTreeSet<BTreeSet<T>> {
    let mut v: Vec<BTreeSet<T>> = sets.into_iter().collect();
    v.sort_by_key(|s| s.len());
    let mut keep: Vec<BTreeSet<T>> = Vec::new();
    for s in v {
        if !keep.iter().any(|k| k.is_subset(&s)) {
            keep.push(s);
        }
    }
    keep.into_iter().collect()
}

impl<S: fmt::Display> fmt::Display for Pbf<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pbf::True => f.write_str("true"),
            Pbf::False => f.write_str("false"),
            Pbf::Atom(s, d) => write!(f, "({s},{d})"),
            Pbf::And(ps) | Pbf::Or(ps) => {
                let op = if matches!(self, Pbf::And(_)) { " & " } else { " | " };
                f.write_str("(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_fold_constants() {
        assert_eq!(Pbf::<u32>::and([Pbf::True, Pbf::True]), Pbf::True);
        assert_eq!(Pbf::and([Pbf::atom(1u32, 1), Pbf::False]), Pbf::False);
        assert_eq!(Pbf::or([Pbf::False, Pbf::atom(1u32, 1)]), Pbf::atom(1, 1));
        assert_eq!(Pbf::<u32>::or(Vec::new()), Pbf::False);
    }

    #[test]
    fn minimal_models_absorb() {
        // (a ∨ b) ∧ (a ∨ c) has minimal models {a} and {b, c}.
        let a = Pbf::atom('a', 1);
        let b = Pbf::atom('b', 1);
        let c = Pbf::atom('c', 2);
        let f = Pbf::and([Pbf::or([a.clone(), b.clone()]), Pbf::or([a.clone(), c.clone()])]);
        assert_eq!(f.minimal_models(), vec![vec![('a', 1)], vec![('b', 1), ('c', 2)]]);
        assert_eq!(Pbf::<char>::True.minimal_models(), vec![Vec::new()]);
        assert!(Pbf::<char>::False.minimal_models().is_empty());
        assert!(f.eval(&mut |s, _| *s == 'a'));
        assert!(!f.eval(&mut |s, _| *s == 'b'));
    }
}
