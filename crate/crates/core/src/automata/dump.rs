//! Plain-text listings of explicit automata, one transition per line.

use std::fmt::Write;

use super::{Alphabet, Ata, Nta, TwoWayAta};
use crate::model::Symbol;
use crate::syntax::prefix::{pattern_to_prefix, Pattern};

/// A symbol with `_` for each child.
pub fn symbol_label(s: &Symbol) -> String {
    pattern_to_prefix(&Pattern::Node(s.clone(), vec![Pattern::Hole("_".into()); s.arity()]))
}

fn header(out: &mut String, kind: &str, states: usize, alphabet: &Alphabet, initial: &[u32]) {
    let _ = writeln!(out, "{kind} states={states} symbols={}", alphabet.len());
    let _ = writeln!(out, "initial {initial:?}");
}

pub fn dump_ata(a: &Ata) -> String {
    let mut out = String::new();
    header(&mut out, "ata", a.num_states as usize, &a.alphabet, &a.initial);
    for ((q, s), f) in &a.delta {
        let _ = writeln!(out, "{q} {} -> {f}", symbol_label(a.alphabet.symbol(*s)));
    }
    out
}

pub fn dump_twata(a: &TwoWayAta) -> String {
    let mut out = String::new();
    header(&mut out, "2ata", a.num_states as usize, &a.alphabet, &a.initial);
    let finals: Vec<u32> = a.finals.iter().copied().collect();
    let _ = writeln!(out, "final {finals:?}");
    for ((q, s), f) in &a.delta {
        let _ = writeln!(out, "{q} {} -> {f}", symbol_label(a.alphabet.symbol(*s)));
    }
    out
}

pub fn dump_nta(a: &Nta) -> String {
    let mut out = String::new();
    header(&mut out, "nta", a.num_states(), a.alphabet(), a.initial());
    for r in a.rules() {
        let _ = writeln!(out, "{} {} -> {:?}", r.state, symbol_label(a.alphabet().symbol(r.symbol)), r.children);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Pbf;

    #[test]
    fn lists_transitions() {
        let al = Alphabet::new([Symbol::Not, Symbol::Var("x".into())]);
        let mut a = Ata::new(al.clone(), 2, vec![0]);
        a.set(0, &Symbol::Not, Pbf::atom(1, 1));
        let text = dump_ata(&a);
        assert!(text.starts_with("ata states=2 symbols=2\n"));
        assert_eq!(text.lines().count(), 3);
        assert_eq!(dump_nta(&Nta::universal(al)).lines().count(), 4);
    }
}
