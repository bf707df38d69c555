//! Seeded random separability instances.
//!
//! Grammars are redrawn until they derive a sentence within the size bound
//! and their bounded language stays small enough to enumerate, so both
//! realizable and unrealizable instances turn up often.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::Budget;
use crate::model::{Label, Signature, Structure};
use crate::rtg::{count_trees, enumerate, parse_grammar, Rtg};
use crate::synthesis::{Problem, ProblemInstance};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_elements: usize,
    pub max_structures: usize,
    pub max_productions: usize,
    /// Size bound used to accept a grammar.
    pub max_size: usize,
    /// Largest accepted number of derivations up to `max_size`.
    pub max_language: u128,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_elements: 3, max_structures: 4, max_productions: 8, max_size: 9, max_language: 40_000 }
    }
}

/// Instance `index` of the stream drawn from `seed`.
pub fn random_instance(seed: u64, index: u64, config: &GenConfig) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let grammar = loop {
        // A draw may leave the start symbol without rules; draw again.
        if let Ok(g) = parse_grammar(&random_grammar_text(&mut rng, config)) {
            if accept(&g, config) {
                break g;
            }
        }
    };
    let count = rng.gen_range(2..=config.max_structures.max(2));
    let structures = (0..count)
        .map(|i| {
            let label = match i {
                0 => Label::Pos,
                1 => Label::Neg,
                _ if rng.gen_bool(0.5) => Label::Pos,
                _ => Label::Neg,
            };
            random_structure(&mut rng, config.max_elements, label)
        })
        .collect();
    ProblemInstance { problem: Problem::Separability, grammar, structures, budget: Budget::default() }
}

fn accept(g: &Rtg, config: &GenConfig) -> bool {
    count_trees(g, config.max_size) <= config.max_language
        && enumerate(g, config.max_size).iter().any(|t| t.is_sentence())
}

fn random_grammar_text(rng: &mut ChaCha8Rng, config: &GenConfig) -> String {
    let nts: &[&str] = if rng.gen_bool(0.5) { &["S", "A"] } else { &["S"] };
    let vars = ["x", "y"];
    let count = rng.gen_range(3..=config.max_productions.max(3));
    let mut rules: Vec<(String, String)> = Vec::new();
    while rules.len() < count {
        let lhs = nts.choose(rng).unwrap().to_string();
        let mut nt = || nts.choose(rng).unwrap().to_string();
        let (a, b) = (nt(), nt());
        let v = *vars.choose(rng).unwrap();
        let w = *vars.choose(rng).unwrap();
        let rhs = match rng.gen_range(0..11) {
            0 => format!("And({a},{b})"),
            1 => format!("Or({a},{b})"),
            2 => format!("Not({a})"),
            3 | 4 => format!("Exists[{v}]({a})"),
            5 => format!("Forall[{v}]({a})"),
            6..=8 => format!("Atom[E]({v},{w})"),
            9 => format!("Atom[P]({v})"),
            _ => "Eq(x,y)".to_string(),
        };
        if !rules.contains(&(lhs.clone(), rhs.clone())) {
            rules.push((lhs, rhs));
        }
    }
    let mut text = String::from("logic fo(k=2)\nvars x, y\nsignature { rel E/2, P/1 }\nstart S\n");
    for (lhs, rhs) in rules {
        text.push_str(&format!("{lhs} -> {rhs}\n"));
    }
    text
}

fn random_structure(rng: &mut ChaCha8Rng, max_elements: usize, label: Label) -> Structure {
    let n = rng.gen_range(1..=max_elements.max(1));
    let sig = Signature::new().with_relation("E", 2).with_relation("P", 1);
    let mut a = Structure::new(sig, n);
    for x in 0..n as u32 {
        for y in 0..n as u32 {
            if rng.gen_bool(0.35) {
                a.add_tuple("E", &[x, y]);
            }
        }
        if rng.gen_bool(0.5) {
            a.add_tuple("P", &[x]);
        }
    }
    a.label = label;
    a
}
