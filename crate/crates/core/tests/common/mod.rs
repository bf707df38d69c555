//! Shared helpers: fixture loading and seeded random structures, formulas
//! and terms.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use fvl::io::load_structures;
use fvl::model::tree::{c, v};
use fvl::model::{Assignment, Elem, Signature, Structure, Tree};

pub fn fixture(rel: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

pub fn structures(rel: &str) -> Vec<Structure> {
    load_structures(&fixture(rel)).unwrap().into_iter().map(|l| l.structure).collect()
}

/// A structure over `E/2`, `P/1` and the constant `c`.
pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> Structure {
    let n = rng.gen_range(1..=max_n);
    let sig = Signature::new().with_relation("E", 2).with_relation("P", 1).with_constant("c");
    let mut a = Structure::new(sig, n);
    for x in 0..n as Elem {
        for y in 0..n as Elem {
            if rng.gen_bool(0.4) {
                a.add_tuple("E", &[x, y]);
            }
        }
        if rng.gen_bool(0.5) {
            a.add_tuple("P", &[x]);
        }
    }
    a.set_constant("c", rng.gen_range(0..n as Elem));
    a
}

/// Binds each variable with probability `p`.
pub fn random_assignment(rng: &mut ChaCha8Rng, a: &Structure, vars: &[&str], p: f64) -> Assignment {
    let mut bound = Vec::new();
    for &x in vars {
        if rng.gen_bool(p) {
            bound.push((x, rng.gen_range(0..a.size() as Elem)));
        }
    }
    Assignment::from_pairs(bound)
}

fn arg(rng: &mut ChaCha8Rng, vars: &[&str]) -> fvl::model::Arg {
    if rng.gen_bool(0.15) {
        c("c")
    } else {
        v(vars.choose(rng).unwrap())
    }
}

/// A first-order formula of at most `size` nodes over `E`, `P`, `=` and
/// `c`. `extra` supplies further atoms, such as uses of a defined relation.
pub fn random_formula(
    rng: &mut ChaCha8Rng,
    size: usize,
    vars: &[&str],
    negation: bool,
    extra: &dyn Fn(&mut ChaCha8Rng) -> Option<Tree>,
) -> Tree {
    if size <= 1 || rng.gen_bool(0.25) {
        if let Some(t) = extra(rng) {
            return t;
        }
        return match rng.gen_range(0..4) {
            0 | 1 => Tree::atom("E", &[arg(rng, vars), arg(rng, vars)]),
            2 => Tree::atom("P", &[arg(rng, vars)]),
            _ => Tree::eq(arg(rng, vars), arg(rng, vars)),
        };
    }
    let x = *vars.choose(rng).unwrap();
    let kinds = if negation { 5 } else { 4 };
    match rng.gen_range(0..kinds) {
        0 | 1 if size >= 3 => {
            let left = rng.gen_range(1..size - 1);
            let a = random_formula(rng, left, vars, negation, extra);
            let b = random_formula(rng, size - 1 - left, vars, negation, extra);
            if rng.gen_bool(0.5) {
                Tree::and(a, b)
            } else {
                Tree::or(a, b)
            }
        }
        3 if negation => Tree::forall(x, random_formula(rng, size - 1, vars, negation, extra)),
        4 => Tree::not(random_formula(rng, size - 1, vars, negation, extra)),
        _ => Tree::exists(x, random_formula(rng, size - 1, vars, negation, extra)),
    }
}

/// `let R(x,y) = body in cont`, with `body` positive in `R`.
pub fn random_lfp_formula(rng: &mut ChaCha8Rng, size: usize) -> Tree {
    let vars = ["x", "y"];
    let use_r = |rng: &mut ChaCha8Rng| {
        rng.gen_bool(0.4).then(|| Tree::use_rel("R", &[v(vars.choose(rng).unwrap()), v(vars.choose(rng).unwrap())]))
    };
    let body_size = rng.gen_range(1..=size / 2);
    let body = random_formula(rng, body_size, &vars, false, &use_r);
    let cont = random_formula(rng, size - body_size, &vars, true, &use_r);
    Tree::let_rel("R", &["x", "y"], body, cont)
}

/// A structure for terms: `f/1` total, `g/2` partial, relation `R/1`,
/// constants `c` and `d`.
pub fn random_term_structure(rng: &mut ChaCha8Rng, max_n: usize) -> Structure {
    let n = rng.gen_range(1..=max_n);
    let sig = Signature { partial_functions_allowed: true, ..Signature::new() }
        .with_function("f", 1)
        .with_function("g", 2)
        .with_relation("R", 1)
        .with_constant("c")
        .with_constant("d");
    let mut a = Structure::new(sig, n);
    a.set_partial("g", true);
    for x in 0..n as Elem {
        a.set_value("f", &[x], rng.gen_range(0..n as Elem));
        for y in 0..n as Elem {
            if rng.gen_bool(0.6) {
                a.set_value("g", &[x, y], rng.gen_range(0..n as Elem));
            }
        }
        if rng.gen_bool(0.5) {
            a.add_tuple("R", &[x]);
        }
    }
    a.set_constant("c", rng.gen_range(0..n as Elem)).set_constant("d", rng.gen_range(0..n as Elem));
    a
}

/// A term over `vars` with at most `size` nodes; `call` builds a use of a
/// defined function when given.
pub fn random_term(rng: &mut ChaCha8Rng, size: usize, vars: &[&str], call: Option<&str>) -> Tree {
    let leaf = |rng: &mut ChaCha8Rng| {
        let pick = rng.gen_range(0..vars.len() + 2);
        match pick {
            0 => Tree::constant("c"),
            1 => Tree::constant("d"),
            i => Tree::var(vars[i - 2]),
        }
    };
    if size <= 1 {
        return leaf(rng);
    }
    match rng.gen_range(0..5) {
        0 => Tree::func("f", vec![random_term(rng, size - 1, vars, call)]),
        1 if size >= 3 => {
            let left = rng.gen_range(1..size - 1);
            Tree::func("g", vec![random_term(rng, left, vars, call), random_term(rng, size - 1 - left, vars, call)])
        }
        2 if size >= 6 => {
            let cond = if rng.gen_bool(0.5) {
                Tree::eq_terms(leaf(rng), leaf(rng))
            } else {
                Tree::atom_terms("R", vec![leaf(rng)])
            };
            let rest = size - 1 - cond.size();
            let left = rng.gen_range(1..rest);
            Tree::ite(cond, random_term(rng, left, vars, call), random_term(rng, rest - left, vars, call))
        }
        3 if call.is_some() => Tree::use_fun(call.unwrap(), vec![random_term(rng, size - 1, vars, call)]),
        _ => leaf(rng),
    }
}

/// A closed term, sometimes wrapped in a recursive unary definition `h`.
pub fn random_closed_term(rng: &mut ChaCha8Rng, size: usize) -> Tree {
    if rng.gen_bool(0.5) {
        return random_term(rng, size, &[], None);
    }
    let body_size = rng.gen_range(1..=size / 2).max(1);
    let body = random_term(rng, body_size, &["x"], Some("h"));
    let cont = random_term(rng, size - body_size, &[], Some("h"));
    Tree::let_fun("h", &["x"], body, cont)
}
