//! Property checks over seeded random formulas, terms and structures.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{random_closed_term, random_formula, random_graph, random_lfp_formula, random_term_structure};
use fvl::io::{load_structures, structures_to_json, LoadedStructure};
use fvl::model::eval3::{eval_fun3, Env3, Truth3, Value3};
use fvl::model::{eval_fo, Assignment, Label};
use fvl::syntax::{parse_prefix, parse_sexpr, to_prefix, to_sexpr};

fn constants() -> BTreeSet<String> {
    ["c".to_string(), "d".to_string()].into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn formulas_round_trip(seed in any::<u64>(), size in 1usize..14) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = if size >= 4 && seed % 2 == 0 {
            random_lfp_formula(&mut rng, size)
        } else {
            random_formula(&mut rng, size, &["x", "y", "z"], true, &|_| None)
        };
        prop_assert_eq!(parse_prefix(&to_prefix(&phi), &constants()).unwrap(), phi.clone());
        prop_assert_eq!(parse_sexpr(&to_sexpr(&phi), &constants()).unwrap(), phi);
    }

    #[test]
    fn terms_round_trip(seed in any::<u64>(), size in 2usize..14) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_closed_term(&mut rng, size);
        prop_assert_eq!(parse_prefix(&to_prefix(&t), &constants()).unwrap(), t.clone());
        prop_assert_eq!(parse_sexpr(&to_sexpr(&t), &constants()).unwrap(), t);
    }

    #[test]
    fn structures_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut graph = random_graph(&mut rng, 4);
        graph.label = if seed % 2 == 0 { Label::Pos } else { Label::Neg };
        let items = vec![
            LoadedStructure { structure: graph, io: None },
            LoadedStructure { structure: random_term_structure(&mut rng, 3), io: None },
        ];
        let text = structures_to_json(&items);
        let back = load_structures(&text).unwrap();
        prop_assert_eq!(structures_to_json(&back), text);
        for (a, b) in items.iter().zip(&back) {
            prop_assert_eq!(&a.structure, &b.structure);
        }
    }

    /// Negation swaps true and false and keeps undefined.
    #[test]
    fn negation_is_involutive(seed in any::<u64>(), size in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_graph(&mut rng, 3);
        let phi = random_formula(&mut rng, size, &["x", "y"], true, &|_| None);
        let gamma = Assignment::from_pairs([("x", 0)]);
        let v = eval_fun3(&a, &gamma, &Env3::empty(), &phi);
        let n = eval_fun3(&a, &gamma, &Env3::empty(), &fvl::model::Tree::not(phi.clone()));
        match (v, n) {
            (Value3::Truth(p), Value3::Truth(q)) => prop_assert_eq!(p.not(), q),
            other => prop_assert!(false, "not a formula: {:?}", other),
        }
        if phi.free_vars().iter().all(|x| x == "x") {
            prop_assert_eq!(eval_fo(&a, &gamma, &phi).unwrap(), v == Value3::Truth(Truth3::True));
        }
    }
}
