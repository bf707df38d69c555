use super::*;
use crate::model::tree::v;
use crate::model::{Label, Signature, Structure};
use crate::rtg::parse_grammar;
use crate::synthesis::Problem;

const FIG4: &str = "logic fo(k=2)\nsignature { rel E/2 }\n\
    S -> And(S,S) | Or(S,S) | Not(S) | Exists[x](S) | Exists[y](S) | Forall[x](S) | Forall[y](S)\n\
       | Atom[E](x,x) | Atom[E](x,y) | Atom[E](y,x) | Atom[E](y,y)";

fn graph(n: usize, edges: &[(u32, u32)], label: Label) -> Structure {
    let mut a = Structure::new(Signature::new().with_relation("E", 2), n);
    for &(x, y) in edges {
        a.add_tuple("E", &[x, y]);
    }
    a.label = label;
    a
}

fn instance(grammar: &str, structures: Vec<Structure>) -> ProblemInstance {
    ProblemInstance {
        problem: Problem::Separability,
        grammar: parse_grammar(grammar).unwrap(),
        structures,
        budget: Default::default(),
    }
}

fn edge_vs_edgeless() -> ProblemInstance {
    instance(FIG4, vec![graph(2, &[(0, 1)], Label::Pos), graph(1, &[], Label::Neg)])
}

#[test]
fn brute_force_finds_the_edge_sentence() {
    let t = brute_force_separator(&edge_vs_edgeless(), 5).unwrap();
    assert_eq!(t.size(), 3);
    assert_eq!(t, Tree::exists("x", Tree::exists("y", Tree::atom("E", &[v("x"), v("y")]))));
}

#[test]
fn empty_language_has_no_separator() {
    let g = "logic fo(k=2)\nsignature { rel E/2 }\nS -> Not(S)";
    let inst = instance(g, vec![graph(1, &[], Label::Pos), graph(1, &[(0, 0)], Label::Neg)]);
    assert_eq!(brute_force_separator(&inst, 9), None);
    assert_eq!(smallest_solution(&inst, 9), Ok(None));
}

#[test]
fn semantic_enumeration_matches_brute_force() {
    let inst = edge_vs_edgeless();
    assert_eq!(smallest_solution(&inst, 5).unwrap().map(|t| t.size()), Some(3));
    assert!(nothing_smaller(&inst, 3));
    assert!(!nothing_smaller(&inst, 4));
    let config = GenConfig::default();
    for i in 0..15 {
        let inst = random_instance(7, i, &config);
        let brute = brute_force_separator(&inst, 7).map(|t| t.size());
        let semantic = smallest_solution(&inst, 7).unwrap().map(|t| t.size());
        assert_eq!(brute, semantic, "instance {i}");
    }
}

#[test]
fn definitions_are_left_to_plain_enumeration() {
    let g = "logic folfp(k=2, k'=1)\nsignature { rel E/2 }\ndefs { rel P/1 }\n\
             S -> LetRel[P](x)(B, Exists[x](UseRel[P](x)))\nB -> Atom[E](x,x)";
    let inst = instance(g, vec![graph(1, &[(0, 0)], Label::Pos), graph(1, &[], Label::Neg)]);
    assert_eq!(smallest_solution(&inst, 9), Err(OracleError::Definitions));
    assert!(nothing_smaller(&inst, 4));
    assert!(!nothing_smaller(&inst, 5));
}

#[test]
fn agrees_on_a_small_suite() {
    let reports = run_suite(11, 6, 7, &GenConfig::default(), &synthesize);
    for r in &reports {
        assert!(r.agree, "{r:?}");
        assert_ne!(r.comparison, Comparison::Exhausted);
    }
}

#[test]
fn replay_is_deterministic() {
    let config = GenConfig::default();
    let strip = |mut r: OracleReport| {
        r.millis = 0;
        r
    };
    let a: Vec<_> = run_suite(3, 3, 7, &config, &synthesize).into_iter().map(strip).collect();
    let b: Vec<_> = run_suite(3, 3, 7, &config, &synthesize).into_iter().map(strip).collect();
    assert_eq!(a, b);
    assert_eq!(random_instance(3, 1, &config).grammar, random_instance(3, 1, &config).grammar);
}

#[test]
fn corrupted_tool_is_caught() {
    let reports = run_suite(11, 6, 7, &GenConfig::default(), &corrupted_tool);
    assert!(reports.iter().any(|r| !r.agree));
    let lines = reports_to_lines(&reports);
    assert_eq!(lines.lines().count(), 6);
    let back: OracleReport = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(back, reports[0]);
}
