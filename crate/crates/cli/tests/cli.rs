//! Runs the `fvl` binary on the shipped fixtures.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("fvl-cli-{}-{name}", std::process::id()))
}

fn fvl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fvl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn result_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("result file on stdout")
}

#[test]
fn sep_fig1_is_realizable() {
    let o = fvl(&[
        "sep",
        "--grammar",
        &fixture("fig1/fo2.rtg"),
        "--structures",
        &fixture("fig1/structures.json"),
        "--logic",
        "fo",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = result_json(&o);
    assert_eq!(r["verdict"], "realizable");
    assert_eq!(r["tool"], "fvl");
    for key in ["formula", "sexpr", "size"] {
        assert!(!r[key].is_null(), "{key}");
    }
}

#[test]
fn sep_conjunctions_are_unrealizable() {
    let out = scratch("conj.json");
    let o = fvl(&[
        "sep",
        "--grammar",
        &fixture("fig1/conj.rtg"),
        "--structures",
        &fixture("fig1/structures.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    std::fs::remove_file(&out).ok();
    assert_eq!(r["verdict"], "unrealizable");
    for key in ["formula", "sexpr", "pretty", "size"] {
        assert!(r.get(key).is_none(), "{key}");
    }
}

#[test]
fn sep_is_deterministic() {
    let args = ["sep", "--grammar", &fixture("fig1/fo2.rtg"), "--structures", &fixture("fig1/structures.json")];
    assert_eq!(fvl(&args).stdout, fvl(&args).stdout);
}

#[test]
fn sep_validation_errors_exit_2() {
    let o = fvl(&["sep", "--grammar", "missing.rtg", "--structures", &fixture("fig1/structures.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = fvl(&[
        "sep",
        "--grammar",
        &fixture("fig1/fo2.rtg"),
        "--structures",
        &fixture("fig1/structures.json"),
        "--logic",
        "folfp",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let bad = scratch("bad.rtg");
    std::fs::write(&bad, "logic fo(k=2)\nsignature { rel E/2 }\nS -> And(S\n").unwrap();
    let o = fvl(&["sep", "--grammar", bad.to_str().unwrap(), "--structures", &fixture("fig1/structures.json")]);
    std::fs::remove_file(&bad).ok();
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("bad.rtg") && stderr.contains("3:"), "{stderr}");
}

#[test]
fn sep_budget_exhaustion_exits_3() {
    let o = fvl(&[
        "sep",
        "--grammar",
        &fixture("fig2/fo3.rtg"),
        "--structures",
        &fixture("fig2/structures.json"),
        "--max-states",
        "500",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(result_json(&o)["verdict"], "budget_exceeded");
}

#[test]
fn query_family() {
    let (g, s) = (fixture("family/query.rtg"), fixture("family/structures.json"));
    for [flag, value] in [["--vars", "x"], ["--arity", "1"]] {
        let o = fvl(&["query", "--grammar", &g, "--structures", &s, flag, value]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(result_json(&o)["verdict"], "realizable");
    }
}

#[test]
fn term_merge_and_missing_output() {
    let o =
        fvl(&["term", "--grammar", &fixture("merge/grammar.rtg"), "--structures", &fixture("merge/structures.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(result_json(&o)["verdict"], "realizable");

    let mut items: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("merge/structures.json")).unwrap()).unwrap();
    for s in items.as_array_mut().unwrap() {
        let obj = s.as_object_mut().unwrap();
        obj["constants"].as_object_mut().unwrap().remove("out");
        obj.remove("io");
    }
    let path = scratch("no-out.json");
    std::fs::write(&path, items.to_string()).unwrap();
    let o = fvl(&["term", "--grammar", &fixture("merge/grammar.rtg"), "--structures", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_reports_three_values() {
    let o = fvl(&["eval", "--formula", &fixture("fig1/solution.txt"), "--structure", &fixture("fig1/top_left.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "true");

    let open = scratch("open.txt");
    std::fs::write(&open, "Atom[E](x,y)").unwrap();
    let p = open.to_str().unwrap();
    let o = fvl(&["eval", "--formula", p, "--structure", &fixture("fig1/top_left.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = fvl(&["eval", "--formula", p, "--structure", &fixture("fig1/top_left.json"), "--assignment", "x=0,y=0"]);
    assert_eq!(stdout(&o).trim(), "false");
    std::fs::write(&open, "(atom E s s)").unwrap();
    let o = fvl(&["eval", "--formula", p, "--structure", &fixture("fig1/top_left.json")]);
    assert_eq!(stdout(&o).trim(), "false");

    let items: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("merge/structures.json")).unwrap()).unwrap();
    let one = scratch("one.json");
    std::fs::write(&one, items[0].to_string()).unwrap();
    std::fs::write(&open, "Func[head](Const[nil])").unwrap();
    let o = fvl(&["eval", "--formula", p, "--structure", one.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "undef");
    std::fs::write(&open, "Func[tail](Const[in1])").unwrap();
    let o = fvl(&["eval", "--formula", p, "--structure", one.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "nil");
    std::fs::remove_file(&one).ok();
    std::fs::remove_file(&open).ok();
}

#[test]
fn oracle_agrees_and_catches_a_corrupted_tool() {
    let args = ["oracle", "--seed", "5", "--count", "8", "--max-size", "7"];
    let o = fvl(&args);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 8);
    assert_eq!(fvl(&args).stdout, o.stdout);
    let o = fvl(&["oracle", "--seed", "5", "--count", "8", "--max-size", "7", "--corrupt-tool"]);
    assert_ne!(o.status.code(), Some(0));
}
