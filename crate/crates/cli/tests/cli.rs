use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use negmodal::calculus::{check_derivation, CutPolicy, Derivation};
use negmodal::kripke::Model;
use negmodal::parser::parse_sequent;
use negmodal::syntax::Logic;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_negmodal")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn prove_affirmative_and_negative() {
    let o = run(&["prove", "--logic", "pkd", "--sequent", "=> p, (im p & oun p) | oim p"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let d = Derivation::from_text(Logic::PKD, &text).unwrap();
    let rules: Vec<String> = d.rules().iter().map(|r| r.to_string()).collect();
    for r in ["OrR", "AndR", "DetR", "ConR", "Id"] {
        assert!(rules.contains(&r.to_string()), "{text}");
    }

    let o = run(&["prove", "--logic", "pk", "--sequent", "p, un p => q"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "unprovable");
}

#[test]
fn emitted_json_rechecks() {
    for (logic, flag, goal) in [
        (Logic::PKT, "pkt", "=> un p, p"),
        (Logic::PKB, "pkb", "un un p => p"),
        (Logic::PKF, "pkf", "un p & un q => un (p | q)"),
    ] {
        let o = run(&["prove", "--logic", flag, "--sequent", goal, "--emit", "json"]);
        assert_eq!(code(&o), 0);
        let d = Derivation::from_json(stdout(&o).trim()).unwrap();
        assert_eq!(d.conclusion, parse_sequent(goal).unwrap());
        check_derivation(logic, &d, &[], CutPolicy::default_for(logic, false)).unwrap();
    }
}

#[test]
fn prove_with_hypotheses() {
    let dir = tempfile::tempdir().unwrap();
    let hyp = dir.path().join("hyps.txt");
    fs::write(&hyp, "# one per line\np => q\nq => r\n").unwrap();
    let o = run(&["prove", "--logic", "pk", "--sequent", "p => r", "--hyp", path_str(&hyp)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("(Cut on q)"));
    let o = run(&["prove", "--logic", "pk", "--sequent", "p => r", "--hyp", path_str(&hyp), "--cut", "no"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn input_errors_exit_2() {
    let o = run(&["prove", "--logic", "pk", "--sequent", "p =>> q"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).is_empty());
    assert!(!stderr(&o).is_empty());
    assert_eq!(code(&run(&["prove", "--logic", "pkf", "--sequent", "im p =>"])), 2);
    assert_eq!(code(&run(&["prove", "--logic", "pkz", "--sequent", "p => p"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["check-model", "--model", "/nonexistent.json", "--sequent", "=>"])), 2);
}

#[test]
fn budget_exhaustion_exits_3() {
    let o = run(&["prove", "--logic", "pk", "--sequent", "un (p | q) => un p & un q", "--budget", "1"]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout(&o).trim(), "resource");
}

#[test]
fn countermodel_then_check_model() {
    let dir = tempfile::tempdir().unwrap();
    for (logic, goal) in [("pk", "=> un p, p"), ("pkt", "un p & un q => un (p | q)"), ("pk", "=> im p, p")] {
        let file = dir.path().join("m.json");
        let o = run(&["countermodel", "--logic", logic, "--sequent", goal, "--max-worlds", "3", "--out", path_str(&file)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let world: usize = stderr(&o).trim().strip_prefix("fails at world ").unwrap().split(' ').next().unwrap().parse().unwrap();
        let w = world.to_string();
        let o = run(&["check-model", "--model", path_str(&file), "--sequent", goal, "--world", &w]);
        assert_eq!(code(&o), 1);
        assert_eq!(stdout(&o).trim(), format!("{world}\tfails"));
    }

    let o = run(&["countermodel", "--logic", "pk", "--sequent", "=> un p, p", "--max-worlds", "2"]);
    let m = Model::from_json(stdout(&o).trim()).unwrap();
    assert!(!m.valid(&parse_sequent("=> un p, p").unwrap()));

    let o = run(&["countermodel", "--logic", "pkt", "--sequent", "=> un p, p", "--max-worlds", "3"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "none ≤ 3");
}

#[test]
fn check_model_lists_worlds() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.json");
    fs::write(&file, r#"{"worlds":2,"edges":[[0,1],[1,0]],"valuation":{"p":[0]}}"#).unwrap();
    let o = run(&["check-model", "--model", path_str(&file), "--sequent", "=> un p"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "0\tholds\n1\tfails\n");
    let o = run(&["check-model", "--model", path_str(&file), "--sequent", "=> un p", "--world", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["check-model", "--model", path_str(&file), "--sequent", "=>", "--world", "2"])), 2);
}

#[test]
fn instance_command() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("q.json");
    fs::write(
        &file,
        r#"{"worlds":1,"edges":[[0,0]],"table":[{"world":0,"formula":"p","value":"t"},{"world":0,"formula":"un p","value":"f"}]}"#,
    )
    .unwrap();
    let o = run(&["instance", "--quasi", path_str(&file)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), r#"{"worlds":1,"edges":[[0,0]],"valuation":{"p":[0]}}"#);
    assert_eq!(code(&run(&["instance", "--quasi", path_str(&file), "--functional"])), 0);

    fs::write(
        &file,
        r#"{"worlds":1,"edges":[],"table":[{"world":0,"formula":"p","value":"ft"},{"world":0,"formula":"un p","value":"t"}]}"#,
    )
    .unwrap();
    let o = run(&["instance", "--quasi", path_str(&file)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("[F⌣]"));
}

#[test]
fn fde_command() {
    let o = run(&["fde", "--sequent", "un p & un q => un (p | q)"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "valid"));
    let o = run(&["fde", "--sequent", "=> un p, p", "--table"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("invalid: p=n\np | un p\n"));
    assert_eq!(code(&run(&["fde", "--sequent", "im p =>"])), 2);
}

#[test]
fn definability_command() {
    let o = run(&["definability", "--fragment", "pkt\\{un,oun}", "--max-worlds", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("~p := im p | oim p"));
    let o = run(&["definability", "--fragment", "pkd-oun", "--max-size", "3", "--json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains(r#""violations":[]"#));
    assert_eq!(code(&run(&["definability", "--fragment", "pkd", "--max-size", "3"])), 2);
    assert_eq!(code(&run(&["definability", "--fragment", "pk", "--max-worlds", "2"])), 2);
    assert_eq!(code(&run(&["definability", "--fragment", "pk\\{un}"])), 2);
}

#[test]
fn corpus_command() {
    let o = run(&["corpus"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with("0 mismatches"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.tsv");
    fs::write(&file, "PK\tp => p\tprovable\nPK\t=> un p, p\tprovable\n").unwrap();
    let o = run(&["corpus", "--file", path_str(&file)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("MISMATCH"));
    fs::write(&file, "PK\tp => p\n").unwrap();
    assert_eq!(code(&run(&["corpus", "--file", path_str(&file)])), 2);
}

#[test]
fn props_command() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("f.json");
    fs::write(&file, r#"{"worlds":2,"edges":[[0,1],[1,1]]}"#).unwrap();
    let o = run(&["props", "--frame", path_str(&file)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("serial\tyes"));
    assert!(out.contains("functional\tyes"));
    assert!(out.contains("reflexive\tno"));
    assert!(out.contains("symmetric\tno"));
}
