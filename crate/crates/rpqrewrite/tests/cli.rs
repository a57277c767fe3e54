//! Command-line behaviour over the files in `fixtures/`: frozen outputs for
//! the small cases, repeatable bytes for every command, and exit codes.

use rpqrewrite::cli::run_with;
use std::path::PathBuf;
use std::process::Command;

fn fx(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rpqrewrite").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

/// Writes the view image of Fig. 2's database to a scratch file.
fn fig2_instance(tag: &str) -> String {
    let s = ok(&["apply-view", "--spec", &fx("ex2.rpq"), "--db", &fx("fig2-d.gdb")]);
    let path = std::env::temp_dir().join(format!("rpqrewrite-cli-{}-{tag}.gdb", std::process::id()));
    std::fs::write(&path, s).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn eval_figure_databases() {
    assert_eq!(ok(&["eval", "--spec", &fx("ex1.rpq"), "--db", &fx("fig1-d.gdb")]), "x0 x5\n");
    assert_eq!(ok(&["eval", "--spec", &fx("ex1.rpq"), "--db", &fx("fig1-d-prime.gdb")]), "");
    assert_eq!(ok(&["fixture", "ex1", "eval", "--db", &fx("fig1-d.gdb")]), "x0 x5\n");
    assert_eq!(ok(&["eval", "--spec", &fx("ex2.rpq"), "--db", &fx("fig2-d.gdb")]), "x y\n");
    assert_eq!(ok(&["eval", "--spec", &fx("empty-query.rpq"), "--db", &fx("fig1-d.gdb")]), "");
}

#[test]
fn view_image_of_figure_two() {
    let s = ok(&["apply-view", "--spec", &fx("ex2.rpq"), "--db", &fx("fig2-d.gdb")]);
    assert!(s.starts_with("alphabet V1 V2 V3\nnode w1\n"));
    assert_eq!(s.lines().filter(|l| l.starts_with("edge ")).count(), 14);
    assert!(s.contains("edge x V2 z\n") && s.contains("edge w4 V2 y\n"));
}

#[test]
fn certain_answers_and_rewritings_on_figure_two() {
    let inst = fig2_instance("cert");
    let spec = fx("ex2.rpq");
    assert_eq!(ok(&["cert", "--spec", &spec, "--instance", &inst]), "x y\n");
    assert_eq!(ok(&["cert", "--spec", &spec, "--instance", &inst, "--pair", "x", "y"]), "certain x y\n");
    let (code, out, _) = run(&["cert", "--spec", &spec, "--instance", &inst, "--pair", "y", "x"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("not_certain y x\n") && out.contains("counterexample {"));
    assert_eq!(ok(&["rewrite-eval", "--spec", &spec, "--instance", &inst, "--l", "1"]), "x y\n");
    let (code, out, err) = run(&["rewrite-eval", "--spec", &spec, "--instance", &inst, "--l", "auto"]);
    assert_eq!((code, out.as_str()), (0, "x y\n"));
    assert!(err.contains("warning"));
    assert_eq!(ok(&["rewrite-preimage", "--spec", &spec, "--instance", &inst]), "x y\n");
    let pre = ok(&["preimage", "--spec", &spec, "--instance", &inst, "--max-nodes", "7"]);
    assert!(pre.starts_with("status Found\npreimage {\nalphabet a b c\n"));
    std::fs::remove_file(inst).unwrap();
}

#[test]
fn cored_template_of_example_one() {
    let expected = "alphabet V1 V2\n\
                    node d_0_3_4_6\n\
                    edge d_0_3_4_6 V1 d_0_3_4_6\n\
                    edge d_0_3_4_6 V2 d_0_3_4_6\n\
                    source d_0_3_4_6\n\
                    target d_0_3_4_6\n\
                    witness d_0_3_4_6 V1 d_0_3_4_6 = aaa\n\
                    witness d_0_3_4_6 V2 d_0_3_4_6 = aaaa\n";
    assert_eq!(ok(&["template", "--spec", &fx("ex1.rpq"), "--core"]), expected);
}

#[test]
fn decisions_report_status_lines() {
    let (code, out, _) = run(&["decide-mondet", "--spec", &fx("ex1.rpq"), "--max-len", "6"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("status Refuted\nevidence_word aaaaa\ncounterexample {\n"));
    let out = ok(&["check-det", "--spec", &fx("ex1.rpq"), "--max-nodes", "3"]);
    assert_eq!(out, "status NoCounterexampleUpTo(3)\nchecked_bound 3\nfamily all 530 graphs over 1 labels with 1..=3 nodes\n");
}

#[test]
fn three_colouring_generator() {
    let out = ok(&["gen-3col", "--graph", &fx("k4.graph")]);
    assert!(out.starts_with("# spec\nalphabet bg br gb gr rb rg\nview V1 = bg | br | gb | gr | rb | rg\n"));
    let inst = out.split("# instance\n").nth(1).unwrap();
    assert_eq!(inst.lines().filter(|l| l.starts_with("edge ")).count(), 12);

    let dir = std::env::temp_dir();
    let pid = std::process::id();
    for (graph, found) in [("c5.graph", true), ("k4.graph", false)] {
        let spec = dir.join(format!("rpqrewrite-cli-{pid}-{graph}.rpq")).to_string_lossy().into_owned();
        let inst = dir.join(format!("rpqrewrite-cli-{pid}-{graph}.gdb")).to_string_lossy().into_owned();
        ok(&["gen-3col", "--graph", &fx(graph), "--spec-out", &spec, "--instance-out", &inst]);
        let n = if graph == "c5.graph" { "5" } else { "4" };
        let (code, out, _) = run(&["preimage", "--spec", &spec, "--instance", &inst, "--max-nodes", n]);
        assert_eq!(code == 0, found, "{graph}");
        assert_eq!(out.starts_with("status Found"), found, "{graph}");
        std::fs::remove_file(spec).unwrap();
        std::fs::remove_file(inst).unwrap();
    }
}

#[test]
fn regularized_grammar_and_fixture_specs() {
    let out = ok(&["regularize-cfg", "--spec", &fx("anbn.rpq")]);
    assert!(out.starts_with("automaton G {\ninitial 0\n") && out.ends_with("}\n"));
    assert_eq!(
        ok(&["fixture", "ex3", "spec"]),
        "alphabet a\nview V1 = a | a a\nview V2 = a a | a a a\nquery Q = a (a a a a a a)* | a a (a a a a a a)*\n"
    );
    for id in ["ex1", "ex2", "ex3"] {
        assert_eq!(ok(&["fixture", id, "spec"]), std::fs::read_to_string(fx(&format!("{id}.rpq"))).unwrap(), "{id}");
    }
}

#[test]
fn datalog_round_trip() {
    let prog = ok(&["emit-datalog", "--spec", &fx("ex2.rpq"), "--l", "1"]);
    let path = std::env::temp_dir().join(format!("rpqrewrite-cli-{}.dl", std::process::id()));
    std::fs::write(&path, &prog).unwrap();
    let inst = fig2_instance("datalog");
    let p = path.to_string_lossy().into_owned();
    assert_eq!(ok(&["datalog-eval", "--program", &p, "--instance", &inst]), "x y\n");
    assert_eq!(ok(&["datalog-eval", "--program", &p, "--instance", &inst, "--strategy", "naive"]), "x y\n");
    let (code, _, _) = run(&["emit-datalog", "--spec", &fx("ex1.rpq"), "--l", "2"]);
    assert_eq!(code, 3);
    std::fs::remove_file(path).unwrap();
    std::fs::remove_file(inst).unwrap();
}

/// Every command prints the same bytes when run twice, including with
/// several worker threads.
#[test]
fn outputs_are_repeatable() {
    let inst = fig2_instance("repeat");
    let (ex1, ex2) = (fx("ex1.rpq"), fx("ex2.rpq"));
    let cases: Vec<Vec<&str>> = vec![
        vec!["eval", "--spec", &ex2, "--db", "FIG2"],
        vec!["apply-view", "--spec", &ex2, "--db", "FIG2", "--keep-all-nodes"],
        vec!["template", "--spec", &ex2],
        vec!["cert", "--spec", &ex2, "--instance", &inst, "--pair", "y", "x"],
        vec!["rewrite-eval", "--spec", &ex2, "--instance", &inst, "--l", "2"],
        vec!["emit-datalog", "--spec", &ex2, "--l", "1"],
        vec!["decide-mondet", "--spec", &ex1, "--max-len", "6"],
        vec!["check-det", "--spec", &ex1, "--max-nodes", "3", "--monotone"],
        vec!["preimage", "--spec", &ex2, "--instance", &inst, "--max-nodes", "8"],
        vec!["regularize-cfg", "--spec", "ANBN"],
    ];
    let (fig2, anbn) = (fx("fig2-d.gdb"), fx("anbn.rpq"));
    for case in cases {
        let case: Vec<&str> = case.iter().map(|a| match *a {
            "FIG2" => fig2.as_str(),
            "ANBN" => anbn.as_str(),
            other => other,
        }).collect();
        let first = run(&case);
        let mut threaded = vec!["--threads", "4"];
        threaded.extend_from_slice(&case);
        assert_eq!(run(&case), first, "{case:?}");
        assert_eq!(run(&threaded), first, "{case:?} with threads");
    }
    std::fs::remove_file(inst).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["eval", "--spec", &fx("ex1.rpq"), "--db", "/nonexistent/db.gdb"]).0, 2);
    assert_eq!(run(&["eval", "--spec", &fx("fig1-d.gdb"), "--db", &fx("fig1-d.gdb")]).0, 2);
    let (code, out, _) = run(&["preimage", "--spec", &fx("ex1.rpq"), "--instance", &fx("fig1-d.gdb"), "--max-nodes", "6"]);
    assert_eq!(code, 2, "{out}");
}

#[test]
fn binary_forwards_exit_code() {
    let bin = env!("CARGO_BIN_EXE_rpqrewrite");
    let out = Command::new(bin).args(["fixture", "ex1", "eval", "--db", &fx("fig1-d.gdb")]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "x0 x5\n");
    let out = Command::new(bin).args(["fixture", "ex1", "decide-mondet", "--max-len", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
