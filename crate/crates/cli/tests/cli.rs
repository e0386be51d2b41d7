use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qplan")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name).to_string_lossy().into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn encode_then_solve_reports_truth_in_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let dom = fixture("two_blocks.dom");
    let q = path(&dir, "f.qdimacs");
    let q = q.to_str().unwrap();
    for (t, want) in [("2", 0), ("1", 0)] {
        let o = qplan(&["encode", "--domain", &dom, "--kind", "sequence", "--tmax", t, "-o", q]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let o = qplan(&["solve", q]);
        assert_eq!(code(&o), want);
        assert!(stdout(&o).starts_with("result=true"));
        assert!(stdout(&o).lines().any(|l| l.starts_with("v ")));
    }

    let dom = dir.path().join("b2.dom");
    assert_eq!(code(&qplan(&["gen", "blocks", "2", "-o", dom.to_str().unwrap()])), 0);
    let o = qplan(&["encode", "--domain", dom.to_str().unwrap(), "--kind", "sequence", "--tmax", "1", "-o", q]);
    assert_eq!(code(&o), 0);
    for flags in [&[][..], &["--no-partition", "--no-failed-literal", "--no-probing"]] {
        let mut args = vec!["solve", q];
        args.extend_from_slice(flags);
        assert_eq!(code(&qplan(&args)), 1, "{flags:?}");
    }
    // too many variables for expansion
    assert_eq!(code(&qplan(&["solve", q, "--oracle"])), 10);
}

#[test]
fn oracle_decides_small_formulae() {
    let dir = tempfile::tempdir().unwrap();
    let q = path(&dir, "f.qdimacs");
    for (text, want) in [("p cnf 2 2\na 1 0\ne 2 0\n-1 2 0\n1 -2 0\n", 0), ("p cnf 2 2\ne 1 0\na 2 0\n-1 2 0\n1 -2 0\n", 1)] {
        std::fs::write(&q, text).unwrap();
        let o = qplan(&["solve", q.to_str().unwrap(), "--oracle"]);
        assert_eq!(code(&o), want);
        assert_eq!(code(&qplan(&["solve", q.to_str().unwrap()])), want);
    }
}

#[test]
fn plan_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let dom = path(&dir, "rooms.dom");
    let dom = dom.to_str().unwrap();
    let plan = path(&dir, "plan.json");
    let plan = plan.to_str().unwrap();
    assert_eq!(code(&qplan(&["gen", "rooms", "4", "-o", dom])), 0);

    let o = qplan(&["plan", "--domain", dom, "--kind", "sequence", "--max-tmax", "2"]);
    assert_eq!(code(&o), 1);

    let o = qplan(&["plan", "--domain", dom, "--kind", "sequence", "--max-tmax", "5", "--out", plan]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(plan).unwrap();
    assert!(text.contains("\"tmax\": 3"));

    let o = qplan(&["verify", "--domain", dom, "--plan", plan]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().next(), Some("scenarios=8 exhaustive=true failures=0"));

    // one step short of the recorded horizon is rejected as a malformed sequence
    let o = qplan(&["verify", "--domain", dom, "--plan", plan, "--tmax", "4"]);
    assert_eq!(code(&o), 11);
}

#[test]
fn hand_written_automaton_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let dom = path(&dir, "b3.dom");
    let dom = dom.to_str().unwrap();
    assert_eq!(code(&qplan(&["gen", "blocks", "3", "-o", dom])), 0);
    let plan = fixture("blocks3_automaton.json");
    assert_eq!(code(&qplan(&["verify", "--domain", dom, "--plan", &plan, "--tmax", "5"])), 0);
    let o = qplan(&["verify", "--domain", dom, "--plan", &plan, "--tmax", "3"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("goal not reached"));
}

#[test]
fn qbf2cp_emits_a_parsable_domain() {
    let dir = tempfile::tempdir().unwrap();
    let q = path(&dir, "iff.qdimacs");
    std::fs::write(&q, "p cnf 2 2\na 1 0\ne 2 0\n-1 2 0\n1 -2 0\n").unwrap();
    let o = qplan(&["qbf2cp", q.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("fact sat s y1 c1 c2 x1\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("operator")).count(), 6);

    std::fs::write(&q, "p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n").unwrap();
    assert_eq!(code(&qplan(&["qbf2cp", q.to_str().unwrap()])), 11);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(&dir, "out.csv");
    let o = qplan(&["bench", "--suite", "paper-fixtures", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().next(), Some("encoding,params,tmax,states,clauses,vars,ms,nodes,value"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn usage_and_format_errors_exit_with_ten_or_more() {
    assert_eq!(code(&qplan(&["frobnicate"])), 10);
    assert_eq!(code(&qplan(&["encode", "--kind", "sequence"])), 10);
    assert_eq!(code(&qplan(&["bench", "--suite", "nope"])), 10);
    assert_eq!(code(&qplan(&["gen", "blocks", "9"])), 10);
    assert!(code(&qplan(&["solve", "/no/such/file"])) >= 10);

    let dir = tempfile::tempdir().unwrap();
    let bad = path(&dir, "bad.dom");
    std::fs::write(&bad, "fact a\ngoal a\n").unwrap();
    let o = qplan(&["encode", "--domain", bad.to_str().unwrap(), "--kind", "sequence", "--tmax", "1"]);
    assert_eq!(code(&o), 11);
    assert_eq!(code(&qplan(&["--help"])), 0);
}
