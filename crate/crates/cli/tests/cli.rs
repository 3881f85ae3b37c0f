use std::path::Path;
use std::process::{Command, Output};

const LEGAL: &str = "t=1 op=1 inv Enqueue 'a'\nt=1 op=1 ret unit\nt=2 op=2 inv Dequeue unit\nt=2 op=2 ret 'a'\n";
const ILLEGAL: &str = "t=1 op=1 inv Enqueue 'a'\nt=1 op=1 ret unit\nt=2 op=2 inv Dequeue unit\nt=2 op=2 ret 'b'\n";
const PROGRAM: &str = "thread { call Q.Enqueue('c') }\nthread { call Q.Dequeue() }\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strictlin")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn legal_history_passes_general_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", LEGAL);
    let o = run(&["check-history", "--file", &h, "--spec", "adt-queue", "--mode", "general"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("witness"));
}

#[test]
fn illegal_history_exits_one_with_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.txt", ILLEGAL);
    let o = run(&["check-history", "--file", &h, "--spec", "adt-queue", "--mode", "strict"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.txt", PROGRAM);
    let bad = write(dir.path(), "bad.txt", "t=1 op=1 ret unit\n");
    for args in [
        vec!["explore", "--model", "no-such-queue", "--program", p.as_str()],
        vec!["check-history", "--file", "/nonexistent/h.txt", "--spec", "adt-queue"],
        vec!["check-history", "--file", bad.as_str(), "--spec", "adt-queue"],
        vec!["check-history", "--file", bad.as_str(), "--spec", "adt-stack"],
        vec!["reproduce", "fig99"],
        vec!["list", "--bogus"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn reproduce_fig2_prints_both_state_sets() {
    let o = run(&["reproduce", "fig2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("4 final states") && out.contains("2 final states"), "{out}");
    assert!(out.contains("back=3 items=[·,d,·,·]"));
}

#[test]
fn reproduce_sec52_prints_the_contrast() {
    let o = run(&["reproduce", "sec52-divergence"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("P(HW): divergent schedule found; P(Ato_HW): all schedules terminate"));
}

#[test]
fn list_names_every_reproduction() {
    let o = run(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for name in ["fig2", "fig3", "sec52-divergence", "sec62-observation", "propH-msqueue-strict", "prop2-fuzz"] {
        assert!(out.contains(name), "{name}");
    }
}

#[test]
fn explore_and_compare_write_json_and_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.txt", PROGRAM);
    let json = dir.path().join("r.json");
    let args = ["explore", "--model", "coarse-queue", "--program", &p, "--mode", "strict", "--json", json.to_str().unwrap()];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(report.is_object());
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);

    let o = run(&["compare", "--model", "coarse-queue", "--program", &p]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["explore", "--model", "hw-queue,N=4", "--program", &p, "--mode", "general", "--adt", "adt-queue", "--af", "af-hw-queue"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
