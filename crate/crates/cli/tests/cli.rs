use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_olsrv2-sim"))
}

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("olsrv2-sim-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn check_fig3_with_bug_reports_suboptimal_route() {
    let fig3 = scenario("fig3.scn");
    let o = run(&["check", "--scenario", fig3.to_str().unwrap(), "--bug-rfc7181"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("OPT n=S verdict=false missing={} subopt={(D,7,6)}"), "{}", stdout(&o));
}

#[test]
fn check_fig3_without_bug_passes() {
    let fig3 = scenario("fig3.scn");
    let o = run(&["check", "--scenario", fig3.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("OPT n=S verdict=true"));
}

#[test]
fn check_sweeps_seeds() {
    let fig3 = scenario("fig3.scn");
    let o = run(&["check", "--scenario", fig3.to_str().unwrap(), "--seeds", "3..6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let seeds: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("seed="))
        .filter_map(|l| l.split(' ').next())
        .collect();
    assert_eq!(seeds, ["seed=3", "seed=4", "seed=5"]);
}

#[test]
fn zero_ticks_give_an_empty_trace() {
    let fig3 = scenario("fig3.scn");
    let o = run(&["run", "--scenario", fig3.to_str().unwrap(), "--ticks", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn trace_file_matches_stdout_trace() {
    let fig1 = scenario("fig1.scn");
    let out = std::env::temp_dir().join(format!("olsrv2-sim-{}-trace.txt", std::process::id()));
    let a = run(&["run", "--scenario", fig1.to_str().unwrap(), "--ticks", "80", "--seed", "9", "--trace", out.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&["run", "--scenario", fig1.to_str().unwrap(), "--ticks", "80", "--seed", "9"]);
    let written = std::fs::read_to_string(&out).unwrap();
    assert!(!written.is_empty());
    assert_eq!(written, stdout(&b));
    assert!(written.lines().all(|l| l.starts_with("t=")));
    std::fs::remove_file(out).ok();
}

#[test]
fn parse_errors_exit_with_usage_code() {
    let bad = temp_file("bad.scn", "node A\nnode B\nlink A B zero\n");
    let o = run(&["run", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let tight = temp_file("tight.scn", "param lb 2\nparam hp_maxjitter 2\nnode A\n");
    let o = run(&["check", "--scenario", tight.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("LB + ΔB < hp_maxjitter"), "{}", stderr(&o));

    let missing = run(&["run", "--scenario", "/nonexistent/olsrv2.scn"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn small_budget_means_no_convergence() {
    let fig3 = scenario("fig3.scn");
    let o = run(&["check", "--scenario", fig3.to_str().unwrap(), "--ticks", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("converged_at=none"));
}

#[test]
fn demos() {
    let o = run(&["demo", "fig1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("broadcasts=3 by={B,E,H} delivered=9"), "{}", stdout(&o));
    let o = run(&["demo", "fig1", "--flood-all"]);
    assert!(stdout(&o).contains("broadcasts=9"));
    let o = run(&["demo", "fig2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = run(&["demo", "fig3", "--bug-rfc7181"]);
    assert_eq!(o.status.code(), Some(0));
    let table: Vec<String> = stdout(&o).lines().take(3).map(|l| l.split_whitespace().collect::<Vec<_>>().join(" ")).collect();
    assert_eq!(
        table,
        [
            "bug_rfc7181 D.rmprs S->D verdict",
            "true {C} via A m=7 false",
            "false {B} via A m=6 true"
        ]
    );
}
