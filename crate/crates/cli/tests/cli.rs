use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ::semican::report::TransitionReport;
use ::semican::QMatrix;

fn semican(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semican"))
        .args(args)
        .env_remove("SEMICAN_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn transition_json(n: &str, dim: &str) -> TransitionReport {
    let o = semican(&["transition", "--n", n, "--dim", dim, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    TransitionReport::from_json(&stdout(&o)).unwrap()
}

#[test]
fn two_two_matrix() {
    let r = transition_json("2", "2,2");
    assert_eq!(r.order, ["2[1,2]", "1[1,2]+1[1,1]+1[2,2]", "2[1,1]+2[2,2]"]);
    assert_eq!(
        r.transition().unwrap(),
        QMatrix::from_integers(&[vec![1, 1, 1], vec![0, 1, 2], vec![0, 0, 1]])
    );
    assert!(r.certification.passed);
}

#[test]
fn single_vertex_is_identity() {
    let r = transition_json("1", "3");
    assert_eq!(r.order, ["3[1,1]"]);
    assert_eq!(r.matrix, vec![vec!["1/1".to_string()]]);
}

#[test]
fn three_vertices_all_ones() {
    let r = transition_json("3", "1,1,1");
    assert_eq!(r.order.len(), 4);
    assert!(r.matrix[0].iter().all(|v| v == "1/1"));
    assert!(r.certification.passed);
}

#[test]
fn json_is_byte_deterministic() {
    let args = ["transition", "--n", "3", "--dim", "2,1,1", "--format", "json", "--seed", "7"];
    let a = semican(&args);
    let b = semican(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = TransitionReport::from_json(&stdout(&a)).unwrap();
    assert_eq!(TransitionReport::from_json(&r.to_json()).unwrap(), r);
    assert_eq!(r.seeds.construction, 7);
}

#[test]
fn seed_does_not_change_the_matrix() {
    let a = semican(&["transition", "--n", "2", "--dim", "2,2", "--format", "csv", "--seed", "1"]);
    let b = semican(&["transition", "--n", "2", "--dim", "2,2", "--format", "csv", "--seed", "99"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_header() {
    let o = semican(&["transition", "--n", "2", "--dim", "1,1", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().next().unwrap(), "class,\"1[1,2]\",\"1[1,1]+1[2,2]\"");
}

#[test]
fn inspect_flag_of_module() {
    let o = semican(&["inspect", "flag", "--n", "2", "--module", "1[1,2]+1[1,1]+1[2,2]"]);
    assert_eq!(stdout(&o).trim(), "(2,1)(1,2)(2,1)");
}

#[test]
fn inspect_flag_of_word() {
    let o = semican(&["inspect", "flag", "--n", "2", "--word", "(2,1)(1,2)(2,1)"]);
    let out = stdout(&o);
    assert!(out.contains("1/1*P[1[1,2]+1[1,1]+1[2,2]]"), "{out}");
    assert!(out.contains("2/1*P[2[1,1]+2[2,2]]"), "{out}");
}

#[test]
fn inspect_t_and_peel() {
    let t = semican(&["inspect", "t", "--n", "2", "--module", "2[1,1]+2[2,2]", "--vertex", "2"]);
    assert_eq!(stdout(&t).trim(), "2");
    let t = semican(&[
        "inspect", "t", "--n", "2", "--module", "2[1,1]+2[2,2]", "--vertex", "2", "--level", "component",
    ]);
    assert_eq!(stdout(&t).trim(), "2");
    let p = semican(&["inspect", "peel", "--n", "2", "--module", "1[1,2]+1[2,2]", "--vertex", "2"]);
    assert_eq!(stdout(&p).trim(), "1[1,2]");
}

#[test]
fn inspect_hall_counts() {
    let o = semican(&[
        "inspect", "hall", "--n", "2", "--module", "2[1,1]+2[2,2]", "--vertex", "2", "--primes", "2,3",
    ]);
    let out = stdout(&o);
    assert!(out.contains("p=2: 2[1,1]+1[2,2]: 3"), "{out}");
    assert!(out.contains("p=3: 2[1,1]+1[2,2]: 4"), "{out}");
    assert!(out.contains("q=1: 2[1,1]+1[2,2]: 2"), "{out}");
}

#[test]
fn inspect_deg_order() {
    let o = semican(&["inspect", "deg-order", "--n", "2", "--dim", "2,2"]);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[2].contains("2[1,1]+2[2,2]"));
}

#[test]
fn parse_errors_exit_10() {
    for args in [
        &["transition", "--n", "2", "--dim", "2,x"][..],
        &["transition", "--n", "2", "--dim", "1,1,1"],
        &["inspect", "flag", "--n", "2", "--module", "1[2,1]"],
        &["inspect", "t", "--n", "2", "--module", "1[1,2]", "--vertex", "3"],
        &["no-such-command"],
    ] {
        assert_eq!(semican(args).status.code(), Some(10), "{args:?}");
    }
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(semican(&["--help"]).status.code(), Some(0));
}

fn cache_stats(dir: &Path) -> String {
    let o = semican(&["cache", "stats", "--cache-dir", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    stdout(&o)
}

#[test]
fn cache_fill_stats_clear() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = semican(&["transition", "--n", "2", "--dim", "2,2", "--cache-dir", d, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let stats = cache_stats(dir.path());
    assert!(!stats.contains("records: 0"), "{stats}");
    assert!(stats.contains("malformed lines: 0"), "{stats}");
    // A second run reads the records and gives identical output.
    let again = semican(&["transition", "--n", "2", "--dim", "2,2", "--cache-dir", d, "--format", "json"]);
    assert_eq!(o.stdout, again.stdout);
    let c = semican(&["cache", "clear", "--cache-dir", d]);
    assert_eq!(c.status.code(), Some(0));
    assert!(cache_stats(dir.path()).contains("records: 0"));
}

#[test]
fn cache_commands_need_a_directory() {
    assert_eq!(semican(&["cache", "stats"]).status.code(), Some(10));
}

#[test]
fn corrupted_cache_fails_selftest() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("hall_counts.txt"),
        "2;2[1,1]+2[2,2];2;1;3;{\"2[1,1]+1[2,2]\":5}\nnot a record\n",
    )
    .unwrap();
    let o = semican(&["selftest", "--dim-bound", "2", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(40));
    assert!(stdout(&o).contains("FAIL hall-cache"), "{}", stdout(&o));
}

#[test]
fn selftest_small_bound_passes() {
    let o = semican(&["selftest", "--dim-bound", "3"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.trim_end().ends_with("selftest: PASS"));
}
