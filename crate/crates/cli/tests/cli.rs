use std::path::PathBuf;
use std::process::{Command, Output};

fn mgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> String {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const CROSSING: &str = "[[motorcycle]]\ns = [0, 0]\nv = [1, 0]\nd = [10, 0]\n\n[[motorcycle]]\ns = [5, -1]\nv = [0, 1]\nd = [5, 3]\n";

#[test]
fn generate_is_deterministic() {
    let a = mgraph(&["generate", "uniform-random", "-n", "20", "--seed", "4"]);
    let b = mgraph(&["generate", "uniform-random", "-n", "20", "--seed", "4"]);
    let c = mgraph(&["generate", "uniform-random", "-n", "20", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_ne!(stdout(&a), stdout(&c));
    assert_eq!(stdout(&a).matches("[[motorcycle]]").count(), 20);
}

#[test]
fn generated_files_verify() {
    for kind in ["uniform-random", "c-oriented", "collinear-stress", "nested-fig8"] {
        let path = scratch(&format!("{kind}.toml"));
        let path = path.to_str().unwrap();
        let g = mgraph(&["generate", kind, "-n", "13", "--seed", "2", "-o", path]);
        assert!(g.status.success(), "{}", stderr(&g));
        let v = mgraph(&["verify", path]);
        assert_eq!(v.status.code(), Some(0), "{kind}: {}{}", stdout(&v), stderr(&v));
        assert!(stdout(&v).starts_with("ok"));
    }
}

#[test]
fn solve_prints_outcomes() {
    let f = write("crossing.toml", CROSSING);
    let o = mgraph(&["solve", &f]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("outcome = \"crashed\"\ninto = 2"), "{out}");
    assert!(out.contains("outcome = \"destination\""), "{out}");
}

#[test]
fn injected_fault_exits_with_one_and_names_the_rider() {
    let f = write("fault.toml", CROSSING);
    let o = mgraph(&["verify", &f, "--fault", "skip-blocked-check"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mismatch at rider 1"), "{}", stderr(&o));
}

#[test]
fn bad_input_exits_with_two() {
    let missing = scratch("does-not-exist.toml");
    assert_eq!(mgraph(&["solve", missing.to_str().unwrap()]).status.code(), Some(2));
    let f = write("bad.toml", "[[motorcycle]]\ns = [0, 0]\nv = [0, 0]\n");
    assert_eq!(mgraph(&["solve", &f]).status.code(), Some(2));
    let f = write("typo.toml", "[[motorcycle]]\ns = [0, 0]\nvelocity = [1, 0]\n");
    let o = mgraph(&["verify", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    assert_eq!(mgraph(&["generate", "spiral"]).status.code(), Some(2));
}

#[test]
fn render_is_deterministic_and_shows_the_state() {
    let f = write("render.toml", CROSSING);
    let a = mgraph(&["render", &f]);
    let b = mgraph(&["render", &f]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("<svg"));
    let mid = mgraph(&["render", &f, "--until", "1"]);
    assert!(stdout(&mid).contains("stroke-dasharray"));
}

#[test]
fn trace_stops_after_until_events() {
    let f = write("trace.toml", CROSSING);
    let all = mgraph(&["trace", &f]);
    let one = mgraph(&["trace", &f, "--until", "1"]);
    assert!(stdout(&all).lines().count() > 1);
    assert_eq!(stdout(&one).lines().count(), 1);
}

#[test]
fn bench_writes_csv() {
    let o = mgraph(&["bench", "--min-exp", "3", "--max-exp", "4", "--halving", "counting,midpoint"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("n,backend,halving"));
    assert_eq!(out.lines().count(), 5);
}
