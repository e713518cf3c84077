use std::path::PathBuf;
use std::process::{Command, Output};

fn rsasm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsasm"))
        .args(args)
        .env_remove("RSASM_MAX_STEPS")
        .output()
        .expect("binary runs")
}

fn program(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("programs")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn run_parity_prints_the_parity() {
    let o = rsasm(&["run", &program("parity.rsasm")]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("status: fixpoint"), "{out}");
    assert!(out.contains("parity = 1"), "{out}");
    assert!(out.contains("card = 3"), "{out}");
}

#[test]
fn check_reports_the_error_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.rsasm", "SIGNATURE\n  c/0\nRULE\n  c := := 1\n");
    let o = rsasm(&["check", &bad]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":4:"), "{err}");
    let arity = write(&dir, "arity.rsasm", "SIGNATURE\n  f/1\nRULE\n  f := 1\n");
    assert!(!rsasm(&["check", &arity]).status.success());
    assert!(rsasm(&["check", &program("join.rsasm")]).status.success());
}

#[test]
fn minimal_program_is_a_one_step_fixpoint() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "min.rsasm", "RULE\n  PAR ENDPAR\n");
    let o = rsasm(&["run", &p, "--format", "json"]);
    assert!(o.status.success());
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["status"], "fixpoint");
    assert_eq!(j["steps"].as_array().unwrap().len(), 1);
}

#[test]
fn strict_turns_a_clash_into_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        &dir,
        "clash.rsasm",
        "SIGNATURE\n  c/0\nRULE\n  c := 1\n  c := 2\n",
    );
    let lax = rsasm(&["run", &p]);
    assert!(lax.status.success());
    assert!(stdout(&lax).contains("status: clash"));
    assert!(!rsasm(&["run", &p, "--strict"]).status.success());
}

#[test]
fn max_steps_comes_from_the_flag_or_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        &dir,
        "count.rsasm",
        "SIGNATURE\n  c/0\nINIT\n  c := 0\nRULE\n  c <=[+] 1\n",
    );
    let o = rsasm(&["run", &p, "--max-steps", "3"]);
    assert!(stdout(&o).contains("c = 3"), "{}", stdout(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_rsasm"))
        .args(["run", &p])
        .env("RSASM_MAX_STEPS", "5")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("status: max_steps"));
    assert!(stdout(&o).contains("c = 5"), "{}", stdout(&o));
}

#[test]
fn trace_dump_and_diff_self() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.json").display().to_string();
    let o = rsasm(&[
        "run",
        &program("join.rsasm"),
        "--trace",
        &trace,
        "--dump-self",
        "1",
    ]);
    assert!(o.status.success());
    assert!(
        stdout(&o).contains("f$1"),
        "the dumped self lists the new symbol"
    );
    let first = std::fs::read(&trace).unwrap();
    rsasm(&["run", &program("join.rsasm"), "--trace", &trace]);
    assert_eq!(
        first,
        std::fs::read(&trace).unwrap(),
        "trace bytes are stable"
    );

    let j: serde_json::Value = serde_json::from_slice(&first).unwrap();
    let step = &j["steps"][0];
    assert_eq!(step["self_digest"].as_str().unwrap().len(), 64);
    assert_eq!(step["signature_added"][0], "f$1/1");

    let o = rsasm(&["diff-self", &trace, "0", "1", "--rule"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("label_hedge(#self"), "{}", stdout(&o));
    assert!(!rsasm(&["diff-self", &trace, "0", "99"]).status.success());
}

#[test]
fn probe_passes_and_reports_json() {
    let o = rsasm(&["probe", "--trials", "30", "--seed", "4", "--format", "json"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j.as_array().unwrap().len(), 2);
    assert_eq!(j[0]["checked"], 30);
}
