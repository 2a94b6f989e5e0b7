use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn autostruct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autostruct"))
        .args(args)
        .env_remove("AUTOSTRUCT_TMP")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run_fib5(dir: &Path) -> Output {
    autostruct(&["auto", "fib", "5", "--out", dir.to_str().unwrap()])
}

#[test]
fn full_run_and_queries() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_fib5(tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("verified=true"));
    for ext in [
        "pres", "rules", "kbdiff", "diff", "wa", "mult", "minrules", "mindiff", "log", "ckpt",
    ] {
        assert!(tmp.path().join(format!("fib5.{ext}")).exists(), "missing .{ext}");
    }
    let log = fs::read_to_string(tmp.path().join("fib5.log")).unwrap();
    assert!(log.contains("axioms=pass") && log.contains("verified=true"));

    let aut = tmp.path().join("fib5");
    let aut = aut.to_str().unwrap();
    assert_eq!(stdout(&autostruct(&["size", aut])).trim(), "11");
    assert_eq!(stdout(&autostruct(&["order", aut, "a1"])).trim(), "11");
    assert_eq!(stdout(&autostruct(&["reduce", aut, "a1 a2"])).trim(), "a3");
    assert_eq!(stdout(&autostruct(&["wp", aut, "a1 a2", "a3"])).trim(), "true");
    assert_eq!(stdout(&autostruct(&["wp", aut, "a1", "a2"])).trim(), "false");
    let csv = stdout(&autostruct(&["growth", aut, "--maxlen", "3", "--csv"]));
    assert!(csv.starts_with("length,count,cumulative\n0,1,1\n"));
}

#[test]
fn runs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run_fib5(a.path()).status.success());
    assert!(run_fib5(b.path()).status.success());
    for ext in ["pres", "rules", "diff", "wa", "mult", "minrules", "mindiff", "ckpt"] {
        let name = format!("fib5.{ext}");
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn bad_input_exits_2_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let pres = tmp.path().join("bad.pres");
    fs::write(&pres, "this is not a presentation\n").unwrap();
    let out_dir = tmp.path().join("out");
    let out = autostruct(&["auto", pres.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());
    assert_eq!(autostruct(&["auto", "fib", "1"]).status.code(), Some(2));
}

#[test]
fn resume_finished_and_tampered_runs() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run_fib5(tmp.path()).status.success());
    let dir = tmp.path().to_str().unwrap();
    let out = autostruct(&["resume", dir]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verified=true"));

    let pres = tmp.path().join("fib5.pres");
    let mut text = fs::read_to_string(&pres).unwrap();
    text.push_str("\n# edited\n");
    fs::write(&pres, text).unwrap();
    assert_eq!(autostruct(&["resume", dir]).status.code(), Some(5));
}

#[test]
fn staged_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let kb = autostruct(&["kb", "fib", "5", "--out", dir]);
    assert!(kb.status.success());
    let prefix = tmp.path().join("fib5");
    let prefix = prefix.to_str().unwrap();
    assert!(stdout(&autostruct(&["wa", prefix])).starts_with("W="));
    assert!(stdout(&autostruct(&["mult", prefix])).starts_with("M_raw="));
    let check = autostruct(&["check", prefix]);
    assert_eq!(stdout(&check).trim(), "check=ok");
    let axioms = autostruct(&["axioms", prefix]);
    assert_eq!(axioms.status.code(), Some(0));
    assert_eq!(stdout(&axioms).trim(), "axioms=pass");
}

#[test]
fn queries_refuse_missing_structures() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nothing");
    let out = autostruct(&["size", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
