use std::fs;
use std::process::{Command, Output};

fn xxzneg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xxzneg"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn twisted_table_by_exact_diagonalization() {
    let o = xxzneg(&["table", "--id", "4", "--method", "ed", "--L", "4,8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let cells: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(cells, ["0.400000000000", "0.381121448251"]);
}

#[test]
fn free_fermion_table_matches_reference_digits() {
    let o = xxzneg(&["table", "--id", "1", "--method", "ff,cft"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("1024,0.339263774123,0.339263774121,"), "{last}");
    assert_eq!(text.lines().count(), 10);
    assert!(!text.contains('\r'));
}

#[test]
fn empty_size_list_gives_header_only() {
    let o = xxzneg(&["table", "--id", "1", "--L", ""]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "L,N_exact,N_cft,diff,L2_diff\n");
}

#[test]
fn identical_configs_give_identical_bytes() {
    let args = ["sweep", "--L", "6,8", "--delta=-0.6:0.6:0.3", "--phi", "pi/2", "--method", "ed,cft"];
    let a = xxzneg(&args);
    let b = xxzneg(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn corrupted_cache_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["table", "--id", "2", "--method", "bethe,cft", "--L", "32,64", "--cache", cache];
    let fresh = xxzneg(&args);
    assert_eq!(fresh.status.code(), Some(0), "{}", stderr(&fresh));
    let records: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(records.len(), 2);
    for r in &records {
        let key = fs::read_to_string(r).unwrap().lines().next().unwrap().to_string();
        fs::write(r, format!("{key}\ngarbage\n")).unwrap();
    }
    let again = xxzneg(&args);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(fresh.stdout, again.stdout);
    assert!(stderr(&again).contains("corrupted cache record"), "{}", stderr(&again));
    let warm = xxzneg(&args);
    assert_eq!(warm.stdout, fresh.stdout);
    assert!(stderr(&warm).is_empty());
}

#[test]
fn infeasible_requests_exit_three_with_a_hint() {
    let o = xxzneg(&["table", "--id", "1", "--method", "ed", "--L", "1024"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--ed-cap"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["table", "--id", "2", "--precision", "20"][..],
        &["table", "--id", "9"],
        &["fig", "--id", "3"],
        &["sweep", "--delta", "1:0:0.1"],
        &["bogus"],
    ] {
        let o = xxzneg(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# small run\nprecision = 6\nmethod = ff,cft\nL = 4, 8\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = stdout(&xxzneg(&["table", "--id", "1", "--config", c]));
    assert_eq!(from_file.lines().nth(1).unwrap(), "4,0.457107,0.446379,0.010728,0.171650");
    let overridden = stdout(&xxzneg(&["table", "--id", "1", "--config", c, "--precision", "8"]));
    assert_eq!(overridden.lines().nth(1).unwrap().split(',').nth(1), Some("0.45710678"));
}

#[test]
fn output_file_and_marginal_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t5.csv");
    let o = xxzneg(&["table", "--id", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("256,0.000000000000,0.338660739066,0.339288291732"), "{text}");
    let degraded = stdout(&xxzneg(&["table", "--id", "5", "--method", "cft"]));
    assert!(degraded.lines().skip(1).all(|l| l.ends_with("UNAVAILABLE,UNAVAILABLE")));
}

#[test]
fn figure_one_reaches_the_limit_curve() {
    let o = xxzneg(&["fig", "--id", "1", "--L", "8,inf", "--delta", "0"]);
    let text = stdout(&o);
    assert_eq!(
        text,
        "L,delta,deps_ddelta,eps\n8,0.000000000000,0.213388347648,-0.653281482438\ninf,0.000000000000,0.202642367285,-0.636619772368\n"
    );
}

#[test]
fn check_with_low_cap_skips_and_is_deterministic() {
    let a = xxzneg(&["check", "--ed-cap", "4"]);
    let b = xxzneg(&["check", "--ed-cap", "4"]);
    assert_eq!(a.status.code(), Some(3), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.lines().any(|l| l.starts_with("1,SKIPPED")));
    assert!(text.lines().any(|l| l.starts_with("2,PASS")));
    assert!(text.lines().any(|l| l.starts_with("11,PASS")));
    assert!(!text.contains("FAIL"));
}
