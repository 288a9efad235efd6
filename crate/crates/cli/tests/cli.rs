use std::path::Path;
use std::process::{Command, Output};

fn unb(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unb"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn simulate(dir: &Path, name: &str, seed: &str) -> Output {
    unb(
        &["simulate", "--r", "3", "--p", "0.5", "--n", "1500", "--seed", seed, "--output", name],
        dir,
    )
}

#[test]
fn simulate_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&simulate(dir.path(), "a.csv", "42")), 0);
    assert_eq!(code(&simulate(dir.path(), "b.csv", "42")), 0);
    assert_eq!(code(&simulate(dir.path(), "c.csv", "43")), 0);
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_ne!(read("a.csv"), read("c.csv"));
    assert!(read("a.csv").starts_with(b"count\n"));
    let meta: serde_json::Value = serde_json::from_slice(&read("a.csv.json")).unwrap();
    assert_eq!(meta["seed"], 42);
    assert_eq!(meta["r"], 3.0);
    assert_eq!(meta["n"], 1500);
}

#[test]
fn fit_json_is_deterministic_and_versioned() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), "s.csv", "7");
    let args = ["fit", "--input", "s.csv", "--models", "unb,nb,up,geometric", "--lr-test", "--format", "json"];
    let first = unb(&args, dir.path());
    let second = unb(&args, dir.path());
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, second.stdout);
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "fit");
    assert_eq!(v["models"].as_array().unwrap().len(), 4);
    let r = v["models"][0]["parameters"][0]["estimate"].as_f64().unwrap();
    assert!((1.5..6.0).contains(&r), "r = {r}");
    assert!(v["lr_test"]["p_value"].as_f64().unwrap() < 0.05);
}

#[test]
fn fit_text_uses_six_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), "s.csv", "7");
    let out = unb(&["fit", "--input", "s.csv", "--method", "mm"], dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("method of moments"), "{text}");
    let ll_line = text.lines().find(|l| l.starts_with("log-likelihood")).unwrap();
    let value = ll_line.split_whitespace().last().unwrap();
    assert_eq!(value.trim_start_matches('-').replace('.', "").len(), 6, "{value}");
}

#[test]
fn report_can_be_written_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), "s.csv", "1");
    let out = unb(&["fit", "--input", "s.csv", "--format", "json", "--output", "fit.json"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(v["command"], "fit");
}

#[test]
fn regress_and_compare_with_covariates() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), "s.csv", "19");
    let counts = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut csv = String::from("visits;age;female\n");
    for (i, visits) in counts.lines().skip(1).take(300).enumerate() {
        let age = (i % 7) as f64 / 2.0;
        csv.push_str(&format!("{visits};{age};{}\n", u8::from(i % 3 == 0)));
    }
    std::fs::write(dir.path().join("v.csv"), csv).unwrap();
    let base = ["--input", "v.csv", "--response", "visits", "--delimiter", "semicolon", "--covariates", "age,female"];

    let mut args = vec!["regress"];
    args.extend(base);
    args.extend(["--models", "unb,nb,up", "--format", "json"]);
    let out = unb(&args, dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["fits"].as_array().unwrap().len(), 3);
    assert_eq!(v["fits"][0]["names"][0], "(Intercept)");
    assert!(v["fits"][2]["r"].is_null());

    let mut args = vec!["compare"];
    args.extend(base);
    let out = unb(&args, dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("Vuong tests against unb"), "{text}");
}

#[test]
fn self_comparison_reports_degenerate_pair() {
    let dir = tempfile::tempdir().unwrap();
    simulate(dir.path(), "s.csv", "3");
    let out = unb(&["compare", "--input", "s.csv", "--models", "unb,unb", "--format", "json"], dir.path());
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["vuong"][0]["error"].as_str().unwrap().contains("omega"));
}

#[test]
fn summarize_groups_partition_the_sample() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.csv"), "count,g\n0,1\n2,0\n1,1\n0,0\n5,1\n").unwrap();
    let out = unb(&["summarize", "--input", "g.csv", "--group-by", "g", "--format", "json"], dir.path());
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["overall"]["n"], 5);
    let groups = v["groups"].as_array().unwrap();
    assert_eq!(groups[0]["n"].as_u64().unwrap() + groups[1]["n"].as_u64().unwrap(), 5);
    assert_eq!(v["frequencies"][0]["value"], 0);
}

#[test]
fn non_convergence_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // under-dispersed counts push r towards infinity
    std::fs::write(dir.path().join("u.csv"), "count\n1\n2\n1\n2\n1\n2\n1\n1\n2\n").unwrap();
    let out = unb(&["fit", "--input", "u.csv"], dir.path());
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("converged       no"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("empty.csv"), "count\n").unwrap();
    std::fs::write(p.join("bad.csv"), "count\n1\n-2\n").unwrap();
    std::fs::write(p.join("zeros.csv"), "count\n0\n0\n0\n").unwrap();
    std::fs::write(p.join("rank.csv"), "count,one\n1,1\n2,1\n0,1\n3,1\n").unwrap();
    let cases: [&[&str]; 8] = [
        &["fit", "--input", "empty.csv"],
        &["fit", "--input", "missing.csv"],
        &["fit", "--input", "bad.csv"],
        &["fit", "--input", "zeros.csv"],
        &["fit", "--input", "empty.csv", "--models", "poisson"],
        &["regress", "--input", "rank.csv", "--covariates", "one"],
        &["regress", "--input", "rank.csv", "--covariates", "nope"],
        &["compare", "--input", "rank.csv", "--models", "unb"],
    ];
    for args in cases {
        let out = unb(args, p);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    }
    // clap usage errors share the same status
    assert_eq!(code(&unb(&["fit"], p)), 2);
}
