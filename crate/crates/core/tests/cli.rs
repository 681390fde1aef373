//! End-to-end runs of the binary.

mod common;

use common::{cli, fixture_path, subcommand_invocations};

fn path(n: &str) -> String {
    fixture_path(n).display().to_string()
}

fn validate(schema_for: &str, report: &str) {
    let schema = cli(&["--schema", schema_for]);
    assert_eq!(schema.code, 0);
    let schema: serde_json::Value = serde_json::from_str(&schema.stdout).unwrap();
    let instance: serde_json::Value = serde_json::from_str(report).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(&instance) {
        Ok(()) => Vec::new(),
        Err(errors) => errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect(),
    };
    assert!(
        msgs.is_empty(),
        "{schema_for} output does not match its schema: {msgs:#?}"
    );
}

#[test]
fn check_sc_on_surface_passes() {
    let r = cli(&[
        "check-sc",
        &path("surf.txt"),
        "--lambda",
        "1/6",
        "--variant",
        "cprime",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["max_piece_len"], 1);
}

#[test]
fn growth_csv_has_one_row_per_radius() {
    let r = cli(&[
        "growth",
        &path("f2.txt"),
        "--radius",
        "8",
        "--format",
        "csv",
    ]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.stdout.lines().collect();
    assert_eq!(lines[0], "n,ball_size,fekete_upper");
    assert_eq!(lines.len(), 9);
    assert!(lines[8].starts_with("8,13121,"));
}

#[test]
fn unsupported_word_problem_is_a_domain_error() {
    let r = cli(&["growth", &path("zz.txt"), "--radius", "3"]);
    assert_eq!(r.code, 1);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["error"], "UnsupportedWordProblem");
    validate("error", &r.stdout);
}

#[test]
fn dehn_gate_on_non_small_cancellation() {
    let r = cli(&["dehn", &path("zz.txt"), "--word", "ab", "--equal", "ba"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("NotVerifiedC16"));
}

#[test]
fn usage_errors_exit_2_and_name_the_flag() {
    let r = cli(&["check-sc", &path("surf.txt"), "--lambda", "0.1e3"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--lambda"), "{}", r.stderr);
    assert!(r.stdout.is_empty());

    let r = cli(&["growth", &path("f2.txt")]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--radius"));

    let r = cli(&[
        "energy",
        &path("f2.txt"),
        "--radius",
        "2",
        "--set",
        "a",
        "--format",
        "csv",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--format"));

    let r = cli(&["--threads", "0", "check-sc", &path("surf.txt")]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--threads"));

    assert_eq!(cli(&[]).code, 2);
    assert_eq!(cli(&["frobnicate"]).code, 2);
}

#[test]
fn help_and_version_exit_0() {
    let r = cli(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("shortfree"));
    assert_eq!(cli(&["--version"]).code, 0);
}

#[test]
fn bad_input_file_and_letters() {
    let r = cli(&["check-sc", "/nonexistent/p.txt"]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("\"Io\""));
    let r = cli(&["dehn", &path("surf.txt"), "--word", "abz"]);
    assert_eq!(r.code, 1);
    validate("error", &r.stdout);
}

#[test]
fn every_subcommand_output_matches_its_schema() {
    for (sub, args) in subcommand_invocations() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = cli(&args);
        assert_eq!(r.code, 0, "{sub}: {}", r.stdout);
        validate(sub, &r.stdout);
    }
}

#[test]
fn output_is_deterministic_and_thread_independent() {
    for (sub, args) in subcommand_invocations() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = cli(&args);
        let b = cli(&args);
        assert_eq!(a.stdout, b.stdout, "{sub}");
        let mut one = vec!["--threads", "1"];
        one.extend(&args);
        assert_eq!(cli(&one).stdout, a.stdout, "{sub} with one thread");
    }
}

#[test]
fn output_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("g.csv");
    let target_s = target.display().to_string();
    let r = cli(&[
        "growth",
        &path("f2.txt"),
        "--radius",
        "3",
        "--format",
        "csv",
        "--output",
        &target_s,
    ]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    assert_eq!(written.lines().count(), 4);
}

#[test]
fn shortfree_csv_matches_counts() {
    let r = cli(&[
        "shortfree",
        &path("f2.txt"),
        "--h",
        "a^40",
        "--conj-radius",
        "25",
        "--set",
        "a^10,b^10",
        "--alpha",
        "1",
        "--delta",
        "0.005",
        "--tau",
        "15",
        "--n",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(
        r.stdout,
        "k,count,bound_ok\n0,1,true\n1,5,true\n2,15,true\n3,41,true\n4,107,true\n"
    );
}
