//! The `hti` binary: exit codes, stdout reports and stderr diagnostics.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(file)
}

fn hti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hti"))
        .args(args)
        .env_remove("HTI_PRELUDE")
        .output()
        .expect("run hti")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = hti(args);
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(file: &str) -> String {
    corpus(file).display().to_string()
}

#[test]
fn check_clean_file_is_silent() {
    assert_eq!(
        run(&["check", &path("jrule.hti")]),
        (0, String::new(), String::new())
    );
}

#[test]
fn check_several_files_share_definitions() {
    let (code, _, err) = run(&[
        "check",
        &path("paths.hti"),
        &path("jrule.hti"),
        &path("univalence.hti"),
    ]);
    assert_eq!(code, 0, "{err}");
}

#[test]
fn check_type_error_reports_one_diagnostic() {
    let (code, out, err) = run(&["check", &path("negative/endpoints.hti")]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    let headers: Vec<&str> = err.lines().filter(|l| l.contains(": error[")).collect();
    assert_eq!(headers.len(), 1, "{err}");
    assert!(
        headers[0].contains("endpoints.hti:") && headers[0].contains("error[E-CONV]"),
        "{err}"
    );
}

#[test]
fn check_missing_file_is_a_usage_error() {
    let (code, _, err) = run(&["check", "missing.hti"]);
    assert_eq!(code, 2);
    assert!(
        err.contains("missing.hti") && err.contains("E-INTERNAL"),
        "{err}"
    );
}

#[test]
fn check_without_prelude_misses_prelude_names() {
    let (code, _, err) = run(&["check", "--no-prelude", &path("jrule.hti")]);
    assert_eq!(code, 0, "{err}");
    let (code, _, err) = run(&["check", "--no-prelude", &path("univalence.hti")]);
    assert_eq!(code, 1);
    assert!(err.contains("E-SCOPE"), "{err}");
}

#[test]
fn prelude_override_from_environment() {
    let dir = std::env::temp_dir().join(format!("hti-prelude-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let prelude = dir.join("prelude.hti");
    std::fs::write(&prelude, "def not : Bool -> Bool => \\b => b\n").unwrap();
    let user = dir.join("user.hti");
    std::fs::write(&user, "def t : Bool => not true\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hti"))
        .args(["norm", user.to_str().unwrap(), "--def", "t"])
        .env("HTI_PRELUDE", &prelude)
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "true\n");

    let out = Command::new(env!("CARGO_BIN_EXE_hti"))
        .args(["check", user.to_str().unwrap()])
        .env("HTI_PRELUDE", dir.join("absent.hti"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn norm_prints_surface_normal_forms() {
    assert_eq!(
        run(&["norm", &path("univalence.hti"), "--def", "composite"]),
        (0, "\\e => \\x => proj1 e x\n".to_owned(), String::new())
    );
    assert_eq!(
        run(&["norm", &path("paths.hti"), "--def", "refl_at_left"]),
        (0, "true\n".to_owned(), String::new())
    );
}

#[test]
fn norm_of_absent_definition_fails() {
    let (code, out, err) = run(&["norm", &path("paths.hti"), "--def", "nosuch"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("nosuch"));
}

#[test]
fn norm_of_ill_typed_file_fails() {
    let (code, out, _) = run(&["norm", &path("negative/scope.hti"), "--def", "x"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
}

#[test]
fn oracle_agrees_on_paths_corpus_and_generated_terms() {
    let (code, out, err) = run(&[
        "oracle",
        &path("paths.hti"),
        "--count",
        "500",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0, "{err}");
    let summary = out.lines().last().unwrap();
    let counts: Vec<usize> = summary
        .strip_prefix("oracle: ")
        .unwrap()
        .split(", ")
        .map(|part| part.split(' ').next().unwrap().parse().unwrap())
        .collect();
    let (ok, disagree, skipped) = (counts[0], counts[1], counts[2]);
    assert_eq!(disagree, 0, "{out}");
    assert!(ok >= 500 - skipped, "{summary}");
    assert_eq!(out.lines().count() - 1, ok + skipped);
}

#[test]
fn oracle_skips_everything_in_an_iso_file() {
    let dir = std::env::temp_dir().join(format!("hti-iso-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("iso.hti");
    std::fs::write(
        &file,
        "def flipI : Bool = Bool => path (i. iso Bool Bool (x. not x) (y. not y) \
         (x. elimBool (c. not (not c) = c) refl refl x) \
         (y. elimBool (c. not (not c) = c) refl refl y) i)\n",
    )
    .unwrap();
    let (code, out, err) = run(&["oracle", file.to_str().unwrap(), "--count", "0"]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, "SKIP-ISO 0\noracle: 0 ok, 0 disagree, 1 skipped\n");
}

#[test]
fn oracle_rejects_bad_flags() {
    assert_eq!(run(&["oracle", &path("paths.hti"), "--bogus"]).0, 2);
    assert_eq!(run(&["oracle", &path("paths.hti"), "--count", "many"]).0, 2);
}

#[test]
fn props_overlap_passes() {
    assert_eq!(
        run(&["props", "--suite", "overlap", "--seed", "1"]),
        (0, "PASS overlap 200 cases\n".to_owned(), String::new())
    );
}

#[test]
fn props_all_passes_and_is_reproducible() {
    let (code, out, _) = run(&["props", "--suite", "all", "--seed", "1"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(
        out,
        "PASS overlap 200 cases\nPASS iso-identity 100 cases\n\
         PASS subject-reduction 500 cases\nPASS idempotence 500 cases\n"
    );
    assert_eq!(
        run(&["props", "--suite", "all", "--seed", "1", "--jobs", "4"]).1,
        out
    );
}

#[test]
fn props_unknown_suite_is_a_usage_error() {
    let (code, out, err) = run(&["props", "--suite", "bogus"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("bogus"));
}

#[test]
fn identical_invocations_give_identical_output() {
    let args = ["oracle", &path("paths.hti"), "--count", "50", "--seed", "3"];
    assert_eq!(hti(&args).stdout, hti(&args).stdout);
}
