//! Front-end behavior: exit codes, malformed-input resilience, corpus case
//! isolation, and render modes.

mod common;

use wds::cli::{corpus_run, run, Output};

fn run_str(args: &[&str]) -> Output {
    let owned: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    run(&owned, Some(&common::corpus_dir()))
}

#[test]
fn verdict_never_in_exit_code() {
    for surgery in ["K1=1/5", "K1=7/4"] {
        let out = run_str(&["certify-diagram", "--pd", "fig8.pd", "--surgery", surgery]);
        assert_eq!(out.exit_status(), 0);
    }
}

#[test]
fn malformed_inputs_error_cleanly() {
    let dir = std::env::temp_dir().join("wds-malformed");
    std::fs::create_dir_all(&dir).unwrap();
    let garbage: Vec<(&str, &str)> = vec![
        ("empty.pd", ""),
        ("junk.pd", "not a code at all"),
        ("dup.pd", "X[1,1,1,1]"),
        ("odd.pd", "X[1,2,3,4] X[4,3,2,1] X[1,2,3,4]"),
        ("trunc.tri", "2\n0 0 1 0 0132\n"),
        ("perm.tri", "1\n0 0 0 1 0000\n0 2 0 3 1230\n"),
    ];
    for (name, text) in garbage {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        let path = path.to_str().unwrap();
        let out = if name.ends_with(".pd") {
            run_str(&["certify-diagram", "--pd", path, "--surgery", "K1=1/5"])
        } else {
            run_str(&["check-angles", "--tri", path, "--angles", "uniform:1/3"])
        };
        assert_eq!(out.exit_status(), 2, "{name} should be an input error");
        let json = out.to_json();
        assert!(json.contains("\"diagnostics\":[\""), "{name}: {json}");
    }
}

#[test]
fn pretty_mode_renders_text() {
    let out = run_str(&["cusp-profile", "--integral"]);
    let text = out.render(true);
    assert!(text.starts_with("command: cusp-profile --integral"));
    assert!(text.contains("result.integral: 1.047197"));
    let json = out.render(false);
    assert!(json.starts_with('{'));
}

#[test]
fn corrupted_sidecar_fails_alone() {
    let src = common::corpus_dir();
    let dir = std::env::temp_dir().join("wds-corrupt-corpus");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    for entry in std::fs::read_dir(&src).unwrap() {
        let path = entry.unwrap().path();
        std::fs::copy(&path, dir.join(path.file_name().unwrap())).unwrap();
    }
    std::fs::write(dir.join("trefoil.expected.json"), "garbage\n").unwrap();
    std::fs::remove_file(dir.join("profile.expected.json")).unwrap();
    let agg = corpus_run(&dir, "corpus".into());
    assert_eq!(agg.failed, 2, "{}", agg.render_text());
    for c in &agg.cases {
        let expected_fail = c.name == "trefoil" || c.name == "profile";
        assert_eq!(!c.passed, expected_fail, "{}: {}", c.name, c.detail);
    }
    assert_eq!(agg.exit_status, 0);
}

#[test]
fn reports_echo_paths_as_written() {
    let out = run_str(&["certify-diagram", "--pd", "fig8.pd", "--surgery", "K1=1/5"]);
    let json = out.to_json();
    assert!(json.contains("\"command\":\"certify-diagram --pd fig8.pd --surgery K1=1/5\""));
    assert!(json.contains("\"fig8.pd\":\""));
}
