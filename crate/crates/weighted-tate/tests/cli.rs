//! End-to-end checks of the binary: exit codes, error reporting, and the
//! rendering round trip between `--json` documents and text output.

use std::process::{Command, Output};

use weighted_tate::cli::{render_cohomology, render_tate, CohomologyDoc, TateDoc};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_weighted-tate")
}

fn job(name: &str) -> String {
    format!("{}/examples/jobs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn success_is_exit_zero() {
    let out = run(&["regularity", &job("elliptic-p112.json")]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("reg = 2"), "{text}");
    assert!(text.contains("r = 2"), "{text}");
}

#[test]
fn spec_problems_are_exit_two_with_position() {
    let dir = std::env::temp_dir();

    let bad_json = dir.join("weighted-tate-bad-json.json");
    std::fs::write(&bad_json, "{ \"weights\": [1, 1\n").unwrap();
    let out = run(&["regularity", bad_json.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line") && err.contains("column"), "{err}");

    let bad_poly = dir.join("weighted-tate-bad-poly.json");
    std::fs::write(
        &bad_poly,
        r#"{"weights": [1, 1, 2],
            "module": {"kind": "quotient-by-ideal", "generators": ["x0^4 + @"]}}"#,
    )
    .unwrap();
    let out = run(&["regularity", bad_poly.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("generator 1"), "{err}");
    assert!(err.contains("line 1") || err.contains("column"), "{err}");

    let out = run(&["regularity", "/no/such/file.json"]);
    assert_eq!(code(&out), 2);

    // A zero module has no regularity, so no window can start.
    let zero = dir.join("weighted-tate-zero.json");
    std::fs::write(
        &zero,
        r#"{"weights": [1, 1, 2],
            "module": {"kind": "quotient-by-ideal", "generators": ["1"]}}"#,
    )
    .unwrap();
    let out = run(&["regularity", zero.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    // Usage errors from the argument parser share the same code.
    let out = run(&["cohomology", &job("elliptic-p112.json")]);
    assert_eq!(code(&out), 2);
}

#[test]
fn resource_limits_are_exit_three() {
    let out = run(&[
        "cohomology",
        &job("rational-p11122.json"),
        "--twists",
        "-2..2",
        "--limit",
        "10",
    ]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("resource limit"), "{err}");
}

#[test]
fn json_documents_rerender_to_the_text_output() {
    for jobname in ["elliptic-p112.json", "structure-sheaf-p112.json", "p2-standard.json"] {
        let path = job(jobname);
        let text = run(&["cohomology", &path, "--twists", "-3..3"]);
        let json = run(&["cohomology", &path, "--twists", "-3..3", "--json"]);
        assert_eq!(code(&text), 0);
        assert_eq!(code(&json), 0);
        let doc: CohomologyDoc = serde_json::from_slice(&json.stdout).unwrap();
        assert_eq!(
            render_cohomology(&doc, &None).into_bytes(),
            text.stdout,
            "{jobname}: cohomology text does not round-trip"
        );

        let text = run(&["tate", &path, "--steps", "3"]);
        let json = run(&["tate", &path, "--steps", "3", "--json"]);
        let doc: TateDoc = serde_json::from_slice(&json.stdout).unwrap();
        assert_eq!(
            render_tate(&doc, &None).into_bytes(),
            text.stdout,
            "{jobname}: tate text does not round-trip"
        );
    }
}

#[test]
fn hilbert_prints_bare_dimensions() {
    let out = run(&["hilbert", &job("elliptic-p112.json"), "--range", "0..4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1 2 4 6 8\n");
}

#[test]
fn unsorted_weights_are_normalized_with_a_note() {
    let dir = std::env::temp_dir();
    let unsorted = dir.join("weighted-tate-unsorted.json");
    std::fs::write(
        &unsorted,
        r#"{"weights": [2, 1, 1], "vars": ["y", "x0", "x1"],
            "module": {"kind": "quotient-by-ideal", "generators": ["x0^4 + x1^4 + y^2"]}}"#,
    )
    .unwrap();
    let out = run(&["cohomology", unsorted.to_str().unwrap(), "--twists", "0..0"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("weights 1 1 2"), "{text}");
    assert!(text.contains("note: weights sorted"), "{text}");
    assert!(text.contains("x0 x1 y"), "{text}");
}
