//! End-to-end contract tests for the `coordcert` binary: help coverage,
//! exit-code classification, deterministic byte-identical reports, and
//! zero-diff round-trips of every file format the tool emits.

use std::fs;
use std::process::{Command, Output};

use coordcert_core::circuit::{circuit_to_json, fig1_circuit};
use coordcert_core::inflation::{inflation_realization_to_json, random_fig2_realization};
use coordcert_core::quantum::{
    random_fig1_realization, realization_from_json, realization_to_json, rng_from_seed, Behavior,
};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_coordcert"));
    c.env_remove("COORDCERT_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn help_covers_every_documented_subcommand_and_flag() {
    let mut all = stdout_of(&run(&["--help"]));
    for sub in [
        "simulate",
        "ineq1",
        "ineq2",
        "threshold",
        "bound",
        "sos-check",
        "canonicalize",
        "search",
    ] {
        assert!(
            all.contains(sub),
            "top-level help does not mention `{sub}`:\n{all}"
        );
        all.push_str(&stdout_of(&run(&[sub, "--help"])));
    }
    for flag in [
        "--seed",
        "--jobs",
        "--tol",
        "--out",
        "--level",
        "--grid-step",
        "--restarts",
        "--variant-plus",
        "--variant-minus",
        "--fixture",
        "--v",
        "--dim",
        "--no-refine",
        "--v-min",
        "--curve-step",
    ] {
        assert!(
            all.contains(flag),
            "no subcommand help documents `{flag}`"
        );
    }
}

#[test]
fn missing_and_malformed_inputs_exit_with_validation_code() {
    let out = run(&["ineq1", "/nonexistent/behavior.json"]);
    assert_eq!(code(&out), 2, "missing file must exit 2");
    assert!(stderr_of(&out).starts_with("error:"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ this is not json").unwrap();
    let out = run(&["ineq1", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "malformed file must exit 2");
    assert!(!stderr_of(&out).is_empty());
}

#[test]
fn unknown_fixture_is_rejected() {
    let out = run(&["ineq1", "--fixture", "nope"]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("nope"));

    let out = run(&["ineq2", "--fixture", "bogus"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn out_of_range_parameters_are_rejected_before_solving() {
    for args in [
        ["bound", "--level", "3"].as_slice(),
        &["bound", "--grid-step", "0"],
        &["bound", "--tol", "2"],
        &["threshold", "--v-min", "1.5"],
        &["threshold", "--restarts", "0"],
        &["search", "--dim", "1"],
        &["search", "--restarts", "0"],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?} must exit 2: {}", stderr_of(&out));
    }
}

#[test]
fn corrupted_realization_is_rejected_naming_the_node() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_from_seed(42);
    let mut r = random_fig1_realization(&mut rng, 2);
    let node = r.transformations.keys().next().unwrap().clone();
    r.transformations.get_mut(&node).unwrap()[(0, 0)] *= 2.0;
    let circuit_path = dir.path().join("circuit.json");
    let real_path = dir.path().join("realization.json");
    fs::write(&circuit_path, circuit_to_json(&r.circuit)).unwrap();
    fs::write(&real_path, realization_to_json(&r)).unwrap();

    let out = run(&[
        "simulate",
        circuit_path.to_str().unwrap(),
        real_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "non-unitary realization must exit 2");
    assert!(
        stderr_of(&out).contains(&node),
        "error must name the offending node `{node}`: {}",
        stderr_of(&out)
    );
}

#[test]
fn identical_config_and_seed_give_byte_identical_reports() {
    let a = run(&["ineq2", "--fixture", "ghz4", "--v", "0.9"]);
    let b = run(&["ineq2", "--fixture", "ghz4", "--v", "0.9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout, "ineq2 reports differ across runs");

    let a = run(&["search", "--dim", "2", "--restarts", "2", "--seed", "7"]);
    let b = run(&["search", "--dim", "2", "--restarts", "2", "--seed", "7"]);
    assert_eq!(code(&a), 0, "{}", stderr_of(&a));
    assert_eq!(a.stdout, b.stdout, "search reports differ across runs");

    // A single worker and the default pool must agree byte for byte.
    let c = run(&[
        "search", "--dim", "2", "--restarts", "2", "--seed", "7", "--jobs", "1",
    ]);
    assert_eq!(a.stdout, c.stdout, "--jobs 1 changed the report bytes");
}

#[test]
fn reports_are_mirrored_to_the_out_directory_and_env_var() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "ineq1",
        "--fixture",
        "shared-random-bit",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let mirrored = fs::read_to_string(dir.path().join("ineq1_report.json")).unwrap();
    assert_eq!(mirrored, stdout_of(&out), "mirror differs from stdout");

    let env_dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["ineq1", "--fixture", "shared-random-bit"])
        .env("COORDCERT_OUT", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let mirrored = fs::read_to_string(env_dir.path().join("ineq1_report.json")).unwrap();
    assert_eq!(mirrored, stdout_of(&out), "COORDCERT_OUT mirror differs");
}

#[test]
fn canonicalize_is_idempotent_and_fixes_the_reference_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let circuit_path = dir.path().join("circuit.json");
    let original = circuit_to_json(&fig1_circuit());
    fs::write(&circuit_path, &original).unwrap();

    let first = run(&["canonicalize", circuit_path.to_str().unwrap()]);
    assert_eq!(code(&first), 0);
    assert_eq!(
        stdout_of(&first),
        original,
        "reference circuit must be its own canonical form"
    );

    let again_path = dir.path().join("canonical.json");
    fs::write(&again_path, stdout_of(&first)).unwrap();
    let second = run(&["canonicalize", again_path.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout, "canonicalize not idempotent");
}

#[test]
fn emitted_behavior_and_realization_files_round_trip_zero_diff() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_from_seed(5);
    let r = random_fig1_realization(&mut rng, 2);
    let circuit_path = dir.path().join("circuit.json");
    let real_path = dir.path().join("realization.json");
    fs::write(&circuit_path, circuit_to_json(&r.circuit)).unwrap();
    fs::write(&real_path, realization_to_json(&r)).unwrap();

    let out = run(&[
        "simulate",
        circuit_path.to_str().unwrap(),
        real_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));

    let behavior_text = fs::read_to_string(dir.path().join("behavior.json")).unwrap();
    let parsed = Behavior::from_json(&behavior_text).unwrap();
    assert_eq!(parsed.to_json(), behavior_text, "behavior.json not stable");

    // The emitted behavior is a valid input for the chain-inequality command.
    let behavior_path = dir.path().join("behavior.json");
    let out = run(&["ineq1", behavior_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("\"violated\": false"));

    // The realization format itself is write/read stable.
    let reread = realization_from_json(&fs::read_to_string(&real_path).unwrap()).unwrap();
    assert_eq!(
        realization_to_json(&reread),
        fs::read_to_string(&real_path).unwrap()
    );
}

#[test]
fn search_artifacts_are_reusable_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "search",
        "--dim",
        "2",
        "--restarts",
        "1",
        "--seed",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));

    let real_text = fs::read_to_string(dir.path().join("search_realization.json")).unwrap();
    let r = realization_from_json(&real_text).unwrap();
    assert_eq!(realization_to_json(&r), real_text, "realization not stable");

    let behavior_text = fs::read_to_string(dir.path().join("search_behavior.json")).unwrap();
    let b = Behavior::from_json(&behavior_text).unwrap();
    assert_eq!(b.to_json(), behavior_text, "behavior artifact not stable");

    // Re-simulating the emitted realization reproduces the emitted behavior
    // up to the 12-significant-digit quantization of the realization file.
    let circuit_path = dir.path().join("circuit.json");
    fs::write(&circuit_path, circuit_to_json(&r.circuit)).unwrap();
    let sim = run(&[
        "simulate",
        circuit_path.to_str().unwrap(),
        dir.path().join("search_realization.json").to_str().unwrap(),
        "--out",
        dir.path().join("resim").to_str().unwrap(),
    ]);
    assert_eq!(code(&sim), 0, "{}", stderr_of(&sim));
    let resim = fs::read_to_string(dir.path().join("resim").join("behavior.json")).unwrap();
    let resim_b = Behavior::from_json(&resim).unwrap();
    assert_eq!(resim_b.probs().len(), b.probs().len());
    for (p, q) in resim_b.probs().iter().zip(b.probs()) {
        assert!(
            (p - q).abs() < 1e-9,
            "re-simulation drifted beyond file precision: {p} vs {q}"
        );
    }
}

#[test]
fn sos_check_reads_written_inflation_realizations() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rng_from_seed(13);
    let r = random_fig2_realization(&mut rng, 2);
    let path = dir.path().join("inflation.json");
    fs::write(&path, inflation_realization_to_json(&r)).unwrap();

    let out = run(&["sos-check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("\"triangle_holds\": true"), "{text}");
    assert!(text.contains("\"r_ad\""));
}
