//! End-to-end tests of the `gklo` binary: exit codes, report determinism,
//! tag filtering, environment overrides, and textual round-trips.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use gklo::field::Q;
use gklo::gklo::GkloContext;
use gklo::quiver::{families, validate_quiver};
use gklo::render;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gklo"))
}

fn spec(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_accepts_all_sample_specs() {
    for name in [
        "edgeless_pair.toml",
        "diagonal_a1_a1.toml",
        "diagonal_a2_a2.toml",
        "aiii1.toml",
        "aiii2.toml",
    ] {
        let out = run(&["validate", spec(name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {out:?}");
    }
}

#[test]
fn info_prints_pairings() {
    let out = run(&["info", spec("aiii1.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert!(s.contains("cartan"), "{s}");
    assert!(s.contains("alpha_mu"), "{s}");
}

#[test]
fn fixed_node_is_an_invalid_spec() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        f,
        "nodes = [\"1\", \"2\"]\n\n[involution]\nnodes = [[\"1\", \"1\"], [\"2\", \"2\"]]\n\n\
         [dims]\nv = {{ 1 = 1, 2 = 1 }}\nw = {{ 1 = 0, 2 = 0 }}"
    )
    .unwrap();
    let out = run(&["validate", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn malformed_toml_is_a_parse_error() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "nodes = [unterminated").unwrap();
    let out = run(&["validate", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn missing_file_is_a_parse_error() {
    let out = run(&["verify", "/nonexistent/spec.toml"]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn unknown_relation_tag_is_rejected() {
    let out = run(&[
        "verify",
        spec("edgeless_pair.toml").to_str().unwrap(),
        "--only",
        "NoSuchRelation",
    ]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn inapplicable_filter_skips_and_succeeds() {
    let out = run(&[
        "verify",
        spec("edgeless_pair.toml").to_str().unwrap(),
        "--only",
        "ISerreGF",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let s = stdout(&out);
    assert!(s.contains("skipped"), "{s}");
    assert!(s.contains("0 fail"), "{s}");
}

#[test]
fn corrupted_run_fails_with_witness() {
    let out = run(&[
        "verify",
        spec("aiii1.toml").to_str().unwrap(),
        "--corrupt",
        "h-sign",
    ]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(stdout(&out).contains("witness"), "{}", stdout(&out));
}

#[test]
fn random_reports_are_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    for r in [&r1, &r2] {
        let out = run(&[
            "verify",
            spec("aiii1.toml").to_str().unwrap(),
            "--mode",
            "random",
            "--seed",
            "5",
            "--report-out",
            r.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{out:?}");
    }
    let b1 = std::fs::read(&r1).unwrap();
    let b2 = std::fs::read(&r2).unwrap();
    assert_eq!(b1, b2, "same-seed reports must be byte-identical");
    let report: serde_json::Value = serde_json::from_slice(&b1).unwrap();
    assert_eq!(report["mode"], "randomized");
    assert_eq!(report["options"]["seed"], 5);
}

#[test]
fn prime_override_via_environment() {
    let dir = tempfile::tempdir().unwrap();
    let rp = dir.path().join("r.json");
    let mut cmd = bin();
    cmd.args([
        "verify",
        spec("edgeless_pair.toml").to_str().unwrap(),
        "--mode",
        "random",
        "--report-out",
        rp.to_str().unwrap(),
    ])
    .env("GKLO_PRIME", "9007199254740881");
    let out = cmd.output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&rp).unwrap()).unwrap();
    assert_eq!(report["options"]["prime"], 9007199254740881u64);
}

#[test]
fn build_output_round_trips() {
    let out = run(&[
        "build",
        spec("aiii1.toml").to_str().unwrap(),
        "--node",
        "1",
        "--what",
        "b",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    let raw = families::aiii(1);
    let quiver = validate_quiver(&raw).unwrap();
    let dims = families::uniform_dims(&raw, 1, 1).resolve(&quiver).unwrap();
    let ctx = GkloContext::<Q>::exact(quiver.clone(), dims);
    let names = render::var_names(&ctx.quiver);
    let parsed = render::parse_element(text.trim(), &ctx.quiver, &names, &ctx.algebra)
        .expect("printed operator re-parses");
    assert!(parsed.sub(&ctx.build_b(0)).is_zero());
}

#[test]
fn monopole_crosscheck_runs_clean() {
    let out = run(&[
        "monopole",
        spec("aiii1.toml").to_str().unwrap(),
        "--node",
        "2",
        "--r-max",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}
