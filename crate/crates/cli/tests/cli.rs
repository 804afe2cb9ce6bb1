//! End-to-end tests of the binary: real processes, real files, and the
//! documented exit-code contract (0 decided, 3 budget-clipped, 4 input
//! error).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fpg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpg"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_z2(dir: &Path) {
    fs::write(dir.join("z2.pres"), "gens: x y\nrel: x y x^-1 y^-1\n").unwrap();
}

fn write_f2(dir: &Path) {
    fs::write(dir.join("f2.pres"), "gens: x y\n").unwrap();
}

#[test]
fn wp_decides_and_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    write_z2(dir.path());
    let out = fpg(&["wp", "--pres", "z2.pres", "x y x^-1 y^-1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: trivial"));
    let out = fpg(&["wp", "--pres", "z2.pres", "x y"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: nontrivial"));
}

#[test]
fn area_reports_an_exact_certificate() {
    let dir = tempfile::tempdir().unwrap();
    write_z2(dir.path());
    let out = fpg(
        &["area", "--pres", "z2.pres", "x x y x^-2 y^-1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["outcome"], "found");
    assert_eq!(body["area"], 2);
    assert_eq!(body["exact"], true);
    assert_eq!(body["factors"].as_array().unwrap().len(), 2);
}

#[test]
fn missing_files_and_bad_flags_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = fpg(&["wp", "--pres", "missing.pres", "x"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    let out = fpg(&["wp", "--bogus-flag"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    write_z2(dir.path());
    let out = fpg(&["wp", "--pres", "z2.pres", "z z"], dir.path());
    assert_eq!(out.status.code(), Some(4), "unknown generator is an input error");
}

#[test]
fn compile_verb_writes_the_cover_and_its_certificate() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("free1.pres"), "gens: x\n").unwrap();
    let out = fpg(
        &["rips", "--in", "free1.pres", "--out", "cover.pres"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let cover = fs::read_to_string(dir.path().join("cover.pres")).unwrap();
    assert!(cover.starts_with("gens: x a b\n"));
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("cover.pres.cert.json")).unwrap())
            .unwrap();
    assert_eq!(cert["generator_count"], 3);
    assert_eq!(cert["relator_count"], 4);
    assert_eq!(cert["small_cancellation_ok"], true);
    assert_eq!(cert["retraction_ok"], true);
    // the written cover answers further queries: a kernel relator is null
    let rel = cover
        .lines()
        .find(|l| l.starts_with("rel: "))
        .unwrap()
        .trim_start_matches("rel: ")
        .to_string();
    let out = fpg(&["wp", "--pres", "cover.pres", &rel], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: trivial"));
}

#[test]
fn table_verb_emits_csv_with_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    write_z2(dir.path());
    let out = fpg(
        &[
            "table", "--pres", "z2.pres", "--fn", "delta", "--n-min", "0", "--n-max", "4",
            "--out", "tab",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("tab/delta.csv")).unwrap();
    assert_eq!(csv, "n,value,exactness\n0,0,exact\n1,0,exact\n2,0,exact\n3,0,exact\n4,1,exact\n");
}

#[test]
fn conjugator_verb_certifies_a_hard_instance() {
    let dir = tempfile::tempdir().unwrap();
    write_f2(dir.path());
    let out = fpg(
        &[
            "conjugator", "--pres", "f2.pres", "--kernel", "x", "--hard", "2", "--p-radius", "5",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["outcome"], "certificate");
    assert_eq!(body["hard_instance"]["bound_ok"], true);
}

#[test]
fn repeated_runs_emit_byte_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    write_z2(dir.path());
    fs::write(
        dir.path().join("exp.toml"),
        r#"
            presentation = "z2.pres"
            n_min = 0
            n_max = 4
            seed = 42
            output = "results"
            functions = ["delta"]
            audits = ["delta_monotone"]
        "#,
    )
    .unwrap();
    let out = fpg(&["run", "--config", "exp.toml"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let results = dir.path().join("results");
    let mut first: Vec<(String, Vec<u8>)> = fs::read_dir(&results)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    first.sort();
    assert!(first.iter().any(|(name, _)| name == "report.json"));
    assert!(first.iter().any(|(name, _)| name == "delta.csv"));
    let out2 = fpg(&["run", "--config", "exp.toml"], dir.path());
    assert_eq!(out2.status.code(), Some(0));
    assert_eq!(out.stdout, out2.stdout, "run summaries must match");
    for (name, bytes) in &first {
        let again = fs::read(results.join(name)).unwrap();
        assert_eq!(&again, bytes, "{name} changed between identical runs");
    }
}

#[test]
fn run_rejects_bad_configs_with_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    write_z2(dir.path());
    fs::write(
        dir.path().join("bad.toml"),
        "presentation = \"z2.pres\"\nn_min = 5\nn_max = 1\noutput = \"o\"\n",
    )
    .unwrap();
    let out = fpg(&["run", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty n range"));
}
