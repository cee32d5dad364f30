//! End-to-end runs of the command-line binary.

use std::path::Path;
use std::process::Command;

use planar_lie::cli::Report;
use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_planar-lie");

fn write(dir: &TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(BIN).args(args).env("PLANAR_LIE_SEED", "7").output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn run_json(args: &[&str]) -> (i32, Report) {
    let mut v: Vec<&str> = args.to_vec();
    v.push("--json");
    let (code, out) = run(&v);
    let report: Report = serde_json::from_str(&out).unwrap_or_else(|e| panic!("bad JSON ({e}):\n{out}"));
    assert_eq!(report.exit_code, code);
    (code, report)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn analyze_nilpotent_file() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "n2.txt", "Dy\nDx\ny*Dx\ny^2*Dx\n");
    let (code, r) = run_json(&["analyze", p(&f)]);
    assert_eq!(code, 0);
    let fp = r.fingerprint.unwrap();
    assert!(fp.is_nilpotent);
    assert_eq!((fp.dim, fp.center_dim, fp.rank), (4, 1, 2));
    // [Dy, y*Dx] = Dx and [Dy, y^2*Dx] = 2 y*Dx
    let table = r.brackets.unwrap();
    assert_eq!(table.len(), 2);
    assert_eq!(table[1].coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(), ["0", "0", "2", "0"]);
}

#[test]
fn analyze_failures() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "nc.txt", "x*Dy\ny*Dx\n");
    let (code, r) = run_json(&["analyze", p(&f)]);
    assert_eq!(code, 2);
    assert_eq!(r.diagnostics[0].witness.as_deref(), Some("x*Dx - y*Dy"));
    assert_eq!(r.diagnostics[0].pair, Some([1, 2]));

    let empty = write(&dir, "empty.txt", "");
    assert_eq!(run(&["analyze", p(&empty)]).0, 3);
    let bad = write(&dir, "bad.txt", "Dx\nexp(x*y)*Dx\n");
    let (code, r) = run_json(&["analyze", p(&bad)]);
    assert_eq!(code, 3);
    assert_eq!((r.diagnostics[0].line, r.diagnostics[0].column), (Some(2), Some(5)));
    assert_eq!(run(&["analyze", "/nonexistent/algebra.txt"]).0, 3);
}

#[test]
fn classify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let sl2 = write(&dir, "sl2.txt", "y*Dx\nx*Dy\nx*Dx - y*Dy\n");
    assert_eq!(run(&["classify", p(&sl2)]).0, 4);
    let jordan = write(&dir, "jordan.txt", "x*Dx + y*Dy\nDx\nDy\ny*Dx\n");
    assert_eq!(run(&["classify", p(&jordan)]).0, 6);
    let nc = write(&dir, "nc.txt", "x*Dy\ny*Dx\n");
    assert_eq!(run(&["classify", p(&nc)]).0, 2);
}

#[test]
fn classify_spectral_instance() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "v2.txt", "Dy\nx*Dx\nexp(y)*Dx\ny*exp(y)*Dx\n");
    let (code, out) = run(&["classify", p(&f), "--json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let fam = &v["classification"]["family"];
    assert_eq!(fam["family"], "SpectralType");
    assert_eq!(fam["variant"], 2);
    assert_eq!(fam["s"][0]["lambda"], "1");
    assert_eq!(fam["s"][0]["multiplicity"], 2);
}

#[test]
fn classify_with_witness() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "shear.txt", "y*Dx + Dy\nDx\n");
    let (code, r) = run_json(&["classify", p(&f), "--witness"]);
    assert_eq!(code, 0);
    let rec = r.classification.unwrap();
    let chain = serde_json::to_value(rec.witness.unwrap()).unwrap();
    assert_eq!(chain[0]["kind"], "ShearX");
    assert_eq!(chain[0]["f"], "-1/2*y^2");

    // Applying the witness with the transform command lands on the canonical basis.
    let chain_file = write(&dir, "chain.json", &chain.to_string());
    let out = dir.path().join("moved.txt");
    let at = format!("@{}", p(&chain_file));
    assert_eq!(run(&["transform", p(&f), "--chain", &at, "--emit", p(&out)]).0, 0);
    let moved = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = moved.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).collect();
    assert_eq!(lines, ["Dy", "Dx"]);
}

#[test]
fn catalog_outputs() {
    let (code, out) = run(&["catalog", "nilpotent", "N=3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines, ["Dy", "Dx", "y*Dx", "y^2*Dx", "y^3*Dx"]);

    let (code, out) = run(&["catalog", "spectral", "variant=3", "S=0:2"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines, ["Dx", "y*Dx", "Dy", "y^2*Dx"]);

    let (code, r) = run_json(&["catalog", "nonabelian-line", "k=1", "a=1"]);
    assert_eq!(code, 7);
    assert_eq!(r.diagnostics[0].kind, "InvalidParameters");

    assert_eq!(run(&["catalog", "no-such-family"]).0, 7);
}

#[test]
fn catalog_verify_and_audit() {
    let (code, r) = run_json(&["catalog", "spectral", "variant=2", "S=1:2,i:1,-i:1", "--verify"]);
    assert_eq!(code, 0, "{r:?}");
    let (code, r) = run_json(&["catalog", "spectral", "variant=6", "S=1:2"]);
    assert_eq!(code, 0);
    let d = r.diagnostics.iter().find(|d| d.kind == "RedundantVariant").expect("audit note");
    assert!(d.equivalent.is_some() && d.chain.is_some());
}

#[test]
fn transform_rejects_bad_chains() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "a.txt", "exp(y)*Dx\nDy\n");
    // The chain is a parameter, not algebra input, so a malformed one is an invalid parameter.
    assert_eq!(run(&["transform", p(&f), "--chain", "not json"]).0, 7);
    let zero = r#"[{"kind":"AffineY","beta":"0","c":"0"}]"#;
    assert_eq!(run(&["transform", p(&f), "--chain", zero]).0, 7);
    let (code, out) = run(&["transform", p(&f), "--chain", r#"[{"kind":"Swap"}]"#]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(), ["exp(x)*Dy", "Dx"]);
}

/// Re-running on the echoed input reproduces the report, timing aside.
#[test]
fn reports_are_reproducible_from_their_echoed_input() {
    let dir = TempDir::new().unwrap();
    let inputs = [
        "Dy\nDx\ny*Dx\ny^2*Dx\n",
        "(x + y^2)*Dx + Dy\nDx\n",
        "x*Dy\ny*Dx\n",
        "Dy\n(1/2 + i)*exp(i*y)*Dx\nexp(-i*y)*Dx\n",
    ];
    for (k, text) in inputs.iter().enumerate() {
        for cmd in ["analyze", "classify"] {
            let f = write(&dir, &format!("in{k}.txt"), text);
            let (_, mut first) = run_json(&[cmd, p(&f)]);
            let echo = write(&dir, &format!("echo{k}.txt"), &(first.input.join("\n") + "\n"));
            let (_, mut second) = run_json(&[cmd, p(&echo)]);
            first.elapsed_us = 0;
            second.elapsed_us = 0;
            assert_eq!(first, second, "{cmd} on {text:?}");
        }
    }
}
