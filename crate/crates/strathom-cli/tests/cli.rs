//! End-to-end command line tests: exit codes, streaming, and the
//! vr → reduce → verify pipeline.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_strathom"))
}

fn run_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn");
    child.stdin.as_mut().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().expect("wait")
}

const SQUARE_CSV: &str = "x,y,label\n0,0,1\n1,0,1\n1,1,1\n0,1,1\n";

fn tmpdir() -> tempdir::TempDir {
    tempdir::TempDir::new()
}

mod tempdir {
    use std::path::{Path, PathBuf};

    pub struct TempDir(PathBuf);

    impl TempDir {
        pub fn new() -> TempDir {
            let base = std::env::temp_dir().join(format!(
                "strathom-cli-{}-{:?}",
                std::process::id(),
                std::thread::current().id()
            ));
            std::fs::create_dir_all(&base).unwrap();
            TempDir(base)
        }

        pub fn path(&self) -> &Path {
            &self.0
        }
    }

    impl Drop for TempDir {
        fn drop(&mut self) {
            let _ = std::fs::remove_dir_all(&self.0);
        }
    }
}

#[test]
fn validate_accepts_vr_output() {
    let dir = tmpdir();
    let csv = dir.path().join("pts.csv");
    std::fs::write(&csv, SQUARE_CSV).unwrap();
    let k = dir.path().join("k.fss.json");
    let out = bin()
        .args(["vr", csv.to_str().unwrap(), "--eps", "1.5", "--max-dim", "3", "--out", k.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = bin().args(["validate", k.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok: 15 cells"));
}

#[test]
fn streaming_pipeline_reduces_and_verifies() {
    let dir = tmpdir();
    let csv = dir.path().join("pts.csv");
    std::fs::write(&csv, SQUARE_CSV).unwrap();
    let vr = bin().args(["vr", csv.to_str().unwrap(), "--eps", "1.5", "--out", "-"]).output().unwrap();
    assert!(vr.status.success());
    let cert = dir.path().join("cert.json");
    let reduced = run_with_stdin(
        &["reduce", "-", "--cert", cert.to_str().unwrap(), "--out", "-"],
        &String::from_utf8_lossy(&vr.stdout),
    );
    assert!(reduced.status.success());
    let verify = bin().args(["verify", cert.to_str().unwrap(), "--json"]).output().unwrap();
    assert!(verify.status.success());
    assert!(String::from_utf8_lossy(&verify.stdout).contains("\"ok\":true"));
}

#[test]
fn tampered_certificate_exits_one() {
    let dir = tmpdir();
    let csv = dir.path().join("pts.csv");
    std::fs::write(&csv, SQUARE_CSV).unwrap();
    let k = dir.path().join("k.fss.json");
    let cert = dir.path().join("cert.json");
    assert!(bin()
        .args(["vr", csv.to_str().unwrap(), "--eps", "1.5", "--out", k.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    assert!(bin()
        .args(["reduce", k.to_str().unwrap(), "--cert", cert.to_str().unwrap(), "--out", "-"])
        .output()
        .unwrap()
        .status
        .success());
    // drop one replay step from the certificate
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let steps = v["legs"][0]["steps"].as_array_mut().unwrap();
    steps.remove(0);
    std::fs::write(&cert, serde_json::to_string(&v).unwrap()).unwrap();
    let out = bin().args(["verify", cert.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_input_exits_two() {
    let out = bin().args(["validate", "/nonexistent/file.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn subdivide_and_fos_convert() {
    let dir = tmpdir();
    let csv = dir.path().join("pts.csv");
    std::fs::write(&csv, SQUARE_CSV).unwrap();
    let k = dir.path().join("k.fss.json");
    assert!(bin()
        .args(["vr", csv.to_str().unwrap(), "--eps", "1.0", "--out", k.to_str().unwrap()])
        .status()
        .unwrap()
        .success());
    let sd = bin().args(["subdivide", k.to_str().unwrap(), "--kind", "sd"]).output().unwrap();
    assert!(sd.status.success());
    let cert = dir.path().join("conv.json");
    let out = bin()
        .args(["fos-convert", k.to_str().unwrap(), "--emit-cert", cert.to_str().unwrap(), "--out", "-"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let verify = bin().args(["verify", cert.to_str().unwrap()]).output().unwrap();
    assert!(verify.status.success());
}
