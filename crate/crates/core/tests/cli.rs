use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use slicemod::cli::load_manifest;

const BOWTIE: &str = "0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n2 3\n";

fn slicemod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slicemod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Community of every node in slice `slice`, read back from assignments.csv.
fn assignments(out: &Path, slice: usize) -> Vec<usize> {
    let text = fs::read_to_string(out.join("assignments.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("node,slice,community"));
    lines
        .map(|l| l.split(',').map(|f| f.parse::<usize>().unwrap()).collect::<Vec<_>>())
        .filter(|f| f[1] == slice)
        .map(|f| f[2])
        .collect()
}

#[test]
fn detect_splits_bowtie() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bowtie.txt");
    fs::write(&input, BOWTIE).unwrap();
    let out = dir.path().join("out");
    let result = slicemod(&[
        "detect",
        path_str(&input),
        "--gamma-start",
        "1",
        "--gamma-count",
        "1",
        "--omega",
        "0",
        "--out",
        path_str(&out),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let stdout = String::from_utf8(result.stdout).unwrap();
    assert!(stdout.contains("quality 0.357143"), "{stdout}");
    let c = assignments(&out, 0);
    assert_eq!(c.len(), 6);
    assert!(c[0] == c[1] && c[1] == c[2]);
    assert!(c[3] == c[4] && c[4] == c[5]);
    assert_ne!(c[0], c[3]);
    assert!(out.join("diagnostics.csv").exists());
}

#[test]
fn zero_resolution_gives_one_community() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("triangle.txt");
    fs::write(&input, "0 1\n1 2\n0 2\n").unwrap();
    let out = dir.path().join("out");
    let result = slicemod(&[
        "detect",
        path_str(&input),
        "--gamma-start",
        "0",
        "--gamma-count",
        "1",
        "--out",
        path_str(&out),
    ]);
    assert!(result.status.success());
    assert_eq!(assignments(&out, 0), vec![0, 0, 0]);
}

#[test]
fn named_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("named.txt");
    fs::write(&input, "# comment\nalice bob 2\nbob carol\ncarol alice\n").unwrap();
    let out = dir.path().join("out");
    let result = slicemod(&["detect", path_str(&input), "--named-nodes", "--out", path_str(&out)]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let text = fs::read_to_string(out.join("assignments.csv")).unwrap();
    let last: Vec<&str> = text.lines().filter(|l| l.contains(",5,")).collect();
    assert_eq!(last.len(), 3);
    assert!(last[0].starts_with("alice,") && last[2].starts_with("carol,"), "{text}");
}

#[test]
fn missing_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.txt");
    let result = slicemod(&["detect", path_str(&missing), "--out", path_str(dir.path())]);
    assert!(!result.status.success());
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(stderr.contains("nope.txt"), "{stderr}");
}

#[test]
fn malformed_input_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    fs::write(&input, "0 1\n1 x\n").unwrap();
    let result = slicemod(&["detect", path_str(&input), "--out", path_str(dir.path())]);
    assert!(!result.status.success());
    assert!(String::from_utf8(result.stderr).unwrap().contains("line 2"));
}

#[test]
fn constant_image_is_one_segment() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.pgm");
    let mut bytes = b"P5\n4 4\n255\n".to_vec();
    bytes.extend([128u8; 16]);
    fs::write(&input, bytes).unwrap();
    let out = dir.path().join("out");
    let result = slicemod(&[
        "segment",
        path_str(&input),
        "--knn",
        "3",
        "--tau-rank",
        "2",
        "--window",
        "all",
        "--gamma-start",
        "1",
        "--gamma-count",
        "1",
        "--out",
        path_str(&out),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    assert_eq!(assignments(&out, 0), vec![0; 16]);
    let ppm = fs::read(out.join("slice_0.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n4 4\n255\n"));
}

#[test]
fn manifest_records_defaults_and_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bowtie.txt");
    fs::write(&input, BOWTIE).unwrap();
    let first = dir.path().join("first");
    assert!(slicemod(&["detect", path_str(&input), "--out", path_str(&first)]).status.success());

    let manifest = load_manifest(&first.join("manifest.json")).unwrap();
    let expected = [0.01, 0.05, 0.09, 0.13, 0.17, 0.21];
    assert_eq!(manifest.gammas.len(), expected.len());
    for (g, e) in manifest.gammas.iter().zip(expected) {
        assert!((g - e).abs() < 1e-12);
    }
    assert_eq!(manifest.config.omega, 0.3);
    assert_eq!(manifest.nodes, 6);
    assert_eq!(manifest.edges, 7);

    let second = dir.path().join("second");
    let manifest_path = first.join("manifest.json");
    let rerun = slicemod(&["rerun", path_str(&manifest_path), "--out", path_str(&second)]);
    assert!(rerun.status.success());
    for file in ["assignments.csv", "diagnostics.csv"] {
        assert_eq!(fs::read(first.join(file)).unwrap(), fs::read(second.join(file)).unwrap());
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bowtie.txt");
    fs::write(&input, BOWTIE).unwrap();
    for extra in [["--omega", "-1"], ["--gamma-count", "0"], ["--restarts", "0"]] {
        let mut args = vec!["detect", path_str(&input), "--out", path_str(dir.path())];
        args.extend(extra);
        assert!(!slicemod(&args).status.success(), "{extra:?}");
    }
}
