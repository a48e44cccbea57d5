use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn townsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_townsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv") && !p.ends_with("manifest.csv"))
        .collect();
    v.sort();
    v
}

#[test]
fn run_writes_one_row_per_day_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let out = townsim(&[
            "run",
            "--population",
            "1500",
            "--days",
            "20",
            "--seed-start",
            "5",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stdout).contains("seed 5 baseline"));
    }
    assert!(a.join("manifest.csv").exists());
    let (fa, fb) = (csv_files(&a), csv_files(&b));
    assert_eq!(fa.len(), 1);
    let text = fs::read_to_string(&fa[0]).unwrap();
    assert_eq!(text.lines().count(), 22);
    assert_eq!(fs::read(&fa[0]).unwrap(), fs::read(&fb[0]).unwrap());
}

#[test]
fn batch_then_summarize() {
    let tmp = tempfile::tempdir().unwrap();
    let fixed = tmp.path().join("fixed");
    let zero = tmp.path().join("zero");
    for (dir, fiscal) in [(&fixed, "fixed"), (&zero, "zero-deficit")] {
        let out = townsim(&[
            "mc",
            "--population",
            "1500",
            "--days",
            "15",
            "--seeds",
            "3",
            "--fiscal",
            fiscal,
            "--jobs",
            "1",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(csv_files(dir).len(), 3);
    }
    let out = townsim(&[
        "summarize",
        "--day",
        "15",
        fixed.to_str().unwrap(),
        zero.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("deaths"), "{text}");
    assert!(text.contains(" vs "), "{text}");
}

#[test]
fn sweep_writes_one_batch_per_value() {
    let tmp = tempfile::tempdir().unwrap();
    let out = townsim(&[
        "sweep",
        "--population",
        "1200",
        "--days",
        "5",
        "--seeds",
        "2",
        "--param",
        "beta",
        "--values",
        "0.09,0.1",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(tmp.path().join("beta=0.09").join("manifest.csv").exists());
    assert!(tmp.path().join("beta=0.1").join("manifest.csv").exists());
}

#[test]
fn bad_inputs_fail_with_a_message() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();

    let out = townsim(&["run", "--scenario", "sometime", "--out", dir]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("sometime"));

    let out = townsim(&[
        "sweep",
        "--population",
        "500",
        "--param",
        "gravity",
        "--values",
        "1",
        "--out",
        dir,
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("gravity"));

    let out = townsim(&[
        "mc",
        "--population",
        "500",
        "--filter",
        "often",
        "--out",
        dir,
    ]);
    assert!(!out.status.success());

    let out = townsim(&["summarize", tmp.path().join("missing").to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("manifest"));
}
