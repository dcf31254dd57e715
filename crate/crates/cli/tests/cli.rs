use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn filament(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_filament"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_names_every_preset() {
    let o = filament(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in [
        "opposite",
        "same_nosym",
        "same_sym",
        "reduced_full",
        "reduced_06",
        "bpss",
        "selfsimilar",
        "mild_oracle",
        "convergence",
    ] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name}: "))), "{name}");
    }
    assert!(text.contains("reduced_06: ") && text.contains("Ψ₁(0)=0.6−G"));
}

#[test]
fn validate_reports_cfl_number() {
    let o = filament(&["validate", "--preset", "opposite"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("cfl_number")).unwrap();
    let value: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((value - std::f64::consts::PI / 100.0).abs() < 1e-6);
}

#[test]
fn cfl_violation_exits_with_code_3() {
    let o = filament(&["validate", "--preset", "opposite", "--override", "tau=1e-3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("CFL"));
}

#[test]
fn bad_input_exits_with_code_2() {
    assert_eq!(filament(&["validate", "--preset", "nope"]).status.code(), Some(2));
    let o = filament(&["validate", "--preset", "opposite", "--override", "k=abc"]);
    assert_eq!(o.status.code(), Some(2));
    let o = filament(&["validate", "--preset", "opposite", "--override", "nonsense=1"]);
    assert_eq!(o.status.code(), Some(2));
}

fn read_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn fast_runs_are_reproducible() {
    for preset in ["reduced_06", "selfsimilar"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        for dir in [&a, &b] {
            let o = filament(&["run", "--preset", preset, "--fast", "--out", dir.path().to_str().unwrap()]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        }
        let ta: Vec<_> = read_tree(a.path()).into_iter().filter(|(n, _)| n != "timing.json").collect();
        let tb: Vec<_> = read_tree(b.path()).into_iter().filter(|(n, _)| n != "timing.json").collect();
        assert_eq!(ta, tb, "{preset}");
        assert!(ta.iter().any(|(n, _)| n == "manifest.json"));
        assert!(ta.iter().any(|(n, _)| n == "plot.gp"));

        let manifest: serde_json::Value =
            serde_json::from_slice(&fs::read(a.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["schema_version"], 1);
        for file in manifest["files"].as_array().unwrap() {
            assert!(a.path().join(file.as_str().unwrap()).is_file());
        }
        let timing: serde_json::Value =
            serde_json::from_slice(&fs::read(a.path().join("timing.json")).unwrap()).unwrap();
        assert!(timing["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn reduced_run_records_twin_collision() {
    let dir = tempfile::tempdir().unwrap();
    let o = filament(&["run", "--preset", "reduced_06", "--fast", "--no-plots", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(!dir.path().join("plot.gp").exists());
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["collision"]["twin"], true);
    let index = fs::read_to_string(dir.path().join("index.csv")).unwrap();
    assert!(index.starts_with("file,time\n"));
    assert!(index.lines().count() > 2);
}
