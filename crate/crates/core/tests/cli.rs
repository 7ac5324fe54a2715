//! End-to-end checks of the `parkplan` binary: artifact production, exit
//! codes, and machine-readable errors.

use std::process::Command;

fn write_config(dir: &std::path::Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("instance.toml");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn layouts_subcommand_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[lot]\nlength = 9.5\nwidth = 3.0\n");
    let out = Command::new(env!("CARGO_BIN_EXE_parkplan"))
        .args(["--config", config.to_str().unwrap(), "--out"])
        .arg(dir.path().join("runs"))
        .arg("layouts")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let runs: Vec<_> = std::fs::read_dir(dir.path().join("runs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(runs.len(), 1);
    let layouts: serde_json::Value =
        serde_json::from_slice(&std::fs::read(runs[0].join("layouts.json")).unwrap()).unwrap();
    assert_eq!(layouts["capacity"], 1);
}

#[test]
fn sequences_subcommand_runs_single_stall_instance() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[lot]\nlength = 9.5\nwidth = 3.0\n");
    let out = Command::new(env!("CARGO_BIN_EXE_parkplan"))
        .args([
            "--config",
            config.to_str().unwrap(),
            "--workers",
            "1",
            "--out",
        ])
        .arg(dir.path().join("runs"))
        .arg("sequences")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("exit sequences: 1"), "stdout: {stdout}");
    let runs: Vec<_> = std::fs::read_dir(dir.path().join("runs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert!(runs[0].join("sequences_0.json").exists());
    assert!(runs[0].join("conditions_0.json").exists());
}

#[test]
fn errors_are_machine_readable_and_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    // Lot too small for the stall.
    let config = write_config(dir.path(), "[lot]\nlength = 2.0\nwidth = 2.0\n");
    let out = Command::new(env!("CARGO_BIN_EXE_parkplan"))
        .args(["--config", config.to_str().unwrap()])
        .arg("layouts")
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err: serde_json::Value =
        serde_json::from_slice(out.stderr.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert!(err["error"]
        .as_str()
        .unwrap()
        .contains("neither orientation"));

    // Missing config flag.
    let out = Command::new(env!("CARGO_BIN_EXE_parkplan"))
        .arg("layouts")
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn env_vars_override_out_dir_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[lot]\nlength = 9.5\nwidth = 3.0\n");
    let out = Command::new(env!("CARGO_BIN_EXE_parkplan"))
        .args(["--config", config.to_str().unwrap(), "layouts"])
        .env("PARKPLAN_OUT_DIR", dir.path().join("env-runs"))
        .env("PARKPLAN_WORKERS", "1")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.path().join("env-runs").exists());
}

#[test]
fn render_layouts_produces_svg() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[lot]\nlength = 9.5\nwidth = 3.0\n");
    let out = Command::new(env!("CARGO_BIN_EXE_parkplan"))
        .args(["--config", config.to_str().unwrap(), "--out"])
        .arg(dir.path().join("runs"))
        .args(["render", "--target", "layouts"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let runs: Vec<_> = std::fs::read_dir(dir.path().join("runs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    let svg = std::fs::read_to_string(runs[0].join("layout_0.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("class=\"stall\""));
}

#[test]
fn schedule_reuses_persisted_solution1() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[lot]\nlength = 9.5\nwidth = 3.0\n");
    let runs = dir.path().join("runs");
    let run = |cmd: &str| {
        Command::new(env!("CARGO_BIN_EXE_parkplan"))
            .args(["--config", config.to_str().unwrap(), "--out"])
            .arg(&runs)
            .arg(cmd)
            .output()
            .unwrap()
    };
    let first = run("sequences");
    assert!(first.status.success());
    let second = run("schedule");
    assert!(second.status.success());
    let stdout = String::from_utf8_lossy(&second.stdout);
    assert!(
        stdout.contains("reusing solution-1 artifacts"),
        "stdout: {stdout}"
    );
    let entries: Vec<_> = std::fs::read_dir(&runs)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(entries.len(), 1);
    assert!(entries[0].join("pair_counts.json").exists());
}

#[test]
fn cli_outputs_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[lot]\nlength = 9.5\nwidth = 3.0\n");
    let mut dirs = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("runs-{workers}"));
        let status = Command::new(env!("CARGO_BIN_EXE_parkplan"))
            .args(["--config", config.to_str().unwrap()])
            .env("PARKPLAN_OUT_DIR", &out)
            .env("PARKPLAN_WORKERS", workers)
            .arg("schedule")
            .status()
            .unwrap();
        assert!(status.success());
        dirs.push(out);
    }
    let run_a = std::fs::read_dir(&dirs[0])
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let run_b = std::fs::read_dir(&dirs[1])
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let mut names: Vec<String> = std::fs::read_dir(&run_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        let a = std::fs::read(run_a.join(&name)).unwrap();
        let b = std::fs::read(run_b.join(&name)).unwrap();
        assert_eq!(a, b, "artifact {name} differs between worker counts");
    }
}
