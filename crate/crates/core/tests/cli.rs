use std::process::Command;

fn mazer() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mazer"))
}

fn config_path() -> String {
    format!("{}/../../configs/quick.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn list_names_every_experiment() {
    let out = mazer().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["fig1", "fig3a", "fig3b", "fig6", "fig8", "custom"] {
        assert!(text.contains(id), "{id} missing");
    }
}

#[test]
fn shipped_config_validates() {
    let out = mazer().args(["validate", "--config", &config_path()]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_writes_csv_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("custom.csv");
    let status = mazer()
        .args(["run", "custom", "--config", &config_path(), "--out"])
        .arg(&path)
        .args(["--set", "sweep.points=4"])
        .env("MAZER_WORKERS", "2")
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 1 + 2 * 4);
    assert!(header.starts_with("k0,P_trans_dk0_vacuum"));
    assert_eq!(lines.count(), 4);
    assert!(text.lines().any(|l| l.starts_with("# experiment")));
}

#[test]
fn bad_input_exits_with_config_code() {
    let out = mazer().args(["run", "fig9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = mazer().args(["run", "fig1", "--set", "no_such_field=1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = mazer().args(["run", "fig1", "--set", "lambda0=-2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let out = mazer()
        .args(["run", "fig1", "--set", "sweep.points=2", "--out", "/nonexistent/dir/out.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_reports_broken_configs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"fig6": {"propagation": {"dt": 5.0}}}"#).unwrap();
    let out = mazer().args(["validate", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout).to_string() + &String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("stability"), "{text}");
}
