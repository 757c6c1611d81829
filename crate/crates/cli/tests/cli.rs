use std::path::Path;
use std::process::{Command, Output};

use zwm_cli::{preset, run_scenario};

const BIN: &str = env!("CARGO_BIN_EXE_zwm");

const FRINGE_SPEC: &str = r#"
name = "fringe"
pump = "single_photon"
g_prime = 0.1
sweep = "phi_s"
sweep_start = 0.0
sweep_stop = 6.0
sweep_points = 8
"#;

fn zwm(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("ZWM_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn run_writes_table_into_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fringe.toml"), FRINGE_SPEC).unwrap();
    let out = zwm(&["run", "fringe.toml", "--out-dir", "tables"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("tables/fringe.csv")).unwrap();
    assert!(text.contains("sweep_value,rate_R,coincidence_C,visibility,ratio_rho,truncation_loss"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 9);
}

#[test]
fn out_dir_defaults_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["preset", "filter-sp", "--format", "json"])
        .current_dir(dir.path())
        .env("ZWM_OUT_DIR", dir.path().join("env"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("env/filter-sp.json")).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), format!("{FRINGE_SPEC}\nunknown_key = 1\n")).unwrap();
    let out = zwm(&["run", "bad.toml"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown_key"));
    assert_eq!(code(&zwm(&["run", "missing.toml"], dir.path())), 2);
    assert_eq!(code(&zwm(&["preset", "nope"], dir.path())), 2);
    assert_eq!(code(&zwm(&["bogus-subcommand"], dir.path())), 2);
}

#[test]
fn truncation_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let spec = r#"
name = "tight"
pump = "coherent"
alpha = 1.0
g_prime = 0.1
cutoff_signal = 1
cutoff_idler = 1
sweep = "phi_s"
sweep_start = 0.0
sweep_stop = 3.0
sweep_points = 3
"#;
    std::fs::write(dir.path().join("tight.toml"), spec).unwrap();
    let out = zwm(&["run", "tight.toml"], dir.path());
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation"));
}

#[test]
fn diff_reports_mismatch_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fringe.toml"), FRINGE_SPEC).unwrap();
    assert_eq!(code(&zwm(&["run", "fringe.toml"], dir.path())), 0);
    let table = dir.path().join("fringe.csv");
    let ok = zwm(&["diff", "fringe.csv", "fringe.csv"], dir.path());
    assert_eq!(code(&ok), 0);

    let text = std::fs::read_to_string(&table).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let row = lines
        .iter()
        .position(|l| l.starts_with("0.0000000000000000e0"))
        .unwrap();
    let mut fields: Vec<String> = lines[row].split(',').map(String::from).collect();
    fields[1] = "1.0e0".into();
    lines[row] = fields.join(",");
    std::fs::write(dir.path().join("golden.csv"), lines.join("\n") + "\n").unwrap();

    let out = zwm(&["diff", "fringe.csv", "golden.csv"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 0 column rate_R"));

    let renamed = text.replace("ratio_rho", "rho");
    std::fs::write(dir.path().join("schema.csv"), renamed).unwrap();
    let out = zwm(&["diff", "fringe.csv", "schema.csv"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema"));
}

#[test]
fn converge_prints_drift_per_variant() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fringe.toml"), FRINGE_SPEC).unwrap();
    let out = zwm(&["converge", "fringe.toml"], dir.path());
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for variant in ["baseline", "cutoffs x2", "order 1", "order 2", "order 3"] {
        assert!(
            text.lines().any(|l| l.starts_with(&format!("{variant},"))),
            "{variant} missing:\n{text}"
        );
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let target = dir.path().join(threads);
        let out = Command::new(BIN)
            .args(["preset", "fig4b", "--out"])
            .arg(&target)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        outputs.push(std::fs::read(target.join("fig4b-g0.16.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let spec = &preset("fringe-lp").unwrap()[0];
    let a = run_scenario(spec).unwrap().to_csv();
    let b = run_scenario(spec).unwrap().to_csv();
    assert_eq!(a, b);
}
