//! Preset tables against the checked-in golden files.
//!
//! `ZWM_BLESS=1 cargo test -p zwm-cli --test golden` rewrites the goldens.

use std::path::PathBuf;

use zwm_cli::golden::compare_tables;
use zwm_cli::table::COLUMNS;
use zwm_cli::{preset, run_scenario, ResultTable, PRESETS};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

#[test]
fn presets_match_goldens() {
    let bless = std::env::var_os("ZWM_BLESS").is_some();
    let mut failures = Vec::new();
    for name in PRESETS {
        for spec in preset(name).unwrap() {
            let table = run_scenario(&spec).unwrap();
            let path = golden_dir().join(format!("{}.csv", spec.name));
            if bless {
                std::fs::write(&path, table.to_csv()).unwrap();
                continue;
            }
            let (golden, header) = ResultTable::read_csv(&path)
                .unwrap_or_else(|e| panic!("{e}; run with ZWM_BLESS=1 to create the golden files"));
            assert_eq!(header, COLUMNS);
            let diff = compare_tables(&table, &golden, &header).unwrap();
            if !diff.passed() {
                failures.push(format!("{}:\n{diff}", spec.name));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn goldens_record_hash_and_units() {
    for spec in preset("fig3").unwrap() {
        let (golden, _) = ResultTable::read_csv(&golden_dir().join(format!("{}.csv", spec.name))).unwrap();
        assert_eq!(golden.metadata["config_hash"], spec.config_hash());
        assert!(golden.metadata["units"].contains("rate_R"));
        assert!(golden.metadata.contains_key("tol.coincidence_C"));
    }
}
