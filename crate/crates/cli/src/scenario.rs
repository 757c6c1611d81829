use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use rayon::prelude::*;
use zwm_core::interferometer::{
    coincidence_rate, detection_rate, fit_fringe, fringe_scan, match_single_photon, nl2_nl1_ratio, run_zwm,
};
use zwm_core::ZwmConfig;

use crate::error::CliError;
use crate::spec::{OutputFormat, PumpKind, ScenarioSpec, Spacing, SweepAxis};
use crate::table::{format_float, ResultTable, Row, COLUMNS};

pub const PRESETS: [&str; 5] = ["fringe-sp", "fringe-lp", "fig3", "fig4b", "filter-sp"];

/// Gains of the three-curve ratio preset; the largest `|g alpha|^2` on each
/// curve is 0.03.
pub const FIG4B_GAINS: [f64; 3] = [0.12, 0.16, 0.20];
pub const FIG4B_MAX_X: f64 = 0.03;

fn base_spec(
    name: &str,
    pump: PumpKind,
    g_prime: f64,
    sweep: SweepAxis,
    start: f64,
    stop: f64,
    points: usize,
) -> ScenarioSpec {
    ScenarioSpec {
        name: name.into(),
        pump,
        alpha: 0.0,
        phi_p: 0.0,
        g_prime,
        tau: 1.0,
        delta_omega: 0.0,
        phi_i: 0.0,
        phi_s: 0.0,
        transmission: 1.0,
        order: 2,
        truncation_bound: zwm_core::fock::DEFAULT_TRUNCATION_BOUND,
        allow_unequal_pumps: false,
        cutoff_pump: None,
        cutoff_signal: None,
        cutoff_idler: None,
        cutoff_loss: None,
        sweep,
        sweep_start: start,
        sweep_stop: stop,
        sweep_points: points,
        sweep_spacing: Spacing::Linear,
        fringe_points: 32,
        ratio: false,
        format: OutputFormat::Csv,
        output: None,
    }
}

/// Scenario specs behind a named preset, one per output table.
pub fn preset(name: &str) -> Result<Vec<ScenarioSpec>, CliError> {
    let fringe_stop = TAU * 31.0 / 32.0;
    let specs = match name {
        "fringe-sp" => vec![base_spec(
            name,
            PumpKind::SinglePhoton,
            0.1,
            SweepAxis::PhiS,
            0.0,
            fringe_stop,
            32,
        )],
        "fringe-lp" => {
            let mut spec = base_spec(name, PumpKind::Coherent, 0.05, SweepAxis::PhiS, 0.0, fringe_stop, 32);
            spec.alpha = 1.0;
            vec![spec]
        }
        "fig3" => [("fig3-sp", PumpKind::SinglePhoton), ("fig3-lp", PumpKind::Coherent)]
            .into_iter()
            .map(|(table, pump)| {
                let mut spec = base_spec(table, pump, 0.03, SweepAxis::PumpPower, 1e-4, 1e-2, 10);
                spec.sweep_spacing = Spacing::Log;
                spec
            })
            .collect(),
        "fig4b" => FIG4B_GAINS
            .iter()
            .map(|&g| {
                let stop = FIG4B_MAX_X / (g * g);
                let mut spec = base_spec(
                    &format!("fig4b-g{g:.2}"),
                    PumpKind::Coherent,
                    g,
                    SweepAxis::PumpPower,
                    stop / 10.0,
                    stop,
                    10,
                );
                spec.ratio = true;
                spec
            })
            .collect(),
        "filter-sp" => vec![base_spec(
            name,
            PumpKind::SinglePhoton,
            0.1,
            SweepAxis::Transmission,
            0.0,
            1.0,
            5,
        )],
        other => {
            return Err(CliError::Spec(format!(
                "unknown preset {other:?}; available: {}",
                PRESETS.join(", ")
            )))
        }
    };
    for spec in &specs {
        spec.validate()?;
    }
    Ok(specs)
}

/// One table row from a fully specified configuration.
pub fn evaluate(config: &ZwmConfig, sweep_value: f64, fringe_points: usize, ratio: bool) -> Result<Row, CliError> {
    let out = run_zwm(config)?;
    let phases: Vec<f64> = (0..fringe_points)
        .map(|k| TAU * k as f64 / fringe_points as f64)
        .collect();
    let fit = fit_fringe(&fringe_scan(&out, &phases)?)?;
    let ratio_rho = if ratio {
        let sp = match_single_photon(config)?;
        nl2_nl1_ratio(config, &sp)?.rho
    } else {
        f64::NAN
    };
    Ok(Row {
        sweep_value,
        rate_r: detection_rate(&out, config.phi_s)?,
        coincidence_c: coincidence_rate(&out)?,
        visibility: fit.visibility,
        ratio_rho,
        truncation_loss: out.truncation_loss,
    })
}

fn run_rows<F>(spec: &ScenarioSpec, adjust: F) -> Result<Vec<Row>, CliError>
where
    F: Fn(ZwmConfig) -> ZwmConfig + Sync,
{
    spec.sweep_values()
        .par_iter()
        .map(|&value| {
            let config = adjust(spec.config_at(value)?);
            evaluate(&config, value, spec.fringe_points, spec.ratio)
        })
        .collect()
}

fn metadata(spec: &ScenarioSpec) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("config_hash".into(), spec.config_hash()),
        (
            "versions".into(),
            format!("zwm-core {}, zwm-cli {}", zwm_core::VERSION, env!("CARGO_PKG_VERSION")),
        ),
        (
            "sweep".into(),
            format!("{} [{}]", spec.sweep.label(), spec.sweep.unit()),
        ),
        ("order".into(), spec.order.to_string()),
    ])
}

/// Runs the sweep; points are evaluated in parallel and kept in sweep order.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ResultTable, CliError> {
    spec.validate()?;
    let rows = run_rows(spec, |c| c)?;
    Ok(ResultTable::new(spec.name.clone(), metadata(spec), rows))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub variant: String,
    pub order: u32,
    pub cutoff_factor: u32,
    /// Largest absolute change of each column relative to the baseline.
    pub drift: [f64; 6],
}

impl ConvergenceRow {
    /// Largest drift over the observable columns (`rate_R` to `ratio_rho`;
    /// the truncation loss is a diagnostic and moves with the cutoffs).
    pub fn max_drift(&self) -> f64 {
        self.drift[1..5].iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub name: String,
    pub config_hash: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn variant(&self, name: &str) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.variant == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# name = {}\n# config_hash = {}\n", self.name, self.config_hash);
        out.push_str("variant,order,cutoff_factor,");
        out.push_str(&COLUMNS.map(|c| format!("drift_{c}")).join(","));
        out.push_str(",max_drift\n");
        for row in &self.rows {
            write!(out, "{},{},{}", row.variant, row.order, row.cutoff_factor).unwrap();
            for d in row.drift {
                write!(out, ",{}", format_float(d)).unwrap();
            }
            writeln!(out, ",{}", format_float(row.max_drift())).unwrap();
        }
        out
    }
}

fn drift(a: &[Row], b: &[Row]) -> [f64; 6] {
    let mut out = [0.0f64; 6];
    for (ra, rb) in a.iter().zip(b) {
        for (k, (x, y)) in ra.values().iter().zip(rb.values()).enumerate() {
            let d = match (x.is_nan(), y.is_nan()) {
                (true, true) => 0.0,
                (false, false) => (x - y).abs(),
                _ => f64::INFINITY,
            };
            out[k] = out[k].max(d);
        }
    }
    out
}

/// Re-runs the scenario with doubled cutoffs and at each Dyson order, and
/// reports how far every column moves from the baseline run.
pub fn convergence_report(spec: &ScenarioSpec) -> Result<ConvergenceReport, CliError> {
    spec.validate()?;
    let baseline = run_rows(spec, |c| c)?;
    let mut rows = vec![ConvergenceRow {
        variant: "baseline".into(),
        order: spec.order,
        cutoff_factor: 1,
        drift: [0.0; 6],
    }];

    let doubled = run_rows(spec, |c| {
        let cutoffs = c.resolved_cutoffs().scaled(2);
        c.with_cutoffs(cutoffs)
    })?;
    rows.push(ConvergenceRow {
        variant: "cutoffs x2".into(),
        order: spec.order,
        cutoff_factor: 2,
        drift: drift(&baseline, &doubled),
    });

    for order in 1..=zwm_core::dynamics::MAX_DYSON_ORDER {
        let reordered = ScenarioSpec { order, ..spec.clone() };
        let table = run_rows(&reordered, |c| c)?;
        rows.push(ConvergenceRow {
            variant: format!("order {order}"),
            order,
            cutoff_factor: 1,
            drift: drift(&baseline, &table),
        });
    }
    Ok(ConvergenceReport {
        name: spec.name.clone(),
        config_hash: spec.config_hash(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in PRESETS {
            assert!(!preset(name).unwrap().is_empty());
        }
        assert!(matches!(preset("nope"), Err(CliError::Spec(_))));
        assert_eq!(preset("fig4b").unwrap().len(), 3);
    }

    #[test]
    fn fringe_preset_has_unit_visibility() {
        let table = run_scenario(&preset("fringe-sp").unwrap()[0]).unwrap();
        assert_eq!(table.rows.len(), 32);
        for row in &table.rows {
            assert!((row.visibility - 1.0).abs() < 1e-9);
            assert!(row.coincidence_c <= 1e-12);
            assert!(row.ratio_rho.is_nan());
        }
    }

    #[test]
    fn zero_gain_converges_trivially() {
        let mut spec = preset("fig3").unwrap()[1].clone();
        spec.g_prime = 0.0;
        let report = convergence_report(&spec).unwrap();
        for row in &report.rows {
            assert_eq!(row.max_drift(), 0.0, "{}", row.variant);
        }
    }
}
