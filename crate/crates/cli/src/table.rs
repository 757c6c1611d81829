use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::CliError;
use crate::spec::OutputFormat;

pub const COLUMNS: [&str; 6] = [
    "sweep_value",
    "rate_R",
    "coincidence_C",
    "visibility",
    "ratio_rho",
    "truncation_loss",
];

pub const UNITS: &str = "rate_R: counts per pump event; coincidence_C: coincidences per pump event; \
                         visibility: 1; ratio_rho: 1; truncation_loss: squared norm";

/// Absolute per-column tolerances written into every table header and used by
/// golden comparison.
pub const DEFAULT_TOLERANCES: [f64; 6] = [0.0, 1e-13, 1e-18, 1e-10, 1e-10, 1e-16];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub sweep_value: f64,
    pub rate_r: f64,
    pub coincidence_c: f64,
    pub visibility: f64,
    /// `NaN` when not computed.
    pub ratio_rho: f64,
    pub truncation_loss: f64,
}

impl Row {
    pub fn values(&self) -> [f64; 6] {
        [
            self.sweep_value,
            self.rate_r,
            self.coincidence_c,
            self.visibility,
            self.ratio_rho,
            self.truncation_loss,
        ]
    }

    pub fn from_values(v: [f64; 6]) -> Self {
        Self {
            sweep_value: v[0],
            rate_r: v[1],
            coincidence_c: v[2],
            visibility: v[3],
            ratio_rho: v[4],
            truncation_loss: v[5],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    /// Written as `# key = value` header lines, in key order.
    pub metadata: BTreeMap<String, String>,
    pub rows: Vec<Row>,
}

/// 17 significant digits, scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl ResultTable {
    pub fn new(name: impl Into<String>, metadata: BTreeMap<String, String>, rows: Vec<Row>) -> Self {
        let mut metadata = metadata;
        metadata.insert("units".into(), UNITS.into());
        for (column, tol) in COLUMNS.iter().zip(DEFAULT_TOLERANCES) {
            metadata
                .entry(format!("tol.{column}"))
                .or_insert_with(|| format!("{tol:e}"));
        }
        Self {
            name: name.into(),
            metadata,
            rows,
        }
    }

    /// Per-column absolute tolerances from the `tol.<column>` header entries.
    pub fn tolerances(&self) -> Result<[f64; 6], CliError> {
        let mut tols = DEFAULT_TOLERANCES;
        for (k, column) in COLUMNS.iter().enumerate() {
            if let Some(text) = self.metadata.get(&format!("tol.{column}")) {
                tols[k] = text
                    .parse()
                    .map_err(|_| CliError::Spec(format!("tolerance for {column} is not a number: {text:?}")))?;
            }
        }
        Ok(tols)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = COLUMNS.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r.values()[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# name = {}", self.name).unwrap();
        for (key, value) in &self.metadata {
            writeln!(out, "# {key} = {value}").unwrap();
        }
        out.push_str(&COLUMNS.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.values().iter().map(|&v| format_float(v)).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let number = |x: f64| if x.is_finite() { json!(x) } else { Value::Null };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                for (column, v) in COLUMNS.iter().zip(r.values()) {
                    obj.insert((*column).to_string(), number(v));
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "name": self.name,
            "metadata": self.metadata,
            "columns": COLUMNS,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("tables always serialize");
        text.push('\n');
        text
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        }
        std::fs::write(path, self.render(format)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    /// Parses a table written by [`ResultTable::to_csv`]. Returns the table
    /// and the header row as found, so schema differences can be reported.
    pub fn parse_csv(text: &str) -> Result<(Self, Vec<String>), CliError> {
        let mut name = String::new();
        let mut metadata = BTreeMap::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            if let Some((key, value)) = line.trim_start_matches('#').split_once('=') {
                let (key, value) = (key.trim(), value.trim());
                if key == "name" {
                    name = value.to_string();
                } else {
                    metadata.insert(key.to_string(), value.to_string());
                }
            }
        }

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::Spec(format!("unreadable table header: {e}")))?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (k, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::Spec(format!("row {k}: {e}")))?;
            let values: Vec<f64> = record
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Spec(format!("row {k}: {e}")))?;
            if header == COLUMNS {
                let arr: [f64; 6] = values
                    .try_into()
                    .map_err(|v: Vec<f64>| CliError::Spec(format!("row {k} has {} fields", v.len())))?;
                rows.push(Row::from_values(arr));
            }
        }
        Ok((Self { name, metadata, rows }, header))
    }

    pub fn read_csv(path: &Path) -> Result<(Self, Vec<String>), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse_csv(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let rows = vec![
            Row::from_values([0.0, 0.25, 0.0, 1.0, f64::NAN, 0.0]),
            Row::from_values([0.1, 1.0 / 3.0, 1e-17, 0.999, 1.03, 1e-14]),
        ];
        ResultTable::new("sample", BTreeMap::from([("config_hash".into(), "abc".into())]), rows)
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let table = sample();
        let (parsed, header) = ResultTable::parse_csv(&table.to_csv()).unwrap();
        assert_eq!(header, COLUMNS);
        assert_eq!(parsed.name, "sample");
        assert_eq!(parsed.metadata, table.metadata);
        for (a, b) in parsed.rows.iter().zip(&table.rows) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!(x == &y || (x.is_nan() && y.is_nan()));
            }
        }
    }

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.25), "2.5000000000000000e-1");
        assert_eq!(format_float(f64::NAN), "NaN");
        let x = 0.1 + 0.2;
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_uses_null_for_missing() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert!(v["rows"][0]["ratio_rho"].is_null());
        assert_eq!(v["rows"][1]["ratio_rho"], json!(1.03));
    }
}
