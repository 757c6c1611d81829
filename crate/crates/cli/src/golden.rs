use std::fmt;
use std::path::Path;

use crate::error::CliError;
use crate::table::{ResultTable, COLUMNS};

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub row: usize,
    pub column: &'static str,
    pub actual: f64,
    pub expected: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GoldenDiff {
    /// Column or row-count differences; any entry fails the comparison.
    pub schema: Vec<String>,
    pub mismatches: Vec<Mismatch>,
}

impl GoldenDiff {
    pub fn passed(&self) -> bool {
        self.schema.is_empty() && self.mismatches.is_empty()
    }
}

impl fmt::Display for GoldenDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "ok");
        }
        for s in &self.schema {
            writeln!(f, "schema: {s}")?;
        }
        for m in &self.mismatches {
            writeln!(
                f,
                "row {} column {}: {:e} vs golden {:e} (|diff| {:.3e} > tol {:e})",
                m.row,
                m.column,
                m.actual,
                m.expected,
                (m.actual - m.expected).abs(),
                m.tolerance
            )?;
        }
        Ok(())
    }
}

fn within(actual: f64, expected: f64, tol: f64) -> bool {
    if actual.is_nan() || expected.is_nan() {
        return actual.is_nan() && expected.is_nan();
    }
    (actual - expected).abs() <= tol
}

/// Compares two tables element-wise with the absolute tolerances declared in
/// the golden header.
pub fn compare_tables(
    table: &ResultTable,
    golden: &ResultTable,
    golden_header: &[String],
) -> Result<GoldenDiff, CliError> {
    let mut diff = GoldenDiff::default();
    if golden_header != COLUMNS {
        let missing: Vec<_> = COLUMNS
            .iter()
            .filter(|c| !golden_header.iter().any(|h| h == *c))
            .collect();
        let extra: Vec<_> = golden_header
            .iter()
            .filter(|h| !COLUMNS.contains(&h.as_str()))
            .collect();
        diff.schema.push(format!(
            "golden columns {golden_header:?} differ from {COLUMNS:?} (missing {missing:?}, unexpected {extra:?})"
        ));
        return Ok(diff);
    }
    if table.rows.len() != golden.rows.len() {
        diff.schema.push(format!(
            "{} rows vs {} in the golden file",
            table.rows.len(),
            golden.rows.len()
        ));
    }
    let tolerances = golden.tolerances()?;
    for (k, (a, e)) in table.rows.iter().zip(&golden.rows).enumerate() {
        for (c, (x, y)) in a.values().iter().zip(e.values()).enumerate() {
            if !within(*x, y, tolerances[c]) {
                diff.mismatches.push(Mismatch {
                    row: k,
                    column: COLUMNS[c],
                    actual: *x,
                    expected: y,
                    tolerance: tolerances[c],
                });
            }
        }
    }
    Ok(diff)
}

pub fn compare_golden(table: &ResultTable, golden: &Path) -> Result<GoldenDiff, CliError> {
    let (golden_table, header) = ResultTable::read_csv(golden)?;
    compare_tables(table, &golden_table, &header)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::table::Row;

    fn table() -> ResultTable {
        ResultTable::new(
            "t",
            BTreeMap::new(),
            vec![
                Row::from_values([0.0, 0.5, 0.0, 1.0, f64::NAN, 0.0]),
                Row::from_values([1.0, 0.25, 0.0, 1.0, f64::NAN, 0.0]),
            ],
        )
    }

    fn header() -> Vec<String> {
        COLUMNS.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn identical_tables_pass() {
        let t = table();
        assert!(compare_tables(&t, &t, &header()).unwrap().passed());
    }

    #[test]
    fn perturbation_names_row_and_column() {
        let golden = table();
        let mut t = table();
        t.rows[1].rate_r += 1e-3;
        let diff = compare_tables(&t, &golden, &header()).unwrap();
        assert!(!diff.passed());
        assert_eq!(diff.mismatches.len(), 1);
        assert_eq!((diff.mismatches[0].row, diff.mismatches[0].column), (1, "rate_R"));
        assert!(diff.to_string().contains("row 1 column rate_R"));
    }

    #[test]
    fn schema_mismatch_lists_columns() {
        let t = table();
        let mut h = header();
        h[4] = "rho".into();
        let diff = compare_tables(&t, &t, &h).unwrap();
        assert!(!diff.passed());
        assert!(diff.schema[0].contains("ratio_rho"));
        assert!(diff.schema[0].contains("rho"));
    }

    #[test]
    fn header_tolerances_apply() {
        let mut golden = table();
        golden.metadata.insert("tol.rate_R".into(), "1e-2".into());
        let mut t = table();
        t.rows[0].rate_r += 1e-3;
        assert!(compare_tables(&t, &golden, &header()).unwrap().passed());
    }
}
