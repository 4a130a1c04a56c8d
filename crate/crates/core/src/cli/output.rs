//! CSV tables with the resolved configuration echoed as `#` comments.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::renorm::Scan;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem; the table is written to `<dir>/<name>.csv`.
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<&'static str>) -> Self {
        Self {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path, command: &str, resolved: &BTreeMap<String, String>) -> io::Result<PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut file = io::BufWriter::new(File::create(&path)?);
        writeln!(file, "# dipole-loop {command}")?;
        for (k, v) in resolved {
            writeln!(file, "# {k} = {v}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut file);
            w.write_record(&self.header)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::render))?;
            }
            w.flush()?;
        }
        file.flush()?;
        Ok(path)
    }
}

/// Scan values with the fitted curve, one row per cutoff.
pub fn scan_table(name: &str, scans: &[&Scan]) -> Table {
    let mut t = Table::new(name, vec!["quantity", "lambda [mass]", "value", "fit"]);
    for s in scans {
        for (l, v) in s.lambdas.iter().zip(&s.values) {
            t.push(vec![
                s.quantity.name().into(),
                (*l).into(),
                (*v).into(),
                s.fit.evaluate(*l).into(),
            ]);
        }
    }
    t
}

/// Fitted coefficients, raw and normalized to the leading term.
pub fn coefficient_table(name: &str, scans: &[&Scan]) -> Table {
    let mut t = Table::new(
        name,
        vec![
            "quantity",
            "c_quad",
            "c_log",
            "c_const",
            "normalized_quad",
            "normalized_log",
            "normalized_const",
            "fit_residual",
            "relative_residual",
            "condition",
        ],
    );
    for s in scans {
        let f = &s.fit;
        t.push(vec![
            s.quantity.name().into(),
            f.c_quad.into(),
            f.c_log.into(),
            f.c_const.into(),
            f.normalized[0].into(),
            f.normalized[1].into(),
            f.normalized[2].into(),
            f.fit_residual.into(),
            f.relative_residual.into(),
            f.condition.into(),
        ]);
    }
    t
}
