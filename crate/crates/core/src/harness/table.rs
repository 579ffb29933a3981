use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::Format;
use crate::error::Result;

/// Version of the CSV/JSON layout written by the harness.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    /// `None` is written as an empty CSV cell / JSON null and always comes
    /// with a flag or an error on the same row.
    pub values: Vec<Option<f64>>,
}

/// Curve attached to one row, e.g. a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub row: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Values computed at one scan point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointResult {
    pub values: Vec<(String, Option<f64>)>,
    pub residual: Option<f64>,
    pub flags: Vec<String>,
    pub error: Option<String>,
    pub series: Vec<(String, Vec<f64>, Vec<f64>)>,
}

impl PointResult {
    pub fn push(&mut self, name: &str, v: f64) {
        if v.is_finite() {
            self.values.push((name.into(), Some(v)));
        } else {
            self.values.push((name.into(), None));
            self.flags.push(format!("nonfinite:{name}"));
        }
    }

    pub fn push_opt(&mut self, name: &str, v: Option<f64>) {
        match v {
            Some(x) => self.push(name, x),
            None => {
                self.values.push((name.into(), None));
                self.flags.push(format!("undefined:{name}"));
            }
        }
    }

    pub fn failed(err: impl ToString) -> Self {
        PointResult {
            error: Some(err.to_string()),
            ..Default::default()
        }
    }
}

/// Column-oriented scan results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub schema_version: u32,
    pub name: String,
    pub method: String,
    pub scan_parameter: String,
    pub scan_values: Vec<f64>,
    pub columns: Vec<Column>,
    pub residual: Vec<Option<f64>>,
    pub flags: Vec<Vec<String>>,
    pub errors: Vec<Option<String>>,
    pub series: Vec<Series>,
}

impl ResultTable {
    /// Assemble rows in order; columns appear in order of first use.
    pub fn from_points(name: &str, method: &str, scan_parameter: &str, scan: &[f64], points: Vec<PointResult>) -> Self {
        let n = points.len();
        let mut columns: Vec<Column> = Vec::new();
        for (row, p) in points.iter().enumerate() {
            for (name, v) in &p.values {
                let col = match columns.iter().position(|c| &c.name == name) {
                    Some(k) => k,
                    None => {
                        columns.push(Column {
                            name: name.clone(),
                            values: vec![None; n],
                        });
                        columns.len() - 1
                    }
                };
                columns[col].values[row] = *v;
            }
        }
        let mut series = Vec::new();
        let mut flags = Vec::with_capacity(n);
        for (row, p) in points.iter().enumerate() {
            let mut f = p.flags.clone();
            if p.error.is_none() {
                for c in &columns {
                    if c.values[row].is_none() && !p.values.iter().any(|(k, _)| k == &c.name) {
                        f.push(format!("missing:{}", c.name));
                    }
                }
            }
            flags.push(f);
            for (name, x, y) in &p.series {
                series.push(Series {
                    name: name.clone(),
                    row,
                    x: x.clone(),
                    y: y.clone(),
                });
            }
        }
        ResultTable {
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            method: method.into(),
            scan_parameter: scan_parameter.into(),
            scan_values: scan.to_vec(),
            residual: points.iter().map(|p| p.residual).collect(),
            errors: points.iter().map(|p| p.error.clone()).collect(),
            columns,
            flags,
            series,
        }
    }

    pub fn rows(&self) -> usize {
        self.scan_values.len()
    }

    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn failures(&self) -> usize {
        self.errors.iter().filter(|e| e.is_some()).count()
    }

    /// Prepend a constant column; used to stack tables along a second axis.
    pub fn with_constant(mut self, name: &str, value: f64) -> Self {
        self.columns.insert(
            0,
            Column {
                name: name.into(),
                values: vec![Some(value); self.rows()],
            },
        );
        self
    }

    /// Row-wise concatenation of tables with the same columns.
    pub fn stack(name: &str, tables: Vec<ResultTable>) -> ResultTable {
        let mut it = tables.into_iter();
        let mut out = it.next().expect("at least one table");
        out.name = name.into();
        for t in it {
            let offset = out.rows();
            let n_new = t.rows();
            for c in &mut out.columns {
                match t.columns.iter().find(|d| d.name == c.name) {
                    Some(d) => c.values.extend_from_slice(&d.values),
                    None => c.values.extend(std::iter::repeat_n(None, n_new)),
                }
            }
            out.scan_values.extend(t.scan_values);
            out.residual.extend(t.residual);
            out.flags.extend(t.flags);
            out.errors.extend(t.errors);
            out.series.extend(t.series.into_iter().map(|mut s| {
                s.row += offset;
                s
            }));
        }
        out
    }

    fn csv_main(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![self.scan_parameter.clone()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        header.extend(["residual", "flags", "error"].map(String::from));
        w.write_record(&header).map_err(csv_err)?;
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in 0..self.rows() {
            let mut rec = vec![format!("{:e}", self.scan_values[r])];
            rec.extend(self.columns.iter().map(|c| fmt(c.values[r])));
            rec.push(fmt(self.residual[r]));
            rec.push(self.flags[r].join(";"));
            rec.push(self.errors[r].clone().unwrap_or_default());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| crate::Error::Io(e.to_string()))
    }

    fn csv_series(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["row", &self.scan_parameter, "series", "x", "y"]).map_err(csv_err)?;
        for s in &self.series {
            for (x, y) in s.x.iter().zip(&s.y) {
                w.write_record([
                    s.row.to_string(),
                    format!("{:e}", self.scan_values[s.row]),
                    s.name.clone(),
                    format!("{x:e}"),
                    format!("{y:e}"),
                ])
                .map_err(csv_err)?;
            }
        }
        w.into_inner().map_err(|e| crate::Error::Io(e.to_string()))
    }

    /// Write the table into `dir`; returns the files written.
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        match format {
            Format::Csv => {
                let main = dir.join(format!("{}.csv", self.name));
                fs::write(&main, self.csv_main()?)?;
                out.push(main);
                if !self.series.is_empty() {
                    let s = dir.join(format!("{}_series.csv", self.name));
                    fs::write(&s, self.csv_series()?)?;
                    out.push(s);
                }
            }
            Format::Json => {
                let path = dir.join(format!("{}.json", self.name));
                let text = serde_json::to_string_pretty(self).map_err(|e| crate::Error::Io(e.to_string()))?;
                fs::write(&path, text + "\n")?;
                out.push(path);
            }
        }
        Ok(out)
    }
}

fn csv_err(e: csv::Error) -> crate::Error {
    crate::Error::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut a = PointResult::default();
        a.push("x", 1.0);
        a.push_opt("g", None);
        a.residual = Some(1e-12);
        a.series.push(("v".into(), vec![0.0, 1.0], vec![2.0, 3.0]));
        let b = PointResult::failed("boom");
        ResultTable::from_points("t", "rate-eq", "mu_in", &[1.0, 2.0], vec![a, b])
    }

    #[test]
    fn missing_values_are_flagged_or_errored() {
        let t = sample();
        assert_eq!(t.column("x").unwrap(), &[Some(1.0), None]);
        assert_eq!(t.flags[0], vec!["undefined:g".to_string()]);
        assert_eq!(t.errors[1].as_deref(), Some("boom"));
        assert_eq!(t.failures(), 1);
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let files = sample().write(dir.path(), Format::Csv).unwrap();
        assert_eq!(files.len(), 2);
        let text = std::fs::read_to_string(&files[0]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("mu_in,x,g,residual,flags,error"));
        assert_eq!(lines.next(), Some("1e0,1e0,,1e-12,undefined:g,"));
        assert_eq!(lines.next(), Some("2e0,,,,,boom"));
    }

    #[test]
    fn stacking_offsets_series_rows() {
        let t = ResultTable::stack("s", vec![sample().with_constant("k", 1.0), sample().with_constant("k", 2.0)]);
        assert_eq!(t.rows(), 4);
        assert_eq!(t.series[1].row, 2);
        assert_eq!(t.column("k").unwrap()[3], Some(2.0));
    }
}
