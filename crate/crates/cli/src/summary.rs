use std::fs::File;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub check: String,
    pub pass: bool,
    pub constant: f64,
    pub tolerance: String,
}

/// Table of `check, status, constant, tolerance`, in the order checks ran.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub rows: Vec<Row>,
}

impl Summary {
    pub fn push(&mut self, check: impl Into<String>, pass: bool, constant: f64, tolerance: impl Into<String>) {
        self.rows.push(Row { check: check.into(), pass, constant, tolerance: tolerance.into() });
    }

    /// A measured constant that is recorded but not judged.
    pub fn record(&mut self, check: impl Into<String>, constant: f64) {
        self.push(check, constant.is_finite(), constant, "recorded");
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn get(&self, check: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.check == check)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(File::create(path)?);
        w.write_record(["check", "status", "constant", "tolerance"])?;
        for r in &self.rows {
            let status = if r.pass { "pass" } else { "fail" };
            w.write_record([r.check.as_str(), status, &fmt_num(r.constant), r.tolerance.as_str()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a table written by [`Summary::write_csv`].
    pub fn read_csv(path: &Path) -> Result<Self, CliError> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut out = Summary::default();
        for rec in rdr.records() {
            let rec = rec?;
            let constant =
                rec[2].parse::<f64>().map_err(|e| CliError::Config(format!("bad constant `{}`: {e}", &rec[2])))?;
            out.push(&rec[0], &rec[1] == "pass", constant, &rec[3]);
        }
        Ok(out)
    }
}

/// Fixed scientific format so that reruns produce identical bytes.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.9e}")
    } else {
        format!("{v}")
    }
}
