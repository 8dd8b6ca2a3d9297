//! In-memory CSV table. Rendering happens only after every cell has been
//! computed, so a failed run never leaves a partial file behind.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Flag(bool),
    Text(&'static str),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&'static str> for Cell {
    fn from(v: &'static str) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = Vec<Cell>>) {
        for row in rows {
            self.push(row);
        }
    }

    /// Renders the table as comma-separated UTF-8 with LF line endings.
    /// Fails if any real cell is not finite.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidConfig(format!("csv: {e}"));
        writer.write_record(&self.header).map_err(io)?;
        for (r, row) in self.rows.iter().enumerate() {
            let mut record = Vec::with_capacity(row.len());
            for (c, cell) in row.iter().enumerate() {
                record.push(match cell {
                    Cell::Real(v) if !v.is_finite() => {
                        return Err(Error::InvalidConfig(format!(
                            "non-finite value {v} in row {r}, column '{}'",
                            self.header[c]
                        )))
                    }
                    Cell::Real(v) => format_sig9(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Flag(v) => (*v as u8).to_string(),
                    Cell::Text(v) => (*v).to_string(),
                });
            }
            writer.write_record(&record).map_err(io)?;
        }
        writer
            .into_inner()
            .map_err(|e| Error::InvalidConfig(format!("csv: {e}")))
    }
}

/// Nine significant digits: positional notation for moderate magnitudes,
/// scientific otherwise. Trailing zeros are dropped.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format has an exponent");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-5..9).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        let mut s = String::new();
        write!(s, "{v:.decimals$}").expect("write to string");
        trim_zeros(s)
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
