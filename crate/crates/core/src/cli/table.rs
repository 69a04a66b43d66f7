//! Comma-separated tables with a header row, `#` comment lines and
//! scientific notation `d.dddddddddde±XX`.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Marker written for an absent value, e.g. the ratio at `n = 0`.
pub const MISSING: &str = "---";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    /// The value a round trip through text yields.
    pub fn quantized(&self) -> Cell {
        self.to_string().parse().expect("emitted cells always parse")
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Num(v) => f.write_str(&format_sci(*v)),
            Cell::Text(s) => f.write_str(s),
            Cell::Missing => f.write_str(MISSING),
        }
    }
}

impl FromStr for Cell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == MISSING {
            return Ok(Cell::Missing);
        }
        if let Ok(v) = s.parse::<i64>() {
            return Ok(Cell::Int(v));
        }
        if s.contains(['e', 'E']) {
            if let Ok(v) = s.parse::<f64>() {
                return Ok(Cell::Num(v));
            }
        }
        if s.contains(',') || s.contains('\n') {
            return Err(Error::Structural(format!("cell text '{s}' contains a separator")));
        }
        Ok(Cell::Text(s.to_string()))
    }
}

/// `v` with 10 digits after the point and a signed two-digit exponent.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.10e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Comment lines, written after the rows without the leading `#`.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::Structural(format!("row has {} cells, header has {}", row.len(), self.header.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into().replace('\n', " "));
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(out, "# {n}");
        }
        out
    }

    /// Every cell replaced by its text round trip.
    pub fn quantized(&self) -> Table {
        Table {
            header: self.header.clone(),
            rows: self.rows.iter().map(|r| r.iter().map(Cell::quantized).collect()).collect(),
            notes: self.notes.clone(),
        }
    }
}

impl FromStr for Table {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Structural("empty table".into()))?;
        let mut table = Table::new(header.split(','));
        for line in lines {
            if let Some(note) = line.strip_prefix('#') {
                table.notes.push(note.strip_prefix(' ').unwrap_or(note).to_string());
            } else if !line.is_empty() {
                let row = line.split(',').map(str::parse).collect::<Result<Vec<Cell>>>()?;
                table.push(row)?;
            }
        }
        Ok(table)
    }
}
