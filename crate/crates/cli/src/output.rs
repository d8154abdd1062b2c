//! CSV and JSON rendering of command results.

use std::io::Write;

use epstein::{CurveTrace, ZeroRecord};
use serde::Serialize;
use serde_json::{json, Map, Value};

/// Header shared by every output made of zeros.
pub const ZERO_HEADER: [&str; 7] = ["delta", "rho_x", "rho_y", "kind", "residual", "curve_id", "flags"];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt17(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            _ => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(o: Option<T>) -> Self {
        o.map_or(Cell::Empty, Into::into)
    }
}

/// A command result: a table, plus the curves behind it for JSON output.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub curves: Vec<CurveTrace>,
}

impl Report {
    pub fn table(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), ..Self::default() }
    }

    pub fn zeros() -> Self {
        Self::table(&ZERO_HEADER)
    }

    pub fn push_zero(&mut self, z: &ZeroRecord, curve_id: Option<i64>, flags: &str) {
        self.rows.push(vec![
            z.delta.into(),
            z.rho_x.into(),
            z.rho_y.into(),
            z.kind.as_str().into(),
            z.residual.into(),
            curve_id.map_or(Cell::Empty, Cell::Int),
            flags.into(),
        ]);
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn write_json<C: Serialize>(&self, out: &mut dyn Write, command: &str, config: &C) -> std::io::Result<()> {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.header.iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "meta": { "version": env!("CARGO_PKG_VERSION"), "command": command, "config": config },
            "curves": self.curves,
            "records": records,
        });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)
    }
}

/// Decimal rendering with 17 significant digits, enough for an exact round trip.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..16).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        format!("{x:.16e}")
    }
}
