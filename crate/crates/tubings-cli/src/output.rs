use std::io::Write;

use anyhow::Result;
use serde_json::Value;
use tubings::Tubing;

use crate::Format;

/// Rows collected for either CSV or JSON output.
pub struct Table {
    format: Format,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    values: Vec<Value>,
}

impl Table {
    pub fn new(format: Format) -> Self {
        Table {
            format,
            header: Vec::new(),
            rows: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn header(&mut self, cols: &[&str]) {
        self.header = cols.iter().map(|c| c.to_string()).collect();
    }

    pub fn row(&mut self, csv: Vec<String>, json: Value) {
        match self.format {
            Format::Csv => self.rows.push(csv),
            Format::Json => self.values.push(json),
        }
    }

    pub fn write(self, out: &mut impl Write) -> Result<()> {
        match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()?;
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &Value::Array(self.values))?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

/// Tubes as sorted vertex-id lists, largest first.
pub fn tubes_json(tau: &Tubing) -> Value {
    let mut tubes = tau.tubes();
    tubes.sort_by_key(|t| (std::cmp::Reverse(t.count_ones()), t.trailing_zeros(), *t));
    tubes
        .iter()
        .map(|t| (0..64).filter(|v| t >> v & 1 == 1).collect::<Vec<usize>>())
        .collect::<Vec<_>>()
        .into()
}

pub fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(T::to_string).collect()
}
