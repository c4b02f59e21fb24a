//! Tabular output: four decimals for people, full precision for files.

use std::io::Write;
use std::path::Path;

use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self, decimals: Option<usize>) -> String {
        match self {
            Cell::Num(v) => match decimals {
                Some(d) => format!("{v:.d$}"),
                // Shortest representation that parses back to the same bits.
                None => format!("{v:?}"),
            },
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W, decimals: Option<usize>) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render(decimals)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> CliResult<()> {
        let file = std::fs::File::create(path).map_err(|e| {
            crate::error::CliError::Config(format!("cannot write {}: {e}", path.display()))
        })?;
        self.write(std::io::BufWriter::new(file), None)
    }

    pub fn to_display_string(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf, Some(4)).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| *h == name)
    }
}
