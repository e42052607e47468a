//! Experiment results as typed CSV tables.
//!
//! Tables are written with one header line and no quoting; text cells
//! therefore must not contain separators. Real cells use the shortest
//! round-tripping representation so a written table reads back and
//! re-serializes to identical bytes, which is what the determinism
//! checks compare.

use crate::error::{CliError, Result};
use std::io::{BufRead, BufReader, Read, Write};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> Result<String> {
        match self {
            Cell::Int(v) => Ok(v.to_string()),
            Cell::Real(v) => Ok(format_float(*v)),
            Cell::Text(s) => {
                if s.contains([',', '\n', '\r', '"']) {
                    return Err(CliError::BadCell(s.clone()));
                }
                Ok(s.clone())
            }
            Cell::Empty => Ok(String::new()),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Real(v) => Some(*v),
            _ => None,
        }
    }
}

pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        // Covers -0.0 as well, which must not print a sign.
        return "0".into();
    }
    if x.abs() >= 1e-4 && x.abs() < 1e15 {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsTable {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl ResultsTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Appends per-group `mean` and `std` rows (population standard
    /// deviation) for every numeric column, grouping by the values of
    /// `group_column`. The first column of a summary row labels the
    /// statistic; non-numeric cells other than the group column are
    /// left empty.
    pub fn append_summary(&mut self, group_column: &str) -> Result<()> {
        let group_idx = self
            .column_index(group_column)
            .ok_or_else(|| CliError::MissingColumn(group_column.to_string()))?;
        let mut groups: Vec<String> = Vec::new();
        for row in &self.rows {
            if let Cell::Text(name) = &row[group_idx]
                && !groups.contains(name)
            {
                groups.push(name.clone());
            }
        }
        let numeric: Vec<usize> = (0..self.columns.len())
            .filter(|&c| {
                c != group_idx
                    && c != 0
                    && self.rows.iter().all(|r| r[c].as_f64().is_some())
            })
            .collect();

        let mut summary_rows = Vec::new();
        for group in &groups {
            let members: Vec<&Vec<Cell>> = self
                .rows
                .iter()
                .filter(|r| matches!(&r[group_idx], Cell::Text(name) if name == group))
                .collect();
            for statistic in ["mean", "std"] {
                let mut row = vec![Cell::Empty; self.columns.len()];
                row[0] = Cell::Text(statistic.to_string());
                row[group_idx] = Cell::Text(group.clone());
                for &c in &numeric {
                    let values: Vec<f64> =
                        members.iter().map(|r| r[c].as_f64().unwrap()).collect();
                    let mean = values.iter().sum::<f64>() / values.len() as f64;
                    row[c] = Cell::Real(match statistic {
                        "mean" => mean,
                        _ => {
                            let var = values
                                .iter()
                                .map(|v| (v - mean) * (v - mean))
                                .sum::<f64>()
                                / values.len() as f64;
                            var.sqrt()
                        }
                    });
                }
                summary_rows.push(row);
            }
        }
        self.rows.extend(summary_rows);
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let fields = row
                .iter()
                .map(Cell::render)
                .collect::<Result<Vec<_>>>()?;
            writeln!(writer, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buffer = Vec::new();
        self.write_csv(&mut buffer)?;
        Ok(String::from_utf8(buffer).expect("csv output is utf-8"))
    }

    /// Reads a table back; every field comes back as the same typed cell
    /// it was written from (integers, floats, text, empties), so
    /// write→read→write is byte-identical.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let reader = BufReader::new(reader);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| CliError::Parse {
                line: 1,
                message: "empty table".into(),
            })?
            .map_err(CliError::from)?;
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut table = ResultsTable {
            columns,
            rows: Vec::new(),
        };
        for (number, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != table.columns.len() {
                return Err(CliError::Parse {
                    line: number + 2,
                    message: format!(
                        "expected {} fields, found {}",
                        table.columns.len(),
                        fields.len()
                    ),
                });
            }
            let row = fields
                .iter()
                .map(|field| {
                    if field.is_empty() {
                        Cell::Empty
                    } else if let Ok(v) = field.parse::<i64>() {
                        Cell::Int(v)
                    } else if let Ok(v) = field.parse::<f64>() {
                        Cell::Real(v)
                    } else {
                        Cell::Text(field.to_string())
                    }
                })
                .collect();
            table.rows.push(row);
        }
        Ok(table)
    }
}
