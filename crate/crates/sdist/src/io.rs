//! On-disk formats: the JSON function file and the iteration-trace CSV.
//!
//! A function file stores a sparse view of a dense lattice function:
//!
//! ```json
//! {
//!   "n": 2,
//!   "m": 2,
//!   "entries": [
//!     { "x": [0, 0], "v": 0.6 },
//!     { "x": [1, 0], "v": 0.4 }
//!   ]
//! }
//! ```
//!
//! Omitted points are zero. Entries are written in ascending canonical
//! index order; readers reject out-of-range coordinates and duplicate
//! points. Values round-trip exactly (shortest-representation JSON
//! floats).
//!
//! A trace CSV has the header `iter,objective,step,support,proj_dist_sq`
//! with the support serialized as `i1;i2;...;ik`.

use crate::error::{Error, Result};
use crate::lattice::{LatticeDomain, Point, Support};
use crate::measures::DenseFunction;
use crate::solvers::{IterationRecord, IterationTrace};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Read, Write};

#[derive(Serialize, Deserialize)]
struct FunctionEntry {
    x: Vec<u32>,
    v: f64,
}

#[derive(Serialize, Deserialize)]
struct FunctionFile {
    n: usize,
    m: usize,
    entries: Vec<FunctionEntry>,
}

pub fn write_function<W: Write>(writer: W, function: &DenseFunction) -> Result<()> {
    let domain = function.domain();
    let mut entries = Vec::new();
    for (index, &v) in function.values().iter().enumerate() {
        if v != 0.0 {
            entries.push(FunctionEntry {
                x: domain.unrank(index)?.coords().to_vec(),
                v,
            });
        }
    }
    let file = FunctionFile {
        n: domain.dims(),
        m: domain.states(),
        entries,
    };
    serde_json::to_writer_pretty(writer, &file)?;
    Ok(())
}

pub fn read_function<R: Read>(reader: R) -> Result<DenseFunction> {
    let file: FunctionFile = serde_json::from_reader(reader)?;
    let domain = LatticeDomain::new(file.n, file.m)?;
    let mut values = vec![0.0; domain.num_points()];
    let mut seen = vec![false; domain.num_points()];
    for entry in &file.entries {
        let index = domain.rank(&Point::new(entry.x.clone()))?;
        if seen[index] {
            return Err(Error::Parse {
                line: 0,
                message: format!("duplicate entry for point {:?}", entry.x),
            });
        }
        seen[index] = true;
        values[index] = entry.v;
    }
    DenseFunction::new(domain, values)
}

fn format_float(x: f64) -> String {
    // Plain decimal for ordinary magnitudes, exponent form for the tiny
    // ones; both parse back exactly. Zero (of either sign) prints bare.
    if x == 0.0 {
        return "0".into();
    }
    if x.abs() >= 1e-4 && x.abs() < 1e15 {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn format_support(support: &Support) -> String {
    support
        .indices()
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_support(field: &str, line: usize) -> Result<Support> {
    if field.is_empty() {
        return Ok(Support::empty());
    }
    let indices = field
        .split(';')
        .map(|part| {
            part.parse::<usize>().map_err(|e| Error::Parse {
                line,
                message: format!("bad support index {part:?}: {e}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Support::new(indices)
}

pub fn write_trace_csv<W: Write>(mut writer: W, trace: &IterationTrace) -> Result<()> {
    writeln!(writer, "iter,objective,step,support,proj_dist_sq")?;
    for record in trace.records() {
        writeln!(
            writer,
            "{},{},{},{},{}",
            record.iter,
            format_float(record.objective),
            format_float(record.step),
            format_support(&record.support),
            format_float(record.proj_distance_sq),
        )?;
    }
    Ok(())
}

pub fn read_trace_csv<R: Read>(reader: R) -> Result<IterationTrace> {
    let reader = BufReader::new(reader);
    let mut trace = IterationTrace::default();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        if number == 0 {
            if line != "iter,objective,step,support,proj_dist_sq" {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unexpected trace header {line:?}"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: number + 1,
                message: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse().map_err(|e| Error::Parse {
                line: number + 1,
                message: format!("bad float {s:?}: {e}"),
            })
        };
        trace.push(IterationRecord {
            iter: fields[0].parse().map_err(|e| Error::Parse {
                line: number + 1,
                message: format!("bad iteration {:?}: {e}", fields[0]),
            })?,
            objective: parse_f64(fields[1])?,
            step: parse_f64(fields[2])?,
            support: parse_support(fields[3], number + 1)?,
            proj_distance_sq: parse_f64(fields[4])?,
        });
    }
    Ok(trace)
}
