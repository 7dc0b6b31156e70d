//! Text file formats for tensors ("MTEN1") and vectors ("MVEC1").
//!
//! Both formats are a one-line header followed by whitespace-separated
//! decimal entries in flat last-index-fastest order. Entries are written
//! with 17 significant digits, which round-trips every finite f64 bit
//! for bit.

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;
use std::fmt::Write as _;
use std::path::Path;

const TENSOR_MAGIC: &str = "MTEN1";
const VECTOR_MAGIC: &str = "MVEC1";
const ENTRIES_PER_LINE: usize = 8;

pub fn write_tensor(path: &Path, a: &DenseTensor) -> Result<()> {
    let mut out = format!("{} {} {}\n", TENSOR_MAGIC, a.order(), a.dim());
    write_entries(&mut out, a.entries());
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_tensor(path: &Path) -> Result<DenseTensor> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != TENSOR_MAGIC {
        return Err(Error::Format {
            line: 1,
            message: format!("expected header '{TENSOR_MAGIC} <order> <dim>', got '{header}'"),
        });
    }
    let order: usize = parse_field(parts[1], 1, "order")?;
    let dim: usize = parse_field(parts[2], 1, "dim")?;
    if order < 2 || dim < 1 {
        return Err(Error::Format {
            line: 1,
            message: format!("invalid shape: order {order}, dim {dim}"),
        });
    }
    let expected = dim
        .checked_pow(order as u32)
        .ok_or_else(|| Error::Format {
            line: 1,
            message: format!("entry count {dim}^{order} overflows"),
        })?;
    let entries = read_entries(&text, expected)?;
    DenseTensor::from_entries(order, dim, entries)
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    let mut out = format!("{} {}\n", VECTOR_MAGIC, v.len());
    write_entries(&mut out, v);
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let header = text.lines().next().unwrap_or("");
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 2 || parts[0] != VECTOR_MAGIC {
        return Err(Error::Format {
            line: 1,
            message: format!("expected header '{VECTOR_MAGIC} <len>', got '{header}'"),
        });
    }
    let len: usize = parse_field(parts[1], 1, "length")?;
    read_entries(&text, len)
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Format {
        line,
        message: format!("unparsable {what}: '{s}'"),
    })
}

fn write_entries(out: &mut String, entries: &[f64]) {
    for chunk in entries.chunks(ENTRIES_PER_LINE) {
        let mut first = true;
        for v in chunk {
            if !first {
                out.push(' ');
            }
            // 17 significant digits: exact f64 round trip
            let _ = write!(out, "{v:.16e}");
            first = false;
        }
        out.push('\n');
    }
}

// Entries start on line 2; the declared count must match exactly.
fn read_entries(text: &str, expected: usize) -> Result<Vec<f64>> {
    let mut entries = Vec::with_capacity(expected);
    let mut last_line = 1;
    for (lineno, line) in text.lines().enumerate().skip(1) {
        last_line = lineno + 1;
        for tok in line.split_whitespace() {
            if entries.len() == expected {
                return Err(Error::Format {
                    line: last_line,
                    message: format!("more than the declared {expected} entries"),
                });
            }
            let v: f64 = parse_field(tok, last_line, "entry")?;
            entries.push(v);
        }
    }
    if entries.len() != expected {
        return Err(Error::Format {
            line: last_line,
            message: format!("expected {expected} entries, found {}", entries.len()),
        });
    }
    Ok(entries)
}
