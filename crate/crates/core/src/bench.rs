//! Benchmark sweeps: generate seeded instances, solve them, and emit
//! per-run records as CSV, JSON, or a human-readable table.
//!
//! Instances are re-generated from seeds rather than stored; the seed is
//! the reproducibility unit. Rows are ordered by (size, seed) and every
//! field except wall-clock time is deterministic.

use crate::error::Result;
use crate::homotopy::{track, TrackerConfig};
use crate::mtensor::{generate_instance, GeneratorConfig};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// One (instance, solve) outcome; mirrors the columns of the report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BenchRecord {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub euitr: usize,
    pub nwitr: usize,
    pub time_seconds: f64,
    pub residue_orig: f64,
    pub residue_scaled: f64,
    pub status: String,
}

/// Generate and solve one instance per (size, seed) pair, in order.
/// A failing run is recorded in its row and the sweep continues.
pub fn run_bench(
    sizes: &[(usize, usize)],
    epsilon: f64,
    seeds: &[u64],
    cfg: &TrackerConfig,
) -> Vec<BenchRecord> {
    let mut records = Vec::with_capacity(sizes.len() * seeds.len());
    for &(m, n) in sizes {
        for &seed in seeds {
            records.push(run_one(m, n, epsilon, seed, cfg));
        }
    }
    records
}

pub fn run_one(m: usize, n: usize, epsilon: f64, seed: u64, cfg: &TrackerConfig) -> BenchRecord {
    let start = Instant::now();
    let outcome = generate_instance(&GeneratorConfig {
        order: m,
        dim: n,
        epsilon,
        seed,
    })
    .and_then(|inst| track(inst.a, inst.b, cfg));
    let time_seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok(r) => BenchRecord {
            m,
            n,
            seed,
            euitr: r.euitr,
            nwitr: r.nwitr,
            time_seconds,
            residue_orig: r.residue_orig,
            residue_scaled: r.residue_scaled,
            status: r.status.to_string(),
        },
        Err(e) => BenchRecord {
            m,
            n,
            seed,
            euitr: 0,
            nwitr: 0,
            time_seconds,
            residue_orig: f64::NAN,
            residue_scaled: f64::NAN,
            status: format!("Error: {e}"),
        },
    }
}

pub fn to_csv(records: &[BenchRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| crate::error::Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf8"))
}

pub fn from_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.deserialize()
        .map(|r| r.map_err(csv_err))
        .collect()
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::InvalidArgument(format!("csv: {e}"))
}

pub fn to_json(records: &[BenchRecord]) -> String {
    serde_json::to_string_pretty(records).expect("bench records serialize")
}

/// Table layout mirroring the columns euitr / nwitr / time / residue.
pub fn to_table(records: &[BenchRecord]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>8} {:>6} {:>6} {:>6} {:>10} {:>12} {:>12}  {}\n",
        "(m,n)", "seed", "euitr", "nwitr", "time", "residue", "res(scaled)", "status"
    ));
    for r in records {
        out.push_str(&format!(
            "{:>8} {:>6} {:>6} {:>6} {:>10.3} {:>12.4e} {:>12.4e}  {}\n",
            format!("({},{})", r.m, r.n),
            r.seed,
            r.euitr,
            r.nwitr,
            r.time_seconds,
            r.residue_orig,
            r.residue_scaled,
            r.status
        ));
    }
    out
}
