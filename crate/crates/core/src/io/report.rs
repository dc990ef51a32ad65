use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::darp::Metrics;
use crate::model::Duration;

use super::format::IoError;

pub const SUMMARY_HEADER: &str = "method,batch_len,total_cost,used_vehicles,comp_time_ms";

/// One summary row per run, header first.
pub fn write_summary<W: Write>(
    mut out: W,
    method: &str,
    batch_len: Option<Duration>,
    metrics: &Metrics,
    comp_time_ms: u128,
) -> io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    let batch = batch_len.map(|b| b.to_string()).unwrap_or_default();
    writeln!(out, "{method},{batch},{},{},{comp_time_ms}", metrics.total_cost, metrics.used_vehicles)
}

pub fn write_histogram<W: Write, T: std::fmt::Display>(mut out: W, masses: &[T]) -> io::Result<()> {
    writeln!(out, "bucket,mass")?;
    for (bucket, mass) in masses.iter().enumerate() {
        writeln!(out, "{bucket},{mass}")?;
    }
    Ok(())
}

/// Writes `summary.csv`, `occupancy.csv` and `delays.csv` into `dir`.
pub fn write_metrics_dir(
    dir: &Path,
    method: &str,
    batch_len: Option<Duration>,
    metrics: &Metrics,
    comp_time_ms: u128,
) -> Result<(), IoError> {
    fs::create_dir_all(dir).map_err(|source| IoError::Write { path: dir.into(), source })?;
    let put = |name: &str, buf: &[u8]| {
        let path = dir.join(name);
        fs::write(&path, buf).map_err(|source| IoError::Write { path, source })
    };
    let mut buf = Vec::new();
    write_summary(&mut buf, method, batch_len, metrics, comp_time_ms).expect("in memory");
    put("summary.csv", &buf)?;
    buf.clear();
    write_histogram(&mut buf, &metrics.occupancy).expect("in memory");
    put("occupancy.csv", &buf)?;
    buf.clear();
    write_histogram(&mut buf, &metrics.delays).expect("in memory");
    put("delays.csv", &buf)
}
