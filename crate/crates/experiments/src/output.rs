//! CSV writers. Every file starts with one `#` comment line carrying the
//! config hash, then a header row. Floats are printed with 17 significant
//! digits so reruns can be compared byte for byte.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use sppa_core::RunTrace;

use crate::error::{ExperimentError, Result};

pub const TRACE_COLUMNS: [&str; 6] = [
    "iter",
    "lambda",
    "marginal_index",
    "step_length",
    "dist_to_reference",
    "objective",
];

pub const NA: &str = "NA";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), fmt_f64)
}

/// Opens `path`, writes the comment line and header, and hands back a CSV writer.
pub fn create_csv(
    path: &Path,
    comment: &str,
    header: &[&str],
) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(ExperimentError::io(path))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "# {comment}").map_err(ExperimentError::io(path))?;
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(header).map_err(ExperimentError::csv(path))?;
    Ok(w)
}

pub fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    w.flush().map_err(ExperimentError::io(path))?;
    let inner = w
        .into_inner()
        .map_err(|e| ExperimentError::io(path)(e.into_error()))?;
    inner
        .into_inner()
        .map_err(|e| ExperimentError::io(path)(e.into_error()))?
        .sync_all()
        .map_err(ExperimentError::io(path))
}

pub fn write_trace(path: &Path, comment: &str, trace: &RunTrace) -> Result<()> {
    let mut w = create_csv(path, comment, &TRACE_COLUMNS)?;
    for r in &trace.records {
        w.write_record([
            r.iter.to_string(),
            fmt_f64(r.lambda),
            r.marginal_index.to_string(),
            fmt_f64(r.step_length),
            fmt_opt(r.dist_to_reference),
            fmt_f64(r.objective),
        ])
        .map_err(ExperimentError::csv(path))?;
    }
    finish(w, path)
}
