use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// One solver iteration: quality in dB and the method's objective value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub scm_db: f64,
    pub objective: f64,
}

/// Writes `iter,scm_db,objective` CSV. Values use the shortest decimal
/// representation that round-trips, so no precision is lost.
pub fn write_trace_to<W: Write>(rows: &[TraceRow], mut w: W) -> Result<()> {
    if let Some(first) = rows.first() {
        if first.iteration != 0 {
            return Err(Error::Validation(format!(
                "trace must start at iteration 0, got {}",
                first.iteration
            )));
        }
    }
    if let Some(pair) = rows.windows(2).find(|p| p[1].iteration <= p[0].iteration) {
        return Err(Error::Validation(format!(
            "trace iterations not strictly increasing: {} then {}",
            pair[0].iteration, pair[1].iteration
        )));
    }
    writeln!(w, "iter,scm_db,objective")?;
    for row in rows {
        writeln!(w, "{},{},{}", row.iteration, row.scm_db, row.objective)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace<P: AsRef<Path>>(rows: &[TraceRow], path: P) -> Result<()> {
    write_trace_to(rows, BufWriter::new(File::create(path)?))
}
