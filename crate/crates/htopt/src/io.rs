//! CSV and JSON output.

use std::fs;
use std::path::Path;

use htopt_core::analysis::{rate_fit, RateFit};
use htopt_core::optimizers::RunTrace;
use serde::Serialize;

use crate::error::HarnessError;
use crate::experiment::{RunRecord, SweepReport};

pub const TRACE_HEADER: [&str; 5] = ["t", "grad_norm", "f_value", "progress", "samples_used"];

pub fn trace_file_name(t: usize, seed: u64) -> String {
    format!("trace_T{t}_seed{seed}.csv")
}

pub fn write_trace<W: std::io::Write>(out: W, trace: &RunTrace) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for k in 0..trace.len() {
        w.write_record([
            k.to_string(),
            trace.grad_norms[k].to_string(),
            trace.f_values[k].to_string(),
            trace.progress[k].to_string(),
            trace.samples_used[k].to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn create_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

fn create_file(path: &Path) -> Result<fs::File, HarnessError> {
    fs::File::create(path).map_err(|e| HarnessError::io(path, e))
}

/// One trace CSV per record.
pub fn write_traces(dir: &Path, records: &[RunRecord]) -> Result<(), HarnessError> {
    create_dir(dir)?;
    for r in records {
        let path = dir.join(trace_file_name(r.t, r.seed));
        write_trace(create_file(&path)?, &r.trace)?;
    }
    Ok(())
}

pub fn write_summary<W: std::io::Write>(out: W, report: &SweepReport) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    let levels: Vec<f64> = report.budgets.first().map(|b| b.quantiles.quantiles.iter().map(|q| q.0).collect()).unwrap_or_default();
    let mut header = vec!["T".to_string(), "error".into(), "final_grad_norm".into(), "samples".into()];
    header.extend(levels.iter().map(|l| format!("q{l}")));
    w.write_record(&header)?;
    for b in &report.budgets {
        let mut row = vec![
            b.t.to_string(),
            b.error.to_string(),
            b.mean_final_grad_norm.to_string(),
            b.mean_samples.to_string(),
        ];
        row.extend(b.quantiles.quantiles.iter().map(|q| q.1.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_json<T: Serialize, W: std::io::Write>(out: W, value: &T) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(out, value)?;
    Ok(())
}

/// `summary.csv`, `report.json` and the per-run traces under `dir`.
pub fn export(dir: &Path, records: &[RunRecord], report: &SweepReport) -> Result<(), HarnessError> {
    write_traces(dir, records)?;
    write_summary(create_file(&dir.join("summary.csv"))?, report)?;
    write_json(create_file(&dir.join("report.json"))?, report)?;
    Ok(())
}

/// Reads `(T, error)` pairs: columns named `T` and `error` if present,
/// otherwise the first two columns.
pub fn read_rate_points(path: &Path) -> Result<(Vec<f64>, Vec<f64>), HarnessError> {
    let file = fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (ti, ei) = match (col("T"), col("error")) {
        (Some(t), Some(e)) => (t, e),
        _ if headers.len() >= 2 => (0, 1),
        _ => return Err(HarnessError::config("rate-fit input needs at least two columns")),
    };
    let mut ts = Vec::new();
    let mut es = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| {
            rec.get(i).and_then(|s| s.trim().parse::<f64>().ok()).ok_or_else(|| {
                HarnessError::config(format!("{}: row {} is not numeric", path.display(), line + 2))
            })
        };
        ts.push(parse(ti)?);
        es.push(parse(ei)?);
    }
    Ok((ts, es))
}

pub fn fit_file(path: &Path) -> Result<RateFit, HarnessError> {
    let (ts, es) = read_rate_points(path)?;
    Ok(rate_fit(&ts, &es)?)
}
