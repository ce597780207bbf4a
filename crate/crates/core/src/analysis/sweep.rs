use std::time::Instant;

use rayon::prelude::*;

use super::SCHEMA_VERSION;
use crate::error::{Error, Result};

/// One row of a sweep table.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub schema_version: u32,
    pub param_name: String,
    pub param_value: f64,
    pub fidelity: f64,
    pub t_op_us: f64,
    pub trace_err: f64,
    pub min_eig: f64,
    pub wall_ms: f64,
    pub config_hash: String,
}

impl SweepRecord {
    /// Row for a point that did not produce a result.
    pub fn failed(param_name: &str, param_value: f64, config_hash: String) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            param_name: param_name.to_string(),
            param_value,
            fidelity: f64::NAN,
            t_op_us: f64::NAN,
            trace_err: f64::NAN,
            min_eig: f64::NAN,
            wall_ms: 0.0,
            config_hash,
        }
    }

    pub fn succeeded(&self) -> bool {
        !self.fidelity.is_nan()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepOptions {
    /// Worker threads; points are independent.
    pub jobs: usize,
    /// Record wall-clock time per point. Off by default so that repeated
    /// sweeps give identical tables.
    pub timing: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { jobs: 1, timing: false }
    }
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    /// Index and error of every point that failed.
    pub failures: Vec<(usize, Error)>,
}

impl SweepOutcome {
    pub fn fidelity_range(&self) -> Option<(f64, f64)> {
        let ok: Vec<f64> = self.records.iter().filter(|r| r.succeeded()).map(|r| r.fidelity).collect();
        if ok.is_empty() {
            return None;
        }
        Some((ok.iter().copied().fold(f64::INFINITY, f64::min), ok.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
    }
}

/// Evaluates `point` at every value. `point` returns the record for one value
/// (with `wall_ms` left at zero) or the config hash and error of a failed point.
pub fn run_sweep<F>(param_name: &str, values: &[f64], opts: SweepOptions, point: F) -> Result<SweepOutcome>
where
    F: Fn(f64) -> std::result::Result<SweepRecord, (String, Error)> + Sync,
{
    if values.is_empty() {
        return Err(Error::Config("sweep value list is empty".into()));
    }
    let eval = |&v: &f64| {
        let start = Instant::now();
        let res = point(v);
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match res {
            Ok(mut rec) => {
                rec.wall_ms = if opts.timing { ms } else { 0.0 };
                (rec, None)
            }
            Err((hash, err)) => (SweepRecord::failed(param_name, v, hash), Some(err)),
        }
    };
    let results: Vec<(SweepRecord, Option<Error>)> = if opts.jobs <= 1 {
        values.iter().map(eval).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {} worker threads: {e}", opts.jobs)))?;
        pool.install(|| values.par_iter().map(eval).collect())
    };
    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (i, (rec, err)) in results.into_iter().enumerate() {
        if let Some(e) = err {
            failures.push((i, e));
        }
        records.push(rec);
    }
    Ok(SweepOutcome { records, failures })
}
