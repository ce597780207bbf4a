use std::fs::File;
use std::path::Path;

use super::SweepRecord;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

const HEADER: [&str; 9] =
    ["schema_version", "param_name", "param_value", "fidelity", "t_op_us", "trace_err", "min_eig", "wall_ms", "config_hash"];

fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn parse(s: &str, path: &Path) -> Result<f64> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse().map_err(|_| Error::Config(format!("{}: cannot parse number '{s}'", path.display()))),
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

/// Writes the records with a header row; numbers carry 17 significant digits.
pub fn write_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(HEADER).map_err(csv_err(path))?;
    for r in records {
        w.write_record([
            r.schema_version.to_string(),
            r.param_name.clone(),
            fmt(r.param_value),
            fmt(r.fidelity),
            fmt(r.t_op_us),
            fmt(r.trace_err),
            fmt(r.min_eig),
            fmt(r.wall_ms),
            r.config_hash.clone(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let file = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut rdr = csv::Reader::from_reader(file);
    let header = rdr.headers().map_err(csv_err(path))?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Config(format!("{}: unexpected CSV header", path.display())));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err(path))?;
        let field = |i: usize| row.get(i).unwrap_or_default();
        out.push(SweepRecord {
            schema_version: field(0)
                .parse()
                .map_err(|_| Error::Config(format!("{}: bad schema version", path.display())))?,
            param_name: field(1).to_string(),
            param_value: parse(field(2), path)?,
            fidelity: parse(field(3), path)?,
            t_op_us: parse(field(4), path)?,
            trace_err: parse(field(5), path)?,
            min_eig: parse(field(6), path)?,
            wall_ms: parse(field(7), path)?,
            config_hash: field(8).to_string(),
        });
    }
    Ok(out)
}
