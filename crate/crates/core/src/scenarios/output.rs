use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::timestep::Snapshot;

/// Column order of the diagnostics CSV.
pub const CSV_HEADER: [&str; 20] = [
    "t",
    "mass",
    "min",
    "max",
    "l2_spec",
    "l2_phys",
    "hhalf_semi",
    "hhalf",
    "h1",
    "h2",
    "wiener_l1",
    "entropy",
    "entropy_shifted",
    "lyap1",
    "lyap2",
    "positivity",
    "res_entropy",
    "res_l2",
    "res_hhalf",
    "res_lyap2",
];

/// Shortest round-trip scientific form; `nan` marks undefined entries.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    fmt_f64(v.unwrap_or(f64::NAN))
}

pub fn record_row(r: &DiagnosticsRecord) -> Vec<String> {
    vec![
        fmt_f64(r.t),
        fmt_f64(r.mass),
        fmt_f64(r.min),
        fmt_f64(r.max),
        fmt_f64(r.l2_spec),
        fmt_f64(r.l2_phys),
        fmt_f64(r.hhalf_semi),
        fmt_f64(r.hhalf),
        fmt_f64(r.h1),
        fmt_f64(r.h2),
        fmt_f64(r.wiener_l1),
        opt(r.entropy),
        opt(r.entropy_shifted),
        opt(r.lyap1),
        opt(r.lyap2),
        fmt_f64(r.positivity),
        opt(r.residuals.entropy),
        opt(r.residuals.l2),
        opt(r.residuals.hhalf),
        opt(r.residuals.lyap2),
    ]
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub(crate) fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Config(format!("{}: {other:?}", path.display())),
    }
}

/// Writes rows under a header with the csv crate's default dialect.
pub fn write_csv<S: AsRef<str>>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|s| s.as_ref()))
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_records_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    write_csv(path, &CSV_HEADER, records.iter().map(record_row))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotSidecar {
    pub sizes: Vec<usize>,
    pub time: f64,
    pub step: usize,
    pub byte_order: &'static str,
    pub dtype: &'static str,
    pub layout: &'static str,
}

/// `snap_NNNNNN.f64` holding the samples as little-endian `f64` in
/// row-major order, plus a `.json` sidecar.
pub fn write_snapshot(dir: &Path, index: usize, snap: &Snapshot) -> Result<()> {
    let stem = format!("snap_{index:06}");
    let data = dir.join(format!("{stem}.f64"));
    let mut bytes = Vec::with_capacity(8 * snap.field.values().len());
    for v in snap.field.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(&data, bytes).map_err(|e| Error::io(&data, e))?;
    write_json(
        &dir.join(format!("{stem}.json")),
        &SnapshotSidecar {
            sizes: snap.field.grid().sizes().to_vec(),
            time: snap.time,
            step: snap.step,
            byte_order: "little",
            dtype: "f64",
            layout: "row-major, last axis fastest",
        },
    )
}

/// Reads a snapshot written by [`write_snapshot`].
pub fn read_snapshot(path: &Path) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Config(format!(
            "{}: length is not a multiple of 8",
            path.display()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_f64(1.5), "1.5e0");
        assert_eq!(fmt_f64(-2.5e-10), "-2.5e-10");
        assert_eq!(fmt_f64(f64::NAN), "nan");
        assert_eq!(fmt_f64(0.1 + 0.2).parse::<f64>().unwrap(), 0.1 + 0.2);
    }
}
