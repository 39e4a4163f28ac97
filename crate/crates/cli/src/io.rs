//! Binary snapshots and CSV diagnostics.
//!
//! Snapshot layout: the magic line `HYDRO1\n`, one line of JSON metadata, then the grid values
//! as little-endian f64, component blocks `v1` then `v2`, each z-slowest, then y, then x.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use hydro_core::{BcVariant, Domain, DomainSpec, VelocityField};

pub const MAGIC: &[u8] = b"HYDRO1\n";
pub const LAYOUT: &str = "comp,z,y,x";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Os { path: PathBuf, source: std::io::Error },
    #[error("{0}: bad magic, not a snapshot")]
    Magic(PathBuf),
    #[error("{path}: bad metadata: {msg}")]
    Metadata { path: PathBuf, msg: String },
    #[error("{path}: truncated payload, expected {expected} bytes, found {found}")]
    Truncated { path: PathBuf, expected: usize, found: usize },
    #[error("{path}: {msg}")]
    Shape { path: PathBuf, msg: String },
    #[error("{path}: schema mismatch: {msg}")]
    Schema { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] hydro_core::Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

fn os(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Os { path: path.to_path_buf(), source }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub spec: DomainSpec,
    pub bc: BcVariant,
    pub time: f64,
    pub dt: f64,
    pub layout: String,
    pub endianness: String,
    pub scalar_width: usize,
}

impl SnapshotHeader {
    pub fn new(spec: DomainSpec, time: f64, dt: f64) -> Self {
        SnapshotHeader { spec, bc: spec.bc, time, dt, layout: LAYOUT.into(), endianness: "LE".into(), scalar_width: 8 }
    }

    /// Number of f64 values the payload must hold.
    pub fn values(&self) -> usize {
        2 * self.spec.nx * self.spec.ny * self.spec.nz
    }

    fn check(&self, path: &Path) -> IoResult<()> {
        let shape = |msg: String| IoError::Shape { path: path.to_path_buf(), msg };
        if self.bc != self.spec.bc {
            return Err(shape(format!("bc {} disagrees with domain spec {}", self.bc, self.spec.bc)));
        }
        if self.layout != LAYOUT || self.endianness != "LE" || self.scalar_width != 8 {
            return Err(shape(format!("unsupported layout {} / {} / width {}", self.layout, self.endianness, self.scalar_width)));
        }
        self.spec.validate().map_err(|e| shape(e.to_string()))
    }
}

/// Write atomically: the payload goes to a sibling temporary file that is renamed into place.
pub fn write_snapshot(path: &Path, header: &SnapshotHeader, values: &[f64]) -> IoResult<()> {
    header.check(path)?;
    if values.len() != header.values() {
        return Err(IoError::Shape { path: path.to_path_buf(), msg: format!("header needs {} values, got {}", header.values(), values.len()) });
    }
    let meta = serde_json::to_string(header).map_err(|e| IoError::Metadata { path: path.to_path_buf(), msg: e.to_string() })?;
    let mut buf = Vec::with_capacity(MAGIC.len() + meta.len() + 1 + 8 * values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(meta.as_bytes());
    buf.push(b'\n');
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, &buf).map_err(os(&tmp))?;
    fs::rename(&tmp, path).map_err(os(path))
}

pub fn read_snapshot(path: &Path) -> IoResult<(SnapshotHeader, Vec<f64>)> {
    let mut r = BufReader::new(File::open(path).map_err(os(path))?);
    let mut magic = [0u8; 7];
    r.read_exact(&mut magic).map_err(|_| IoError::Magic(path.to_path_buf()))?;
    if magic != MAGIC {
        return Err(IoError::Magic(path.to_path_buf()));
    }
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line).map_err(os(path))?;
    if line.pop() != Some(b'\n') {
        return Err(IoError::Metadata { path: path.to_path_buf(), msg: "unterminated metadata line".into() });
    }
    let header: SnapshotHeader =
        serde_json::from_slice(&line).map_err(|e| IoError::Metadata { path: path.to_path_buf(), msg: e.to_string() })?;
    header.check(path)?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload).map_err(os(path))?;
    let expected = 8 * header.values();
    if payload.len() < expected {
        return Err(IoError::Truncated { path: path.to_path_buf(), expected, found: payload.len() });
    }
    if payload.len() > expected {
        return Err(IoError::Shape { path: path.to_path_buf(), msg: format!("{} trailing bytes after payload", payload.len() - expected) });
    }
    let values = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
    Ok((header, values))
}

pub fn write_field(path: &Path, v: &VelocityField, time: f64, dt: f64) -> IoResult<()> {
    write_snapshot(path, &SnapshotHeader::new(*v.domain().spec(), time, dt), &v.to_grid())
}

pub fn read_field(path: &Path) -> IoResult<(SnapshotHeader, VelocityField)> {
    let (h, values) = read_snapshot(path)?;
    let d = Domain::new(h.spec)?;
    let v = VelocityField::from_grid(&d, &values)?;
    Ok((h, v))
}

/// Shortest representation that parses back to the same f64.
pub fn format_value(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// One CSV record, quoted where needed, with a trailing newline.
pub fn csv_record<S: AsRef<[u8]>>(fields: impl IntoIterator<Item = S>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(fields).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("fields are utf-8")
}

/// Header plus rows as CSV text.
pub fn csv_table<S: AsRef<[u8]>>(header: &[S], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = csv_record(header);
    for r in rows {
        s.push_str(&csv_record(&r));
    }
    s
}

fn read_header(path: &Path) -> IoResult<Option<Vec<String>>> {
    let f = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(os(path)(e)),
    };
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(f);
    match r.records().next() {
        None => Ok(None),
        Some(rec) => {
            let rec = rec.map_err(|e| IoError::Schema { path: path.to_path_buf(), msg: e.to_string() })?;
            Ok(Some(rec.iter().map(str::to_string).collect()))
        }
    }
}

/// Append one row, creating the file with `columns` as header on first write.
///
/// An existing file must carry exactly the same header. Each row is written with a single call.
pub fn append_diag(path: &Path, columns: &[String], row: &[f64]) -> IoResult<()> {
    let schema = |msg: String| IoError::Schema { path: path.to_path_buf(), msg };
    if row.len() != columns.len() {
        return Err(schema(format!("row has {} values for {} columns", row.len(), columns.len())));
    }
    let mut text = String::new();
    match read_header(path)? {
        None => text.push_str(&csv_record(columns)),
        Some(existing) if existing == columns => {}
        Some(existing) => {
            return Err(schema(format!("file has {} columns ({}), row has {}", existing.len(), existing.join(" "), columns.len())));
        }
    }
    text.push_str(&csv_record(row.iter().map(|x| format_value(*x))));
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(os(path))?;
    f.write_all(text.as_bytes()).map_err(os(path))
}

/// Header and numeric rows of a diagnostics file.
pub fn read_diag(path: &Path) -> IoResult<(Vec<String>, Vec<Vec<f64>>)> {
    let schema = |msg: String| IoError::Schema { path: path.to_path_buf(), msg };
    let mut r = csv::Reader::from_path(path).map_err(|e| schema(e.to_string()))?;
    let columns: Vec<String> = r.headers().map_err(|e| schema(e.to_string()))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| schema(format!("row {}: {e}", i + 1)))?;
        let row = rec
            .iter()
            .map(|x| x.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| schema(format!("row {}: {e}", i + 1)))?;
        rows.push(row);
    }
    Ok((columns, rows))
}
