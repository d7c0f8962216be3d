//! Binary field container: one JSON header line followed by little-endian
//! interleaved `(re, im)` f64 pairs, sites row-major, components fastest.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub shape: Vec<usize>,
    pub component_count: usize,
    pub dtype: String,
    pub endianness: String,
    pub grid: GridSpec,
    pub tag: String,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

impl Header {
    pub fn new(grid: GridSpec, shape: Vec<usize>, component_count: usize, tag: &str) -> Self {
        Self {
            shape,
            component_count,
            dtype: "c128".into(),
            endianness: "little".into(),
            grid,
            tag: tag.into(),
            metadata: serde_json::Map::new(),
        }
    }

    pub fn value_count(&self) -> usize {
        self.shape.iter().product::<usize>() * self.component_count
    }
}

pub fn write(path: &Path, header: &Header, data: &[Complex64]) -> Result<()> {
    if data.len() != header.value_count() {
        return Err(Error::Format(format!(
            "payload has {} values, header declares {}",
            data.len(),
            header.value_count()
        )));
    }
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    let mut bytes = Vec::with_capacity(16 * data.len());
    for v in data {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        bytes.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

pub fn read(path: &Path) -> Result<(Header, Vec<Complex64>)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: Header = serde_json::from_str(line.trim_end())?;
    if header.dtype != "c128" || header.endianness != "little" {
        return Err(Error::Format(format!(
            "unsupported dtype {} / endianness {}",
            header.dtype, header.endianness
        )));
    }
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 16 * header.value_count() {
        return Err(Error::Format(format!(
            "payload has {} bytes, expected {}",
            bytes.len(),
            16 * header.value_count()
        )));
    }
    let data = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok((header, data))
}

/// Interleaves equally sized fields, components fastest.
pub fn interleave(fields: &[&ScalarField]) -> Vec<Complex64> {
    let sites = fields[0].data.len();
    let mut out = Vec::with_capacity(sites * fields.len());
    for s in 0..sites {
        for f in fields {
            out.push(f.data[s]);
        }
    }
    out
}

/// Inverse of [`interleave`].
pub fn deinterleave(grid: GridSpec, data: &[Complex64], count: usize) -> Result<Vec<ScalarField>> {
    if data.len() % count != 0 || data.len() / count != grid.sites() {
        return Err(Error::Format("payload does not match grid and component count".into()));
    }
    Ok((0..count)
        .map(|c| ScalarField {
            grid,
            data: data.iter().skip(c).step_by(count).copied().collect(),
        })
        .collect())
}

pub fn write_fields(path: &Path, tag: &str, fields: &[&ScalarField]) -> Result<()> {
    let grid = fields[0].grid;
    let header = Header::new(grid, vec![grid.n; 3], fields.len(), tag);
    write(path, &header, &interleave(fields))
}

pub fn read_fields(path: &Path, tag: &str) -> Result<(Header, Vec<ScalarField>)> {
    let (header, data) = read(path)?;
    if header.tag != tag {
        return Err(Error::Format(format!("expected tag {tag}, found {}", header.tag)));
    }
    let fields = deinterleave(header.grid, &data, header.component_count)?;
    Ok((header, fields))
}
