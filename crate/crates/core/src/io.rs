//! HHF1 binary field files.
//!
//! Little-endian layout:
//!
//! ```text
//! "HHF1" | u32 version=1 | u32 n | u32 kindCode | u32 componentCount
//!        | u64 shape[n] | f64 lengths[n]
//!        | f64 payload[componentCount * Π shape]   (component-major, last axis fastest)
//! ```
//!
//! Kind codes: 0 scalar, 1 paravector, 2 vector(n+1), 3 quaternion. A JSON
//! sidecar with the same stem carries provenance.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{FieldKind, GridSpec, SampledField};

pub const MAGIC: &[u8; 4] = b"HHF1";
pub const VERSION: u32 = 1;

pub fn encode_field(field: &SampledField) -> Result<Vec<u8>> {
    let spec = field.spec();
    let code = field.kind().code().ok_or_else(|| {
        Error::Unsupported(format!("{} fields have no HHF1 kind code", field.kind()))
    })?;
    let mut out = Vec::with_capacity(20 + 16 * spec.n + 8 * field.component_count() * spec.total());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(spec.n as u32).to_le_bytes());
    out.extend_from_slice(&code.to_le_bytes());
    out.extend_from_slice(&(field.component_count() as u32).to_le_bytes());
    for &s in &spec.shape {
        out.extend_from_slice(&(s as u64).to_le_bytes());
    }
    for &l in &spec.lengths {
        out.extend_from_slice(&l.to_le_bytes());
    }
    for c in field.components() {
        for v in c {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::MalformedHeader("truncated header".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode_field(bytes: &[u8]) -> Result<SampledField> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.take(4)?;
    if magic != MAGIC {
        return Err(Error::MalformedHeader(format!("bad magic {magic:?}")));
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let n = cur.u32()? as usize;
    if n == 0 || n > 16 {
        return Err(Error::MalformedHeader(format!("implausible dimension {n}")));
    }
    let code = cur.u32()?;
    let kind = FieldKind::from_code(code)
        .ok_or_else(|| Error::MalformedHeader(format!("unknown kind code {code}")))?;
    let count = cur.u32()? as usize;
    if count != kind.component_count(n) {
        return Err(Error::MalformedHeader(format!(
            "{kind} field in dimension {n} cannot have {count} components"
        )));
    }
    let mut shape = Vec::with_capacity(n);
    for _ in 0..n {
        let s = cur.u64()?;
        shape.push(usize::try_from(s).map_err(|_| Error::ShapeOverflow)?);
    }
    let mut lengths = Vec::with_capacity(n);
    for _ in 0..n {
        lengths.push(cur.f64()?);
    }
    let total = shape
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .ok_or(Error::ShapeOverflow)?;
    let expected = total
        .checked_mul(count)
        .and_then(|v| v.checked_mul(8))
        .ok_or(Error::ShapeOverflow)?;
    let payload = &bytes[cur.pos..];
    if payload.len() != expected {
        return Err(Error::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    let spec = GridSpec::new(shape, lengths).map_err(|e| Error::MalformedHeader(e.to_string()))?;
    let components = payload
        .chunks_exact(8 * total)
        .map(|chunk| {
            chunk
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                .collect()
        })
        .collect();
    SampledField::new(spec, kind, components)
}

pub fn write_field(field: &SampledField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_field(field)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_field(path: impl AsRef<Path>) -> Result<SampledField> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_field(&bytes)
}

/// Path of the JSON sidecar for a field file.
pub fn sidecar_path(path: impl AsRef<Path>) -> PathBuf {
    path.as_ref().with_extension("json")
}

pub fn write_sidecar<T: Serialize>(field_path: impl AsRef<Path>, provenance: &T) -> Result<()> {
    write_json(sidecar_path(field_path), provenance)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
