//! Binary sample dumps: the 4-byte magic `PSLM`, a little-endian `u32`
//! version, a `u64` point count, then `(re, im)` pairs of `f64`.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::MeasureError;

pub const PSLM_MAGIC: &[u8; 4] = b"PSLM";
pub const PSLM_VERSION: u32 = 1;

pub fn write_samples<W: Write>(mut out: W, points: &[Complex64]) -> Result<(), MeasureError> {
    let mut buf = Vec::with_capacity(16 + 16 * points.len());
    buf.extend_from_slice(PSLM_MAGIC);
    buf.extend_from_slice(&PSLM_VERSION.to_le_bytes());
    buf.extend_from_slice(&(points.len() as u64).to_le_bytes());
    for p in points {
        buf.extend_from_slice(&p.re.to_le_bytes());
        buf.extend_from_slice(&p.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_samples<R: Read>(mut input: R) -> Result<Vec<Complex64>, MeasureError> {
    let mut header = [0u8; 16];
    input
        .read_exact(&mut header)
        .map_err(|_| MeasureError::Format("truncated header".into()))?;
    if &header[..4] != PSLM_MAGIC {
        return Err(MeasureError::Format("missing PSLM magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != PSLM_VERSION {
        return Err(MeasureError::Format(format!("unsupported version {version}")));
    }
    let count = u64::from_le_bytes(header[8..16].try_into().unwrap());
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() as u64 != count.saturating_mul(16) {
        return Err(MeasureError::Format(format!(
            "header promises {count} points but the body holds {} bytes",
            body.len()
        )));
    }
    Ok(body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect())
}
