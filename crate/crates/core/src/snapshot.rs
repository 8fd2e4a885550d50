//! "LPF1" binary snapshots of vector fields.
//!
//! Layout (all little-endian): a 64-byte header
//!
//! | offset | size | field                                             |
//! |--------|------|---------------------------------------------------|
//! | 0      | 4    | magic `LPF1`                                      |
//! | 4      | 4    | version (u32, currently 1)                        |
//! | 8      | 4    | n (u32)                                           |
//! | 12     | 4    | component count (u32)                             |
//! | 16     | 8    | box length (f64)                                  |
//! | 24     | 8    | flags (u64): bit 0 real, bit 1 mean-zero, bit 2 div-free |
//! | 32     | 32   | reserved, zero                                    |
//!
//! followed by each component's `n^3` coefficients as interleaved `(re, im)`
//! f64 pairs in storage order (last axis fastest, FFT frequency order).

use std::fs;
use std::io::Write;
use std::path::Path;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{SpectralField, VectorField};
use crate::grid::TorusGrid;

pub const MAGIC: &[u8; 4] = b"LPF1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

pub const FLAG_REAL: u64 = 1;
pub const FLAG_MEAN_ZERO: u64 = 1 << 1;
pub const FLAG_DIV_FREE: u64 = 1 << 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotHeader {
    pub version: u32,
    pub n: u32,
    pub components: u32,
    pub box_length: f64,
    pub flags: u64,
}

impl SnapshotHeader {
    pub fn payload_len(&self) -> usize {
        let n = self.n as usize;
        self.components as usize * n * n * n * 16
    }

    fn encode(&self) -> [u8; HEADER_LEN] {
        let mut buf = [0u8; HEADER_LEN];
        buf[0..4].copy_from_slice(MAGIC);
        buf[4..8].copy_from_slice(&self.version.to_le_bytes());
        buf[8..12].copy_from_slice(&self.n.to_le_bytes());
        buf[12..16].copy_from_slice(&self.components.to_le_bytes());
        buf[16..24].copy_from_slice(&self.box_length.to_le_bytes());
        buf[24..32].copy_from_slice(&self.flags.to_le_bytes());
        buf
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format(format!(
                "truncated header: {} of {HEADER_LEN} bytes",
                bytes.len()
            )));
        }
        if &bytes[0..4] != MAGIC {
            return Err(Error::Format(format!("bad magic {:?}", &bytes[0..4])));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let version = u32_at(4);
        if version != VERSION {
            return Err(Error::Format(format!("unknown version {version}")));
        }
        Ok(Self {
            version,
            n: u32_at(8),
            components: u32_at(12),
            box_length: f64::from_le_bytes(bytes[16..24].try_into().unwrap()),
            flags: u64::from_le_bytes(bytes[24..32].try_into().unwrap()),
        })
    }
}

pub fn encode(u: &VectorField) -> Vec<u8> {
    let grid = u.grid();
    let mut flags = 0;
    if u.is_real() {
        flags |= FLAG_REAL;
    }
    if u.is_mean_zero() {
        flags |= FLAG_MEAN_ZERO;
    }
    if u.is_div_free() {
        flags |= FLAG_DIV_FREE;
    }
    let header = SnapshotHeader {
        version: VERSION,
        n: grid.n() as u32,
        components: 3,
        box_length: grid.box_length(),
        flags,
    };
    let mut out = Vec::with_capacity(HEADER_LEN + header.payload_len());
    out.extend_from_slice(&header.encode());
    for comp in u.comps() {
        for c in comp.coeffs() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<VectorField> {
    let header = SnapshotHeader::decode(bytes)?;
    if header.components != 3 {
        return Err(Error::Format(format!(
            "expected 3 components, found {}",
            header.components
        )));
    }
    let grid = TorusGrid::new(header.n as usize, header.box_length)
        .map_err(|e| Error::Format(format!("bad grid in header: {e}")))?;
    let expected = HEADER_LEN + header.payload_len();
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "payload length mismatch: file has {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let real = header.flags & FLAG_REAL != 0;
    let mean_zero = header.flags & FLAG_MEAN_ZERO != 0;
    let per = grid.len();
    let mut comps = Vec::with_capacity(3);
    for k in 0..3 {
        let base = HEADER_LEN + k * per * 16;
        let coeffs: Vec<Complex64> = (0..per)
            .map(|i| {
                let o = base + i * 16;
                let re = f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
                let im = f64::from_le_bytes(bytes[o + 8..o + 16].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        comps.push(SpectralField::from_parts(grid, coeffs, real, mean_zero));
    }
    let comps: [SpectralField; 3] = comps.try_into().expect("three components");
    let field = VectorField::new(comps)?;
    Ok(field.with_certificate(header.flags & FLAG_DIV_FREE != 0))
}

/// Write atomically via a sibling temporary file.
pub fn snapshot_write(u: &VectorField, path: &Path) -> Result<()> {
    let tmp = path.with_extension("lpf1.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&encode(u))?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn snapshot_read(path: &Path) -> Result<VectorField> {
    decode(&fs::read(path)?)
}

pub fn read_header(path: &Path) -> Result<SnapshotHeader> {
    let bytes = fs::read(path)?;
    SnapshotHeader::decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrong_magic_is_rejected() {
        let g = TorusGrid::periodic(8).unwrap();
        let mut bytes = encode(&VectorField::zeros(g));
        bytes[0] = b'X';
        assert!(matches!(decode(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let g = TorusGrid::periodic(8).unwrap();
        let bytes = encode(&VectorField::zeros(g));
        assert!(matches!(
            decode(&bytes[..bytes.len() - 1]),
            Err(Error::Format(_))
        ));
        assert!(matches!(decode(&bytes[..10]), Err(Error::Format(_))));
    }

    #[test]
    fn unknown_version_is_rejected() {
        let g = TorusGrid::periodic(8).unwrap();
        let mut bytes = encode(&VectorField::zeros(g));
        bytes[4] = 9;
        assert!(matches!(decode(&bytes), Err(Error::Format(_))));
    }
}
