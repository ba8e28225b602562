//! `XYZ1` dataset files.
//!
//! Layout, all integers little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `XYZ1` |
//! | 4     | flags: `1` binary, `0` real |
//! | 8     | `n` |
//! | 8     | `p` |
//! | rest  | binary: `p` columns of `ceil(n/64)` `u64` words, bit `i % 64` of word `i / 64` is row `i` (`1` ↔ `+1`, padding zero); real: `n p` `f64` column-major |

use std::fs;
use std::io::Write;
use std::path::Path;

use xyz_core::{PackedMatrix, RealMatrix};

use crate::error::{CliError, CliResult};

pub const MAGIC: &[u8; 4] = b"XYZ1";
const HEADER_LEN: usize = 24;
const FLAG_BINARY: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Dataset {
    Binary(PackedMatrix),
    Real(RealMatrix),
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        match self {
            Dataset::Binary(x) => x.n_rows(),
            Dataset::Real(x) => x.n_rows(),
        }
    }

    pub fn n_cols(&self) -> usize {
        match self {
            Dataset::Binary(x) => x.n_cols(),
            Dataset::Real(x) => x.n_cols(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Dataset::Binary(_) => "binary",
            Dataset::Real(_) => "real",
        }
    }

    pub fn to_real(&self) -> RealMatrix {
        match self {
            Dataset::Binary(x) => x.to_real(),
            Dataset::Real(x) => x.clone(),
        }
    }

    pub fn column_values(&self, j: usize) -> Vec<f64> {
        match self {
            Dataset::Binary(x) => (0..x.n_rows()).map(|i| f64::from(x.get(i, j))).collect(),
            Dataset::Real(x) => x.column(j).to_vec(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let (flags, n, p) = match self {
            Dataset::Binary(x) => (FLAG_BINARY, x.n_rows(), x.n_cols()),
            Dataset::Real(x) => (0, x.n_rows(), x.n_cols()),
        };
        let mut out = Vec::with_capacity(HEADER_LEN);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&flags.to_le_bytes());
        out.extend_from_slice(&(n as u64).to_le_bytes());
        out.extend_from_slice(&(p as u64).to_le_bytes());
        match self {
            Dataset::Binary(x) => x.words().iter().for_each(|w| out.extend_from_slice(&w.to_le_bytes())),
            Dataset::Real(x) => x.as_slice().iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> CliResult<Self> {
        if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
            return Err(CliError::Data("not an XYZ1 dataset file".into()));
        }
        let u64_at = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
        let flags = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        let n = usize::try_from(u64_at(8)).map_err(|_| CliError::Data("row count too large".into()))?;
        let p = usize::try_from(u64_at(16)).map_err(|_| CliError::Data("column count too large".into()))?;
        let payload = &bytes[HEADER_LEN..];
        let words = match flags {
            FLAG_BINARY => n.div_ceil(64).checked_mul(p),
            0 => n.checked_mul(p),
            other => return Err(CliError::Data(format!("unknown dataset flags {other:#x}"))),
        }
        .ok_or_else(|| CliError::Data("dimensions overflow".into()))?;
        if Some(payload.len()) != words.checked_mul(8) {
            return Err(CliError::Data(format!(
                "payload is {} bytes, header {n} x {p} requires {}",
                payload.len(),
                words.saturating_mul(8)
            )));
        }
        let chunks = payload.chunks_exact(8).map(|c| c.try_into().expect("8 bytes"));
        Ok(if flags == FLAG_BINARY {
            Dataset::Binary(PackedMatrix::from_words(n, p, chunks.map(u64::from_le_bytes).collect())?)
        } else {
            Dataset::Real(RealMatrix::from_col_major(n, p, chunks.map(f64::from_le_bytes).collect())?)
        })
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| CliError::io(path, e))
    }
}

pub fn is_dataset_file(path: &Path) -> CliResult<bool> {
    use std::io::Read;
    let mut f = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut head = [0u8; 4];
    Ok(f.read(&mut head).map_err(|e| CliError::io(path, e))? == 4 && &head == MAGIC)
}
