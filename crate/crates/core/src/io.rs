//! Binary matrix files.
//!
//! Layout, all little-endian:
//!
//! | bytes | field                                   |
//! |-------|-----------------------------------------|
//! | 0..4  | magic `CSMX`                            |
//! | 4..8  | format version (u32, currently 1)       |
//! | 8..12 | dtype tag (u32): 1 = f64, 2 = complex128 |
//! | 12..20| rows (u64)                              |
//! | 20..28| cols (u64)                              |
//! | 28..  | row-major payload; complex as (re, im)  |

use std::io::{Read, Write};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub const MAGIC: &[u8; 4] = b"CSMX";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum DType {
    F64 = 1,
    C128 = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Real(Array2<f64>),
    Complex(Array2<Complex64>),
}

fn io_err(e: std::io::Error) -> Error {
    Error::Backend(format!("i/o: {e}"))
}

fn header(w: &mut impl Write, dtype: DType, rows: usize, cols: usize) -> Result<()> {
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(dtype as u32).to_le_bytes()).map_err(io_err)?;
    w.write_all(&(rows as u64).to_le_bytes()).map_err(io_err)?;
    w.write_all(&(cols as u64).to_le_bytes()).map_err(io_err)
}

pub fn write_complex(w: &mut impl Write, m: &Array2<Complex64>) -> Result<()> {
    header(w, DType::C128, m.nrows(), m.ncols())?;
    let mut buf = Vec::with_capacity(16 * m.len());
    for z in m.iter() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err)
}

pub fn write_real(w: &mut impl Write, m: &Array2<f64>) -> Result<()> {
    header(w, DType::F64, m.nrows(), m.ncols())?;
    let mut buf = Vec::with_capacity(8 * m.len());
    for x in m.iter() {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err)
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("four bytes"))
}

fn u64_at(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().expect("eight bytes"))
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("eight bytes"))
}

pub fn read_matrix(r: &mut impl Read) -> Result<Matrix> {
    let mut h = [0u8; HEADER_LEN];
    r.read_exact(&mut h).map_err(io_err)?;
    if &h[0..4] != MAGIC {
        return Err(invalid("not a matrix file (bad magic)"));
    }
    let version = u32_at(&h, 4);
    if version != VERSION {
        return Err(Error::Unsupported(format!("matrix file version {version}")));
    }
    let rows = usize::try_from(u64_at(&h, 12)).map_err(|_| invalid("row count overflows"))?;
    let cols = usize::try_from(u64_at(&h, 20)).map_err(|_| invalid("column count overflows"))?;
    let n = rows
        .checked_mul(cols)
        .ok_or_else(|| invalid("matrix size overflows"))?;
    match u32_at(&h, 8) {
        1 => {
            let mut b = vec![0u8; 8 * n];
            r.read_exact(&mut b).map_err(io_err)?;
            let v: Vec<f64> = (0..n).map(|k| f64_at(&b, 8 * k)).collect();
            Ok(Matrix::Real(
                Array2::from_shape_vec((rows, cols), v).map_err(|e| invalid(e.to_string()))?,
            ))
        }
        2 => {
            let mut b = vec![0u8; 16 * n];
            r.read_exact(&mut b).map_err(io_err)?;
            let v: Vec<Complex64> = (0..n)
                .map(|k| Complex64::new(f64_at(&b, 16 * k), f64_at(&b, 16 * k + 8)))
                .collect();
            Ok(Matrix::Complex(
                Array2::from_shape_vec((rows, cols), v).map_err(|e| invalid(e.to_string()))?,
            ))
        }
        t => Err(Error::Unsupported(format!("dtype tag {t}"))),
    }
}
