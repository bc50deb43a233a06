//! Grid function containers.
//!
//! Binary layout (all integers and reals little-endian):
//! `b"TWGRID01"` magic, `u64` dims, `u64` resolution, then `resolution^dims`
//! `f64` samples in row-major order (axis 0 slowest).
//!
//! CSV layout: header `x1,...,xd,value`, then one line per node.

use std::io::{Read, Write};

use super::GridFunction;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const BINARY_MAGIC: &[u8; 8] = b"TWGRID01";

pub fn write_binary<T: Real, W: Write>(f: &GridFunction<T>, mut w: W) -> Result<()> {
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(f.dims() as u64).to_le_bytes())?;
    w.write_all(&(f.resolution() as u64).to_le_bytes())?;
    for &v in f.values() {
        w.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<T: Real, R: Read>(mut r: R) -> Result<GridFunction<T>> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let dims = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let resolution = u64::from_le_bytes(word) as usize;
    super::check_shape(dims, resolution)?;
    let len = resolution
        .checked_pow(dims as u32)
        .ok_or_else(|| Error::Format("sample count overflows".into()))?;
    let mut values = Vec::with_capacity(len);
    for _ in 0..len {
        r.read_exact(&mut word)?;
        values.push(T::lit(f64::from_le_bytes(word)));
    }
    GridFunction::new(dims, resolution, values)
}

/// One row per node: coordinates `x1..xd`, then the sample. Row-major order.
pub fn write_csv<T: Real, W: Write>(f: &GridFunction<T>, mut w: W) -> Result<()> {
    for a in 1..=f.dims() {
        write!(w, "x{a},")?;
    }
    writeln!(w, "value")?;
    for flat in 0..f.len() {
        for x in f.point(flat) {
            write!(w, "{},", x.to_f64_lossy())?;
        }
        writeln!(w, "{}", f.values()[flat].to_f64_lossy())?;
    }
    Ok(())
}
