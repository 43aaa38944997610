//! On-disk formats.
//!
//! HWF1 layout: the magic `HWF1`, then for each of the p, q, t axes a
//! little-endian `u32` sample count followed by an `f64` half extent, then
//! every value as two little-endian `f64` (re, im), row-major with t fastest.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::GridSpec;
use crate::wavelet::Moment;

pub const HWF1_MAGIC: &[u8; 4] = b"HWF1";

pub fn write_hwf1<W: Write>(field: &SampledField, mut w: W) -> Result<()> {
    w.write_all(HWF1_MAGIC)?;
    let g = field.grid();
    for (n, e) in g.samples().iter().zip(g.half_extents()) {
        let n = u32::try_from(*n).map_err(|_| Error::Format(format!("axis too long: {n}")))?;
        w.write_all(&n.to_le_bytes())?;
        w.write_all(&e.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(16 * field.values().len());
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

pub fn encode_hwf1(field: &SampledField) -> Vec<u8> {
    let mut out = Vec::new();
    write_hwf1(field, &mut out).expect("writing to a Vec cannot fail");
    out
}

pub fn read_hwf1<R: Read>(mut r: R) -> Result<SampledField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| Error::Format("truncated header".into()))?;
    if &magic != HWF1_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let mut samples = [0usize; 3];
    let mut extents = [0f64; 3];
    for k in 0..3 {
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4).map_err(|_| Error::Format("truncated header".into()))?;
        r.read_exact(&mut b8).map_err(|_| Error::Format("truncated header".into()))?;
        samples[k] = u32::from_le_bytes(b4) as usize;
        extents[k] = f64::from_le_bytes(b8);
    }
    let grid = GridSpec::new(samples, extents).map_err(|e| Error::Format(e.to_string()))?;
    let n = grid.len();
    let mut raw = Vec::new();
    r.read_to_end(&mut raw)?;
    if raw.len() != 16 * n {
        return Err(Error::Format(format!("expected {} payload bytes, found {}", 16 * n, raw.len())));
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().unwrap());
    let values = raw.chunks_exact(16).map(|c| Complex64::new(f(&c[..8]), f(&c[8..]))).collect();
    SampledField::from_values(grid, values)
}

pub fn decode_hwf1(bytes: &[u8]) -> Result<SampledField> {
    read_hwf1(bytes)
}

pub fn write_csv<W: Write>(field: &SampledField, mut w: W) -> Result<()> {
    let g = field.grid();
    writeln!(w, "p,q,t,re,im")?;
    for (i, v) in field.values().iter().enumerate() {
        let x = g.point_at(i);
        writeln!(w, "{:e},{:e},{:e},{:e},{:e}", x.p, x.q, x.t, v.re, v.im)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_moments_csv<W: Write>(moments: &[Moment], mut w: W) -> Result<()> {
    writeln!(w, "monomial,value")?;
    for m in moments {
        writeln!(w, "{},{:e}", m.monomial, m.value.re)?;
    }
    w.flush()?;
    Ok(())
}
