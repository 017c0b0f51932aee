//! Binary coefficient container and its JSON mirror.
//!
//! Layout: the 8-byte magic, five little-endian `u32` header words
//! `(N_t, N_x, N_z, components, real)`, then `(re, im)` pairs of `f64` in
//! `(k, xi1, xi2, node, component)` order. Plate fields are written with
//! `N_z = 0`, i.e. a single node. Periods are not stored.

use ndarray::{Array3, Array5};
use num_complex::Complex64;
use std::io::{Read, Write};

use super::field::{FieldRecord, PlateField, SpectralField};
use super::grid::TorusGrid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"PLFSPEC1";

struct Header {
    n_t: usize,
    n_x: usize,
    n_z: usize,
    components: usize,
    real: bool,
}

fn write_header<W: Write>(w: &mut W, h: &Header) -> Result<()> {
    w.write_all(MAGIC)?;
    for v in [h.n_t, h.n_x, h.n_z, h.components, h.real as usize] {
        let v = u32::try_from(v).map_err(|_| Error::Format("header value exceeds u32".into()))?;
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_header<R: Read>(r: &mut R) -> Result<Header> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, not a PLFSPEC1 container".into()));
    }
    let mut words = [0usize; 5];
    for w in words.iter_mut() {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)?;
        *w = u32::from_le_bytes(b) as usize;
    }
    if words[4] > 1 {
        return Err(Error::Format(format!("real flag must be 0 or 1, got {}", words[4])));
    }
    Ok(Header { n_t: words[0], n_x: words[1], n_z: words[2], components: words[3], real: words[4] == 1 })
}

fn write_values<'a, W: Write, I: Iterator<Item = &'a Complex64>>(w: &mut W, it: I) -> Result<()> {
    for v in it {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_values<R: Read>(r: &mut R, count: usize) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(count);
    let mut b = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut b)?;
        let re = f64::from_le_bytes(b);
        r.read_exact(&mut b)?;
        out.push(Complex64::new(re, f64::from_le_bytes(b)));
    }
    Ok(out)
}

pub fn write_field<W: Write>(w: &mut W, field: &SpectralField) -> Result<()> {
    let g = field.grid();
    let h = Header { n_t: g.n_t(), n_x: g.n_x(), n_z: g.n_z(), components: field.components(), real: field.is_real() };
    write_header(w, &h)?;
    write_values(w, field.coeffs().iter())
}

/// Reads a slab field; the periods are supplied by the caller.
pub fn read_field<R: Read>(r: &mut R, period_t: f64, period_x: f64) -> Result<SpectralField> {
    let h = read_header(r)?;
    let grid = TorusGrid::new(period_t, period_x, h.n_t, h.n_x, h.n_z)?;
    let shape = (h.n_t, h.n_x, h.n_x, h.n_z + 1, h.components);
    let vals = read_values(r, h.n_t * h.n_x * h.n_x * (h.n_z + 1) * h.components)?;
    let coeffs = Array5::from_shape_vec(shape, vals).map_err(|e| Error::Format(e.to_string()))?;
    SpectralField::from_coeffs(&grid, coeffs, h.real)
}

pub fn write_plate<W: Write>(w: &mut W, field: &PlateField) -> Result<()> {
    let g = field.grid();
    write_header(w, &Header { n_t: g.n_t(), n_x: g.n_x(), n_z: 0, components: 1, real: field.is_real() })?;
    write_values(w, field.coeffs().iter())
}

/// Reads a plate field and attaches it to `grid`, whose mode counts must match.
pub fn read_plate<R: Read>(r: &mut R, grid: &TorusGrid) -> Result<PlateField> {
    let h = read_header(r)?;
    if h.n_z != 0 || h.components != 1 {
        return Err(Error::Format("container does not hold a plate field".into()));
    }
    if h.n_t != grid.n_t() || h.n_x != grid.n_x() {
        return Err(Error::Shape(format!("plate container is {}x{}, grid is {}x{}", h.n_t, h.n_x, grid.n_t(), grid.n_x())));
    }
    let vals = read_values(r, h.n_t * h.n_x * h.n_x)?;
    let coeffs = Array3::from_shape_vec((h.n_t, h.n_x, h.n_x), vals).map_err(|e| Error::Format(e.to_string()))?;
    PlateField::from_coeffs(grid, coeffs, h.real)
}

pub fn write_field_json(field: &SpectralField) -> Result<String> {
    let g = field.grid();
    let rec = FieldRecord {
        n_t: g.n_t(),
        n_x: g.n_x(),
        n_z: g.n_z(),
        components: field.components(),
        real: field.is_real(),
        period_t: g.period_t(),
        period_x: g.period_x(),
        coeffs: field.coeffs().iter().map(|v| [v.re, v.im]).collect(),
    };
    serde_json::to_string(&rec).map_err(|e| Error::Format(e.to_string()))
}

pub fn read_field_json(text: &str) -> Result<SpectralField> {
    let rec: FieldRecord = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let grid = TorusGrid::new(rec.period_t, rec.period_x, rec.n_t, rec.n_x, rec.n_z)?;
    let vals = rec.coeffs.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    let coeffs = Array5::from_shape_vec((rec.n_t, rec.n_x, rec.n_x, rec.n_z + 1, rec.components), vals)
        .map_err(|e| Error::Format(e.to_string()))?;
    SpectralField::from_coeffs(&grid, coeffs, rec.real)
}
