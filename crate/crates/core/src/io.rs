//! Field serialization.
//!
//! OFTF layout (all little-endian):
//!
//! ```text
//! b"OFTF" | version: u32 = 1 | dim: u32
//! per axis: n: u64, lower: f64, upper: f64
//! values: (re: f64, im: f64) * prod(n), in linear_index order
//! ```

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{arg_err, OftError, Result};
use crate::grid::{ComplexField, Grid};

pub const OFTF_MAGIC: &[u8; 4] = b"OFTF";
pub const OFTF_VERSION: u32 = 1;

pub fn write_oftf<W: Write>(field: &ComplexField, mut w: W) -> Result<()> {
    let grid = field.grid();
    w.write_all(OFTF_MAGIC)?;
    w.write_all(&OFTF_VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for d in 0..grid.dim() {
        w.write_all(&(grid.n(d) as u64).to_le_bytes())?;
        w.write_all(&grid.lower(d).to_le_bytes())?;
        w.write_all(&grid.upper(d).to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(field.values().len() * 16);
    for z in field.values() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

struct Cursor<R> {
    inner: R,
    offset: usize,
}

impl<R: Read> Cursor<R> {
    fn take<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner.read_exact(&mut b).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => OftError::Parse {
                offset: self.offset,
                message: format!("truncated file while reading {what}"),
            },
            _ => OftError::Io(e),
        })?;
        self.offset += N;
        Ok(b)
    }
}

pub fn read_oftf<R: Read>(r: R) -> Result<ComplexField> {
    let mut cur = Cursor { inner: r, offset: 0 };
    let magic = cur.take::<4>("magic")?;
    if &magic != OFTF_MAGIC {
        return Err(OftError::Parse {
            offset: 0,
            message: "bad magic, expected OFTF".into(),
        });
    }
    let version = u32::from_le_bytes(cur.take::<4>("version")?);
    if version != OFTF_VERSION {
        return Err(OftError::Parse {
            offset: 4,
            message: format!("unsupported version {version}"),
        });
    }
    let dim = u32::from_le_bytes(cur.take::<4>("dim")?) as usize;
    if !(1..=3).contains(&dim) {
        return Err(OftError::Parse {
            offset: 8,
            message: format!("dimension {dim} not in 1..=3"),
        });
    }
    let mut n = Vec::with_capacity(dim);
    let mut lower = Vec::with_capacity(dim);
    let mut upper = Vec::with_capacity(dim);
    for _ in 0..dim {
        let at = cur.offset;
        let count = u64::from_le_bytes(cur.take::<8>("axis extent")?);
        n.push(usize::try_from(count).map_err(|_| OftError::Parse {
            offset: at,
            message: "axis extent does not fit in memory".into(),
        })?);
        lower.push(f64::from_le_bytes(cur.take::<8>("axis lower bound")?));
        upper.push(f64::from_le_bytes(cur.take::<8>("axis upper bound")?));
    }
    let header_end = cur.offset;
    let grid = Grid::new(&lower, &upper, &n).map_err(|e| OftError::Parse {
        offset: header_end,
        message: format!("invalid grid header: {e}"),
    })?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(cur.take::<8>("values")?);
        let im = f64::from_le_bytes(cur.take::<8>("values")?);
        values.push(Complex64::new(re, im));
    }
    ComplexField::from_values(&grid, values)
}

/// CSV with columns `x[,y],re,im` for 1D and 2D fields.
pub fn write_csv<W: Write>(field: &ComplexField, mut w: W) -> Result<()> {
    let grid = field.grid();
    match grid.dim() {
        1 => writeln!(w, "x,re,im")?,
        2 => writeln!(w, "x,y,re,im")?,
        d => {
            return arg_err(format!(
                "CSV export supports 1D/2D fields, got {d}D (take a slice first)"
            ))
        }
    }
    for (idx, z) in field.values().iter().enumerate() {
        let p = grid.point(idx);
        if grid.dim() == 1 {
            writeln!(w, "{},{},{}", p[0], z.re, z.im)?;
        } else {
            writeln!(w, "{},{},{},{}", p[0], p[1], z.re, z.im)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Extracts the 2D plane `x3 = coord(k)` of a 3D field.
pub fn slice_axis3(field: &ComplexField, k: usize) -> Result<ComplexField> {
    let grid = field.grid();
    if grid.dim() != 3 {
        return arg_err("slice_axis3 needs a 3D field");
    }
    if k >= grid.n(2) {
        return Err(OftError::Range {
            axis: 2,
            index: k,
            extent: grid.n(2),
        });
    }
    let plane = Grid::new(
        &[grid.lower(0), grid.lower(1)],
        &[grid.upper(0), grid.upper(1)],
        &[grid.n(0), grid.n(1)],
    )?;
    let len = plane.len();
    ComplexField::from_values(&plane, field.values()[k * len..(k + 1) * len].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ComplexField {
        let g = Grid::new(&[-1.0, 0.0], &[1.0, 0.5], &[4, 3]).unwrap();
        ComplexField::from_fn(&g, |x| Complex64::new(x[0].sin(), x[1].exp() * 1e-300))
    }

    #[test]
    fn oftf_round_trip_is_bit_exact() {
        let f = sample();
        let mut buf = Vec::new();
        write_oftf(&f, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"OFTF");
        assert_eq!(buf.len(), 12 + 2 * 24 + 12 * 16);
        let g = read_oftf(buf.as_slice()).unwrap();
        assert_eq!(f.grid(), g.grid());
        for (a, b) in f.values().iter().zip(g.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn oftf_header_layout() {
        let g = Grid::new(&[0.0], &[2.0], &[3]).unwrap();
        let f = ComplexField::from_values(&g, vec![Complex64::new(1.0, -1.0); 3]).unwrap();
        let mut buf = Vec::new();
        write_oftf(&f, &mut buf).unwrap();
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(buf[12..20].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(buf[28..36].try_into().unwrap()), 2.0);
        assert_eq!(f64::from_le_bytes(buf[36..44].try_into().unwrap()), 1.0);
        assert_eq!(f64::from_le_bytes(buf[44..52].try_into().unwrap()), -1.0);
    }

    #[test]
    fn oftf_truncation_reports_offset() {
        let mut buf = Vec::new();
        write_oftf(&sample(), &mut buf).unwrap();
        buf.truncate(70);
        match read_oftf(buf.as_slice()) {
            Err(OftError::Parse { offset, .. }) => assert!(offset <= 70),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            read_oftf(&b"NOPE"[..]),
            Err(OftError::Parse { offset: 0, .. })
        ));
    }

    #[test]
    fn csv_columns() {
        let mut out = Vec::new();
        write_csv(&sample(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,re,im"));
        assert_eq!(lines.count(), 12);
    }

    #[test]
    fn slice_of_3d_field() {
        let g = Grid::new(&[0.0; 3], &[1.0; 3], &[3, 4, 5]).unwrap();
        let f = ComplexField::from_fn(&g, |x| Complex64::new(x[2], 0.0));
        let s = slice_axis3(&f, 4).unwrap();
        assert_eq!(s.grid().shape(), &[3, 4]);
        assert!(s.values().iter().all(|z| z.re == 1.0));
        assert!(write_csv(&f, Vec::new()).is_err());
    }
}
