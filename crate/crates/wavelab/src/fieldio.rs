//! Field serialization: a flat binary layout and a CSV layout for small grids.
//!
//! Binary layout: header of three little-endian 64-bit words — n (u64),
//! N (u64), L (f64 bits) — followed by N^n complex samples in row-major
//! order, each as two little-endian f64 (re, im). Values are converted
//! through f64 regardless of the in-memory scalar type.

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::real::Real;
use num_complex::Complex;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub fn write_binary<T: Real>(field: &Field<T>, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    let g = field.grid();
    w.write_all(&(g.dim() as u64).to_le_bytes())?;
    w.write_all(&(g.points() as u64).to_le_bytes())?;
    w.write_all(&g.length().to_f64().unwrap().to_le_bytes())?;
    for v in field.values() {
        w.write_all(&v.re.to_f64().unwrap().to_le_bytes())?;
        w.write_all(&v.im.to_f64().unwrap().to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<T: Real>(path: &Path) -> Result<Field<T>> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let n = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let npts = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let length = f64::from_le_bytes(word);
    let grid = GridSpec::new(n, npts, T::of(length))?;
    let mut values = Vec::with_capacity(grid.size());
    for _ in 0..grid.size() {
        r.read_exact(&mut word)?;
        let re = f64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let im = f64::from_le_bytes(word);
        values.push(Complex::new(T::of(re), T::of(im)));
    }
    Field::new(grid, values)
}

/// CSV layout: one sample per row with the grid coordinates first.
/// Header row gives n, N, L so the grid can be reconstructed.
pub fn write_csv<T: Real>(field: &Field<T>, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    let g = field.grid();
    writeln!(w, "# n={} N={} L={:.17e}", g.dim(), g.points(), g.length().to_f64().unwrap())?;
    if g.dim() == 2 {
        writeln!(w, "x0,x1,re,im")?;
    } else {
        writeln!(w, "x0,x1,x2,re,im")?;
    }
    for (i, v) in field.values().iter().enumerate() {
        let x = g.point(i);
        for a in 0..g.dim() {
            write!(w, "{:.17e},", x[a].to_f64().unwrap())?;
        }
        writeln!(w, "{:.17e},{:.17e}", v.re.to_f64().unwrap(), v.im.to_f64().unwrap())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: Real>(path: &Path) -> Result<Field<T>> {
    let r = BufReader::new(std::fs::File::open(path)?);
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty CSV field file".into()))??;
    let mut n = None;
    let mut npts = None;
    let mut length = None;
    for tok in header.trim_start_matches('#').split_whitespace() {
        if let Some((k, v)) = tok.split_once('=') {
            match k {
                "n" => n = v.parse::<usize>().ok(),
                "N" => npts = v.parse::<usize>().ok(),
                "L" => length = v.parse::<f64>().ok(),
                _ => {}
            }
        }
    }
    let (n, npts, length) = match (n, npts, length) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(Error::Config("CSV field header must carry n=, N=, L=".into())),
    };
    let grid = GridSpec::new(n, npts, T::of(length))?;
    let mut values = Vec::with_capacity(grid.size());
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with(|c: char| c.is_alphabetic()) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != n + 2 {
            return Err(Error::Config(format!("expected {} CSV columns, got {}", n + 2, cols.len())));
        }
        let re: f64 = cols[n].trim().parse().map_err(|e| Error::Config(format!("bad re: {e}")))?;
        let im: f64 =
            cols[n + 1].trim().parse().map_err(|e| Error::Config(format!("bad im: {e}")))?;
        values.push(Complex::new(T::of(re), T::of(im)));
    }
    Field::new(grid, values)
}
