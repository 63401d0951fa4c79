//! Binary and CSV encodings of fields, trajectories and sweep tables.
//!
//! Binary layout (little-endian): `n: u32`, `N: u32`, `L: f64`, then
//! `N^{2n}` pairs `(re: f64, im: f64)` in row-major order with the momentum
//! axes outermost.

use std::io::{self, Read, Write};

use num_complex::Complex64;

use crate::contraction::SweepTable;
use crate::dynamics::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::grid::{PhaseFunction, PhaseGrid, Role};

pub fn write_binary(f: &PhaseFunction, mut w: impl Write) -> io::Result<()> {
    let g = f.grid();
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    w.write_all(&(g.size() as u32).to_le_bytes())?;
    w.write_all(&g.half_width().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * f.values().len());
    for v in f.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)
}

pub fn read_binary(mut r: impl Read, role: Role) -> Result<PhaseFunction> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| Error::InvalidInput(format!("read failed: {e}")))?;
    if bytes.len() < 16 {
        return Err(Error::InvalidInput("binary field shorter than its header".into()));
    }
    let n = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let size = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let half_width = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let grid = PhaseGrid::new(n, size, half_width)?;
    let body = &bytes[16..];
    if body.len() != 16 * grid.len() {
        return Err(Error::InvalidInput(format!(
            "binary field body has {} bytes, expected {}",
            body.len(),
            16 * grid.len()
        )));
    }
    let values = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    PhaseFunction::from_values(&grid, role, values)
}

/// One row per grid point: coordinates, then `re, im`.
pub fn write_csv(f: &PhaseFunction, mut w: impl Write) -> io::Result<()> {
    let g = f.grid();
    let n = g.dim();
    let header: Vec<String> = if n == 1 {
        vec!["p".into(), "x".into()]
    } else {
        (1..=n).map(|i| format!("p{i}")).chain((1..=n).map(|i| format!("x{i}"))).collect()
    };
    writeln!(w, "{},re,im", header.join(","))?;
    let mut z = vec![0.0; 2 * n];
    let mut line = String::new();
    for (i, v) in f.values().iter().enumerate() {
        g.point(i, &mut z);
        line.clear();
        for c in &z {
            line.push_str(&format!("{c},"));
        }
        line.push_str(&format!("{},{}\n", v.re, v.im));
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn write_trajectory_csv(records: &[TrajectoryRecord], mut w: impl Write) -> io::Result<()> {
    writeln!(w, "t,norm,energy,peak_p,peak_x")?;
    for r in records {
        writeln!(w, "{},{},{},{},{}", r.t, r.norm, r.energy, r.peak_p, r.peak_x)?;
    }
    Ok(())
}

pub fn write_table_csv(table: &SweepTable, mut w: impl Write) -> io::Result<()> {
    writeln!(w, "{}", table.columns.join(","))?;
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}
