//! CSV and JSON export.
//!
//! CSV files have a header row, `.` as the decimal separator, LF line
//! endings and 17 significant digits. JSON is pretty-printed with object
//! keys in sorted order so that identical inputs give identical bytes.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::error::{HamliftError, Result};
use crate::grid::{Grid, WaveFunction};
use crate::hamiltonian_flow::Trajectory;
use crate::weyl::{KernelMatrix, Symbol};

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_row<W: Write>(out: &mut W, fields: &[f64]) -> io::Result<()> {
    let line: Vec<String> = fields.iter().map(|&v| fmt(v)).collect();
    writeln!(out, "{}", line.join(","))
}

/// Columns `t, x1..xn, p1..pn`, plus `E` when `energies` is given.
pub fn write_trajectory_csv<W: Write>(out: &mut W, traj: &Trajectory, energies: Option<&[f64]>) -> Result<()> {
    let dim = traj.states.first().map_or(0, |s| s.len());
    let n = dim / 2;
    if let Some(e) = energies {
        if e.len() != traj.times.len() {
            return Err(HamliftError::DimensionMismatch { expected: traj.times.len(), got: e.len() });
        }
    }
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=n).map(|i| format!("p{i}")));
    if energies.is_some() {
        header.push("E".into());
    }
    writeln!(out, "{}", header.join(","))?;
    for (i, (t, z)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut row = vec![*t];
        row.extend(z.iter());
        if let Some(e) = energies {
            row.push(e[i]);
        }
        write_row(out, &row)?;
    }
    Ok(())
}

/// Columns `x, re, im`.
pub fn write_wavefunction_csv<W: Write>(out: &mut W, psi: &WaveFunction) -> Result<()> {
    writeln!(out, "x,re,im")?;
    for (x, v) in psi.grid().xs().into_iter().zip(psi.values()) {
        write_row(out, &[x, v.re, v.im])?;
    }
    Ok(())
}

/// Momentum indices in increasing `p`.
fn ascending_momenta(grid: &Grid) -> Vec<usize> {
    let mut ks: Vec<usize> = (0..grid.len()).collect();
    ks.sort_by_key(|&k| grid.momentum_index(k));
    ks
}

/// Columns `x, p, re, im` over the phase lattice, `p` fastest and increasing.
pub fn write_symbol_csv<W: Write>(out: &mut W, a: &Symbol, grid: &Grid) -> Result<()> {
    writeln!(out, "x,p,re,im")?;
    let ks = ascending_momenta(grid);
    for j in 0..grid.len() {
        for &k in &ks {
            let v = a.lattice_value(grid, j, k);
            write_row(out, &[grid.x(j), grid.p(k), v.re, v.im])?;
        }
    }
    Ok(())
}

/// Columns `x, y, re, im`, `y` fastest.
pub fn write_kernel_csv<W: Write>(out: &mut W, kernel: &KernelMatrix) -> Result<()> {
    writeln!(out, "x,y,re,im")?;
    let g = &kernel.grid;
    for j in 0..g.len() {
        for l in 0..g.len() {
            let v = kernel.values[(j, l)];
            write_row(out, &[g.x(j), g.x(l), v.re, v.im])?;
        }
    }
    Ok(())
}

/// Row-major array of arrays.
pub fn real_matrix_json(m: &DMatrix<f64>) -> Value {
    Value::from((0..m.nrows()).map(|i| m.row(i).iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>())
}

/// Row-major array of arrays of `[re, im]` pairs.
pub fn complex_matrix_json(m: &DMatrix<Complex64>) -> Value {
    Value::from(
        (0..m.nrows())
            .map(|i| m.row(i).iter().map(|v| vec![v.re, v.im]).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    // `Value` objects are B-tree maps, so the round trip sorts keys.
    let v = serde_json::to_value(value).map_err(|e| HamliftError::InvalidArgument(format!("JSON encoding: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| HamliftError::InvalidArgument(format!("JSON encoding: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Writes `content` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, content: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(content)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
