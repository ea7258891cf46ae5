//! CSV exchange of tabulated kernels and potentials.
//!
//! Kernels: `x,y,value` on the circle, `x1,x2,y1,y2,value` on the 2-torus.
//! Potentials: `x,value` or `x1,x2,value`. Coordinates must sit on grid
//! nodes and every node (pair) must appear exactly once.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::kernels::{GenericKernel, GenericTag, Potential};

/// Snapping tolerance for coordinates, as a fraction of the grid spacing.
const NODE_TOL: f64 = 1e-6;

fn kernel_header(dim: usize) -> &'static [&'static str] {
    if dim == 1 {
        &["x", "y", "value"]
    } else {
        &["x1", "x2", "y1", "y2", "value"]
    }
}

fn potential_header(dim: usize) -> &'static [&'static str] {
    if dim == 1 {
        &["x", "value"]
    } else {
        &["x1", "x2", "value"]
    }
}

/// Parses rows of `2 * groups * dim + 1` numbers, placing the value at the
/// flat slot of the located nodes.
fn read_table<R: Read>(
    input: R,
    grid: &TorusGrid,
    header: &[&str],
    groups: usize,
) -> Result<Vec<f64>> {
    let d = grid.dim();
    let n = grid.len();
    let slots = n.pow(groups as u32);
    let tol = NODE_TOL * grid.spacing();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);

    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::Parse(format!(
            "expected header {:?}, found {:?}",
            header.join(","),
            found.join(",")
        )));
    }

    let mut values = vec![f64::NAN; slots];
    let mut seen = vec![false; slots];
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 2;
        let nums = record
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {line}: '{s}' is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if nums.len() != header.len() {
            return Err(Error::Parse(format!(
                "line {line}: expected {} fields, found {}",
                header.len(),
                nums.len()
            )));
        }
        let mut slot = 0;
        for gi in 0..groups {
            let coords = &nums[gi * d..(gi + 1) * d];
            let idx = grid.locate(coords, tol).ok_or_else(|| {
                Error::Parse(format!("line {line}: {coords:?} is not a node of {grid}"))
            })?;
            slot = slot * n + idx;
        }
        if seen[slot] {
            return Err(Error::Parse(format!("line {line}: duplicate entry")));
        }
        seen[slot] = true;
        values[slot] = nums[groups * d];
    }
    let missing = seen.iter().filter(|s| !**s).count();
    if missing > 0 {
        return Err(Error::Parse(format!(
            "{missing} of {slots} grid entries are missing"
        )));
    }
    Ok(values)
}

pub fn read_kernel_csv<R: Read>(input: R, grid: &TorusGrid) -> Result<GenericKernel> {
    let samples = read_table(input, grid, kernel_header(grid.dim()), 2)?;
    GenericKernel::from_samples(*grid, samples, GenericTag::Tabulated)
}

pub fn read_potential_csv<R: Read>(input: R, grid: &TorusGrid) -> Result<Potential> {
    let samples = read_table(input, grid, potential_header(grid.dim()), 1)?;
    Potential::from_samples(*grid, samples)
}

pub fn load_kernel_csv(path: &Path, grid: &TorusGrid) -> Result<GenericKernel> {
    read_kernel_csv(File::open(path)?, grid)
}

pub fn load_potential_csv(path: &Path, grid: &TorusGrid) -> Result<Potential> {
    read_potential_csv(File::open(path)?, grid)
}

fn coords(grid: &TorusGrid, idx: usize) -> Vec<String> {
    grid.point(idx)[..grid.dim()]
        .iter()
        .map(|x| format!("{x:.16e}"))
        .collect()
}

pub fn write_kernel_csv<W: Write>(b: &GenericKernel, out: W) -> Result<()> {
    let grid = b.grid();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(kernel_header(grid.dim()))?;
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            let mut rec = coords(grid, i);
            rec.extend(coords(grid, j));
            rec.push(format!("{:.16e}", b.get(i, j)));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_potential_csv<W: Write>(v: &Potential, out: W) -> Result<()> {
    let grid = v.grid();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(potential_header(grid.dim()))?;
    for (i, value) in v.samples().iter().enumerate() {
        let mut rec = coords(grid, i);
        rec.push(format!("{value:.16e}"));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
