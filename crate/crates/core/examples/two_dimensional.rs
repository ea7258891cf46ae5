//! Maximum eigenvalue on the two-torus with a cosine well.

use std::f64::consts::PI;

use nonlocal_spectrum::gapbound::{gap_constants, verify_gap, DEFAULT_SLACK};
use nonlocal_spectrum::kernels::{wind_kernel, ContinuousKernel, GenericKernel, Potential};
use nonlocal_spectrum::spectral::{analyze, AnalysisOptions};
use nonlocal_spectrum::{Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(2, 16)?;
    let a = wind_kernel(&ContinuousKernel::gaussian(2, 0.15)?, grid, 1e-12)?;
    let b = GenericKernel::convolution(&a);
    let v = Potential::from_fn(grid, |x| -0.5 * (1.0 + (2.0 * PI * x[0]).cos()) * (1.0 + (2.0 * PI * x[1]).cos()) / 4.0)?;
    let r = analyze(&b, &v, &grid, &AnalysisOptions::default())?;
    let bound = gap_constants(&v, &a)?;
    println!("{} nodes, mass {:.12}", grid.len(), a.mass());
    println!("lambda = {:.12}", r.lambda);
    println!("kappa  = {:.12}  verdict {}", bound.kappa, verify_gap(&r, &bound, DEFAULT_SLACK).pass);
    let (i, peak) = r.psi.iter().enumerate().fold((0, 0.0), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
    println!("ground state peaks at {:?} (value {peak:.4})", &grid.point(i)[..2]);
    Ok(())
}
