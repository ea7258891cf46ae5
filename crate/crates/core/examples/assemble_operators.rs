//! Builds M, L and Q_mu for a Gaussian kernel and a step potential.

use nonlocal_spectrum::discretize::{apply, assemble_l, assemble_m, QFamily};
use nonlocal_spectrum::kernels::{wind_kernel, ContinuousKernel, GenericKernel, Potential};
use nonlocal_spectrum::{Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(1, 16)?;
    let a = wind_kernel(&ContinuousKernel::gaussian(1, 0.15)?, grid, 1e-12)?;
    let b = GenericKernel::convolution(&a);

    let zero = Potential::constant(grid, 0.0)?;
    let m0 = assemble_m(&b, &zero, &grid)?;
    let ones = vec![1.0; grid.len()];
    let r = apply(&m0, &ones)?;
    println!("max |M 1| with V = 0: {:e}", r.iter().fold(0.0f64, |acc, x| acc.max(x.abs())));

    let v = Potential::step(grid, 1.0, 0.5)?;
    let m = assemble_m(&b, &v, &grid)?;
    let l = assemble_l(&a, &v, &grid)?;
    println!("max |M - L| = {:e}", (m.matrix() - l.matrix()).amax());

    let q = QFamily::new(&b, &v, &grid)?;
    println!("alpha0 = {:.6}, alpha1 = {:.6}", q.alpha0(), q.alpha1());
    for mu in [-0.9, -0.5, -0.1] {
        let qm = q.at(mu)?;
        println!("Q({mu}) column sums: {:.4?}", &qm.matrix().column_sum().as_slice()[..4]);
    }
    Ok(())
}
