//! Winds continuous kernels onto the torus and shows their Fourier symbols.

use nonlocal_spectrum::discretize::fourier_symbol;
use nonlocal_spectrum::kernels::{wind_kernel, ContinuousKernel};
use nonlocal_spectrum::{Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(1, 64)?;
    let kernels = [
        ("gaussian sigma=0.1", ContinuousKernel::gaussian(1, 0.1)?),
        ("gaussian sigma=0.6", ContinuousKernel::gaussian(1, 0.6)?),
        ("exponential scale=0.2", ContinuousKernel::exponential(1, 0.2)?),
        ("tophat half_width=0.25", ContinuousKernel::tophat(1, 0.25)?),
    ];
    println!("{:<24} {:>8} {:>10} {:>12} {:>10}", "kernel", "images", "mass", "tail", "|a_1|");
    for (name, k) in &kernels {
        let a = wind_kernel(k, grid, 1e-12)?;
        let symbol = fourier_symbol(&a);
        println!(
            "{:<24} {:>8} {:>10.6} {:>12.3e} {:>10.6}",
            name,
            a.wind_truncation(),
            a.mass(),
            a.tail_estimate(),
            symbol.get(&[1]).norm()
        );
    }
    Ok(())
}
