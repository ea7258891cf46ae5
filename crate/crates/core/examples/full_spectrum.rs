//! Dense spectrum of the generator next to its essential spectrum.

use nonlocal_spectrum::discretize::assemble_m;
use nonlocal_spectrum::eigen::full_spectrum;
use nonlocal_spectrum::kernels::{jump_rate, GenericKernel, Potential};
use nonlocal_spectrum::spectral::essential_spectrum;
use nonlocal_spectrum::{Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(1, 32)?;
    let b = GenericKernel::constant(grid, 1.0)?;
    let v = Potential::step(grid, 1.0, 0.5)?;
    let m = assemble_m(&b, &v, &grid)?;
    let ess = essential_spectrum(&v, &jump_rate(&b))?;
    println!("essential values: {:?}", ess.values);
    for z in full_spectrum(m.matrix())?.iter().take(6) {
        println!("{:>12.8} {:+.2e}i  distance to essential set {:.3e}", z.re, z.im, ess.distance(*z));
    }
    Ok(())
}
