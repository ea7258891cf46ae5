//! Writes a modulated kernel and a potential to CSV, reads them back and
//! checks that nothing moved.

use nonlocal_spectrum::io::{read_kernel_csv, read_potential_csv, write_kernel_csv, write_potential_csv};
use nonlocal_spectrum::kernels::{wind_kernel, ContinuousKernel, GenericKernel, Potential};
use nonlocal_spectrum::{Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(1, 8)?;
    let a = wind_kernel(&ContinuousKernel::exponential(1, 0.3)?, grid, 1e-12)?;
    let b = GenericKernel::modulated(&a, |x, y| 1.0 + 0.4 * (x[0] - y[0]).cos())?;
    let v = Potential::step(grid, 1.0, 0.5)?;

    let mut kbuf = Vec::new();
    write_kernel_csv(&b, &mut kbuf)?;
    let mut vbuf = Vec::new();
    write_potential_csv(&v, &mut vbuf)?;
    print!("{}", String::from_utf8_lossy(&vbuf));

    let b2 = read_kernel_csv(kbuf.as_slice(), &grid)?;
    let v2 = read_potential_csv(vbuf.as_slice(), &grid)?;
    let kerr = b.samples().iter().zip(b2.samples()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let verr = v.samples().iter().zip(v2.samples()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    println!("kernel round trip error {kerr:e}, potential {verr:e}");
    Ok(())
}
