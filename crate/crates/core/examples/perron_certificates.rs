//! Perron roots with Collatz-Wielandt brackets, for a matrix and its adjoint.

use nalgebra::DMatrix;
use nonlocal_spectrum::eigen::{adjoint_perron, perron, positive_start, PerronOptions};
use nonlocal_spectrum::Result;

fn main() -> Result<()> {
    let n = 6;
    let a = DMatrix::from_row_slice(n, n, &positive_start(n * n, 42));
    let opts = PerronOptions::default();
    let right = perron(&a, &opts)?;
    let left = adjoint_perron(&a, &opts)?;
    println!(
        "rho = {:.15}  bracket [{:.15}, {:.15}]  after {} steps",
        right.rho, right.cw_lower, right.cw_upper, right.iterations
    );
    println!("adjoint rho = {:.15}  gap {:e}", left.rho, left.gap());
    println!("right vector: {:.4?}", right.vector);
    println!("left vector:  {:.4?}", left.vector);
    Ok(())
}
