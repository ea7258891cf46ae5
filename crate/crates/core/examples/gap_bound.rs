//! Lower bound on the gap between the maximum eigenvalue and zero, swept
//! over Gaussian widths and potential depths.

use nonlocal_spectrum::gapbound::{gap_constants, verify_gap, DEFAULT_SLACK};
use nonlocal_spectrum::kernels::{wind_kernel, ContinuousKernel, GenericKernel, Potential};
use nonlocal_spectrum::spectral::{analyze, AnalysisOptions};
use nonlocal_spectrum::{Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(1, 64)?;
    println!("{:>6} {:>6} {:>12} {:>12} {:>6}", "sigma", "depth", "lambda", "-kappa", "ok");
    for sigma in [0.05, 0.1, 0.2] {
        let a = wind_kernel(&ContinuousKernel::gaussian(1, sigma)?, grid, 1e-12)?;
        let b = GenericKernel::convolution(&a);
        for depth in [0.1, 0.5, 2.0] {
            let v = Potential::step(grid, depth, 0.25)?;
            let report = analyze(&b, &v, &grid, &AnalysisOptions::default())?;
            let bound = gap_constants(&v, &a)?;
            let verdict = verify_gap(&report, &bound, DEFAULT_SLACK);
            println!(
                "{sigma:>6} {depth:>6} {:>12.6} {:>12.6} {:>6}",
                report.lambda, -bound.kappa, verdict.pass
            );
        }
    }
    Ok(())
}
