//! Evolves u' = Mu from constant data and fits the decay rate.

use nonlocal_spectrum::discretize::assemble_m;
use nonlocal_spectrum::evolution::{check_extinction, evolve, fit_decay_rate, EvolveOptions, Integrator};
use nonlocal_spectrum::kernels::{jump_rate, wind_kernel, ContinuousKernel, GenericKernel, Potential};
use nonlocal_spectrum::spectral::{analyze, essential_spectrum, AnalysisOptions};
use nonlocal_spectrum::{Result, TorusGrid};

fn main() -> Result<()> {
    let grid = TorusGrid::new(1, 64)?;
    let a = wind_kernel(&ContinuousKernel::gaussian(1, 0.1)?, grid, 1e-12)?;
    let b = GenericKernel::convolution(&a);
    let v = Potential::step(grid, 0.8, 0.3)?;
    let m = assemble_m(&b, &v, &grid)?;
    let lambda = analyze(&b, &v, &grid, &AnalysisOptions::default())?.lambda;
    let alpha0 = essential_spectrum(&v, &jump_rate(&b))?.alpha0;

    let t_max = 30.0 / lambda.abs();
    let u0 = vec![1.0; grid.len()];
    for method in [Integrator::Rk4, Integrator::EigenExpansion] {
        let mut opts = EvolveOptions::new(t_max, alpha0);
        opts.method = method;
        let trace = evolve(&m, &u0, &opts)?;
        let rate = fit_decay_rate(&trace, (t_max / 2.0, t_max))?;
        let ext = check_extinction(&trace);
        println!(
            "{method:?}: fitted rate {rate:.8} (lambda {lambda:.8}), |u(T)|/|u(0)| = {:.3e}, extinct {}",
            ext.ratio, ext.extinct
        );
    }
    Ok(())
}
