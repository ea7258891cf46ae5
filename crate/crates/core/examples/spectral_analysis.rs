//! Full analysis of a configuration: three routes to the maximum eigenvalue
//! and the discrete spectrum. Pass a config path, or a fixture name.

use std::path::PathBuf;

use nonlocal_spectrum::config::{load_config, Problem};
use nonlocal_spectrum::spectral::analyze;
use nonlocal_spectrum::Result;

fn main() -> Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "F3".into());
    let config = load_config(&path)?;
    let p = Problem::build(&config)?;
    let r = analyze(&p.kernel, &p.potential, &p.grid, &config.analysis.options())?;
    println!("lambda = {:.15}", r.lambda);
    println!("  direct_qr    {:?}", r.lambda_by_method.direct_qr);
    println!("  perron_shift {:?}", r.lambda_by_method.perron_shift);
    println!("  q_bisection  {:?}", r.lambda_by_method.q_bisection);
    println!("essential: [{:.6}, {:.6}]", -r.essential.alpha0, -r.essential.alpha1);
    println!("residuals: psi {:.2e}, phi {:.2e}", r.diagnostics.residual_psi, r.diagnostics.residual_phi);
    println!("discrete eigenvalues off the essential set:");
    for z in &r.discrete_eigenvalues {
        println!("  {:.10} {:+.2e}i", z.re, z.im);
    }
    Ok(())
}
