//! Kernel constants, primitivity and potential eligibility for the built-in
//! fixtures.

use nonlocal_spectrum::config::Problem;
use nonlocal_spectrum::fixtures;
use nonlocal_spectrum::kernels::{check_potential, jump_rate, kernel_stats};
use nonlocal_spectrum::Result;

fn main() -> Result<()> {
    for name in fixtures::NAMES {
        let config = fixtures::config(name)?;
        let p = Problem::build(&config)?;
        let stats = kernel_stats(&p.kernel, 16)?;
        let pot = check_potential(&p.potential)?;
        let w = jump_rate(&p.kernel);
        let (wmin, wmax) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        println!("{name}: n={} d={}", config.grid_n, config.dimension);
        println!(
            "  gamma1={:.4} gamma2={:.4} gamma3={:.4} n_prim={} beta={:.4}",
            stats.gamma1, stats.gamma2, stats.gamma3, stats.n_prim, stats.beta
        );
        println!("  W in [{wmin:.6}, {wmax:.6}]");
        println!(
            "  V: max={:.3} negative share={:.3} |V|_1={:.4} eligible={}",
            pot.max_sample, pot.fraction_negative, pot.norm_l1, pot.eligible
        );
    }
    Ok(())
}
