//! Explicit lower bound on the spectral gap for convolution kernels with a
//! unit-mass probability density:
//!
//! `lambda <= -kappa`, `kappa = min(c2 * gamma0^2, c1 / 2)`,
//!
//! where `c1 = |V|_1`, `gamma0 = (2/9) c1 / |V|_2` and
//! `c2 = 1 - max_{k != 0} |a_k|`.

use serde::Serialize;

use crate::discretize::fourier_symbol;
use crate::error::{Error, Result};
use crate::kernels::{check_potential, GenericKernel, GenericTag, Potential, WoundKernel};
use crate::spectral::SpectrumReport;

/// Allowed deviation of the wound kernel mass from one.
pub const MASS_TOL: f64 = 1e-8;
pub const DEFAULT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapBound {
    pub c1: f64,
    pub norm_v2: f64,
    pub gamma0: f64,
    pub c2: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapVerdict {
    pub pass: bool,
    /// `lambda + kappa`; nonpositive when the bound holds exactly.
    pub margin: f64,
}

pub fn gap_constants(v: &Potential, a: &WoundKernel) -> Result<GapBound> {
    a.grid().ensure_same(v.grid())?;
    let mass = a.mass();
    if !((mass - 1.0).abs() <= MASS_TOL) {
        return Err(Error::NotNormalized { mass });
    }
    let diag = check_potential(v)?;
    if !diag.eligible {
        return Err(Error::HypothesisViolated(vec![
            "potential is not strictly negative at any grid node".into(),
        ]));
    }
    let max_modulus = fourier_symbol(a).max_nonzero_modulus();
    let c2 = 1.0 - max_modulus;
    if !(c2 > 0.0) {
        return Err(Error::DegenerateSymbol { max_modulus });
    }
    let c1 = diag.norm_l1;
    let norm_v2 = diag.norm_l2;
    let gamma0 = 2.0 / 9.0 * c1 / norm_v2;
    let kappa = (c2 * gamma0 * gamma0).min(c1 / 2.0);
    Ok(GapBound {
        c1,
        norm_v2,
        gamma0,
        c2,
        kappa,
    })
}

/// The bound only applies to translation-invariant kernels.
pub fn gap_constants_generic(v: &Potential, b: &GenericKernel) -> Result<GapBound> {
    match b.tag() {
        GenericTag::Convolution | GenericTag::Constant => {
            let grid = *b.grid();
            // first row of a convolution matrix holds a~(0 - y_j); flip it
            let row = b.row(0);
            let samples = (0..grid.len())
                .map(|j| row[grid.difference_index(0, j)])
                .collect();
            gap_constants(v, &WoundKernel::from_samples(grid, samples)?)
        }
        _ => Err(Error::NotConvolution),
    }
}

pub fn verify_lambda(lambda: f64, bound: &GapBound, slack: f64) -> GapVerdict {
    GapVerdict {
        pass: lambda <= -bound.kappa + slack,
        margin: lambda + bound.kappa,
    }
}

pub fn verify_gap(report: &SpectrumReport, bound: &GapBound, slack: f64) -> GapVerdict {
    verify_lambda(report.lambda, bound, slack)
}
