//! Essential spectrum, maximum eigenvalue and ground states of the
//! generator `M = B + diag(V - W)`.
//!
//! The maximum eigenvalue is found three ways:
//! - `direct_qr`: largest real part of the dense spectrum;
//! - `perron_shift`: Perron root of `M + kI`, `k = alpha0 + 1`, minus `k`;
//! - `q_bisection`: the `mu` at which the spectral radius of
//!   `Q_mu = diag(U + W + mu)^{-1} B` crosses one.

use num_complex::Complex64;
use serde::Serialize;

use crate::discretize::{assemble_m, matvec, OperatorMatrix, QFamily};
use crate::eigen::{full_spectrum_capped, perron, perron_from, PerronOptions, PerronResult};
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::kernels::{
    check_potential, jump_rate, kernel_stats, GenericKernel, KernelStats, Potential,
    PotentialDiagnostics,
};

#[derive(Debug, Clone, Serialize)]
pub struct EssentialSpectrum {
    pub alpha0: f64,
    pub alpha1: f64,
    /// Sorted distinct values of `W - V`; the essential spectrum is their
    /// negation.
    pub values: Vec<f64>,
}

impl EssentialSpectrum {
    /// Distance from `z` to the essential set `{-v}`.
    pub fn distance(&self, z: Complex64) -> f64 {
        self.values
            .iter()
            .map(|&v| (z - Complex64::new(-v, 0.0)).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn essential_spectrum(v: &Potential, w: &[f64]) -> Result<EssentialSpectrum> {
    if w.len() != v.samples().len() {
        return Err(Error::DimensionMismatch {
            expected: v.samples().len(),
            found: w.len(),
        });
    }
    let mut all: Vec<f64> = w.iter().zip(v.samples()).map(|(w, v)| w - v).collect();
    all.sort_by(|a, b| a.total_cmp(b));
    // row sums of a shifted kernel may differ in the last bits
    let mut values: Vec<f64> = Vec::new();
    for x in all {
        match values.last() {
            Some(&last) if (x - last).abs() <= 1e-12 * last.abs().max(1.0) => {}
            _ => values.push(x),
        }
    }
    Ok(EssentialSpectrum {
        alpha0: *values.last().unwrap_or(&f64::NAN),
        alpha1: *values.first().unwrap_or(&f64::NAN),
        values,
    })
}

/// Spectral radius of `Q_mu`.
pub fn spectral_radius_q(
    mu: f64,
    b: &GenericKernel,
    v: &Potential,
    grid: &TorusGrid,
    opts: &PerronOptions,
) -> Result<f64> {
    let family = QFamily::new(b, v, grid)?;
    Ok(perron(family.at(mu)?.matrix(), opts)?.rho)
}

#[derive(Debug, Clone)]
pub struct BisectionResult {
    pub lambda: f64,
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
    /// `r(Q_lambda)` at the returned midpoint.
    pub radius_at_lambda: f64,
    /// Distance above `-alpha1` of the accepted left bracket.
    pub left_offset: f64,
    pub steps: usize,
}

/// Halvings of the left bracket offset allowed before giving up.
const BRACKET_HALVINGS: usize = 20;

/// Bisection on `mu` in `(-alpha1, 0)` for `r(Q_mu) = 1`.
pub fn find_lambda_bisection(
    b: &GenericKernel,
    v: &Potential,
    grid: &TorusGrid,
    tol: f64,
    opts: &PerronOptions,
) -> Result<BisectionResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("bisection tol must be positive, got {tol}")));
    }
    let family = QFamily::new(b, v, grid)?;
    let alpha1 = family.alpha1();
    let alpha0 = family.alpha0();
    if !(alpha1 > 0.0) {
        return Err(Error::BracketFailure(format!(
            "alpha1 = {alpha1} leaves no room below zero"
        )));
    }

    let right = perron(family.at(0.0)?.matrix(), opts)?;
    if !(right.cw_upper < 1.0) {
        return Err(Error::BracketFailure(format!(
            "r(Q_0) is not certified below 1 (Collatz-Wielandt upper bound {})",
            right.cw_upper
        )));
    }

    let mut offset = 0.01 * (alpha0 - alpha1 + 1.0);
    let mut left = None;
    for _ in 0..=BRACKET_HALVINGS {
        let mu = -alpha1 + offset;
        if mu < 0.0 {
            let r = perron(family.at(mu)?.matrix(), opts)?;
            if r.cw_lower > 1.0 {
                left = Some((mu, r));
                break;
            }
        }
        offset /= 2.0;
    }
    let Some((mut lo, left_result)) = left else {
        return Err(Error::BracketFailure(format!(
            "r(Q_mu) stays at or below 1 down to mu = -alpha1 + {:e}",
            offset * 2.0
        )));
    };
    let left_offset = lo + alpha1;
    let mut hi = 0.0;
    let mut warm = left_result.vector;
    let mut steps = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = perron_from(family.at(mid)?.matrix(), warm, opts)?;
        if r.rho > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        warm = r.vector;
        steps += 1;
    }

    let lambda = 0.5 * (lo + hi);
    let forward = perron_from(family.at(lambda)?.matrix(), warm, opts)?;
    let adjoint = perron(family.adjoint_at(lambda)?.matrix(), opts)?;
    Ok(BisectionResult {
        lambda,
        radius_at_lambda: forward.rho,
        psi: forward.vector,
        phi: adjoint.vector,
        left_offset,
        steps,
    })
}

#[derive(Debug, Clone)]
pub struct DirectResult {
    pub lambda: f64,
    pub psi: Vec<f64>,
    /// The shift `k` added to the generator.
    pub shift: f64,
    pub perron: PerronResult,
}

/// Maximum eigenvalue via the Perron root of `M + (alpha0 + 1) I`.
pub fn max_eigenvalue_direct(
    mh: &OperatorMatrix,
    alpha0: f64,
    opts: &PerronOptions,
) -> Result<DirectResult> {
    let shift = alpha0 + 1.0;
    let t = mh.shifted(shift);
    let p = perron(t.matrix(), opts)?;
    Ok(DirectResult {
        lambda: p.rho - shift,
        psi: p.vector.clone(),
        shift,
        perron: p,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisOptions {
    pub perron: PerronOptions,
    pub bisection_tol: f64,
    pub cross_tol: f64,
    pub residual_tol: f64,
    /// Largest power tried in the primitivity check.
    pub n_max: usize,
    /// Largest matrix order handed to the dense eigen-solver.
    pub qr_cap: usize,
    /// Keep going (and mark the report non-conforming) when the theorem
    /// hypotheses fail.
    pub diagnostic: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            perron: PerronOptions::default(),
            bisection_tol: 1e-12,
            cross_tol: 1e-7,
            residual_tol: 1e-8,
            n_max: 16,
            qr_cap: crate::eigen::DEFAULT_ORDER_CAP,
            diagnostic: false,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LambdaByMethod {
    pub direct_qr: Option<f64>,
    pub perron_shift: Option<f64>,
    pub q_bisection: Option<f64>,
}

impl LambdaByMethod {
    fn available(&self) -> Vec<(&'static str, f64)> {
        [
            ("direct_qr", self.direct_qr),
            ("perron_shift", self.perron_shift),
            ("q_bisection", self.q_bisection),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AnalysisDiagnostics {
    pub perron_iterations: usize,
    pub perron_cw_gap: f64,
    pub adjoint_iterations: usize,
    pub lambda_adjoint: f64,
    pub bisection_steps: Option<usize>,
    pub bisection_left_offset: Option<f64>,
    pub radius_at_lambda: Option<f64>,
    pub residual_psi: f64,
    pub residual_phi: f64,
    pub tol_ess: f64,
    /// `lambda` minus the second largest real part of the dense spectrum.
    pub gap_to_next: Option<f64>,
    /// Methods that failed in diagnostic mode.
    pub method_errors: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub essential: EssentialSpectrum,
    pub lambda: f64,
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
    pub lambda_by_method: LambdaByMethod,
    pub discrete_eigenvalues: Vec<Complex64>,
    /// Whole dense spectrum, sorted, when it was computed.
    pub spectrum: Option<Vec<Complex64>>,
    pub kernel_stats: Option<KernelStats>,
    pub potential: PotentialDiagnostics,
    pub conforming: bool,
    pub violations: Vec<String>,
    pub diagnostics: AnalysisDiagnostics,
}

fn residual(m: &nalgebra::DMatrix<f64>, lambda: f64, x: &[f64]) -> Result<f64> {
    let mx = matvec(m, x)?;
    Ok(mx
        .iter()
        .zip(x)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Runs every route to the maximum eigenvalue, cross-checks them and
/// classifies the dense spectrum.
pub fn analyze(
    b: &GenericKernel,
    v: &Potential,
    grid: &TorusGrid,
    opts: &AnalysisOptions,
) -> Result<SpectrumReport> {
    grid.ensure_same(b.grid())?;
    grid.ensure_same(v.grid())?;
    let potential = check_potential(v)?;

    let mut violations = Vec::new();
    if !potential.eligible {
        violations.push("potential is not strictly negative at any grid node".to_string());
    }
    let kernel_stats = match kernel_stats(b, opts.n_max) {
        Ok(s) => Some(s),
        Err(e @ (Error::DegenerateKernel { .. } | Error::NotPrimitive { .. })) => {
            violations.push(e.to_string());
            None
        }
        Err(e) => return Err(e),
    };
    if !violations.is_empty() && !opts.diagnostic {
        return Err(Error::HypothesisViolated(violations));
    }
    let conforming = violations.is_empty();

    let mut diagnostics = AnalysisDiagnostics {
        tol_ess: (10.0 / grid.n() as f64).max(1e-6),
        ..Default::default()
    };
    let mut method_failed = |name: &str, e: Error| -> Result<()> {
        if opts.diagnostic {
            diagnostics.method_errors.push(format!("{name}: {e}"));
            Ok(())
        } else {
            Err(e)
        }
    };

    let w = jump_rate(b);
    let essential = essential_spectrum(v, &w)?;
    let m = assemble_m(b, v, grid)?;

    let mut by_method = LambdaByMethod::default();

    let spectrum = if m.order() <= opts.qr_cap {
        match full_spectrum_capped(m.matrix(), opts.qr_cap) {
            Ok(s) => {
                by_method.direct_qr = s.first().map(|z| z.re);
                Some(s)
            }
            Err(e) => {
                method_failed("direct_qr", e)?;
                None
            }
        }
    } else {
        None
    };

    let direct = max_eigenvalue_direct(&m, essential.alpha0, &opts.perron)?;
    by_method.perron_shift = Some(direct.lambda);
    let adjoint = max_eigenvalue_direct(&m.transpose(), essential.alpha0, &opts.perron)?;

    match find_lambda_bisection(b, v, grid, opts.bisection_tol, &opts.perron) {
        Ok(r) => {
            by_method.q_bisection = Some(r.lambda);
            diagnostics.bisection_steps = Some(r.steps);
            diagnostics.bisection_left_offset = Some(r.left_offset);
            diagnostics.radius_at_lambda = Some(r.radius_at_lambda);
        }
        Err(e) => method_failed("q_bisection", e)?,
    }

    let available = by_method.available();
    for (i, &(first, a)) in available.iter().enumerate() {
        for &(second, c) in &available[i + 1..] {
            let diff = (a - c).abs();
            if !(diff <= opts.cross_tol) {
                return Err(Error::MethodDisagreement {
                    first,
                    second,
                    diff,
                    tol: opts.cross_tol,
                });
            }
        }
    }

    let lambda = direct.lambda;
    diagnostics.perron_iterations = direct.perron.iterations;
    diagnostics.perron_cw_gap = direct.perron.gap();
    diagnostics.adjoint_iterations = adjoint.perron.iterations;
    diagnostics.lambda_adjoint = adjoint.lambda;
    diagnostics.residual_psi = residual(m.matrix(), lambda, &direct.psi)?;
    diagnostics.residual_phi = residual(&m.matrix().transpose(), adjoint.lambda, &adjoint.psi)?;
    let worst = diagnostics.residual_psi.max(diagnostics.residual_phi);
    if !(worst <= opts.residual_tol) {
        return Err(Error::Residual {
            residual: worst,
            tol: opts.residual_tol,
        });
    }

    if conforming && !(-essential.alpha1 < lambda && lambda < 0.0) {
        return Err(Error::LocationViolated {
            lambda,
            edge: -essential.alpha1,
        });
    }

    let discrete_eigenvalues = spectrum
        .as_ref()
        .map(|s| {
            s.iter()
                .copied()
                .filter(|&z| essential.distance(z) > diagnostics.tol_ess)
                .collect()
        })
        .unwrap_or_default();
    diagnostics.gap_to_next = spectrum
        .as_ref()
        .and_then(|s| s.get(1))
        .map(|z| lambda - z.re);

    Ok(SpectrumReport {
        essential,
        lambda,
        psi: direct.psi,
        phi: adjoint.psi,
        lambda_by_method: by_method,
        discrete_eigenvalues,
        spectrum,
        kernel_stats,
        potential,
        conforming,
        violations,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::assemble_q;

    fn f1(n: usize) -> (GenericKernel, Potential, TorusGrid) {
        let g = TorusGrid::new(1, n).unwrap();
        (
            GenericKernel::constant(g, 1.0).unwrap(),
            Potential::constant(g, -0.3).unwrap(),
            g,
        )
    }

    fn f2(n: usize) -> (GenericKernel, Potential, TorusGrid) {
        let g = TorusGrid::new(1, n).unwrap();
        (
            GenericKernel::constant(g, 1.0).unwrap(),
            Potential::step(g, 1.0, 0.5).unwrap(),
            g,
        )
    }

    /// Root of `1 = (1/2)(1/(l+1) + 1/(l+2))`, i.e. `2 l^2 + 4 l + 1 = 0`.
    fn f2_roots() -> (f64, f64) {
        let d = 8f64.sqrt();
        ((-4.0 + d) / 4.0, (-4.0 - d) / 4.0)
    }

    #[test]
    fn essential_values() {
        let (b, v, _) = f1(16);
        let e = essential_spectrum(&v, &jump_rate(&b)).unwrap();
        assert_eq!(e.values, vec![1.3]);
        let (b, v, _) = f2(16);
        let e = essential_spectrum(&v, &jump_rate(&b)).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
        assert_eq!((e.alpha0, e.alpha1), (2.0, 1.0));
        let z = Potential::constant(*b.grid(), 0.0).unwrap();
        let e = essential_spectrum(&z, &jump_rate(&b)).unwrap();
        assert_eq!(e.values, vec![1.0]);
    }

    #[test]
    fn radius_of_q_for_f1() {
        let (b, v, g) = f1(16);
        let o = PerronOptions::default();
        for mu in [0.0, -0.3, 10.0] {
            let r = spectral_radius_q(mu, &b, &v, &g, &o).unwrap();
            assert!((r - 1.0 / (1.3 + mu)).abs() < 1e-12, "mu = {mu}");
        }
    }

    #[test]
    fn bisection_on_f1_and_f2() {
        let o = PerronOptions::default();
        let (b, v, g) = f1(32);
        let r = find_lambda_bisection(&b, &v, &g, 1e-12, &o).unwrap();
        assert!((r.lambda + 0.3).abs() < 1e-11);
        assert!((r.radius_at_lambda - 1.0).abs() <= 1e-11);

        let (b, v, g) = f2(256);
        let r = find_lambda_bisection(&b, &v, &g, 1e-12, &o).unwrap();
        assert!((r.lambda - f2_roots().0).abs() < 1e-10);
        assert!((r.radius_at_lambda - 1.0).abs() <= 1e-11);
        assert!(r.psi.iter().all(|&x| x > 0.0));
        assert!(r.phi.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn bisection_without_potential_fails_or_hits_zero() {
        let (b, _, g) = f1(16);
        let v = Potential::constant(g, 0.0).unwrap();
        match find_lambda_bisection(&b, &v, &g, 1e-12, &PerronOptions::default()) {
            Err(Error::BracketFailure(_)) => {}
            Ok(r) => assert!(r.lambda.abs() < 1e-10),
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn direct_method_ground_state_profile() {
        let (b, v, g) = f2(256);
        let m = assemble_m(&b, &v, &g).unwrap();
        let r = max_eigenvalue_direct(&m, 2.0, &PerronOptions::default()).unwrap();
        let lam = f2_roots().0;
        assert!((r.lambda - lam).abs() < 1e-10);
        // psi(x) proportional to 1 / (lambda + 1 - V(x))
        let ratio = (lam + 2.0) / (lam + 1.0);
        assert!((r.psi[200] / r.psi[10] - ratio).abs() < 1e-9);
    }

    #[test]
    fn direct_method_on_nonsymmetric_sine_kernel() {
        let g = TorusGrid::new(1, 64).unwrap();
        let a = crate::kernels::WoundKernel::sine(g, 0.5).unwrap();
        let b = GenericKernel::convolution(&a);
        let v = Potential::constant(g, -0.3).unwrap();
        let m = assemble_m(&b, &v, &g).unwrap();
        let r = max_eigenvalue_direct(&m, 1.3, &PerronOptions::default()).unwrap();
        assert!((r.lambda + 0.3).abs() < 1e-11);
    }

    #[test]
    fn analyze_f1() {
        let (b, v, g) = f1(64);
        let r = analyze(&b, &v, &g, &AnalysisOptions::default()).unwrap();
        assert!(r.conforming);
        for l in [
            r.lambda_by_method.direct_qr,
            r.lambda_by_method.perron_shift,
            r.lambda_by_method.q_bisection,
        ] {
            assert!((l.unwrap() + 0.3).abs() < 1e-9);
        }
        assert_eq!(r.discrete_eigenvalues.len(), 1);
        assert!((r.discrete_eigenvalues[0].re + 0.3).abs() < 1e-10);
        assert_eq!(r.essential.values, vec![1.3]);
    }

    #[test]
    fn analyze_f2_finds_both_discrete_roots() {
        let (b, v, g) = f2(128);
        let r = analyze(&b, &v, &g, &AnalysisOptions::default()).unwrap();
        let (hi, lo) = f2_roots();
        assert_eq!(r.discrete_eigenvalues.len(), 2);
        assert!((r.discrete_eigenvalues[0].re - hi).abs() < 1e-9);
        assert!((r.discrete_eigenvalues[1].re - lo).abs() < 1e-9);
        assert!((r.lambda - hi).abs() < 1e-10);
        assert!((r.diagnostics.lambda_adjoint - r.lambda).abs() < 1e-10);
        assert!(r.diagnostics.gap_to_next.unwrap() > 0.5);
    }

    #[test]
    fn analyze_rejects_positive_potential() {
        let g = TorusGrid::new(1, 16).unwrap();
        let b = GenericKernel::constant(g, 1.0).unwrap();
        let v = Potential::constant(g, 0.3).unwrap();
        assert!(matches!(
            analyze(&b, &v, &g, &AnalysisOptions::default()),
            Err(Error::PositivePotential { .. })
        ));
    }

    #[test]
    fn zero_potential_needs_diagnostic_mode() {
        let g = TorusGrid::new(1, 16).unwrap();
        let b = GenericKernel::constant(g, 1.0).unwrap();
        let v = Potential::constant(g, 0.0).unwrap();
        assert!(matches!(
            analyze(&b, &v, &g, &AnalysisOptions::default()),
            Err(Error::HypothesisViolated(_))
        ));
        let opts = AnalysisOptions {
            diagnostic: true,
            ..Default::default()
        };
        let r = analyze(&b, &v, &g, &opts).unwrap();
        assert!(!r.conforming);
        assert!(r.lambda.abs() < 1e-10);
    }

    #[test]
    fn q_matrix_radius_matches_closed_form() {
        let (b, v, g) = f1(4);
        let q = assemble_q(&b, &v, -0.3, &g).unwrap();
        let r = perron(q.matrix(), &PerronOptions::default()).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-12);
    }
}
