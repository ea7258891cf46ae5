use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discretize::matvec;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-11;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerronOptions {
    /// Absolute bound on the Collatz-Wielandt gap.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for PerronOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PerronResult {
    pub rho: f64,
    /// Positive eigenvector with unit 2-norm.
    pub vector: Vec<f64>,
    pub cw_lower: f64,
    pub cw_upper: f64,
    pub iterations: usize,
}

impl PerronResult {
    pub fn gap(&self) -> f64 {
        self.cw_upper - self.cw_lower
    }
}

/// Seeded start vector with entries uniform in `[0.5, 1.5]`.
pub fn positive_start(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0.5..=1.5)).collect()
}

fn check_nonnegative(mat: &DMatrix<f64>) -> Result<()> {
    for j in 0..mat.ncols() {
        for i in 0..mat.nrows() {
            let value = mat[(i, j)];
            if !(value >= 0.0) {
                return Err(Error::NegativeEntry { row: i, col: j, value });
            }
        }
    }
    Ok(())
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// `(min_i (A v)_i / v_i, max_i (A v)_i / v_i)`; brackets the spectral
/// radius of a nonnegative `A` for any positive `v`.
pub fn collatz_wielandt_bounds(mat: &DMatrix<f64>, v: &[f64]) -> Result<(f64, f64)> {
    check_nonnegative(mat)?;
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        return Err(Error::NonPositiveVector { index, value });
    }
    let w = matvec(mat, v)?;
    Ok(ratio_bounds(&w, v))
}

fn ratio_bounds(w: &[f64], v: &[f64]) -> (f64, f64) {
    w.iter()
        .zip(v)
        .map(|(a, b)| a / b)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        })
}

/// Power iteration for the Perron root of a nonnegative matrix, stopped on
/// the Collatz-Wielandt certificate.
pub fn perron(mat: &DMatrix<f64>, opts: &PerronOptions) -> Result<PerronResult> {
    let start = positive_start(mat.nrows(), opts.seed);
    perron_from(mat, start, opts)
}

/// Same as [`perron`] on the transpose.
pub fn adjoint_perron(mat: &DMatrix<f64>, opts: &PerronOptions) -> Result<PerronResult> {
    perron(&mat.transpose(), opts)
}

/// [`perron`] from a caller-supplied positive start vector.
pub fn perron_from(mat: &DMatrix<f64>, start: Vec<f64>, opts: &PerronOptions) -> Result<PerronResult> {
    check_nonnegative(mat)?;
    if !mat.is_square() || start.len() != mat.nrows() {
        return Err(Error::DimensionMismatch {
            expected: mat.nrows(),
            found: start.len(),
        });
    }
    if let Some((index, &value)) = start.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        return Err(Error::NonPositiveVector { index, value });
    }

    let mut v = start;
    normalize(&mut v);
    let mut gap = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let mut w = matvec(mat, &v)?;
        let positive = v.iter().all(|&x| x > 0.0);
        if positive {
            let (lo, hi) = ratio_bounds(&w, &v);
            gap = hi - lo;
            if gap <= opts.tol {
                // Rayleigh quotient: a v_i^2-weighted mean of the ratios,
                // so it stays inside [lo, hi].
                let num: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
                let den: f64 = v.iter().map(|a| a * a).sum();
                let rho = (num / den).clamp(lo, hi);
                return Ok(PerronResult {
                    rho,
                    vector: v,
                    cw_lower: lo,
                    cw_upper: hi,
                    iterations: it,
                });
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            break;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        v = w;
    }
    Err(Error::NotConverged {
        what: "Perron power iteration",
        iterations: opts.max_iter,
        gap,
    })
}

/// Largest singular value by power iteration on `A^T A`.
pub fn operator_norm_2(mat: &DMatrix<f64>) -> Result<f64> {
    const REL_TOL: f64 = 1e-10;
    const MAX_ITER: usize = 100_000;
    let n = mat.ncols();
    if n == 0 || mat.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let at = mat.transpose();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut x);
    let mut sigma2 = 0.0;
    for _ in 0..MAX_ITER {
        let ax = matvec(mat, &x)?;
        let next2: f64 = ax.iter().map(|a| a * a).sum();
        let mut y = matvec(&at, &ax)?;
        let converged = (next2 - sigma2).abs() <= REL_TOL * next2;
        sigma2 = next2;
        if converged {
            return Ok(sigma2.sqrt());
        }
        normalize(&mut y);
        x = y;
    }
    Err(Error::NotConverged {
        what: "operator 2-norm power iteration",
        iterations: MAX_ITER,
        gap: f64::NAN,
    })
}
