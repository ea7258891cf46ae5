#![allow(dead_code)]

use nalgebra::DMatrix;
use nonlocal_spectrum::kernels::{
    wind_kernel, ContinuousKernel, GenericKernel, GenericTag, Potential, WoundKernel,
};
use nonlocal_spectrum::TorusGrid;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Fixture {
    pub label: String,
    pub grid: TorusGrid,
    pub kernel: GenericKernel,
    pub wound: Option<WoundKernel>,
    pub potential: Potential,
}

/// Nonpositive potential with a random share (at least 10%) of negative
/// nodes.
pub fn random_potential(grid: TorusGrid, rng: &mut ChaCha8Rng) -> Potential {
    let n = grid.len();
    let share: f64 = rng.gen_range(0.1..0.9);
    let count = ((share * n as f64).ceil() as usize).max(1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut v = vec![0.0; n];
    for &i in &idx[..count] {
        v[i] = -rng.gen_range(0.05..2.0);
    }
    Potential::from_samples(grid, v).unwrap()
}

/// Theorem-eligible fixture on `n` nodes: a strictly positive kernel (so
/// primitive) and a nonpositive, somewhere negative potential.
pub fn random_fixture(seed: u64, n: usize) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf1c5 ^ seed);
    let grid = TorusGrid::new(1, n).unwrap();
    let (label, kernel, wound) = match seed % 5 {
        0 => {
            let s = rng.gen_range(0.08..0.3);
            let a = wind_kernel(&ContinuousKernel::gaussian(1, s).unwrap(), grid, 1e-12).unwrap();
            (format!("gaussian sigma={s:.3}"), GenericKernel::convolution(&a), Some(a))
        }
        1 => {
            let amp = rng.gen_range(-0.9..0.9);
            let a = WoundKernel::sine(grid, amp).unwrap();
            (format!("sine amplitude={amp:.3}"), GenericKernel::convolution(&a), Some(a))
        }
        2 => {
            let l = rng.gen_range(0.05..0.3);
            let a = wind_kernel(&ContinuousKernel::exponential(1, l).unwrap(), grid, 1e-12).unwrap();
            (format!("exponential scale={l:.3}"), GenericKernel::convolution(&a), Some(a))
        }
        3 => {
            let s = rng.gen_range(0.1..0.3);
            let amp: f64 = rng.gen_range(-0.8..0.8);
            let a = wind_kernel(&ContinuousKernel::gaussian(1, s).unwrap(), grid, 1e-12).unwrap();
            let b = GenericKernel::modulated(&a, |x, y| {
                1.0 + amp * (2.0 * std::f64::consts::PI * x[0]).cos() * (2.0 * std::f64::consts::PI * y[0]).cos()
            })
            .unwrap();
            (format!("modulated gaussian sigma={s:.3} amp={amp:.3}"), b, None)
        }
        _ => {
            let samples = (0..n * n).map(|_| rng.gen_range(0.2..2.0)).collect();
            let b = GenericKernel::from_samples(grid, samples, GenericTag::Tabulated).unwrap();
            ("random tabulated".to_string(), b, None)
        }
    };
    let potential = random_potential(grid, &mut rng);
    Fixture {
        label: format!("#{seed} {label}"),
        grid,
        kernel,
        wound,
        potential,
    }
}

/// Largest real part of the spectrum from nalgebra: the symmetric
/// eigen-solver when `m` is symmetric, the real Schur form otherwise.
pub fn schur_max_real(m: &DMatrix<f64>) -> Option<f64> {
    let mt = m.transpose();
    if (m - &mt).amax() <= 1e-13 * m.amax() {
        return Some(((m + mt) * 0.5).symmetric_eigenvalues().max());
    }
    let schur = nalgebra::Schur::try_new(m.clone(), 1e-14, 100_000)?;
    Some(
        schur
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Largest singular value via nalgebra's SVD.
pub fn svd_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().max()
}

/// Roots of `1 = (1/2)(1/(l + 1) + 1/(l + 2))` by scalar bisection on the
/// two branches `(-1, 0)` and `(-2, -1)`.
pub fn step_fixture_roots() -> (f64, f64) {
    let f = |l: f64| 0.5 * (1.0 / (l + 1.0) + 1.0 / (l + 2.0)) - 1.0;
    let bisect = |mut lo: f64, mut hi: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo).signum() == f(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    (bisect(-1.0 + 1e-14, 0.0), bisect(-2.0 + 1e-14, -1.0 - 1e-14))
}
