//! Kernels and potentials sampled on a torus grid.
//!
//! A convolution kernel `a` on `R^d` is wound onto the torus by summing its
//! integer translates. General kernels `b(x, y)` are stored as dense
//! `n^d x n^d` sample arrays. Potentials are real samples that must be
//! nonpositive for the theorem-mode analyses.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{TorusGrid, MAX_DIM};

/// Largest translate index allowed while winding.
pub const MAX_WIND_TRUNCATION: usize = 64;

type PointFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type TailFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuousTag {
    Tophat,
    Gaussian,
    Exponential,
    Custom,
}

#[derive(Clone)]
enum Shape {
    /// Uniform density on the half-open cube `[-w, w)^d`.
    Tophat { half_width: f64 },
    /// Product of centered normal densities.
    Gaussian { sigma: f64 },
    /// Product of Laplace densities `exp(-|z_j|/l) / (2l)`.
    Exponential { scale: f64 },
    Custom {
        eval: Arc<PointFn>,
        tail: Arc<TailFn>,
        decay_radius: f64,
    },
}

/// A nonnegative integrable kernel on `R^d`, together with an upper bound
/// on its mass outside the cube `|z|_inf < r`.
#[derive(Clone)]
pub struct ContinuousKernel {
    dim: usize,
    shape: Shape,
}

impl std::fmt::Debug for ContinuousKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContinuousKernel")
            .field("dim", &self.dim)
            .field("tag", &self.tag())
            .field("decay_radius", &self.decay_radius())
            .finish()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "kernel dimension must be 1 or 2, got {dim}"
        )));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

impl ContinuousKernel {
    pub fn tophat(dim: usize, half_width: f64) -> Result<Self> {
        check_dim(dim)?;
        check_positive("half_width", half_width)?;
        Ok(Self {
            dim,
            shape: Shape::Tophat { half_width },
        })
    }

    pub fn gaussian(dim: usize, sigma: f64) -> Result<Self> {
        check_dim(dim)?;
        check_positive("sigma", sigma)?;
        Ok(Self {
            dim,
            shape: Shape::Gaussian { sigma },
        })
    }

    pub fn exponential(dim: usize, scale: f64) -> Result<Self> {
        check_dim(dim)?;
        check_positive("scale", scale)?;
        Ok(Self {
            dim,
            shape: Shape::Exponential { scale },
        })
    }

    /// User-supplied kernel. `tail(r)` must bound the mass of `a` outside
    /// `|z|_inf < r` for every `r >= decay_radius`.
    pub fn custom<F, T>(dim: usize, eval: F, tail: T, decay_radius: f64) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        T: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_dim(dim)?;
        if !(decay_radius >= 0.0 && decay_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "decay_radius must be finite and nonnegative, got {decay_radius}"
            )));
        }
        Ok(Self {
            dim,
            shape: Shape::Custom {
                eval: Arc::new(eval),
                tail: Arc::new(tail),
                decay_radius,
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tag(&self) -> ContinuousTag {
        match self.shape {
            Shape::Tophat { .. } => ContinuousTag::Tophat,
            Shape::Gaussian { .. } => ContinuousTag::Gaussian,
            Shape::Exponential { .. } => ContinuousTag::Exponential,
            Shape::Custom { .. } => ContinuousTag::Custom,
        }
    }

    pub fn decay_radius(&self) -> f64 {
        match &self.shape {
            Shape::Tophat { half_width } => *half_width,
            Shape::Gaussian { .. } | Shape::Exponential { .. } => 0.0,
            Shape::Custom { decay_radius, .. } => *decay_radius,
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        debug_assert_eq!(z.len(), self.dim);
        match &self.shape {
            Shape::Tophat { half_width } => {
                let w = *half_width;
                if z.iter().all(|&c| -w <= c && c < w) {
                    (2.0 * w).powi(-(self.dim as i32))
                } else {
                    0.0
                }
            }
            Shape::Gaussian { sigma } => {
                let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
                z.iter()
                    .map(|&c| norm * (-0.5 * (c / sigma).powi(2)).exp())
                    .product()
            }
            Shape::Exponential { scale } => z
                .iter()
                .map(|&c| (-c.abs() / scale).exp() / (2.0 * scale))
                .product(),
            Shape::Custom { eval, .. } => eval(z),
        }
    }

    /// Upper bound on the mass of the kernel outside `|z|_inf < r`.
    pub fn tail_mass_beyond(&self, r: f64) -> f64 {
        let d = self.dim as f64;
        match &self.shape {
            Shape::Tophat { half_width } => {
                if r >= *half_width {
                    0.0
                } else {
                    1.0
                }
            }
            // Chernoff bound erfc(x) <= exp(-x^2) per axis, union over axes.
            Shape::Gaussian { sigma } => (d * (-(r * r) / (2.0 * sigma * sigma)).exp()).min(1.0),
            Shape::Exponential { scale } => (d * (-r / scale).exp()).min(1.0),
            Shape::Custom { tail, .. } => tail(r),
        }
    }
}

/// Where the samples of a torus convolution kernel came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WoundOrigin {
    Wound(ContinuousTag),
    /// Sampled directly from a 1-periodic function.
    Periodic,
    Tabulated,
}

/// Convolution kernel on the torus sampled at grid nodes.
#[derive(Debug, Clone)]
pub struct WoundKernel {
    grid: TorusGrid,
    samples: Vec<f64>,
    wind_truncation: usize,
    tail_estimate: f64,
    origin: WoundOrigin,
}

fn validate_samples(samples: &[f64]) -> Result<()> {
    for (index, &value) in samples.iter().enumerate() {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidSample { index, value });
        }
    }
    Ok(())
}

impl WoundKernel {
    pub fn from_samples(grid: TorusGrid, samples: Vec<f64>) -> Result<Self> {
        Self::build(grid, samples, 0, 0.0, WoundOrigin::Tabulated)
    }

    /// Samples a 1-periodic function at the grid nodes.
    pub fn from_periodic_fn<F: Fn(&[f64]) -> f64>(grid: TorusGrid, f: F) -> Result<Self> {
        let d = grid.dim();
        let samples = (0..grid.len()).map(|i| f(&grid.point(i)[..d])).collect();
        Self::build(grid, samples, 0, 0.0, WoundOrigin::Periodic)
    }

    pub fn constant(grid: TorusGrid, value: f64) -> Result<Self> {
        Self::from_periodic_fn(grid, |_| value)
    }

    /// `1 + amplitude * sin(2 pi (z_1 + ... + z_d))`, a non-symmetric kernel
    /// of unit mass for `|amplitude| <= 1`.
    pub fn sine(grid: TorusGrid, amplitude: f64) -> Result<Self> {
        Self::from_periodic_fn(grid, |z| {
            1.0 + amplitude * (2.0 * PI * z.iter().sum::<f64>()).sin()
        })
    }

    fn build(
        grid: TorusGrid,
        samples: Vec<f64>,
        wind_truncation: usize,
        tail_estimate: f64,
        origin: WoundOrigin,
    ) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: samples.len(),
            });
        }
        validate_samples(&samples)?;
        let k = Self {
            grid,
            samples,
            wind_truncation,
            tail_estimate,
            origin,
        };
        if !(k.mass() > 0.0) {
            return Err(Error::ZeroMass);
        }
        Ok(k)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn wind_truncation(&self) -> usize {
        self.wind_truncation
    }

    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    pub fn origin(&self) -> WoundOrigin {
        self.origin
    }

    /// Quadrature mass `h^d * sum_i a(z_i)`.
    pub fn mass(&self) -> f64 {
        self.grid.weight() * self.samples.iter().sum::<f64>()
    }
}

/// Winds `a` onto the torus: `a~(z_i) = sum_{|m|_inf <= N} a(z_i + m)`, with
/// `N` the smallest truncation whose omitted tail mass is at most `tail_tol`.
pub fn wind_kernel(a: &ContinuousKernel, grid: TorusGrid, tail_tol: f64) -> Result<WoundKernel> {
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tail_tol must be positive, got {tail_tol}"
        )));
    }
    if a.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: a.dim(),
        });
    }
    // For z in [0,1)^d the translates z + m with |m|_inf <= N cover the
    // closed cube |y|_inf <= N, so the omitted mass is the tail beyond N.
    let mut truncation = a.decay_radius().ceil() as usize;
    let mut tail = a.tail_mass_beyond(truncation as f64);
    while tail > tail_tol {
        truncation += 1;
        if truncation > MAX_WIND_TRUNCATION {
            return Err(Error::TailNotResolved {
                bound: tail,
                tol: tail_tol,
                cap: MAX_WIND_TRUNCATION,
            });
        }
        tail = a.tail_mass_beyond(truncation as f64);
    }

    let d = grid.dim();
    let span = 2 * truncation + 1;
    let shifts: Vec<[f64; MAX_DIM]> = (0..span.pow(d as u32))
        .map(|s| {
            let mut m = [0.0; MAX_DIM];
            let mut rest = s;
            for ax in (0..d).rev() {
                m[ax] = (rest % span) as f64 - truncation as f64;
                rest /= span;
            }
            m
        })
        .collect();

    let samples = (0..grid.len())
        .map(|i| {
            let z = grid.point(i);
            let mut acc = 0.0;
            let mut y = [0.0; MAX_DIM];
            for m in &shifts {
                for ax in 0..d {
                    y[ax] = z[ax] + m[ax];
                }
                acc += a.eval(&y[..d]);
            }
            acc
        })
        .collect();

    WoundKernel::build(grid, samples, truncation, tail, WoundOrigin::Wound(a.tag()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GenericTag {
    Constant,
    Separable,
    Convolution,
    ModulatedConvolution,
    Tabulated,
    Custom,
}

/// General nonnegative kernel `b(x_i, y_j)` on the torus grid.
#[derive(Debug, Clone)]
pub struct GenericKernel {
    grid: TorusGrid,
    /// Row-major `N x N`, `N = n^d`.
    samples: Vec<f64>,
    tag: GenericTag,
}

impl GenericKernel {
    pub fn from_samples(grid: TorusGrid, samples: Vec<f64>, tag: GenericTag) -> Result<Self> {
        let n = grid.len();
        if samples.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: samples.len(),
            });
        }
        validate_samples(&samples)?;
        if samples.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroMass);
        }
        Ok(Self { grid, samples, tag })
    }

    pub fn from_fn<F: Fn(&[f64], &[f64]) -> f64>(grid: TorusGrid, f: F) -> Result<Self> {
        Self::tabulate(grid, GenericTag::Custom, f)
    }

    fn tabulate<F: Fn(&[f64], &[f64]) -> f64>(
        grid: TorusGrid,
        tag: GenericTag,
        f: F,
    ) -> Result<Self> {
        let n = grid.len();
        let d = grid.dim();
        let points: Vec<_> = (0..n).map(|i| grid.point(i)).collect();
        let mut samples = Vec::with_capacity(n * n);
        for x in &points {
            for y in &points {
                samples.push(f(&x[..d], &y[..d]));
            }
        }
        Self::from_samples(grid, samples, tag)
    }

    pub fn constant(grid: TorusGrid, value: f64) -> Result<Self> {
        Self::tabulate(grid, GenericTag::Constant, |_, _| value)
    }

    /// `b(x, y) = f(x) g(y)`.
    pub fn separable<F, G>(grid: TorusGrid, f: F, g: G) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
        G: Fn(&[f64]) -> f64,
    {
        Self::tabulate(grid, GenericTag::Separable, |x, y| f(x) * g(y))
    }

    /// `b(x_i, y_j) = a~(x_i - y_j)` with the difference taken mod n.
    pub fn convolution(kernel: &WoundKernel) -> Self {
        let grid = *kernel.grid();
        let n = grid.len();
        let mut samples = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                samples.push(kernel.samples()[grid.difference_index(i, j)]);
            }
        }
        Self {
            grid,
            samples,
            tag: GenericTag::Convolution,
        }
    }

    /// `b(x, y) = a~(x - y) mu(x, y)` with a positive symmetric modulation.
    pub fn modulated<F: Fn(&[f64], &[f64]) -> f64>(kernel: &WoundKernel, mu: F) -> Result<Self> {
        let grid = *kernel.grid();
        let d = grid.dim();
        let n = grid.len();
        let mut samples = Vec::with_capacity(n * n);
        for i in 0..n {
            let x = grid.point(i);
            for j in 0..n {
                let y = grid.point(j);
                let m = mu(&x[..d], &y[..d]);
                if !(m > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "modulation must be positive, got {m} at ({i}, {j})"
                    )));
                }
                samples.push(kernel.samples()[grid.difference_index(i, j)] * m);
            }
        }
        Self::from_samples(grid, samples, GenericTag::ModulatedConvolution)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn tag(&self) -> GenericTag {
        self.tag
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.samples[i * self.grid.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.len();
        &self.samples[i * n..(i + 1) * n]
    }

    pub fn transpose(&self) -> Self {
        let n = self.grid.len();
        let mut samples = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                samples[j * n + i] = self.samples[i * n + j];
            }
        }
        Self {
            grid: self.grid,
            samples,
            tag: self.tag,
        }
    }
}

/// Sampled potential `V(x_i)`.
#[derive(Debug, Clone)]
pub struct Potential {
    grid: TorusGrid,
    samples: Vec<f64>,
}

impl Potential {
    /// Samples must be finite; the sign is checked by [`check_potential`].
    pub fn from_samples(grid: TorusGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: samples.len(),
            });
        }
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidSample { index, value });
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: TorusGrid, f: F) -> Result<Self> {
        let d = grid.dim();
        let samples = (0..grid.len()).map(|i| f(&grid.point(i)[..d])).collect();
        Self::from_samples(grid, samples)
    }

    pub fn constant(grid: TorusGrid, value: f64) -> Result<Self> {
        Self::from_fn(grid, |_| value)
    }

    /// `V = -depth` where the first coordinate is below `fraction`, else 0.
    pub fn step(grid: TorusGrid, depth: f64, fraction: f64) -> Result<Self> {
        Self::from_fn(grid, |x| if x[0] < fraction { -depth } else { 0.0 })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fraction_negative(&self) -> f64 {
        self.samples.iter().filter(|&&v| v < 0.0).count() as f64 / self.samples.len() as f64
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|v| v * t).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelStats {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// Smallest power of the quadrature matrix that is entrywise positive.
    pub n_prim: usize,
    /// Minimum of the iterated kernel at that power.
    pub beta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialDiagnostics {
    pub max_sample: f64,
    pub fraction_negative: f64,
    pub norm_l1: f64,
    pub norm_l2: f64,
    /// All samples nonpositive and at least one strictly negative.
    pub eligible: bool,
}

/// Row integrals `W(x_i) = h^d sum_j b(x_i, y_j)`, summed left to right.
pub fn jump_rate(b: &GenericKernel) -> Vec<f64> {
    let h = b.grid().weight();
    (0..b.grid().len())
        .map(|i| h * b.row(i).iter().sum::<f64>())
        .collect()
}

fn column_integrals(b: &GenericKernel) -> Vec<f64> {
    let n = b.grid().len();
    let h = b.grid().weight();
    let mut cols = vec![0.0; n];
    for i in 0..n {
        for (c, v) in cols.iter_mut().zip(b.row(i)) {
            *c += v;
        }
    }
    cols.iter_mut().for_each(|c| *c *= h);
    cols
}

/// Row/column integral bounds and the primitivity index of the kernel.
pub fn kernel_stats(b: &GenericKernel, n_max: usize) -> Result<KernelStats> {
    let w = jump_rate(b);
    let gamma1 = w.iter().copied().fold(f64::INFINITY, f64::min);
    let gamma2 = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let gamma3 = column_integrals(b)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    if !(gamma1 > 0.0) {
        return Err(Error::DegenerateKernel { gamma1 });
    }

    let n_prim = primitivity_index(b, n_max).ok_or(Error::NotPrimitive { n_max })?;

    let n = b.grid().len();
    let h = b.grid().weight();
    let p = DMatrix::from_row_slice(n, n, b.samples()) * h;
    let mut power = p.clone();
    for _ in 1..n_prim {
        power = &power * &p;
    }
    let beta = power.min() / h;

    Ok(KernelStats {
        gamma1,
        gamma2,
        gamma3,
        n_prim,
        beta,
    })
}

/// Smallest `k <= n_max` such that the support pattern of `B^k` is full.
fn primitivity_index(b: &GenericKernel, n_max: usize) -> Option<usize> {
    let n = b.grid().len();
    let words = n.div_ceil(64);
    let mut base = vec![0u64; n * words];
    for i in 0..n {
        for (j, &v) in b.row(i).iter().enumerate() {
            if v > 0.0 {
                base[i * words + j / 64] |= 1 << (j % 64);
            }
        }
    }
    let full = |pattern: &[u64]| {
        (0..n).all(|i| (0..n).all(|j| pattern[i * words + j / 64] & (1 << (j % 64)) != 0))
    };

    let mut current = base.clone();
    for k in 1..=n_max {
        if full(&current) {
            return Some(k);
        }
        let mut next = vec![0u64; n * words];
        for i in 0..n {
            let row = &mut next[i * words..(i + 1) * words];
            for j in 0..n {
                if current[i * words + j / 64] & (1 << (j % 64)) != 0 {
                    for (r, s) in row.iter_mut().zip(&base[j * words..(j + 1) * words]) {
                        *r |= s;
                    }
                }
            }
        }
        current = next;
    }
    None
}

/// Sign check and quadrature norms of the potential.
pub fn check_potential(v: &Potential) -> Result<PotentialDiagnostics> {
    if let Some((index, &value)) = v.samples().iter().enumerate().find(|(_, &x)| x > 0.0) {
        return Err(Error::PositivePotential { index, value });
    }
    let h = v.grid().weight();
    let max_sample = v.samples().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let fraction_negative = v.fraction_negative();
    let norm_l1 = h * v.samples().iter().map(|x| x.abs()).sum::<f64>();
    let norm_l2 = (h * v.samples().iter().map(|x| x * x).sum::<f64>()).sqrt();
    Ok(PotentialDiagnostics {
        max_sample,
        fraction_negative,
        norm_l1,
        norm_l2,
        eligible: fraction_negative > 0.0,
    })
}

/// Largest row mass carried by entries above `level`; a discrete stand-in
/// for the truncation remainder of the kernel.
pub fn tail_mass(b: &GenericKernel, level: f64) -> f64 {
    let h = b.grid().weight();
    (0..b.grid().len())
        .map(|i| h * b.row(i).iter().filter(|&&v| v > level).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::new(1, n).unwrap()
    }

    fn sine_kernel(n: usize) -> GenericKernel {
        GenericKernel::from_fn(grid(n), |x, y| 1.0 + 0.5 * (2.0 * PI * (x[0] - y[0])).sin()).unwrap()
    }

    #[test]
    fn tophat_winds_to_one() {
        for n in [3, 8, 17, 64] {
            let a = ContinuousKernel::tophat(1, 1.0).unwrap();
            let w = wind_kernel(&a, grid(n), 1e-12).unwrap();
            assert!(w.samples().iter().all(|&s| s == 1.0), "n = {n}");
            assert_eq!(w.tail_estimate(), 0.0);
        }
    }

    #[test]
    fn two_dimensional_tophat_winds_to_one() {
        let g = TorusGrid::new(2, 6).unwrap();
        let a = ContinuousKernel::tophat(2, 0.5).unwrap();
        let w = wind_kernel(&a, g, 1e-12).unwrap();
        assert!(w.samples().iter().all(|&s| s == 1.0));
    }

    #[test]
    fn gaussian_truncation_meets_tolerance() {
        let a = ContinuousKernel::gaussian(1, 0.2).unwrap();
        let w = wind_kernel(&a, grid(128), 1e-12).unwrap();
        assert!(w.tail_estimate() <= 1e-12);
        assert_eq!(w.wind_truncation(), 2);
        assert!((w.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slow_tail_is_rejected() {
        let a = ContinuousKernel::exponential(1, 10.0).unwrap();
        let err = wind_kernel(&a, grid(16), 1e-12).unwrap_err();
        assert!(matches!(err, Error::TailNotResolved { .. }));
    }

    #[test]
    fn zero_kernel_is_rejected() {
        let a = ContinuousKernel::custom(1, |_| 0.0, |_| 0.0, 1.0).unwrap();
        assert!(matches!(wind_kernel(&a, grid(8), 1e-9), Err(Error::ZeroMass)));
    }

    #[test]
    fn jump_rate_of_constant_kernel_is_one() {
        let b = GenericKernel::constant(grid(64), 1.0).unwrap();
        assert!(jump_rate(&b).iter().all(|&w| w == 1.0));

        let conv = GenericKernel::convolution(&WoundKernel::constant(grid(16), 1.0).unwrap());
        assert!(jump_rate(&conv).iter().all(|&w| w == 1.0));
    }

    #[test]
    fn separable_step_kernel_has_zero_rows() {
        let b = GenericKernel::separable(grid(8), |x| if x[0] < 0.5 { 2.0 } else { 0.0 }, |_| 1.0)
            .unwrap();
        let w = jump_rate(&b);
        assert_eq!(&w[..4], &[2.0; 4]);
        assert_eq!(&w[4..], &[0.0; 4]);
        assert!(matches!(kernel_stats(&b, 8), Err(Error::DegenerateKernel { .. })));
    }

    #[test]
    fn constant_kernel_stats() {
        let b = GenericKernel::constant(grid(64), 1.0).unwrap();
        let s = kernel_stats(&b, 8).unwrap();
        assert_eq!((s.gamma1, s.gamma2, s.gamma3), (1.0, 1.0, 1.0));
        assert_eq!(s.n_prim, 1);
        assert!((s.beta - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sine_kernel_rows_integrate_to_one() {
        let b = sine_kernel(64);
        // independent row quadrature with the sine summed separately
        let h = 1.0 / 64.0;
        for i in 0..64 {
            let x = i as f64 * h;
            let sine: f64 = (0..64)
                .map(|j| (2.0 * PI * (x - j as f64 * h)).sin())
                .sum();
            assert!((h * (64.0 + 0.5 * sine) - 1.0).abs() < 1e-14);
        }
        let s = kernel_stats(&b, 8).unwrap();
        assert!((s.gamma1 - 1.0).abs() < 1e-13);
        assert!((s.gamma2 - 1.0).abs() < 1e-13);
        assert_eq!(s.n_prim, 1);
    }

    #[test]
    fn block_kernel_is_not_primitive() {
        let b = GenericKernel::from_fn(grid(16), |x, y| {
            if x[0] < 0.5 && y[0] < 0.5 {
                1.0
            } else if x[0] >= 0.5 && y[0] >= 0.5 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert!(matches!(kernel_stats(&b, 16), Err(Error::NotPrimitive { .. })));
    }

    #[test]
    fn narrow_kernel_needs_several_iterations() {
        // nearest-neighbour band of width 3 on 16 nodes
        let g = grid(16);
        let k = WoundKernel::from_samples(
            g,
            (0..16)
                .map(|i| if i == 0 || i == 1 || i == 15 { 16.0 / 3.0 } else { 0.0 })
                .collect(),
        )
        .unwrap();
        let b = GenericKernel::convolution(&k);
        let s = kernel_stats(&b, 16).unwrap();
        assert_eq!(s.n_prim, 8);
        assert!(s.beta > 0.0);
    }

    #[test]
    fn transpose_swaps_row_and_column_stats() {
        let b = GenericKernel::from_fn(grid(32), |x, y| 1.0 + x[0] * (1.0 - y[0]) + y[0] * y[0])
            .unwrap();
        let s = kernel_stats(&b, 4).unwrap();
        let t = kernel_stats(&b.transpose(), 4).unwrap();
        assert!((s.gamma3 - t.gamma2).abs() < 1e-14);
        assert!((t.gamma3 - s.gamma2).abs() < 1e-14);
    }

    #[test]
    fn potential_diagnostics() {
        let v = Potential::constant(grid(16), -0.3).unwrap();
        let d = check_potential(&v).unwrap();
        assert!(d.eligible);
        assert!((d.norm_l1 - 0.3).abs() < 1e-15);
        assert_eq!(d.fraction_negative, 1.0);

        let zero = Potential::constant(grid(16), 0.0).unwrap();
        assert!(!check_potential(&zero).unwrap().eligible);

        let step = Potential::step(grid(16), 1.0, 0.5).unwrap();
        let d = check_potential(&step).unwrap();
        assert_eq!(d.norm_l1, 0.5);
        assert!((d.norm_l2 - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.fraction_negative, 0.5);

        let pos = Potential::constant(grid(4), 0.3).unwrap();
        assert!(matches!(check_potential(&pos), Err(Error::PositivePotential { .. })));
    }

    #[test]
    fn tail_mass_levels() {
        let b = GenericKernel::constant(grid(16), 1.0).unwrap();
        assert_eq!(tail_mass(&b, 2.0), 0.0);
        assert_eq!(tail_mass(&b, 0.5), 1.0);

        let s = sine_kernel(64);
        let h = 1.0 / 64.0;
        let brute = (0..64)
            .map(|i| {
                (0..64)
                    .map(|j| 1.0 + 0.5 * (2.0 * PI * (i as f64 - j as f64) * h).sin())
                    .filter(|&v| v > 1.25)
                    .sum::<f64>()
                    * h
            })
            .fold(0.0, f64::max);
        assert!((tail_mass(&s, 1.25) - brute).abs() < 1e-14);

        let mut prev = f64::INFINITY;
        for k in 0..40 {
            let t = tail_mass(&s, 0.05 * k as f64);
            assert!(t <= prev);
            prev = t;
        }
    }
}
