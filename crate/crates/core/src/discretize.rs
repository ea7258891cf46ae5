//! Nyström matrices on the torus grid and the Fourier symbol of
//! convolution kernels.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{TorusGrid, MAX_DIM};
use crate::kernels::{jump_rate, GenericKernel, Potential, WoundKernel};

/// Minimal distance of `mu` above `-alpha1` accepted by [`assemble_q`].
pub const Q_EDGE_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Role {
    M,
    L,
    B,
    Q,
    /// Adjoint-side operator `D^{-1} B^T` of the Q family.
    QAdjoint,
    Custom,
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    matrix: DMatrix<f64>,
    role: Role,
    grid: TorusGrid,
    shift: f64,
}

impl OperatorMatrix {
    pub fn new(matrix: DMatrix<f64>, role: Role, grid: TorusGrid) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: matrix.nrows(),
            });
        }
        Ok(Self {
            matrix,
            role,
            grid,
            shift: 0.0,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Spectral parameter this matrix was built with (`mu` for Q, `k` for a
    /// shifted generator), zero otherwise.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn order(&self) -> usize {
        self.matrix.nrows()
    }

    /// `self + k I`, tagged as a custom operator.
    pub fn shifted(&self, k: f64) -> Self {
        let mut matrix = self.matrix.clone();
        for i in 0..matrix.nrows() {
            matrix[(i, i)] += k;
        }
        Self {
            matrix,
            role: Role::Custom,
            grid: self.grid,
            shift: k,
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
            role: self.role,
            grid: self.grid,
            shift: self.shift,
        }
    }

    /// Row-major CSV dump with full double precision.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for i in 0..self.order() {
            let row: Vec<String> = (0..self.order())
                .map(|j| format!("{:.16e}", self.matrix[(i, j)]))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// `h^d b(x_i, y_j)`, the discretized integral operator.
pub fn assemble_b(b: &GenericKernel) -> OperatorMatrix {
    let grid = *b.grid();
    let n = grid.len();
    let h = grid.weight();
    let matrix = DMatrix::from_fn(n, n, |i, j| h * b.get(i, j));
    OperatorMatrix {
        matrix,
        role: Role::B,
        grid,
        shift: 0.0,
    }
}

/// Generator `B + diag(V - W)`. The diagonal is stored as `V_i` minus the
/// off-diagonal row sum in the order [`apply`] uses, which equals
/// `h^d b_ii + V_i - W_i` and makes `M 1 = 0` exact when `V = 0`.
pub fn assemble_m(b: &GenericKernel, v: &Potential, grid: &TorusGrid) -> Result<OperatorMatrix> {
    grid.ensure_same(b.grid())?;
    grid.ensure_same(v.grid())?;
    let mut op = assemble_b(b);
    let n = grid.len();
    for (i, vi) in v.samples().iter().enumerate() {
        let mut off = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            off += op.matrix[(i, j)];
        }
        op.matrix[(i, i)] = vi - off;
    }
    op.role = Role::M;
    Ok(op)
}

/// Convolution generator with kernel `a~(x - y)`; the B part is circulant.
pub fn assemble_l(a: &WoundKernel, v: &Potential, grid: &TorusGrid) -> Result<OperatorMatrix> {
    grid.ensure_same(a.grid())?;
    let mut op = assemble_m(&GenericKernel::convolution(a), v, grid)?;
    op.role = Role::L;
    Ok(op)
}

/// The fixed-point family of the eigen-problem: `Q_mu = D_mu^{-1} B` with
/// `D_mu = diag(U + W + mu)`, `U = -V`. Holds the pieces that do not depend
/// on `mu`.
#[derive(Debug, Clone)]
pub struct QFamily {
    b: DMatrix<f64>,
    /// `U + W` per node.
    base: Vec<f64>,
    grid: TorusGrid,
}

impl QFamily {
    pub fn new(b: &GenericKernel, v: &Potential, grid: &TorusGrid) -> Result<Self> {
        grid.ensure_same(b.grid())?;
        grid.ensure_same(v.grid())?;
        let w = jump_rate(b);
        let base = w.iter().zip(v.samples()).map(|(w, v)| w - v).collect();
        Ok(Self {
            b: assemble_b(b).matrix,
            base,
            grid: *grid,
        })
    }

    /// `alpha1 = min (U + W)`.
    pub fn alpha1(&self) -> f64 {
        self.base.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn alpha0(&self) -> f64 {
        self.base.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn check_mu(&self, mu: f64) -> Result<()> {
        let edge = -self.alpha1();
        if !(mu > edge + Q_EDGE_MARGIN) {
            return Err(Error::MuBelowEdge { mu, edge });
        }
        Ok(())
    }

    pub fn at(&self, mu: f64) -> Result<OperatorMatrix> {
        self.check_mu(mu)?;
        let mut matrix = self.b.clone();
        for (i, mut row) in matrix.row_iter_mut().enumerate() {
            row /= self.base[i] + mu;
        }
        Ok(OperatorMatrix {
            matrix,
            role: Role::Q,
            grid: self.grid,
            shift: mu,
        })
    }

    /// `D_mu^{-1} B^T`, whose unit fixed point is the adjoint ground state.
    pub fn adjoint_at(&self, mu: f64) -> Result<OperatorMatrix> {
        self.check_mu(mu)?;
        let mut matrix = self.b.transpose();
        for (i, mut row) in matrix.row_iter_mut().enumerate() {
            row /= self.base[i] + mu;
        }
        Ok(OperatorMatrix {
            matrix,
            role: Role::QAdjoint,
            grid: self.grid,
            shift: mu,
        })
    }
}

pub fn assemble_q(
    b: &GenericKernel,
    v: &Potential,
    mu: f64,
    grid: &TorusGrid,
) -> Result<OperatorMatrix> {
    QFamily::new(b, v, grid)?.at(mu)
}

/// Matrix-vector product with a fixed reduction order per row: off-diagonal
/// terms left to right, then the diagonal term.
pub fn apply(op: &OperatorMatrix, u: &[f64]) -> Result<Vec<f64>> {
    matvec(op.matrix(), u)
}

pub(crate) fn matvec(m: &DMatrix<f64>, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != m.ncols() || !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.ncols(),
            found: u.len(),
        });
    }
    let n = m.nrows();
    let mut out = vec![0.0; n];
    // column-major storage: accumulate column by column
    for (j, &uj) in u.iter().enumerate() {
        let col = m.column(j);
        let col = col.as_slice();
        for (o, &c) in out[..j].iter_mut().zip(&col[..j]) {
            *o += c * uj;
        }
        for (o, &c) in out[j + 1..].iter_mut().zip(&col[j + 1..]) {
            *o += c * uj;
        }
    }
    for (i, o) in out.iter_mut().enumerate() {
        *o += m[(i, i)] * u[i];
    }
    Ok(out)
}

/// Fourier coefficients `a_k = h^d sum_i a~(z_i) exp(-2 pi i k.z_i)`.
#[derive(Debug, Clone)]
pub struct FourierSymbol {
    grid: TorusGrid,
    /// Stored in FFT index order.
    coeffs: Vec<Complex64>,
}

impl FourierSymbol {
    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Signed wavevector of a flat FFT index; entries beyond `dim` are zero.
    pub fn wavevector(&self, idx: usize) -> [i64; MAX_DIM] {
        let n = self.grid.n() as i64;
        let m = self.grid.multi_index(idx);
        let mut k = [0i64; MAX_DIM];
        for a in 0..self.grid.dim() {
            let v = m[a] as i64;
            k[a] = if 2 * v < n { v } else { v - n };
        }
        k
    }

    /// Coefficient for wavevector `k`, indices taken mod n.
    pub fn get(&self, k: &[i64]) -> Complex64 {
        let n = self.grid.n() as i64;
        let mut m = [0usize; MAX_DIM];
        for (a, &ka) in k.iter().enumerate().take(self.grid.dim()) {
            m[a] = ka.rem_euclid(n) as usize;
        }
        self.coeffs[self.grid.flat_index(m)]
    }

    /// All coefficients in FFT index order (these are the eigenvalues of the
    /// circulant B part).
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Wavevectors and coefficients resolved by the grid: `|k_j| < n/2`.
    pub fn band(&self) -> impl Iterator<Item = ([i64; MAX_DIM], Complex64)> + '_ {
        let half = self.grid.n() as i64;
        (0..self.coeffs.len())
            .map(move |i| (self.wavevector(i), self.coeffs[i]))
            .filter(move |(k, _)| k.iter().all(|&c| 2 * c.abs() < half))
    }

    /// `max |a_k|` over the resolved band without `k = 0`.
    pub fn max_nonzero_modulus(&self) -> f64 {
        self.band()
            .filter(|(k, _)| k.iter().any(|&c| c != 0))
            .map(|(_, a)| a.norm())
            .fold(0.0, f64::max)
    }
}

pub fn fourier_symbol(a: &WoundKernel) -> FourierSymbol {
    let grid = *a.grid();
    let n = grid.n();
    let mut data: Vec<Complex64> = a.samples().iter().map(|&s| Complex64::new(s, 0.0)).collect();
    let fft = FftPlanner::new().plan_fft_forward(n);
    // rows (last axis) are contiguous
    for chunk in data.chunks_mut(n) {
        fft.process(chunk);
    }
    if grid.dim() == 2 {
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        for c in 0..n {
            for r in 0..n {
                column[r] = data[r * n + c];
            }
            fft.process(&mut column);
            for r in 0..n {
                data[r * n + c] = column[r];
            }
        }
    }
    let h = grid.weight();
    data.iter_mut().for_each(|z| *z *= h);
    // a_0 is real by construction
    data[0] = Complex64::new(a.mass(), 0.0);
    FourierSymbol { grid, coeffs: data }
}
