//! Uniform grids on the unit torus.
//!
//! Nodes sit at left endpoints `i/n` along every axis and carry the
//! quadrature weight `h^d = n^{-d}`. Multi-indices are flattened row-major
//! with the first axis slowest.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Largest supported dimension.
pub const MAX_DIM: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid resolution must be at least 2, got {n}"
            )));
        }
        Ok(Self { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Per-axis resolution.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total node count `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `h^d`.
    pub fn weight(&self) -> f64 {
        (self.n as f64).powi(-(self.dim as i32))
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Per-axis integer coordinates of a flat index. Unused axes are zero.
    pub fn multi_index(&self, idx: usize) -> [usize; MAX_DIM] {
        match self.dim {
            1 => [idx, 0],
            _ => [idx / self.n, idx % self.n],
        }
    }

    pub fn flat_index(&self, multi: [usize; MAX_DIM]) -> usize {
        match self.dim {
            1 => multi[0],
            _ => multi[0] * self.n + multi[1],
        }
    }

    /// Node coordinates in `[0,1)^d`; entries beyond `dim` are zero.
    pub fn point(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(idx);
        let h = self.spacing();
        let mut p = [0.0; MAX_DIM];
        for a in 0..self.dim {
            p[a] = m[a] as f64 * h;
        }
        p
    }

    /// Flat index of the torus difference `x_i - x_j`, computed in index
    /// arithmetic mod n.
    pub fn difference_index(&self, i: usize, j: usize) -> usize {
        let (a, b) = (self.multi_index(i), self.multi_index(j));
        let mut d = [0; MAX_DIM];
        for ax in 0..self.dim {
            d[ax] = (a[ax] + self.n - b[ax]) % self.n;
        }
        self.flat_index(d)
    }

    /// Flat index of the node nearest to the given coordinates, if they sit
    /// on the grid within `tol` (coordinates are taken mod 1).
    pub fn locate(&self, coords: &[f64], tol: f64) -> Option<usize> {
        if coords.len() != self.dim {
            return None;
        }
        let mut m = [0; MAX_DIM];
        for (a, &c) in coords.iter().enumerate() {
            let scaled = c.rem_euclid(1.0) * self.n as f64;
            let k = scaled.round();
            if (scaled - k).abs() > tol * self.n as f64 {
                return None;
            }
            m[a] = (k as usize) % self.n;
        }
        Some(self.flat_index(m))
    }

    pub fn ensure_same(&self, other: &TorusGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for TorusGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "T^{} with n = {}", self.dim, self.n)
    }
}
