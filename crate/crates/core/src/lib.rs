//! Spectral analysis of non-local convolution-type operators with periodic
//! nonpositive potentials on the torus.
//!
//! The generator
//!
//! ```text
//! M u(x) = ∫ b(x, y) (u(y) - u(x)) dy + V(x) u(x),   x ∈ T^d
//! ```
//!
//! is discretized by a Nyström rule on a uniform grid. Its maximum
//! eigenvalue is located by three independent routes (dense QR, shifted
//! Perron iteration and bisection on the spectral radius of the fixed-point
//! operator `Q_mu`), and compared with an explicit bound on the gap below
//! zero. The density evolution `du/dt = M u` can be integrated to observe
//! the decay.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod config;
pub mod discretize;
pub mod eigen;
pub mod error;
pub mod evolution;
pub mod fixtures;
pub mod gapbound;
pub mod grid;
pub mod io;
pub mod kernels;
pub mod report;
pub mod spectral;

pub use error::{Error, ErrorClass, Result};
pub use grid::TorusGrid;
