//! Eigenvalue machinery: Perron power iteration with Collatz-Wielandt
//! certificates, a dense nonsymmetric eigen-solver, and the operator
//! 2-norm.

mod dense;
mod perron;

pub use dense::{
    eigen_decomposition, full_spectrum, full_spectrum_capped, sort_spectrum, EigenDecomposition,
    DEFAULT_ORDER_CAP,
};
pub use perron::{
    adjoint_perron, collatz_wielandt_bounds, operator_norm_2, perron, perron_from, positive_start,
    PerronOptions, PerronResult, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
