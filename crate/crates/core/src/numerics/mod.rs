//! Scalar numeric kernels shared by the geometry modules.
//!
//! Everything here is a pure function of its inputs (or an immutable table
//! built once), so all of it is safe to call from any number of threads.

mod diff;
mod invert;
mod poly;
mod quad;
mod roots;

pub use diff::{fd_derivative, fd_derivative_in, fd_stencil_derivative, fornberg_weights, Side};
pub use invert::{invert_monotone, MonotoneTable};
pub use poly::Poly;
pub use quad::{
    gauss_legendre, integrate_adaptive, integrate_singular, integrate_tanh_sinh, PanelIntegral,
    QuadratureSpec,
};
pub use roots::{find_bracketed_root, RootBracket};

use thiserror::Error;

/// Root bracket width used by every root solve in the crate.
pub const ROOT_TOL: f64 = 1e-12;
/// Default absolute quadrature tolerance.
pub const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("quadrature tolerance {tol:e} not met (error estimate {estimate:e})")]
    ToleranceNotMet { tol: f64, estimate: f64 },
    #[error("endpoint exponent {exponent} makes the integral divergent")]
    DivergentIntegrand { exponent: f64 },
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(&'static str),
    #[error("target value {y} outside the range [{lo}, {hi}]")]
    OutOfRange { y: f64, lo: f64, hi: f64 },
    #[error("finite-difference stencil [{lo}, {hi}] leaves the domain")]
    StencilOutOfDomain { lo: f64, hi: f64 },
    #[error("unsupported derivative order {0}")]
    UnsupportedOrder(u8),
    #[error("table data must be strictly monotone")]
    NotMonotone,
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// `n` points on `[lo, hi]` with Chebyshev–Lobatto spacing (clustered at both ends).
pub fn chebyshev_lobatto(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let c = (std::f64::consts::PI * i as f64 / m).cos();
            0.5 * (lo + hi) - 0.5 * (hi - lo) * c
        })
        .collect()
}
