use super::{Interval, NumericsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Symmetric,
    /// stencil on [x - k h, x]
    Left,
    /// stencil on [x, x + k h]
    Right,
}

// central: offsets in units of h and weights, all O(h^2)
const C1: &[(f64, f64)] = &[(-1.0, -0.5), (1.0, 0.5)];
const C2: &[(f64, f64)] = &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)];
const C3: &[(f64, f64)] = &[(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)];
// forward, second order accurate
const F1: &[(f64, f64)] = &[(0.0, -1.5), (1.0, 2.0), (2.0, -0.5)];
const F2: &[(f64, f64)] = &[(0.0, 2.0), (1.0, -5.0), (2.0, 4.0), (3.0, -1.0)];
const F3: &[(f64, f64)] = &[(0.0, -2.5), (1.0, 9.0), (2.0, -12.0), (3.0, 7.0), (4.0, -1.5)];

fn stencil(order: u8, side: Side) -> Result<&'static [(f64, f64)]> {
    Ok(match (order, side) {
        (1, Side::Symmetric) => C1,
        (2, Side::Symmetric) => C2,
        (3, Side::Symmetric) => C3,
        (1, _) => F1,
        (2, _) => F2,
        (3, _) => F3,
        (o, _) => return Err(NumericsError::UnsupportedOrder(o)),
    })
}

fn raw<F: Fn(f64) -> f64>(f: &F, x: f64, order: u8, h: f64, side: Side, st: &[(f64, f64)]) -> f64 {
    // a left stencil is the right one run with -h
    let hs = if side == Side::Left { -h } else { h };
    let s: f64 = st.iter().map(|&(k, w)| w * f(x + k * hs)).sum();
    s / hs.powi(order as i32)
}

/// Finite-difference derivative of order 1..=3 with one Richardson step
/// (h and h/2, leading error O(h^2) eliminated).
pub fn fd_derivative<F>(f: F, x: f64, order: u8, h: f64, side: Side) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    fd_derivative_in(f, x, order, h, side, None)
}

/// As [`fd_derivative`], but fails with `StencilOutOfDomain` when the
/// stencil would leave `domain`.
pub fn fd_derivative_in<F>(f: F, x: f64, order: u8, h: f64, side: Side, domain: Option<Interval>) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let st = stencil(order, side)?;
    let kmin = st.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let kmax = st.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = match side {
        Side::Left => (x - kmax * h, x - kmin * h),
        _ => (x + kmin * h, x + kmax * h),
    };
    if let Some(d) = domain {
        if lo < d.lo || hi > d.hi {
            return Err(NumericsError::StencilOutOfDomain { lo, hi });
        }
    }
    let d1 = raw(&f, x, order, h, side, st);
    let d2 = raw(&f, x, order, 0.5 * h, side, st);
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Finite-difference weights for the derivatives of order 0..=m at `x0`
/// from values at the nodes `xs` (Fornberg's recursion). Row k holds the
/// weights of the k-th derivative.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// High-order one-sided (or central) derivative from `npts` equispaced
/// samples, no extrapolation. Used where the stencil must not cross a
/// point (a gluing point) and second-order stencils are too coarse.
pub fn fd_stencil_derivative<F>(f: F, x: f64, order: u8, h: f64, side: Side, npts: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if order == 0 || order as usize >= npts {
        return Err(NumericsError::UnsupportedOrder(order));
    }
    let offs: Vec<f64> = match side {
        Side::Right => (0..npts).map(|k| k as f64).collect(),
        Side::Left => (0..npts).map(|k| -(k as f64)).collect(),
        Side::Symmetric => {
            let half = (npts / 2) as f64;
            (0..npts).map(|k| k as f64 - half).collect()
        }
    };
    let w = fornberg_weights(0.0, &offs, order as usize);
    let s: f64 = offs.iter().zip(&w[order as usize]).map(|(k, w)| w * f(x + k * h)).sum();
    Ok(s / h.powi(order as i32))
}
