//! Pointwise differential geometry from grid values only.

use super::grid::ImmersionGrid;
use super::{Result, VerifyError};
use crate::models::MinkowskiVec;

// sixth-order central stencils
const D1: [f64; 7] = [-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0];
const D1_DEN: f64 = 60.0;
const D2: [f64; 7] = [2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0];
const D2_DEN: f64 = 180.0;

pub(crate) const B_FORMS: usize = 3;
pub(crate) const B_GRAD: usize = 6;
pub(crate) const B_FRAME: usize = 9;

/// Below this |grad f| a point counts as CMC-like and is excluded.
pub const GRAD_F_MIN: f64 = 1e-6;

pub(crate) trait Lin: Copy {
    fn zero() -> Self;
    fn axpy(self, w: f64, x: Self) -> Self;
}

impl Lin for f64 {
    fn zero() -> Self {
        0.0
    }
    fn axpy(self, w: f64, x: Self) -> Self {
        self + w * x
    }
}

impl Lin for MinkowskiVec {
    fn zero() -> Self {
        MinkowskiVec::ZERO
    }
    fn axpy(self, w: f64, x: Self) -> Self {
        self + w * x
    }
}

fn stencil<T: Lin>(w: &[f64; 7], den: f64, f: impl Fn(isize) -> T) -> T {
    let mut acc = T::zero();
    for (k, c) in w.iter().enumerate() {
        if *c != 0.0 {
            acc = acc.axpy(*c / den, f(k as isize - 3));
        }
    }
    acc
}

/// ∂_a and ∂_v of a field known on a band, at (i, j).
pub(crate) fn d1<T: Lin>(g: &ImmersionGrid, i: usize, j: usize, f: impl Fn(usize, usize) -> T) -> (T, T) {
    let da = stencil(&D1, D1_DEN * g.ha, |k| f((i as isize + k) as usize, j));
    let dv = stencil(&D1, D1_DEN * g.hv, |k| f(i, (j as isize + k) as usize));
    (da, dv)
}

/// Euclidean vector orthogonal to a, b, c (cofactor expansion).
fn cross3(a: &MinkowskiVec, b: &MinkowskiVec, c: &MinkowskiVec) -> [f64; 4] {
    let m = [a.0, b.0, c.0];
    let det3 = |cols: [usize; 3]| {
        let e = |r: usize, k: usize| m[r][cols[k]];
        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
    };
    [
        -det3([1, 2, 3]),
        det3([0, 2, 3]),
        -det3([0, 1, 3]),
        det3([0, 1, 2]),
    ]
}

/// Unit spacelike vector Minkowski-orthogonal to x, xa, xv (unoriented).
pub fn minkowski_normal(x: &MinkowskiVec, xa: &MinkowskiVec, xv: &MinkowskiVec) -> Option<MinkowskiVec> {
    let n = cross3(x, xa, xv);
    // lower the index: <G n, y> = n . y
    let eta = MinkowskiVec::new(n[0], n[1], n[2], -n[3]);
    let q = eta.norm_sq();
    if !(q > 0.0) || !q.is_finite() {
        return None;
    }
    Some((1.0 / q.sqrt()) * eta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    pub position: MinkowskiVec,
    pub xa: MinkowskiVec,
    pub xv: MinkowskiVec,
    /// E, F, G
    pub first: [f64; 3],
    /// L, M, N with respect to `normal`
    pub second: [f64; 3],
    /// A = I⁻¹ II, row-major in (a, v) coordinates
    pub shape: [[f64; 2]; 2],
    /// f = trace A, made non-negative by the choice of normal
    pub mean: f64,
    /// K = det A − 1
    pub gauss: f64,
    pub normal: MinkowskiVec,
    /// max of |<η,η> − 1|, |<η,X>|, |<η,X_a>|/|X_a|, |<η,X_v>|/|X_v|
    pub normal_defect: f64,
    /// <D_T T, D_T T> for the unit tangent T of the v-curve
    pub w: f64,
    /// √|w|
    pub kappa2: f64,
}

impl FundamentalForms {
    pub fn metric_det(&self) -> f64 {
        self.first[0] * self.first[2] - self.first[1] * self.first[1]
    }

    pub fn inverse_metric(&self) -> [f64; 3] {
        let d = self.metric_det();
        [self.first[2] / d, -self.first[1] / d, self.first[0] / d]
    }
}

/// Forms at an interior node from the 7-point stencils of the grid values.
pub fn fundamental_forms(grid: &ImmersionGrid, i: usize, j: usize) -> Result<FundamentalForms> {
    if !grid.in_band(i, j, B_FORMS) {
        return Err(VerifyError::NotInterior { i, j });
    }
    let p = |a: usize, b: usize| grid.point(a, b);
    let x = p(i, j);
    let (xa, xv) = d1(grid, i, j, p);
    let xaa = stencil(&D2, D2_DEN * grid.ha * grid.ha, |k| p((i as isize + k) as usize, j));
    let xvv = stencil(&D2, D2_DEN * grid.hv * grid.hv, |k| p(i, (j as isize + k) as usize));
    let xav = stencil(&D1, D1_DEN * grid.ha, |k| {
        let a = (i as isize + k) as usize;
        stencil(&D1, D1_DEN * grid.hv, |l| p(a, (j as isize + l) as usize))
    });

    let e = xa.inner(&xa);
    let f = xa.inner(&xv);
    let g = xv.inner(&xv);
    let det = e * g - f * f;
    if !(e > 0.0 && det > 0.0) {
        return Err(VerifyError::DegenerateMetric { i, j, det });
    }
    let mut eta = minkowski_normal(&x, &xa, &xv).ok_or(VerifyError::NormalUndefined { i, j })?;
    let mut l = xaa.inner(&eta);
    let mut m = xav.inner(&eta);
    let mut n = xvv.inner(&eta);
    let inv = [g / det, -f / det, e / det];
    let mut trace = inv[0] * l + 2.0 * inv[1] * m + inv[2] * n;
    if trace < 0.0 {
        eta = -eta;
        l = -l;
        m = -m;
        n = -n;
        trace = -trace;
    }
    let shape = [
        [inv[0] * l + inv[1] * m, inv[0] * m + inv[1] * n],
        [inv[1] * l + inv[2] * m, inv[1] * m + inv[2] * n],
    ];
    let det_a = shape[0][0] * shape[1][1] - shape[0][1] * shape[1][0];
    let normal_defect = (eta.norm_sq() - 1.0)
        .abs()
        .max(eta.inner(&x).abs())
        .max(eta.inner(&xa).abs() / e.sqrt())
        .max(eta.inner(&xv).abs() / g.sqrt());

    // curvature vector of the v-curve in R⁴₁
    let dtt = (1.0 / g) * xvv + (-xvv.inner(&xv) / (g * g)) * xv;
    let w = dtt.inner(&dtt);

    Ok(FundamentalForms {
        position: x,
        xa,
        xv,
        first: [e, f, g],
        second: [l, m, n],
        shape,
        mean: trace,
        gauss: det_a - 1.0,
        normal: eta,
        normal_defect,
        w,
        kappa2: w.abs().sqrt(),
    })
}

/// First-order data built on the forms: grad f and the adapted frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradData {
    /// (∂_a f, ∂_v f)
    pub df: [f64; 2],
    /// coordinates of grad f
    pub grad: [f64; 2],
    pub grad_norm: f64,
    /// X₁ = grad f/|grad f| and its oriented unit complement X₂, both as
    /// coordinate pairs and as ambient vectors
    pub x1c: [f64; 2],
    pub x2c: [f64; 2],
    pub x1: MinkowskiVec,
    pub x2: MinkowskiVec,
    /// Ñ₂ = (3X₁f/4f)X₁ + (3f/2)η + x̄
    pub n2: MinkowskiVec,
    /// √det g · g^{ij}∂_j f
    pub flux: [f64; 2],
}

/// All nodewise quantities for a grid, indexed like the grid.
pub struct GridAnalysis<'g> {
    pub grid: &'g ImmersionGrid,
    pub forms: Vec<Option<FundamentalForms>>,
    pub grads: Vec<Option<GradData>>,
}

impl<'g> GridAnalysis<'g> {
    pub fn new(grid: &'g ImmersionGrid) -> Result<Self> {
        let nv = grid.nv;
        let mut forms = vec![None; grid.len()];
        for i in 0..grid.na {
            for j in 0..nv {
                if grid.in_band(i, j, B_FORMS) {
                    forms[i * nv + j] = Some(fundamental_forms(grid, i, j)?);
                }
            }
        }
        let mean = |a: usize, b: usize| forms[a * nv + b].as_ref().map(|f| f.mean).unwrap_or(f64::NAN);
        let mut grads = vec![None; grid.len()];
        for i in 0..grid.na {
            for j in 0..nv {
                if !grid.in_band(i, j, B_GRAD) {
                    continue;
                }
                let ff = forms[i * nv + j].as_ref().expect("band");
                let (fa, fv) = d1(grid, i, j, mean);
                let inv = ff.inverse_metric();
                let grad = [inv[0] * fa + inv[1] * fv, inv[1] * fa + inv[2] * fv];
                let gn = (fa * grad[0] + fv * grad[1]).max(0.0).sqrt();
                let (x1c, x2c) = if gn > 0.0 {
                    let x1c = [grad[0] / gn, grad[1] / gn];
                    // rotate by +90° in the metric: X₂ = J X₁ with
                    // J = (1/√det)[[−F, −G], [E, F]]
                    let s = ff.metric_det().sqrt();
                    let [e, f, g] = ff.first;
                    let x2c = [(-f * x1c[0] - g * x1c[1]) / s, (e * x1c[0] + f * x1c[1]) / s];
                    (x1c, x2c)
                } else {
                    ([f64::NAN; 2], [f64::NAN; 2])
                };
                let amb = |c: [f64; 2]| c[0] * ff.xa + c[1] * ff.xv;
                let x1 = amb(x1c);
                let x2 = amb(x2c);
                let fm = ff.mean;
                let n2 = (3.0 * gn / (4.0 * fm)) * x1 + (1.5 * fm) * ff.normal + ff.position;
                let s = ff.metric_det().sqrt();
                grads[i * nv + j] = Some(GradData {
                    df: [fa, fv],
                    grad,
                    grad_norm: gn,
                    x1c,
                    x2c,
                    x1,
                    x2,
                    n2,
                    flux: [s * grad[0], s * grad[1]],
                });
            }
        }
        Ok(GridAnalysis { grid, forms, grads })
    }

    pub fn form(&self, i: usize, j: usize) -> Option<&FundamentalForms> {
        self.forms[i * self.grid.nv + j].as_ref()
    }

    pub fn grad(&self, i: usize, j: usize) -> Option<&GradData> {
        self.grads[i * self.grid.nv + j].as_ref()
    }

    /// Derivative of a band-6 field along the coordinate direction c at a
    /// band-9 node.
    pub(crate) fn along<T: Lin>(&self, i: usize, j: usize, c: [f64; 2], f: impl Fn(&GradData) -> T) -> T {
        let get = |a: usize, b: usize| f(self.grad(a, b).expect("band"));
        let (da, dv) = d1(self.grid, i, j, get);
        T::zero().axpy(c[0], da).axpy(c[1], dv)
    }

    /// Laplace-Beltrami of f (div grad) at a band-9 node.
    pub fn laplacian(&self, i: usize, j: usize) -> f64 {
        let (fa, _) = d1(self.grid, i, j, |a, b| self.grad(a, b).expect("band").flux[0]);
        let (_, fv) = d1(self.grid, i, j, |a, b| self.grad(a, b).expect("band").flux[1]);
        let s = self.form(i, j).expect("band").metric_det().sqrt();
        (fa + fv) / s
    }
}
