//! Minkowski space R⁴₁, the hyperboloid model of H³, the upper half-space
//! model, and the standard diffeomorphism between the last two.

mod frame;

pub use frame::{CaseFrame, CaseTag};

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use thiserror::Error;

/// Tolerance on ⟨x,x⟩ + 1 for points produced anywhere in the crate.
pub const HYPERBOLOID_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("x1 + x4 = {0:e} is too small to map to the half space")]
    DenominatorUnderflow(f64),
    #[error("half-space height {0} is not positive")]
    NonPositiveHeight(f64),
    #[error("point is off the hyperboloid: <x,x> + 1 = {residual:e}, x4 = {x4}")]
    NotOnHyperboloid { residual: f64, x4: f64 },
    #[error("direction is not tangent: <x,t> = {0:e}")]
    NotTangent(f64),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// A vector of R⁴₁ in coordinates (x1, x2, x3, x4); x4 is timelike.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MinkowskiVec(pub [f64; 4]);

impl MinkowskiVec {
    pub const ZERO: MinkowskiVec = MinkowskiVec([0.0; 4]);

    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        MinkowskiVec([x1, x2, x3, x4])
    }

    /// Standard basis vector e_i, i in 1..=4.
    pub fn e(i: usize) -> Self {
        let mut v = [0.0; 4];
        v[i - 1] = 1.0;
        MinkowskiVec(v)
    }

    pub fn inner(&self, other: &MinkowskiVec) -> f64 {
        minkowski_inner(self, other)
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    /// Plain Euclidean max-norm of the coordinates, for residual scaling.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Index<usize> for MinkowskiVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for MinkowskiVec {
    type Output = MinkowskiVec;
    fn add(self, o: MinkowskiVec) -> MinkowskiVec {
        MinkowskiVec(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl AddAssign for MinkowskiVec {
    fn add_assign(&mut self, o: MinkowskiVec) {
        for i in 0..4 {
            self.0[i] += o.0[i];
        }
    }
}

impl Sub for MinkowskiVec {
    type Output = MinkowskiVec;
    fn sub(self, o: MinkowskiVec) -> MinkowskiVec {
        MinkowskiVec(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Neg for MinkowskiVec {
    type Output = MinkowskiVec;
    fn neg(self) -> MinkowskiVec {
        MinkowskiVec(self.0.map(|c| -c))
    }
}

impl Mul<MinkowskiVec> for f64 {
    type Output = MinkowskiVec;
    fn mul(self, v: MinkowskiVec) -> MinkowskiVec {
        MinkowskiVec(v.0.map(|c| self * c))
    }
}

/// ⟨x,y⟩ = x¹y¹ + x²y² + x³y³ − x⁴y⁴
pub fn minkowski_inner(x: &MinkowskiVec, y: &MinkowskiVec) -> f64 {
    x.0[0] * y.0[0] + x.0[1] * y.0[1] + x.0[2] * y.0[2] - x.0[3] * y.0[3]
}

/// A point of the upper sheet ⟨x,x⟩ = −1, x⁴ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperboloidPoint(MinkowskiVec);

impl HyperboloidPoint {
    pub fn new(x: MinkowskiVec) -> Result<Self> {
        Self::with_tolerance(x, HYPERBOLOID_TOL)
    }

    pub fn with_tolerance(x: MinkowskiVec, tol: f64) -> Result<Self> {
        let residual = x.norm_sq() + 1.0;
        // relative to the size of the coordinates, which grow like e^dist
        let scale = 1.0f64.max(x.0[3] * x.0[3]);
        if !(residual.abs() <= tol * scale) || !(x.0[3] > 0.0) {
            return Err(ModelError::NotOnHyperboloid { residual, x4: x.0[3] });
        }
        Ok(HyperboloidPoint(x))
    }

    /// The base point (0,0,0,1).
    pub fn origin() -> Self {
        HyperboloidPoint(MinkowskiVec::e(4))
    }

    pub fn vec(&self) -> MinkowskiVec {
        self.0
    }

    pub fn constraint_residual(&self) -> f64 {
        (self.0.norm_sq() + 1.0).abs()
    }
}

/// A point (u, v, w) of the upper half space, w > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpacePoint {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl HalfSpacePoint {
    pub fn new(u: f64, v: f64, w: f64) -> Result<Self> {
        if !(w > 0.0) {
            return Err(ModelError::NonPositiveHeight(w));
        }
        Ok(HalfSpacePoint { u, v, w })
    }
}

/// A tangent vector to the hyperboloid at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVec {
    pub base: HyperboloidPoint,
    pub dir: MinkowskiVec,
}

impl TangentVec {
    pub fn new(base: HyperboloidPoint, dir: MinkowskiVec) -> Result<Self> {
        let d = base.vec().inner(&dir);
        let scale = 1.0f64.max(base.vec().max_abs() * dir.max_abs());
        if d.abs() > 1e-10 * scale {
            return Err(ModelError::NotTangent(d));
        }
        Ok(TangentVec { base, dir })
    }

    /// Project an arbitrary ambient vector onto T_x H³: v + ⟨x,v⟩x.
    pub fn project(base: HyperboloidPoint, v: MinkowskiVec) -> Self {
        let x = base.vec();
        TangentVec {
            base,
            dir: v + x.inner(&v) * x,
        }
    }
}

fn half_space_raw(x: &MinkowskiVec) -> [f64; 3] {
    let d = x.0[0] + x.0[3];
    [2.0 * x.0[1] / d, 2.0 * x.0[2] / d, 2.0 / d]
}

/// δ(x) = (2x²/(x¹+x⁴), 2x³/(x¹+x⁴), 2/(x¹+x⁴)).
pub fn to_half_space(x: &HyperboloidPoint) -> Result<HalfSpacePoint> {
    let d = x.0 .0[0] + x.0 .0[3];
    if d.abs() < 1e-300 {
        return Err(ModelError::DenominatorUnderflow(d));
    }
    let [u, v, w] = half_space_raw(&x.0);
    HalfSpacePoint::new(u, v, w)
}

/// Inverse of [`to_half_space`].
pub fn from_half_space(p: &HalfSpacePoint) -> Result<HyperboloidPoint> {
    if !(p.w > 0.0) {
        return Err(ModelError::NonPositiveHeight(p.w));
    }
    let d = 2.0 / p.w;
    let x2 = p.u / p.w;
    let x3 = p.v / p.w;
    // x1 - x4 from <x,x> = -1 written as (x1 - x4)(x1 + x4) = -1 - x2² - x3²
    let m = -(1.0 + x2 * x2 + x3 * x3) / d;
    Ok(HyperboloidPoint(MinkowskiVec::new(0.5 * (d + m), x2, x3, 0.5 * (d - m))))
}

/// |⟨t1,t2⟩ − g_H(dδ t1, dδ t2)| with g_H = (du²+dv²+dw²)/w² and dδ taken by
/// central differences (step 1e-5, one Richardson step) of the ambient
/// formula of δ.
pub fn isometry_residual(x: &HyperboloidPoint, t1: &TangentVec, t2: &TangentVec) -> f64 {
    let h = 1e-5;
    let push = |t: &MinkowskiVec| -> [f64; 3] {
        let diff = |s: f64| -> [f64; 3] {
            let p = half_space_raw(&(x.vec() + s * *t));
            let m = half_space_raw(&(x.vec() - s * *t));
            std::array::from_fn(|i| (p[i] - m[i]) / (2.0 * s))
        };
        let a = diff(h);
        let b = diff(0.5 * h);
        std::array::from_fn(|i| (4.0 * b[i] - a[i]) / 3.0)
    };
    let d1 = push(&t1.dir);
    let d2 = push(&t2.dir);
    let w = half_space_raw(&x.vec())[2];
    let g = (d1[0] * d2[0] + d1[1] * d2[1] + d1[2] * d2[2]) / (w * w);
    (t1.dir.inner(&t2.dir) - g).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_inner_products() {
        assert_eq!(MinkowskiVec::e(4).norm_sq(), -1.0);
        assert_eq!(MinkowskiVec::e(1).norm_sq(), 1.0);
        assert_eq!(MinkowskiVec::new(1.0, 0.0, 0.0, 1.0).norm_sq(), 0.0);
    }

    #[test]
    fn known_images() {
        let o = HyperboloidPoint::origin();
        assert_eq!(to_half_space(&o).unwrap(), HalfSpacePoint { u: 0.0, v: 0.0, w: 2.0 });
        let p = HyperboloidPoint::new(MinkowskiVec::new(0.0, 1.0, 0.0, 2f64.sqrt())).unwrap();
        let h = to_half_space(&p).unwrap();
        assert!((h.u - 2f64.sqrt()).abs() < 1e-15 && h.v == 0.0 && (h.w - 2f64.sqrt()).abs() < 1e-15);
        let back = from_half_space(&h).unwrap();
        assert!((back.vec() - p.vec()).max_abs() < 1e-15);
        let o2 = from_half_space(&HalfSpacePoint::new(0.0, 0.0, 2.0).unwrap()).unwrap();
        assert_eq!(o2.vec(), MinkowskiVec::e(4));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(HalfSpacePoint::new(0.0, 0.0, 0.0).is_err());
        assert!(from_half_space(&HalfSpacePoint { u: 0.0, v: 0.0, w: -1.0 }).is_err());
        assert!(HyperboloidPoint::new(MinkowskiVec::new(0.0, 0.0, 0.0, -1.0)).is_err());
        assert!(HyperboloidPoint::new(MinkowskiVec::new(1.0, 0.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn isometry_at_origin() {
        let o = HyperboloidPoint::origin();
        let t = TangentVec::new(o, MinkowskiVec::e(1)).unwrap();
        assert!(isometry_residual(&o, &t, &t) < 1e-8);
        let z = TangentVec::new(o, MinkowskiVec::ZERO).unwrap();
        assert_eq!(isometry_residual(&o, &z, &z), 0.0);
    }
}
