#![allow(non_snake_case)]

use std::f64::consts::SQRT_2;

use super::{Branch, CaseParams, ExtrinsicError, NegativeCoefficient, Result};
use crate::models::{CaseFrame, CaseTag, HyperboloidPoint, MinkowskiVec};

/// A point of a profile curve, in both models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub kappa: f64,
    /// half-plane coordinates (second and third half-space coordinates)
    pub x: f64,
    pub y: f64,
    pub point: HyperboloidPoint,
    /// R(κ); absent in the zero case
    pub radius: Option<f64>,
    pub mu: f64,
    /// 1 or 2, or 0 for a branch that is not one of the gluing pair
    pub branch: u8,
    /// one-sided dy/dx of orders 1..3, where computed
    pub derivs: Option<[f64; 3]>,
}

/// P(κ) = (16/9)κ² − 16κ⁴ + C̃κ^{7/2}
pub fn P_eval(kappa: f64, c_tilde: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(ExtrinsicError::NonPositiveKappa(kappa));
    }
    let k2 = kappa * kappa;
    Ok(16.0 / 9.0 * k2 - 16.0 * k2 * k2 + c_tilde * kappa.powf(3.5))
}

pub fn R_of_kappa(kappa: f64, params: &CaseParams) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(ExtrinsicError::NonPositiveKappa(kappa));
    }
    let c = params.c_tilde;
    let rad = 9.0 * c * kappa.powf(1.5) + 16.0;
    match params.tag {
        CaseTag::Zero => Err(ExtrinsicError::ZeroCaseHasNoR),
        _ if rad <= 0.0 => Err(ExtrinsicError::RadicandNonPositive(rad)),
        _ => Ok(rad.sqrt() / (3.0 * c.abs().sqrt() * kappa.powf(0.75))),
    }
}

/// μ₀(κ) = ∫_{κ₀₀}^{κ} (μ integrand), with μ₀(κ₀₀) = 0.
pub fn mu0(kappa: f64, params: &CaseParams) -> Result<f64> {
    params.check_kappa(kappa)?;
    Ok(params.mu_of_r(params.r_of_kappa(kappa)))
}

/// (μ₀,₋₁, μ₀,₁): the limits of μ₀ at κ → 0 and κ → κ₀₁.
pub fn mu0_limits(params: &CaseParams) -> (f64, f64) {
    (params.mu0m1, params.mu01)
}

/// Half-plane profile point for given s = κ^{1/4} and angle μ.
pub(crate) fn profile_xy(params: &CaseParams, s: f64, mu: f64) -> (f64, f64) {
    let c = params.c_tilde;
    let s3 = s * s * s;
    match params.tag {
        CaseTag::Positive => {
            let big_s = (9.0 * c * s3 * s3 + 16.0).sqrt();
            let den = 4.0 + big_s * mu.cosh();
            (2.0 * big_s * mu.sinh() / den, 6.0 * c.sqrt() * s3 / den)
        }
        CaseTag::Negative => {
            let big_s = (9.0 * c * s3 * s3 + 16.0).sqrt();
            let den = (1.0 + SQRT_2) * (4.0 + big_s * mu.sin());
            (2.0 * big_s * mu.cos() / den, 6.0 * (-c).sqrt() * s3 / den)
        }
        CaseTag::Zero => {
            let den = 2f64.powf(0.75) * (s3 * s3 + mu * mu);
            (mu / den, s3 / den)
        }
    }
}

/// Embedding into R⁴₁ for given s, μ, v. The profile part uses the
/// standard coordinates; the v-part uses the frame vectors.
pub(crate) fn embed(params: &CaseParams, s: f64, mu: f64, v: f64, frame: &CaseFrame) -> MinkowskiVec {
    let c = params.c_tilde;
    let s3 = s * s * s;
    match params.tag {
        CaseTag::Positive => {
            let k = 3.0 * c.sqrt() * s3;
            let a = 4.0 / k;
            let r = (9.0 * c * s3 * s3 + 16.0).sqrt() / k;
            let sigma = MinkowskiVec::new(a, 0.0, r * mu.sinh(), r * mu.cosh());
            sigma + a * (v.cos() * frame.c1 + v.sin() * frame.c2 - frame.c1)
        }
        CaseTag::Negative => {
            let k = 3.0 * (-c).sqrt() * s3;
            let b = 4.0 / k;
            let r = (9.0 * c * s3 * s3 + 16.0).sqrt() / k;
            let sigma = MinkowskiVec::new(
                SQRT_2 * r * mu.sin() + b,
                0.0,
                r * mu.cos(),
                r * mu.sin() + SQRT_2 * b,
            );
            let bv = match params.coefficient {
                NegativeCoefficient::Four => b,
                NegativeCoefficient::TwoSqrt2 => 2.0 * SQRT_2 / k,
            };
            sigma + bv * (v.sinh() * frame.c1 + v.cosh() * frame.c2 - frame.c2)
        }
        CaseTag::Zero => {
            let a = 2f64.powf(0.75) * s3;
            let b = 1.0 / (2f64.powf(2.75) * s3);
            let x = mu / s3;
            let q = a * (1.0 + x * x);
            let sigma = MinkowskiVec::new(q - b, 0.0, x, q + b);
            sigma + (a * v * v) * frame.c1 + v * frame.c2
        }
    }
}

fn check_frame(params: &CaseParams, frame: &CaseFrame) -> Result<()> {
    if frame.tag != params.tag {
        return Err(ExtrinsicError::FrameMismatch(format!(
            "frame tag {:?} vs family {:?}",
            frame.tag, params.tag
        )));
    }
    let d = frame.gram_defect();
    if d > 1e-12 {
        return Err(ExtrinsicError::FrameMismatch(format!("gram defect {d:e}")));
    }
    Ok(())
}

fn on_hyperboloid(x: MinkowskiVec) -> Result<HyperboloidPoint> {
    HyperboloidPoint::new(x).map_err(|_| ExtrinsicError::HyperboloidConstraintViolated {
        residual: x.norm_sq() + 1.0,
    })
}

/// X(κ, v) on the given branch.
pub fn immersion_X(
    kappa: f64,
    v: f64,
    branch: Branch,
    params: &CaseParams,
    frame: &CaseFrame,
) -> Result<HyperboloidPoint> {
    params.check_kappa(kappa)?;
    check_frame(params, frame)?;
    let mu = branch.sign * mu0(kappa, params)? + branch.c0;
    on_hyperboloid(embed(params, kappa.powf(0.25), mu, v, frame))
}

/// X on the glued surface: r > 0 is branch 1, r < 0 branch 2, r = 0 the seam.
pub fn immersion_glued(r: f64, v: f64, params: &CaseParams, frame: &CaseFrame) -> Result<HyperboloidPoint> {
    check_frame(params, frame)?;
    if !(r.abs() < params.r_max) {
        return Err(ExtrinsicError::OutOfDomain {
            kappa: params.kappa_of_r(r.abs().min(params.r_max)),
            kappa01: params.kappa01,
        });
    }
    on_hyperboloid(embed(params, params.s_of_r(r), params.mu_of_r(r), v, frame))
}

/// Profile curve in hyperboloid coordinates (X at v = 0).
pub fn sigma_hyperboloid(kappa: f64, branch: Branch, params: &CaseParams) -> Result<HyperboloidPoint> {
    immersion_X(kappa, 0.0, branch, params, &CaseFrame::standard(params.tag))
}

/// Profile curve in the half plane, from the closed-form half-space display.
pub fn sigma_half_space(kappa: f64, branch: Branch, params: &CaseParams) -> Result<(f64, f64)> {
    params.check_kappa(kappa)?;
    let mu = branch.sign * mu0(kappa, params)? + branch.c0;
    Ok(profile_xy(params, kappa.powf(0.25), mu))
}

/// Profile sample at glued parameter r.
pub(crate) fn sample_at_r(params: &CaseParams, r: f64) -> Result<ProfileSample> {
    let s = params.s_of_r(r);
    let kappa = s.powi(4);
    let mu = params.mu_of_r(r);
    let (x, y) = profile_xy(params, s, mu);
    let point = on_hyperboloid(embed(params, s, mu, 0.0, &CaseFrame::standard(params.tag)))?;
    let radius = R_of_kappa(kappa, params).ok();
    Ok(ProfileSample {
        kappa,
        x,
        y,
        point,
        radius,
        mu,
        branch: if r >= 0.0 { 1 } else { 2 },
        derivs: None,
    })
}

/// u(κ) = ±(3/4) log(κ/(1 + √(1 − 9κ²))) + C, for the zero family.
pub fn u_of_kappa_case0(kappa: f64, sign: f64, c: f64) -> Result<f64> {
    if !(kappa > 0.0) || kappa > 1.0 / 3.0 {
        return Err(ExtrinsicError::OutOfDomain {
            kappa,
            kappa01: 1.0 / 3.0,
        });
    }
    let rad = (1.0 - 9.0 * kappa * kappa).max(0.0);
    Ok(sign.signum() * 0.75 * (kappa / (1.0 + rad.sqrt())).ln() + c)
}
