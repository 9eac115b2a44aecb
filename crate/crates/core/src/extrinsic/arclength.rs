use super::profile::embed;
use super::{CaseParams, ExtrinsicError, ProfileSample, Result};
use crate::models::{CaseFrame, MinkowskiVec};
use crate::numerics::PanelIntegral;

type Speed = Box<dyn Fn(f64) -> f64 + Send + Sync>;

const FD_STEP: f64 = 1e-3;
const D1: [f64; 7] = [-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0];

fn sigma_r(params: &CaseParams, frame: &CaseFrame, r: f64) -> MinkowskiVec {
    embed(params, params.s_of_r(r), params.mu_of_r(r), 0.0, frame)
}

// Minkowski speed |dσ/dr| by a sixth-order central difference; the glued
// parametrization is analytic in r, so the stencil may straddle r = 0.
fn speed(params: &CaseParams, frame: &CaseFrame, r: f64) -> f64 {
    let mut d = MinkowskiVec::ZERO;
    for (k, w) in D1.iter().enumerate() {
        if *w != 0.0 {
            d += *w * sigma_r(params, frame, r + (k as f64 - 3.0) * FD_STEP);
        }
    }
    let d = (1.0 / (60.0 * FD_STEP)) * d;
    d.norm_sq().max(0.0).sqrt()
}

/// Arc length along one gluing branch, measured from the gluing point G.
/// The branch is the sign of the glued parameter; `rho = |r|`.
pub struct ArcLengthCurve {
    params: CaseParams,
    frame: CaseFrame,
    sign: f64,
    rho_hi: f64,
    length: PanelIntegral<Speed>,
    table: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSample {
    pub u: f64,
    pub kappa: f64,
    pub point: MinkowskiVec,
}

impl ArcLengthCurve {
    /// `branch` is 1 or 2; the curve covers κ ∈ [kappa_lo, κ₀₁].
    pub fn new(params: &CaseParams, branch: u8, kappa_lo: f64) -> Result<Self> {
        params.check_kappa(kappa_lo)?;
        let sign = if branch == 2 { -1.0 } else { 1.0 };
        let rho_hi = params.r_of_kappa(kappa_lo);
        let frame = CaseFrame::standard(params.tag);
        let p = params.clone();
        let f: Speed = Box::new(move |rho: f64| speed(&p, &frame, sign * rho));
        let length = PanelIntegral::uniform(f, 0.0, rho_hi, 48, 16);
        let table = (0..=256)
            .map(|i| {
                let rho = rho_hi * i as f64 / 256.0;
                (length.eval(rho), rho)
            })
            .collect::<Vec<_>>();
        if table.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(ExtrinsicError::DegenerateSegment(0));
        }
        Ok(ArcLengthCurve {
            params: params.clone(),
            frame,
            sign,
            rho_hi,
            length,
            table,
        })
    }

    pub fn total_length(&self) -> f64 {
        self.length.total()
    }

    pub fn u_of_rho(&self, rho: f64) -> f64 {
        self.length.eval(rho)
    }

    pub fn u_of_kappa(&self, kappa: f64) -> f64 {
        self.u_of_rho(self.params.r_of_kappa(kappa))
    }

    /// Inverse of u(ρ) by Newton from a table guess (du/dρ = speed > 0).
    pub fn rho_of_u(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, self.total_length());
        let i = self.table.partition_point(|p| p.0 <= u).clamp(1, self.table.len() - 1);
        let (u0, r0) = self.table[i - 1];
        let (u1, r1) = self.table[i];
        let mut rho = r0 + (r1 - r0) * (u - u0) / (u1 - u0);
        for _ in 0..8 {
            let f = self.u_of_rho(rho) - u;
            let step = f / self.length.integrand(rho);
            rho = (rho - step).clamp(0.0, self.rho_hi);
            if step.abs() < 1e-16 {
                break;
            }
        }
        rho
    }

    pub fn kappa_of_u(&self, u: f64) -> f64 {
        self.params.kappa_of_r(self.rho_of_u(u))
    }

    pub fn sigma_of_u(&self, u: f64) -> MinkowskiVec {
        sigma_r(&self.params, &self.frame, self.sign * self.rho_of_u(u))
    }

    /// `n` samples uniform in arc length.
    pub fn resample(&self, n: usize) -> Vec<ArcSample> {
        let total = self.total_length();
        (0..n)
            .map(|i| {
                let u = total * i as f64 / (n - 1).max(1) as f64;
                let rho = self.rho_of_u(u);
                ArcSample {
                    u,
                    kappa: self.params.kappa_of_r(rho),
                    point: sigma_r(&self.params, &self.frame, self.sign * rho),
                }
            })
            .collect()
    }
}

/// Attach arc length (from G) to profile samples of the curve's branch.
/// Samples must be ordered with strictly increasing distance from G.
pub fn arc_length_reparam(samples: &[ProfileSample], curve: &ArcLengthCurve) -> Result<Vec<ArcSample>> {
    let mut out: Vec<ArcSample> = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        let u = curve.u_of_kappa(s.kappa);
        if let Some(prev) = out.last() {
            if !(u > prev.u) {
                return Err(ExtrinsicError::DegenerateSegment(i));
            }
        }
        out.push(ArcSample {
            u,
            kappa: s.kappa,
            point: s.point.vec(),
        });
    }
    Ok(out)
}
