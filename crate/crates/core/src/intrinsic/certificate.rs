use super::{IntrinsicError, IntrinsicParams, Result};
use crate::numerics::{fd_stencil_derivative, Side};

/// Position and velocity in the (ω, θ) chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub omega: f64,
    pub theta: f64,
    pub d_omega: f64,
    pub d_theta: f64,
}

impl GeodesicState {
    /// g(γ̇, γ̇) = ω̇² + Γ²θ̇²
    pub fn speed_sq(&self, params: &IntrinsicParams) -> Result<f64> {
        let g = params.Gamma(self.omega)?;
        Ok(self.d_omega * self.d_omega + g * g * self.d_theta * self.d_theta)
    }
}

fn rhs(s: &GeodesicState, params: &IntrinsicParams) -> Result<GeodesicState> {
    let g = params.Gamma(s.omega)?;
    let gp = params.gamma_prime(s.omega)?;
    Ok(GeodesicState {
        omega: s.d_omega,
        theta: s.d_theta,
        d_omega: g * gp * s.d_theta * s.d_theta,
        d_theta: -2.0 * gp / g * s.d_omega * s.d_theta,
    })
}

fn axpy(a: &GeodesicState, h: f64, d: &GeodesicState) -> GeodesicState {
    GeodesicState {
        omega: a.omega + h * d.omega,
        theta: a.theta + h * d.theta,
        d_omega: a.d_omega + h * d.d_omega,
        d_theta: a.d_theta + h * d.d_theta,
    }
}

/// Classical RK4 for the geodesic equations of dω² + Γ(ω)²dθ²:
/// ω̈ = ΓΓ′θ̇², θ̈ = −2(Γ′/Γ)ω̇θ̇. Returns every step including the start.
pub fn geodesic_rk4(start: GeodesicState, length: f64, steps: usize, params: &IntrinsicParams) -> Result<Vec<GeodesicState>> {
    let h = length / steps.max(1) as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = start;
    out.push(s);
    for _ in 0..steps {
        let k1 = rhs(&s, params)?;
        let k2 = rhs(&axpy(&s, 0.5 * h, &k1), params)?;
        let k3 = rhs(&axpy(&s, 0.5 * h, &k2), params)?;
        let k4 = rhs(&axpy(&s, h, &k3), params)?;
        s = GeodesicState {
            omega: s.omega + h / 6.0 * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega),
            theta: s.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
            d_omega: s.d_omega + h / 6.0 * (k1.d_omega + 2.0 * k2.d_omega + 2.0 * k3.d_omega + k4.d_omega),
            d_theta: s.d_theta + h / 6.0 * (k1.d_theta + 2.0 * k2.d_theta + 2.0 * k3.d_theta + k4.d_theta),
        };
        out.push(s);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CompletenessReport {
    pub c_minus1: f64,
    pub omega_max: f64,
    pub samples: usize,
    pub gamma_seam: f64,
    pub inv_xi01: f64,
    pub min_gamma: f64,
    pub argmin_omega: f64,
    /// |Γ′(0⁺)|/Γ(0) from a one-sided stencil: the ω-equation residual
    /// along the unit-speed seam θ ↦ (0, θ/Γ(0))
    pub seam_residual: f64,
    /// same with a central stencil (vanishes by evenness)
    pub seam_residual_symmetric: f64,
    /// max |ω| reached when integrating along the seam
    pub seam_drift: f64,
    /// defects of the radial geodesic ω ↦ (ω, θ₀) across the seam
    pub radial_theta_drift: f64,
    pub radial_speed_drift: f64,
    /// relative drift of g(γ̇, γ̇) for an oblique geodesic crossing the seam
    pub oblique_energy_drift: f64,
    pub passed: bool,
}

const SEAM_TOL: f64 = 1e-6;

/// Sample Γ on `samples` points of [−ω_max, ω_max] (rounded up to an odd
/// count so that the seam ω = 0 is a node) and run the geodesic checks.
pub fn completeness_certificate(params: &IntrinsicParams, omega_max: f64, samples: usize) -> Result<CompletenessReport> {
    let inv = 1.0 / params.xi01;
    let g0 = params.Gamma(0.0)?;
    let n = samples.max(3) | 1;
    let mut min_gamma = f64::INFINITY;
    let mut argmin = 0.0;
    for i in 0..n {
        let k = i as f64 - (n / 2) as f64;
        let w = omega_max * k / (n / 2) as f64;
        let g = params.Gamma(w)?;
        if g < min_gamma {
            min_gamma = g;
            argmin = w;
        }
        if g < inv - 1e-12 {
            return Err(IntrinsicError::CertificateFailed { omega: w });
        }
    }

    let gam = |w: f64| params.Gamma(w).unwrap_or(f64::NAN);
    let h = 1e-3;
    let one_sided = fd_stencil_derivative(gam, 0.0, 1, h, Side::Right, 7)?;
    let central = fd_stencil_derivative(gam, 0.0, 1, h, Side::Symmetric, 7)?;
    let seam_residual = one_sided.abs() / g0;
    let seam_residual_symmetric = central.abs() / g0;

    let seam = geodesic_rk4(
        GeodesicState {
            omega: 0.0,
            theta: 0.0,
            d_omega: 0.0,
            d_theta: 1.0 / g0,
        },
        10.0,
        200,
        params,
    )?;
    let seam_drift = seam.iter().map(|s| s.omega.abs()).fold(0.0, f64::max);

    let span = omega_max.min(5.0);
    let radial = geodesic_rk4(
        GeodesicState {
            omega: -span,
            theta: 0.3,
            d_omega: 1.0,
            d_theta: 0.0,
        },
        2.0 * span,
        400,
        params,
    )?;
    let radial_theta_drift = radial.iter().map(|s| (s.theta - 0.3).abs()).fold(0.0, f64::max);
    let radial_speed_drift = radial.iter().map(|s| (s.d_omega - 1.0).abs()).fold(0.0, f64::max);

    // unit speed, 60 degrees off radial, starting on the negative side
    let w0 = -0.5;
    let gs = params.Gamma(w0)?;
    let start = GeodesicState {
        omega: w0,
        theta: 0.0,
        d_omega: 0.5,
        d_theta: (0.75f64).sqrt() / gs,
    };
    let oblique = geodesic_rk4(start, 2.0, 2000, params)?;
    let e0 = start.speed_sq(params)?;
    let mut oblique_energy_drift: f64 = 0.0;
    for s in &oblique {
        oblique_energy_drift = oblique_energy_drift.max((s.speed_sq(params)? - e0).abs() / e0);
    }

    let passed = min_gamma >= inv - 1e-12 && seam_residual < SEAM_TOL && seam_drift < SEAM_TOL;
    if seam_residual >= SEAM_TOL || seam_drift >= SEAM_TOL {
        return Err(IntrinsicError::CertificateFailed { omega: 0.0 });
    }
    Ok(CompletenessReport {
        c_minus1: params.c_minus1,
        omega_max,
        samples: n,
        gamma_seam: g0,
        inv_xi01: inv,
        min_gamma,
        argmin_omega: argmin,
        seam_residual,
        seam_residual_symmetric,
        seam_drift,
        radial_theta_drift,
        radial_speed_drift,
        oblique_energy_drift,
        passed,
    })
}
