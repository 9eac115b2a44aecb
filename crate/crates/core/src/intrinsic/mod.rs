//! The abstract metric family g = (1/ξ²)(3/T(ξ) dξ² + dθ²) on (0, ξ₀₁) × ℝ,
//! its arc-length coordinate ρ (and ω = ρ − ρ₁, the distance from the
//! boundary ξ = ξ₀₁), the even extension Γ that makes the metric complete,
//! and the shape-operator candidate.
//!
//! With z = ξ^{1/3}, T(ξ) = −z⁸ + C z⁶ + 3 is a polynomial with a simple
//! root z₀₁. ω is integrated in `t = √(z₀₁ − z)` near the boundary (where
//! the integrand is smooth after factoring out the root) and in
//! `y = −ln z` towards ξ → 0 (where it tends to the constant 3).

#![allow(non_snake_case)]

mod certificate;
mod shape;

pub use certificate::{completeness_certificate, geodesic_rk4, CompletenessReport, GeodesicState};
pub use shape::{shape_and_codazzi, ShapeCandidate};

use thiserror::Error;

use crate::numerics::{
    find_bracketed_root, integrate_adaptive, integrate_singular, MonotoneTable, NumericsError, PanelIntegral, Poly,
    QuadratureSpec, RootBracket, ROOT_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntrinsicError {
    #[error("xi = {0} must be positive")]
    NonPositiveXi(f64),
    #[error("xi = {xi} outside (0, {xi01}]")]
    OutOfDomain { xi: f64, xi01: f64 },
    #[error("the inversion table has not been built")]
    TableNotFrozen,
    #[error("radicand {value} at tau = {tau} is not positive")]
    NegativeRadicand { tau: f64, value: f64 },
    #[error("completeness certificate failed at omega = {omega}")]
    CertificateFailed { omega: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, IntrinsicError>;

/// Below this ξ metric evaluation in the (ξ, θ) chart is refused.
pub const XI_MIN: f64 = 1e-8;
const TABLE_NODES: usize = 4096;
const UP_PANELS: usize = 48;
const LO_PANELS: usize = 64;
const GL_ORDER: usize = 20;
// beyond y = −ln z = Y_LIN the ω integrand equals 3 to machine precision
const Y_LIN: f64 = 9.0;

/// T(ξ) = −ξ^{8/3} + C₋₁ξ² + 3
pub fn T_eval(xi: f64, c_minus1: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(IntrinsicError::NonPositiveXi(xi));
    }
    Ok(-xi.powf(8.0 / 3.0) + c_minus1 * xi * xi + 3.0)
}

/// T as a polynomial in z = ξ^{1/3}.
pub fn t_poly(c_minus1: f64) -> Poly {
    let mut c = vec![0.0; 9];
    c[0] = 3.0;
    c[6] = c_minus1;
    c[8] = -1.0;
    Poly::new(c)
}

fn z01(c_minus1: f64) -> Result<f64> {
    let p = t_poly(c_minus1);
    let dp = p.derivative();
    let mut hi = 1.0;
    let mut guard = 0;
    while p.eval(hi) >= 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(NumericsError::NoConvergence { iterations: guard }.into());
        }
    }
    let mut z = find_bracketed_root(|z| p.eval(z), RootBracket::new(0.0, hi), ROOT_TOL)?;
    for _ in 0..3 {
        let d = dp.eval(z);
        if d == 0.0 {
            break;
        }
        z -= p.eval(z) / d;
    }
    Ok(z)
}

/// The positive root ξ₀₁ of T.
pub fn xi01(c_minus1: f64) -> Result<f64> {
    Ok(z01(c_minus1)?.powi(3))
}

/// Gaussian curvature data at ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussK {
    pub k: f64,
    pub dk: f64,
    /// ξ-component of grad K: (ξ²T(ξ)/3)·K′(ξ)
    pub grad_xi: f64,
}

/// K = −ξ^{8/3}/9 − 1, K′ = −(8/27)ξ^{5/3}, grad K = (ξ²T/3)K′ ∂_ξ.
pub fn gauss_K(xi: f64, c_minus1: f64) -> Result<GaussK> {
    let t = T_eval(xi, c_minus1)?;
    let x01 = xi01(c_minus1)?;
    if xi > x01 * (1.0 + 1e-12) {
        return Err(IntrinsicError::OutOfDomain { xi, xi01: x01 });
    }
    let k = -xi.powf(8.0 / 3.0) / 9.0 - 1.0;
    let dk = -8.0 / 27.0 * xi.powf(5.0 / 3.0);
    Ok(GaussK {
        k,
        dk,
        grad_xi: xi * xi * t.max(0.0) / 3.0 * dk,
    })
}

type Integrand = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Which coordinate chart a metric sample is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    XiTheta,
    RhoTheta,
    OmegaTheta,
}

/// Metric components (g11, g12, g22) at a point of a chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub chart: Chart,
    pub coords: (f64, f64),
    pub g: [f64; 3],
}

impl MetricSample {
    pub fn is_positive_definite(&self) -> bool {
        self.g[0] > 0.0 && self.g[0] * self.g[2] - self.g[1] * self.g[1] > 0.0
    }
}

/// One intrinsic family. Build with [`IntrinsicParams::new`], which also
/// builds and freezes the ρ → ξ table; after that every method is `&self`.
pub struct IntrinsicParams {
    pub c_minus1: f64,
    pub xi01: f64,
    pub xi00: f64,
    pub rho1: f64,
    z01: f64,
    t_split: f64,
    y_split: f64,
    omega_split: f64,
    omega_lin: f64,
    up: PanelIntegral<Integrand>,
    lo: PanelIntegral<Integrand>,
    table: Option<MonotoneTable>,
}

impl std::fmt::Debug for IntrinsicParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IntrinsicParams")
            .field("c_minus1", &self.c_minus1)
            .field("xi01", &self.xi01)
            .field("xi00", &self.xi00)
            .field("rho1", &self.rho1)
            .field("frozen", &self.table.is_some())
            .finish()
    }
}

impl IntrinsicParams {
    /// ξ₀₀ = ξ₀₁/2, table built and frozen.
    pub fn new(c_minus1: f64) -> Result<Self> {
        let mut p = Self::new_unfrozen(c_minus1, None)?;
        p.freeze()?;
        Ok(p)
    }

    pub fn with_xi00(c_minus1: f64, xi00: f64) -> Result<Self> {
        let mut p = Self::new_unfrozen(c_minus1, Some(xi00))?;
        p.freeze()?;
        Ok(p)
    }

    /// Everything except the inversion table; Γ is unavailable until
    /// [`IntrinsicParams::freeze`] is called.
    pub fn new_unfrozen(c_minus1: f64, xi00: Option<f64>) -> Result<Self> {
        if !c_minus1.is_finite() {
            return Err(NumericsError::InvalidSpec("family constant must be finite").into());
        }
        let z01 = z01(c_minus1)?;
        let xi01 = z01.powi(3);
        let xi00 = xi00.unwrap_or(0.5 * xi01);
        if !(xi00 > 0.0 && xi00 < xi01) {
            return Err(IntrinsicError::OutOfDomain { xi: xi00, xi01 });
        }
        let (qd, _) = t_poly(c_minus1).deflate(z01);
        let z_split = 0.5 * z01;
        let t_split = (z01 - z_split).sqrt();
        let y_split = -z_split.ln();
        let up_f: Integrand = Box::new(move |t: f64| {
            let z = z01 - t * t;
            6.0 * 3f64.sqrt() / (z * (-qd.eval(z)).sqrt())
        });
        let poly = t_poly(c_minus1);
        let lo_f: Integrand = Box::new(move |y: f64| 3.0 * 3f64.sqrt() / poly.eval((-y).exp()).sqrt());
        let up = PanelIntegral::uniform(up_f, 0.0, t_split, UP_PANELS, GL_ORDER);
        let lo = PanelIntegral::uniform(lo_f, y_split, Y_LIN.max(y_split + 1.0), LO_PANELS, GL_ORDER);
        let omega_split = up.total();
        let omega_lin = omega_split + lo.total();
        let mut p = IntrinsicParams {
            c_minus1,
            xi01,
            xi00,
            rho1: 0.0,
            z01,
            t_split,
            y_split,
            omega_split,
            omega_lin,
            up,
            lo,
            table: None,
        };
        p.rho1 = -p.omega_of_z(xi00.cbrt());
        Ok(p)
    }

    /// Build the 4096-node ρ → ξ table (clustered at ξ₀₁) and freeze.
    pub fn freeze(&mut self) -> Result<()> {
        if self.table.is_some() {
            return Ok(());
        }
        let lo = self.xi01 * 1e-6;
        let n = TABLE_NODES;
        let mut rho = Vec::with_capacity(n);
        let mut xi = Vec::with_capacity(n);
        // descending ξ so ρ ascends
        for i in (0..n).rev() {
            let x = lo + (self.xi01 - lo) * (std::f64::consts::FRAC_PI_2 * i as f64 / (n - 1) as f64).sin();
            xi.push(x);
            rho.push(self.rho(x)?);
        }
        self.table = Some(MonotoneTable::new(rho, xi)?);
        Ok(())
    }

    pub fn is_frozen(&self) -> bool {
        self.table.is_some()
    }

    fn omega_of_z(&self, z: f64) -> f64 {
        if z >= self.z01 {
            return 0.0;
        }
        let t = (self.z01 - z).sqrt();
        if t <= self.t_split {
            self.up.eval(t)
        } else {
            self.omega_of_y(-z.ln())
        }
    }

    fn omega_of_y(&self, y: f64) -> f64 {
        if y <= self.lo.hi() {
            self.omega_split + self.lo.eval(y)
        } else {
            self.omega_lin + 3.0 * (y - self.lo.hi())
        }
    }

    fn check_xi(&self, xi: f64) -> Result<()> {
        if !(xi > 0.0) {
            return Err(IntrinsicError::NonPositiveXi(xi));
        }
        if xi > self.xi01 {
            return Err(IntrinsicError::OutOfDomain { xi, xi01: self.xi01 });
        }
        Ok(())
    }

    /// Distance from the boundary ξ = ξ₀₁: ω(ξ) = ρ(ξ) − ρ₁ ≥ 0.
    pub fn omega(&self, xi: f64) -> Result<f64> {
        self.check_xi(xi)?;
        Ok(self.omega_of_z(xi.cbrt()))
    }

    /// ρ(ξ) = −∫_{ξ₀₀}^{ξ} √(3/(τ²T(τ))) dτ.
    pub fn rho(&self, xi: f64) -> Result<f64> {
        Ok(self.rho1 + self.omega(xi)?)
    }

    /// ρ as a function of ln ξ, usable far below the smallest double.
    pub fn rho_ln(&self, ln_xi: f64) -> Result<f64> {
        if ln_xi > self.xi01.ln() {
            return Err(IntrinsicError::OutOfDomain {
                xi: ln_xi.exp(),
                xi01: self.xi01,
            });
        }
        let y = -ln_xi / 3.0;
        let z = (-y).exp();
        if z > 0.0 && (self.z01 - z).sqrt() <= self.t_split {
            return Ok(self.rho1 + self.omega_of_z(z));
        }
        Ok(self.rho1 + self.omega_of_y(y))
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    /// ρ by direct adaptive quadrature of the original integrand in ξ,
    /// with the inverse square root at ξ₀₁ handled by substitution. An
    /// independent check on [`IntrinsicParams::rho`].
    pub fn rho_direct(&self, xi: f64, tol: f64) -> Result<f64> {
        self.check_xi(xi)?;
        let c = self.c_minus1;
        let g = move |tau: f64| (3.0 / (tau * tau * (-tau.powf(8.0 / 3.0) + c * tau * tau + 3.0))).sqrt();
        let spec = if xi >= self.xi01 {
            QuadratureSpec::inv_sqrt_upper(tol)
        } else {
            QuadratureSpec::regular(tol)
        };
        if xi >= self.xi00 {
            Ok(-integrate_singular(g, self.xi00, xi, spec)?)
        } else {
            Ok(integrate_adaptive(g, xi, self.xi00, tol, 4000)?)
        }
    }

    /// ρ₁ by [`IntrinsicParams::rho_direct`] at ξ₀₁.
    pub fn rho1_direct(&self, tol: f64) -> Result<f64> {
        self.rho_direct(self.xi01, tol)
    }

    /// ξ at distance ω ≥ 0 from the boundary.
    pub fn xi_of_omega(&self, omega: f64) -> Result<f64> {
        let table = self.table.as_ref().ok_or(IntrinsicError::TableNotFrozen)?;
        let omega = omega.max(0.0);
        if omega == 0.0 {
            return Ok(self.xi01);
        }
        let rho = self.rho1 + omega;
        let guess = if rho <= table.x_range().hi {
            table.eval(rho)
        } else {
            0.0
        };
        if omega <= self.omega_split {
            let mut t = if guess > 0.0 {
                (self.z01 - guess.cbrt()).max(0.0).sqrt().min(self.t_split)
            } else {
                self.t_split
            };
            for _ in 0..30 {
                let step = (self.up.eval(t) - omega) / self.up.integrand(t);
                t = (t - step).clamp(0.0, self.t_split);
                if step.abs() <= 1e-17 + 2e-16 * t {
                    break;
                }
            }
            let z = self.z01 - t * t;
            return Ok(z * z * z);
        }
        if omega >= self.omega_lin {
            let y = self.lo.hi() + (omega - self.omega_lin) / 3.0;
            return Ok((-3.0 * y).exp());
        }
        let mut y = if guess > 0.0 {
            (-guess.cbrt().ln()).clamp(self.y_split, self.lo.hi())
        } else {
            self.y_split
        };
        for _ in 0..30 {
            let step = (self.omega_split + self.lo.eval(y) - omega) / self.lo.integrand(y);
            y = (y - step).clamp(self.y_split, self.lo.hi());
            if step.abs() <= 2e-16 * y.max(1.0) {
                break;
            }
        }
        Ok((-3.0 * y).exp())
    }

    /// ξ(ρ), the inverse of ρ.
    pub fn xi_of_rho(&self, rho: f64) -> Result<f64> {
        self.xi_of_omega(rho - self.rho1)
    }

    /// Γ(ω) = 1/ξ(ρ₁ + |ω|); Γ(0) = 1/ξ₀₁.
    pub fn Gamma(&self, omega: f64) -> Result<f64> {
        Ok(1.0 / self.xi_of_omega(omega.abs())?)
    }

    /// dΓ/dω in closed form, sign(ω)·√T(ξ)/(√3 ξ), zero on the seam.
    pub fn gamma_prime(&self, omega: f64) -> Result<f64> {
        if omega == 0.0 {
            return Ok(0.0);
        }
        let xi = self.xi_of_omega(omega.abs())?;
        let t = self.t_of_xi(xi).max(0.0);
        Ok(omega.signum() * t.sqrt() / (3f64.sqrt() * xi))
    }

    fn t_of_xi(&self, xi: f64) -> f64 {
        t_poly(self.c_minus1).eval(xi.cbrt())
    }

    /// K̃(ω) = −ξ(ρ₁+|ω|)^{8/3}/9 − 1.
    pub fn tilde_K(&self, omega: f64) -> Result<f64> {
        let xi = self.xi_of_omega(omega.abs())?;
        Ok(-xi.powf(8.0 / 3.0) / 9.0 - 1.0)
    }

    /// −Γ″(ω)/Γ(ω) by symmetric second differences with one Richardson step.
    pub fn tilde_K_fd(&self, omega: f64, h: f64) -> Result<f64> {
        let g0 = self.Gamma(omega)?;
        let gpp = crate::numerics::fd_derivative(
            |w| self.Gamma(w).unwrap_or(f64::NAN),
            omega,
            2,
            h,
            crate::numerics::Side::Symmetric,
        )?;
        Ok(-gpp / g0)
    }

    /// Metric components in the requested chart. ξ is clamped away from the
    /// two blow-up ends as documented on [`XI_MIN`].
    pub fn metric(&self, chart: Chart, a: f64, theta: f64) -> Result<MetricSample> {
        let g = match chart {
            Chart::XiTheta => {
                self.check_xi(a)?;
                if a < XI_MIN || a > self.xi01 * (1.0 - 1e-10) {
                    return Err(IntrinsicError::OutOfDomain { xi: a, xi01: self.xi01 });
                }
                let t = T_eval(a, self.c_minus1)?;
                [3.0 / (a * a * t), 0.0, 1.0 / (a * a)]
            }
            Chart::RhoTheta => {
                let xi = self.xi_of_rho(a)?;
                [1.0, 0.0, 1.0 / (xi * xi)]
            }
            Chart::OmegaTheta => {
                let gm = self.Gamma(a)?;
                [1.0, 0.0, gm * gm]
            }
        };
        Ok(MetricSample {
            chart,
            coords: (a, theta),
            g,
        })
    }
}

/// u(σ) = ∫_{σ₀}^{σ} dτ/√(−3e^{−2τ/3} + e^{2τ} + a) + u₀ (ambient curvature −1).
pub fn u_of_sigma(sigma: f64, sigma0: f64, a: f64, u0: f64) -> Result<f64> {
    let rad = move |tau: f64| -3.0 * (-2.0 * tau / 3.0).exp() + (2.0 * tau).exp() + a;
    // the radicand is increasing in τ, so its minimum is at the lower end
    let lo = sigma.min(sigma0);
    let v = rad(lo);
    if !(v > 0.0) {
        return Err(IntrinsicError::NegativeRadicand { tau: lo, value: v });
    }
    let int = integrate_adaptive(move |t| 1.0 / rad(t).sqrt(), sigma0, sigma, 1e-14, 2000)?;
    Ok(int + u0)
}

/// The (ξ, θ) metric recovered from the conformal form e^{2σ}(du² + dv²)
/// by ξ = 3^{3/4}e^{−σ}, a = √3·C₋₁, θ = 3^{3/4}v; du/dσ comes from
/// [`u_of_sigma`] over a short symmetric interval.
pub fn metric_from_conformal(xi: f64, c_minus1: f64) -> Result<[f64; 3]> {
    let sigma = (3f64.powf(0.75) / xi).ln();
    let a = 3f64.sqrt() * c_minus1;
    let h = 1e-4;
    let du = u_of_sigma(sigma + h, sigma - h, a, 0.0)? / (2.0 * h);
    // Richardson on the averaged slope
    let du2 = u_of_sigma(sigma + 0.5 * h, sigma - 0.5 * h, a, 0.0)? / h;
    let dudsigma = (4.0 * du2 - du) / 3.0;
    let e2s = (2.0 * sigma).exp();
    // dσ = −dξ/ξ, dv = dθ/3^{3/4}
    let g_xixi = e2s * dudsigma * dudsigma / (xi * xi);
    let g_thth = e2s / 3f64.powf(1.5);
    Ok([g_xixi, 0.0, g_thth])
}
