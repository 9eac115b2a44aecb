//! The three explicit surface families in H³ indexed by the constant C̃
//! (sign classes positive / negative / zero), their profile curves, full
//! immersions, and the two-branch gluing.
//!
//! Internally everything is written in `s = κ^{1/4}`, which turns the first
//! integral divided by κ² into the polynomial `Q(s) = 16/9 − 16s⁸ + C̃s⁶`,
//! and in the glued parameter `r`, with `s = s₀₁ − r²`. Both branches are the
//! two signs of `r`; the profile and the immersion are analytic in `r`
//! across the gluing point `r = 0`.

mod arclength;
mod glue;
mod profile;

pub use arclength::{arc_length_reparam, ArcLengthCurve, ArcSample};
pub use glue::{
    gluing_gap, glue_profiles, glue_profiles_checked, glue_slope_closed_form, reflect_across_glue_geodesic, DerivativeMatch, GapReport, GluedProfile,
    GLUE_TOLERANCES,
};
pub use profile::{
    immersion_X, immersion_glued, mu0, mu0_limits, sigma_half_space, sigma_hyperboloid, u_of_kappa_case0,
    ProfileSample, R_of_kappa, P_eval,
};

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::models::{CaseTag, ModelError};
use crate::numerics::{find_bracketed_root, NumericsError, PanelIntegral, Poly, RootBracket, ROOT_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtrinsicError {
    #[error("kappa = {0} must be positive")]
    NonPositiveKappa(f64),
    #[error("kappa = {kappa} outside (0, {kappa01})")]
    OutOfDomain { kappa: f64, kappa01: f64 },
    #[error("radicand 9C̃κ^(3/2) + 16 = {0} is not positive")]
    RadicandNonPositive(f64),
    #[error("the zero case has no radius function")]
    ZeroCaseHasNoR,
    #[error("operation requires the {expected:?} case, got {got:?}")]
    WrongCase { expected: CaseTag, got: CaseTag },
    #[error("immersion left the hyperboloid: <X,X> + 1 = {residual:e}")]
    HyperboloidConstraintViolated { residual: f64 },
    #[error("one-sided derivatives of order {order} differ by {gap:e}")]
    GlueMismatch { order: u8, gap: f64 },
    #[error("glued profile self-intersects (segments {0} and {1})")]
    SelfIntersection(usize, usize),
    #[error("zero-length segment at sample {0}")]
    DegenerateSegment(usize),
    #[error("frame does not match the family: {0}")]
    FrameMismatch(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Result<T> = std::result::Result<T, ExtrinsicError>;

/// Which multiplicative coefficient the v-part of the negative-case
/// immersion uses: `4/(3√−C̃ κ^{3/4})` or `2√2/(3√−C̃ κ^{3/4})`. Only the
/// first keeps the surface on the hyperboloid; both are kept so that the
/// choice is made by the verification grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeCoefficient {
    #[default]
    Four,
    TwoSqrt2,
}

/// A branch μ = sign·μ₀(κ) + c₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub sign: f64,
    pub c0: f64,
}

impl Branch {
    /// (+, 0)
    pub fn first() -> Self {
        Branch { sign: 1.0, c0: 0.0 }
    }

    /// (−, 2μ₀,₁)
    pub fn second(params: &CaseParams) -> Self {
        Branch {
            sign: -1.0,
            c0: 2.0 * params.mu01,
        }
    }

    /// Index 1 or 2 when this is one of the two gluing branches.
    pub fn index(&self, params: &CaseParams) -> Option<u8> {
        if *self == Branch::first() {
            Some(1)
        } else if *self == Branch::second(params) {
            Some(2)
        } else {
            None
        }
    }
}

type Integrand = Box<dyn Fn(f64) -> f64 + Send + Sync>;

const PANELS: usize = 64;
const GL_ORDER: usize = 20;

/// One extrinsic family, with κ₀₁, κ₀₀ = κ₀₁/2 and the μ₀ limits resolved.
#[derive(Clone)]
pub struct CaseParams {
    pub c_tilde: f64,
    pub tag: CaseTag,
    pub kappa01: f64,
    pub kappa00: f64,
    pub mu01: f64,
    pub mu0m1: f64,
    pub coefficient: NegativeCoefficient,
    /// s₀₁ = κ₀₁^{1/4}
    pub s01: f64,
    /// √s₀₁, the largest admissible |r|
    pub r_max: f64,
    up: Arc<PanelIntegral<Integrand>>,
}

impl fmt::Debug for CaseParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CaseParams")
            .field("c_tilde", &self.c_tilde)
            .field("tag", &self.tag)
            .field("kappa01", &self.kappa01)
            .field("kappa00", &self.kappa00)
            .field("mu01", &self.mu01)
            .field("mu0m1", &self.mu0m1)
            .field("coefficient", &self.coefficient)
            .finish()
    }
}

/// Q(s) = P(s⁴)/s⁸ as a polynomial in s.
pub fn q_poly(c_tilde: f64) -> Poly {
    let mut c = vec![0.0; 9];
    c[0] = 16.0 / 9.0;
    c[6] = c_tilde;
    c[8] = -16.0;
    Poly::new(c)
}

/// The μ₀ integrand in `s`, without the 1/√Q factor.
pub(crate) fn mu_numerator(c_tilde: f64, s: f64) -> f64 {
    let s6 = s.powi(6);
    if c_tilde == 0.0 {
        12.0 * s6
    } else {
        144.0 * c_tilde.abs().sqrt() * s6 / (9.0 * c_tilde * s6 + 16.0)
    }
}

/// The positive root of `16/9 − 16κ² + C̃κ^{3/2}` (κ₀₁), via s = κ^{1/4}.
pub fn kappa01(c_tilde: f64) -> Result<f64> {
    Ok(s01(c_tilde)?.powi(4))
}

fn s01(c_tilde: f64) -> Result<f64> {
    let q = q_poly(c_tilde);
    let dq = q.derivative();
    let mut hi = 1.0;
    let mut guard = 0;
    while q.eval(hi) >= 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 200 {
            return Err(NumericsError::NoConvergence { iterations: guard }.into());
        }
    }
    let mut s = find_bracketed_root(|s| q.eval(s), RootBracket::new(0.0, hi), ROOT_TOL)?;
    // Newton polish: the root is simple
    for _ in 0..3 {
        let d = dq.eval(s);
        if d == 0.0 {
            break;
        }
        s -= q.eval(s) / d;
    }
    Ok(s)
}

impl CaseParams {
    pub fn new(c_tilde: f64) -> Result<Self> {
        if !c_tilde.is_finite() {
            return Err(NumericsError::InvalidSpec("family constant must be finite").into());
        }
        let tag = CaseTag::of(c_tilde);
        let s01 = s01(c_tilde)?;
        let kappa01 = s01.powi(4);
        let kappa00 = 0.5 * kappa01;
        let (qd, _) = q_poly(c_tilde).deflate(s01);
        // Q(s) = (s01 - s)·q(s) with q = -qd > 0 on [0, s01]
        let r_max = s01.sqrt();
        let psi: Integrand = Box::new(move |t: f64| {
            let s = s01 - t * t;
            2.0 * mu_numerator(c_tilde, s) / (-qd.eval(s)).sqrt()
        });
        let up = PanelIntegral::uniform(psi, 0.0, r_max, PANELS, GL_ORDER);
        let t00 = (s01 - kappa00.powf(0.25)).sqrt();
        let mu01 = up.eval(t00);
        let mu0m1 = mu01 - up.total();
        Ok(CaseParams {
            c_tilde,
            tag,
            kappa01,
            kappa00,
            mu01,
            mu0m1,
            coefficient: NegativeCoefficient::Four,
            s01,
            r_max,
            up: Arc::new(up),
        })
    }

    pub fn with_coefficient(mut self, c: NegativeCoefficient) -> Self {
        self.coefficient = c;
        self
    }

    /// The intrinsic constant linked to this family, C₋₁ = (3^{3/4}/16)·C̃.
    pub fn c_minus1(&self) -> f64 {
        3f64.powf(0.75) / 16.0 * self.c_tilde
    }

    /// ∫₀^r of the desingularized μ integrand; odd in r.
    pub(crate) fn m_up(&self, r: f64) -> f64 {
        let v = self.up.eval(r.abs());
        if r < 0.0 {
            -v
        } else {
            v
        }
    }

    /// μ along the glued parameter: branch 1 for r > 0, branch 2 for r < 0.
    pub fn mu_of_r(&self, r: f64) -> f64 {
        self.mu01 - self.m_up(r)
    }

    pub fn s_of_r(&self, r: f64) -> f64 {
        self.s01 - r * r
    }

    pub fn kappa_of_r(&self, r: f64) -> f64 {
        self.s_of_r(r).powi(4)
    }

    /// |r| for a given κ in (0, κ₀₁].
    pub fn r_of_kappa(&self, kappa: f64) -> f64 {
        (self.s01 - kappa.powf(0.25)).max(0.0).sqrt()
    }

    pub(crate) fn check_kappa(&self, kappa: f64) -> Result<()> {
        if !(kappa > 0.0) {
            return Err(ExtrinsicError::NonPositiveKappa(kappa));
        }
        if kappa > self.kappa01 {
            return Err(ExtrinsicError::OutOfDomain {
                kappa,
                kappa01: self.kappa01,
            });
        }
        Ok(())
    }
}
