use super::{IntrinsicParams, Result};
use crate::numerics::{fd_stencil_derivative, Side};

const H: f64 = 1e-3;

/// Principal data of the candidate shape operator at ω, in the orthonormal
/// frame X₁ = ∂_ω, X₂ = Γ⁻¹∂_θ.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ShapeCandidate {
    pub omega: f64,
    pub tilde_k: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// mean curvature function, the trace of A
    pub f: f64,
    /// λ1λ2 − (1 + K̃)
    pub gauss_defect: f64,
    /// (λ1 + λ2) − f
    pub trace_defect: f64,
    /// X₂-component of (∇_{X₁}A)X₂ − (∇_{X₂}A)X₁, by finite differences
    pub codazzi: f64,
}

fn eigen(k: f64) -> (f64, f64, f64) {
    let m = (-1.0 - k).sqrt();
    (-m / 3f64.sqrt(), (3.0 * (-1.0 - k)).sqrt(), 2.0 / 3f64.sqrt() * m)
}

/// With ∇_{X₁}X₁ = ∇_{X₁}X₂ = 0, ∇_{X₂}X₁ = (Γ′/Γ)X₂ and X₂(λ₁) = 0, the
/// Codazzi defect reduces to λ₂′ + (Γ′/Γ)(λ₂ − λ₁); λ₂′ and Γ′ are taken
/// by seven-point central differences, independently of the closed forms.
pub fn shape_and_codazzi(omega: f64, params: &IntrinsicParams) -> Result<ShapeCandidate> {
    let k = params.tilde_K(omega)?;
    let (l1, l2, f) = eigen(k);
    let lam2 = |w: f64| params.tilde_K(w).map(|k| eigen(k).1).unwrap_or(f64::NAN);
    let gam = |w: f64| params.Gamma(w).unwrap_or(f64::NAN);
    let dl2 = fd_stencil_derivative(lam2, omega, 1, H, Side::Symmetric, 7)?;
    let dg = fd_stencil_derivative(gam, omega, 1, H, Side::Symmetric, 7)?;
    let codazzi = dl2 + dg / params.Gamma(omega)? * (l2 - l1);
    Ok(ShapeCandidate {
        omega,
        tilde_k: k,
        lambda1: l1,
        lambda2: l2,
        f,
        gauss_defect: l1 * l2 - (1.0 + k),
        trace_defect: (l1 + l2) - f,
        codazzi,
    })
}
