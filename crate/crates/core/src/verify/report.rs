use super::forms::GridAnalysis;
use super::grid::{GridConfig, ImmersionGrid};
use super::{
    biconservative_from, first_integral_residual, frame_from, identity_from, profile_constraints_residual, seam_report,
    ResidualStats, Result, SeamReport, VerifyError,
};
use crate::extrinsic::{ArcLengthCurve, CaseParams, NegativeCoefficient};
use crate::models::CaseTag;

/// Outcome of auditing one coefficient variant of the negative family.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct VariantOutcome {
    pub coefficient: NegativeCoefficient,
    /// largest |<X,X> + 1| seen before the grid was accepted or rejected
    pub constraint_residual: f64,
    pub biconservative_max: Option<f64>,
    pub passed: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CoefficientArbitration {
    pub variants: Vec<VariantOutcome>,
    pub passing: Option<NegativeCoefficient>,
}

fn audit_variant(params: &CaseParams, c: NegativeCoefficient, cfg: &GridConfig) -> Result<VariantOutcome> {
    let p = params.clone().with_coefficient(c);
    match ImmersionGrid::branch(&p, 1, cfg) {
        Ok(g) => {
            let an = GridAnalysis::new(&g)?;
            let b = biconservative_from(&an, 1e-4);
            Ok(VariantOutcome {
                coefficient: c,
                constraint_residual: g.max_constraint_residual(),
                biconservative_max: Some(b.max),
                passed: b.pass,
                failure: (!b.pass).then(|| "biconservative residual above tolerance".to_string()),
            })
        }
        Err(VerifyError::OffHyperboloid { i, j, residual }) => Ok(VariantOutcome {
            coefficient: c,
            constraint_residual: residual.abs(),
            biconservative_max: None,
            passed: false,
            failure: Some(format!("grid node ({i}, {j}) is off the hyperboloid")),
        }),
        Err(e) => Err(e),
    }
}

/// Audit both printed coefficients of the v-part of the negative-case
/// immersion and report which one yields a biconservative surface in H³.
pub fn arbitrate_coefficient(params: &CaseParams, cfg: &GridConfig) -> Result<CoefficientArbitration> {
    let mut variants = Vec::new();
    for c in [NegativeCoefficient::Four, NegativeCoefficient::TwoSqrt2] {
        variants.push(audit_variant(params, c, cfg)?);
    }
    let passing = variants.iter().find(|v| v.passed).map(|v| v.coefficient);
    Ok(CoefficientArbitration { variants, passing })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct VerifyReport {
    pub c_tilde: f64,
    pub c_minus1: f64,
    pub kappa01: f64,
    pub coefficient: NegativeCoefficient,
    pub grid: GridConfig,
    pub profile_samples: usize,
    pub arbitration: Option<CoefficientArbitration>,
    pub suites: Vec<ResidualStats>,
    pub seam: SeamReport,
    pub passed: bool,
}

impl VerifyReport {
    /// Names of asserted suites that failed (plus the seam check).
    pub fn failing(&self) -> Vec<String> {
        let mut v: Vec<String> = self.suites.iter().filter(|s| !s.ok()).map(|s| s.name.clone()).collect();
        if !self.seam.pass {
            v.push("seam".into());
        }
        v
    }

    pub fn suite(&self, name: &str) -> Option<&ResidualStats> {
        self.suites.iter().find(|s| s.name == name)
    }
}

fn prefixed(prefix: &str, v: Vec<ResidualStats>) -> impl Iterator<Item = ResidualStats> + '_ {
    v.into_iter().map(move |mut s| {
        s.name = format!("{prefix}/{}", s.name);
        s
    })
}

/// Every residual suite for one family: embedding identities and frame
/// equations on both branches, arc-length profile constraints and the
/// first integral on both branches, and the seam structure.
pub fn run_suites(params: &CaseParams, cfg: &GridConfig, profile_samples: usize) -> Result<VerifyReport> {
    let mut params = params.clone();
    let arbitration = if params.tag == CaseTag::Negative {
        let a = arbitrate_coefficient(&params, cfg)?;
        if let Some(c) = a.passing {
            params = params.with_coefficient(c);
        }
        Some(a)
    } else {
        None
    };

    let mut suites = Vec::new();
    for b in [1u8, 2] {
        let g = ImmersionGrid::branch(&params, b, cfg)?;
        let an = GridAnalysis::new(&g)?;
        let tag = format!("branch{b}");
        suites.extend(prefixed(&tag, identity_from(&an, &params)?));
        suites.extend(prefixed(&tag, frame_from(&an)?));

        let curve = ArcLengthCurve::new(&params, b, cfg.kappa_lo_frac * params.kappa01)?;
        let samples = curve.resample(profile_samples);
        suites.extend(prefixed(&tag, profile_constraints_residual(&samples, &params)?));
        suites.extend(prefixed(&tag, vec![first_integral_residual(&samples, &params)?]));
    }
    let seam = seam_report(&ImmersionGrid::full(&params, cfg)?)?;
    let passed = suites.iter().all(ResidualStats::ok) && seam.pass;
    Ok(VerifyReport {
        c_tilde: params.c_tilde,
        c_minus1: params.c_minus1(),
        kappa01: params.kappa01,
        coefficient: params.coefficient,
        grid: *cfg,
        profile_samples,
        arbitration,
        suites,
        seam,
        passed,
    })
}
