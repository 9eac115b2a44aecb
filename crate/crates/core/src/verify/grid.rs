use super::{Result, VerifyError};
use crate::extrinsic::{immersion_glued, CaseParams, ExtrinsicError, NegativeCoefficient};
use crate::models::{CaseFrame, CaseTag, MinkowskiVec, HYPERBOLOID_TOL};

/// What a grid was sampled from. Only used to label residuals and to
/// compare against the construction parameter κ; the auditor never reads
/// curvature formulas from here.
#[derive(Debug, Clone, Default)]
pub struct GridMeta {
    pub c_tilde: Option<f64>,
    pub tag: Option<CaseTag>,
    pub coefficient: NegativeCoefficient,
    /// κ of each row, when rows are curvature level sets of the profile
    pub kappa: Option<Vec<f64>>,
    /// row sampled exactly on the seam r = 0
    pub seam_row: Option<usize>,
    /// 1 or 2 for a single branch, None for a grid straddling the seam
    pub branch: Option<u8>,
}

/// Samples X(a_i, v_j) on a uniform rectangle, row-major in a.
#[derive(Debug, Clone)]
pub struct ImmersionGrid {
    pub a0: f64,
    pub ha: f64,
    pub na: usize,
    pub v0: f64,
    pub hv: f64,
    pub nv: usize,
    points: Vec<MinkowskiVec>,
    pub meta: GridMeta,
}

/// Sampling of the constructed surfaces: rows between κ_lo·κ₀₁ and
/// κ_hi·κ₀₁ on each branch, v in [−v_half, v_half].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GridConfig {
    pub na: usize,
    pub nv: usize,
    pub kappa_lo_frac: f64,
    pub kappa_hi_frac: f64,
    pub v_half: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            na: 61,
            nv: 21,
            kappa_lo_frac: 0.1,
            kappa_hi_frac: 0.9,
            v_half: 0.1,
        }
    }
}

impl GridConfig {
    /// Same rectangle, steps halved.
    pub fn refined(&self) -> Self {
        GridConfig {
            na: 2 * self.na - 1,
            nv: 2 * self.nv - 1,
            ..*self
        }
    }
}

fn off_hyperboloid(e: ExtrinsicError, i: usize, j: usize) -> VerifyError {
    match e {
        ExtrinsicError::HyperboloidConstraintViolated { residual } => VerifyError::OffHyperboloid {
            i,
            j,
            residual: residual.abs(),
        },
        other => other.into(),
    }
}

impl ImmersionGrid {
    pub fn from_fn<F>(a: (f64, f64), v: (f64, f64), na: usize, nv: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> std::result::Result<MinkowskiVec, VerifyError>,
    {
        if na < 7 || nv < 7 {
            return Err(VerifyError::GridTooSmall { na, nv });
        }
        let ha = (a.1 - a.0) / (na - 1) as f64;
        let hv = (v.1 - v.0) / (nv - 1) as f64;
        let mut points = Vec::with_capacity(na * nv);
        for i in 0..na {
            for j in 0..nv {
                let x = f(a.0 + i as f64 * ha, v.0 + j as f64 * hv)?;
                let res = (x.norm_sq() + 1.0).abs();
                if !x.is_finite() || res > HYPERBOLOID_TOL * x.0[3].abs().max(1.0).powi(2) || x.0[3] <= 0.0 {
                    return Err(VerifyError::OffHyperboloid { i, j, residual: res });
                }
                points.push(x);
            }
        }
        Ok(ImmersionGrid {
            a0: a.0,
            ha,
            na,
            v0: v.0,
            hv,
            nv,
            points,
            meta: GridMeta::default(),
        })
    }

    /// Grid in the glued parameter r (branch 1 for r > 0, branch 2 for r < 0).
    pub fn glued(params: &CaseParams, r: (f64, f64), v: (f64, f64), na: usize, nv: usize) -> Result<Self> {
        let frame = CaseFrame::standard(params.tag);
        let ha = (r.1 - r.0) / (na.max(2) - 1) as f64;
        let mut g = Self::from_fn(r, v, na, nv, |a, b| {
            let i = ((a - r.0) / ha).round() as usize;
            let j = ((b - v.0) / ((v.1 - v.0) / (nv - 1) as f64)).round() as usize;
            immersion_glued(a, b, params, &frame)
                .map(|p| p.vec())
                .map_err(|e| off_hyperboloid(e, i, j))
        })?;
        g.meta = GridMeta {
            c_tilde: Some(params.c_tilde),
            tag: Some(params.tag),
            coefficient: params.coefficient,
            kappa: Some((0..na).map(|i| params.kappa_of_r(g.a(i))).collect()),
            seam_row: None,
            branch: None,
        };
        Ok(g)
    }

    /// One branch, rows covering κ ∈ [κ_lo, κ_hi]·κ₀₁.
    pub fn branch(params: &CaseParams, branch: u8, cfg: &GridConfig) -> Result<Self> {
        let r_near = params.r_of_kappa(cfg.kappa_hi_frac * params.kappa01);
        let r_far = params.r_of_kappa(cfg.kappa_lo_frac * params.kappa01);
        let r = if branch == 2 { (-r_far, -r_near) } else { (r_near, r_far) };
        let mut g = Self::glued(params, r, (-cfg.v_half, cfg.v_half), cfg.na, cfg.nv)?;
        g.meta.branch = Some(if branch == 2 { 2 } else { 1 });
        Ok(g)
    }

    /// Both branches and the seam: r symmetric about 0 with the seam on a
    /// row. `na` is forced odd.
    pub fn full(params: &CaseParams, cfg: &GridConfig) -> Result<Self> {
        let na = cfg.na | 1;
        let r_far = params.r_of_kappa(cfg.kappa_lo_frac * params.kappa01);
        let mut g = Self::glued(params, (-r_far, r_far), (-cfg.v_half, cfg.v_half), na, cfg.nv)?;
        g.meta.seam_row = Some(na / 2);
        Ok(g)
    }

    pub fn a(&self, i: usize) -> f64 {
        self.a0 + i as f64 * self.ha
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v0 + j as f64 * self.hv
    }

    pub fn point(&self, i: usize, j: usize) -> MinkowskiVec {
        self.points[i * self.nv + j]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[MinkowskiVec] {
        &self.points
    }

    pub fn max_constraint_residual(&self) -> f64 {
        self.points.iter().map(|x| (x.norm_sq() + 1.0).abs()).fold(0.0, f64::max)
    }

    /// True when (i, j) is at least `band` nodes from every edge.
    pub fn in_band(&self, i: usize, j: usize, band: usize) -> bool {
        i >= band && j >= band && i + band < self.na && j + band < self.nv
    }
}
