use super::profile::{profile_xy, sample_at_r, sigma_half_space};
use super::{Branch, CaseParams, ExtrinsicError, ProfileSample, Result};
use crate::models::CaseTag;
use crate::numerics::{chebyshev_lobatto, fd_stencil_derivative, Side};

/// Left/right agreement required of dy/dx at the gluing point, orders 1..3.
pub const GLUE_TOLERANCES: [f64; 3] = [1e-6, 1e-4, 1e-2];

/// Samples this close to κ = 0 stand in for the ideal endpoints on y = 0.
const KAPPA_TINY_REL: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DerivativeMatch {
    /// branch 1 (right-sided in r), dy/dx orders 1..3
    pub branch1: [f64; 3],
    /// branch 2 (left-sided in r)
    pub branch2: [f64; 3],
    pub gaps: [f64; 3],
    pub tolerances: [f64; 3],
}

impl DerivativeMatch {
    pub fn passes(&self) -> bool {
        (0..3).all(|i| self.gaps[i] <= self.tolerances[i])
    }
}

/// Branch 1 from κ ≈ 0 up to the gluing point G, then branch 2 from G back
/// down to κ ≈ 0. G appears once.
#[derive(Debug, Clone)]
pub struct GluedProfile {
    pub samples: Vec<ProfileSample>,
    /// index of G in `samples`
    pub glue_index: usize,
    pub gluing_point: (f64, f64),
    pub derivative_match: DerivativeMatch,
    /// first self-intersecting pair of segments, if any
    pub self_intersection: Option<(usize, usize)>,
    /// boundary points (y = 0) approached by branch 1 and branch 2 as κ → 0
    pub ideal_endpoints: [(f64, f64); 2],
    /// distance of the terminal samples from the ideal endpoints
    pub closure_gap: f64,
    /// slope of the tangent at G (dy/dx)
    pub glue_slope: f64,
}

impl GluedProfile {
    pub fn branch_samples(&self, branch: u8) -> impl Iterator<Item = &ProfileSample> {
        self.samples.iter().filter(move |s| s.branch == branch)
    }

    pub fn is_simple(&self) -> bool {
        self.self_intersection.is_none()
    }

    pub fn min_y(&self) -> f64 {
        self.samples.iter().map(|s| s.y).fold(f64::INFINITY, f64::min)
    }

    /// Euclidean bounding box (xmin, ymin, xmax, ymax) of the samples.
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        self.samples.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), s| (a.min(s.x), b.min(s.y), c.max(s.x), d.max(s.y)),
        )
    }

    /// max over sampled κ of |σ₂(κ) − ρ(σ₁(κ))|, with ρ the reflection in the
    /// geodesic through G orthogonal to the profile.
    pub fn reflection_defect(&self, params: &CaseParams) -> f64 {
        let mut worst = 0.0f64;
        for s in self.branch_samples(1) {
            let r = params.r_of_kappa(s.kappa);
            if r == 0.0 {
                continue;
            }
            let p1 = xy_at(params, r);
            let p2 = xy_at(params, -r);
            let q = reflect_across_glue_geodesic(self.gluing_point, self.glue_slope, p1);
            worst = worst.max(((q.0 - p2.0).powi(2) + (q.1 - p2.1).powi(2)).sqrt());
        }
        worst
    }
}

/// Reflection of the half plane in the geodesic through `g` orthogonal to a
/// curve with slope `m` at `g`: inversion in a circle centred on y = 0, or a
/// vertical line when m = 0.
pub fn reflect_across_glue_geodesic(g: (f64, f64), m: f64, p: (f64, f64)) -> (f64, f64) {
    if m == 0.0 {
        return (2.0 * g.0 - p.0, p.1);
    }
    let c = g.0 - g.1 / m;
    let rad2 = (g.0 - c).powi(2) + g.1 * g.1;
    let dx = p.0 - c;
    let d2 = dx * dx + p.1 * p.1;
    (c + rad2 * dx / d2, rad2 * p.1 / d2)
}

fn xy_at(params: &CaseParams, r: f64) -> (f64, f64) {
    profile_xy(params, params.s_of_r(r), params.mu_of_r(r))
}

/// dy/dx of orders 1..3 at r = 0 from one-sided parametric derivatives.
fn one_sided_slopes(params: &CaseParams, side: Side) -> Result<[f64; 3]> {
    let x = |r: f64| xy_at(params, r).0;
    let y = |r: f64| xy_at(params, r).1;
    // r spans (−√s₀₁, √s₀₁); scale the stencil with it
    let h = 0.01 * params.r_max;
    let d = |f: &dyn Fn(f64) -> f64, order: u8| fd_stencil_derivative(f, 0.0, order, h, side, 11);
    let (x1, x2, x3) = (d(&x, 1)?, d(&x, 2)?, d(&x, 3)?);
    let (y1, y2, y3) = (d(&y, 1)?, d(&y, 2)?, d(&y, 3)?);
    let w = y2 * x1 - y1 * x2;
    let s1 = y1 / x1;
    let s2 = w / x1.powi(3);
    let s3 = (y3 * x1 - y1 * x3) / x1.powi(4) - 3.0 * x2 * w / x1.powi(5);
    Ok([s1, s2, s3])
}

/// The closed-form slope at G for the positive family:
/// −3√C̃ κ₀₁^{3/4} sinh μ₀,₁ / (4 cosh μ₀,₁ + 12κ₀₁).
pub fn glue_slope_closed_form(params: &CaseParams) -> Result<f64> {
    if params.tag != CaseTag::Positive {
        return Err(ExtrinsicError::WrongCase {
            expected: CaseTag::Positive,
            got: params.tag,
        });
    }
    let k = params.kappa01;
    let m = params.mu01;
    Ok(-3.0 * params.c_tilde.sqrt() * k.powf(0.75) * m.sinh() / (4.0 * m.cosh() + 12.0 * k))
}

/// The κ → 0 boundary point for a given limiting angle.
fn ideal_endpoint(params: &CaseParams, mu: f64) -> (f64, f64) {
    match params.tag {
        CaseTag::Positive => (2.0 * (0.5 * mu).tanh(), 0.0),
        CaseTag::Negative => (
            2.0 * mu.cos() / ((1.0 + std::f64::consts::SQRT_2) * (1.0 + mu.sin())),
            0.0,
        ),
        CaseTag::Zero => (1.0 / (2f64.powf(0.75) * mu), 0.0),
    }
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn segments_cross(p: (f64, f64), q: (f64, f64), r: (f64, f64), s: (f64, f64)) -> bool {
    let d1 = orient(r, s, p);
    let d2 = orient(r, s, q);
    let d3 = orient(p, q, r);
    let d4 = orient(p, q, s);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    // collinear overlap
    let on = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| {
        c.0 >= a.0.min(b.0) && c.0 <= a.0.max(b.0) && c.1 >= a.1.min(b.1) && c.1 <= a.1.max(b.1)
    };
    (d1 == 0.0 && on(r, s, p)) || (d2 == 0.0 && on(r, s, q)) || (d3 == 0.0 && on(p, q, r)) || (d4 == 0.0 && on(p, q, s))
}

/// First pair of non-adjacent crossing segments of an open polyline, by a
/// sweep over x-sorted segment extents.
pub(crate) fn find_self_intersection(pts: &[(f64, f64)]) -> Option<(usize, usize)> {
    let n = pts.len();
    if n < 4 {
        return None;
    }
    let mut order: Vec<usize> = (0..n - 1).collect();
    let lo = |i: usize| pts[i].0.min(pts[i + 1].0);
    let hi = |i: usize| pts[i].0.max(pts[i + 1].0);
    order.sort_by(|&a, &b| lo(a).total_cmp(&lo(b)));
    let mut active: Vec<usize> = Vec::new();
    let mut best: Option<(usize, usize)> = None;
    for &i in &order {
        let x = lo(i);
        active.retain(|&j| hi(j) >= x);
        for &j in &active {
            if i.abs_diff(j) <= 1 {
                continue;
            }
            if segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1]) {
                let pair = (i.min(j), i.max(j));
                if best.map_or(true, |b| pair < b) {
                    best = Some(pair);
                }
            }
        }
        active.push(i);
    }
    best
}

/// Build the glued profile with `n` samples per branch (n ≥ 8).
pub fn glue_profiles(params: &CaseParams, n: usize) -> Result<GluedProfile> {
    let n = n.max(8);
    // κ nodes clustered at both ends; κ = 0 replaced by a tiny positive value
    let mut kappas = chebyshev_lobatto(0.0, params.kappa01, n);
    kappas[0] = params.kappa01 * KAPPA_TINY_REL;
    let rs: Vec<f64> = kappas
        .iter()
        .map(|&k| if k >= params.kappa01 { 0.0 } else { params.r_of_kappa(k) })
        .collect();

    let mut samples = Vec::with_capacity(2 * n - 1);
    for &r in &rs {
        samples.push(sample_at_r(params, r)?);
    }
    let glue_index = samples.len() - 1;
    for &r in rs.iter().rev().skip(1) {
        samples.push(sample_at_r(params, -r)?);
    }
    let g = (samples[glue_index].x, samples[glue_index].y);

    let b1 = one_sided_slopes(params, Side::Right)?;
    let b2 = one_sided_slopes(params, Side::Left)?;
    let gaps = [0, 1, 2].map(|i| (b1[i] - b2[i]).abs());
    let derivative_match = DerivativeMatch {
        branch1: b1,
        branch2: b2,
        gaps,
        tolerances: GLUE_TOLERANCES,
    };
    samples[glue_index].derivs = Some(b1);

    let e1 = ideal_endpoint(params, params.mu0m1);
    let e2 = ideal_endpoint(params, 2.0 * params.mu01 - params.mu0m1);
    let first = samples.first().unwrap();
    let last = samples.last().unwrap();
    let dist = |p: (f64, f64), s: &ProfileSample| ((p.0 - s.x).powi(2) + (p.1 - s.y).powi(2)).sqrt();
    let closure_gap = dist(e1, first).max(dist(e2, last));

    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.x, s.y)).collect();
    let self_intersection = find_self_intersection(&pts);

    Ok(GluedProfile {
        samples,
        glue_index,
        gluing_point: g,
        glue_slope: 0.5 * (b1[0] + b2[0]),
        derivative_match,
        self_intersection,
        ideal_endpoints: [e1, e2],
        closure_gap,
    })
}

/// How the two branches meet at G.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GapReport {
    /// max distance of either branch, evaluated at κ₀₁, from the closed-form G
    pub at_g: f64,
    /// max distance from G of each branch extrapolated to κ₀₁ from strictly
    /// one-sided samples (degree-6 polynomial in r)
    pub extrapolated: f64,
    /// (ε, distance between the branches at κ = κ₀₁(1 − ε))
    pub approach: Vec<(f64, f64)>,
    /// fitted exponent p of gap ~ ε^p (½ for a square-root approach)
    pub rate: f64,
}

/// Gap between the branches at and near the gluing point.
pub fn gluing_gap(params: &CaseParams) -> Result<GapReport> {
    let g = profile_xy(params, params.s01, params.mu01);
    let b1 = Branch::first();
    let b2 = Branch::second(params);
    let d = |p: (f64, f64), q: (f64, f64)| ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt();
    let at = |k: f64| -> Result<f64> { Ok(d(sigma_half_space(k, b1, params)?, sigma_half_space(k, b2, params)?)) };
    let at_g = d(sigma_half_space(params.kappa01, b1, params)?, g).max(d(sigma_half_space(params.kappa01, b2, params)?, g));
    let mut approach = Vec::new();
    for eps in [1e-4, 1e-6, 1e-8] {
        approach.push((eps, at(params.kappa01 * (1.0 - eps))?));
    }
    let rate = (approach[1].1 / approach[2].1).ln() / 100f64.ln();
    // Lagrange weights for nodes k = 1..7 evaluated at 0
    let h = 0.01 * params.r_max;
    let mut extrapolated = 0.0f64;
    for sign in [1.0, -1.0] {
        let (mut x, mut y) = (0.0, 0.0);
        for k in 1..=7 {
            let w: f64 = (1..=7).filter(|&j| j != k).map(|j| j as f64 / (j as f64 - k as f64)).product();
            let p = xy_at(params, sign * k as f64 * h);
            x += w * p.0;
            y += w * p.1;
        }
        extrapolated = extrapolated.max(d((x, y), g));
    }
    Ok(GapReport {
        at_g,
        extrapolated,
        approach,
        rate,
    })
}

/// As [`glue_profiles`], but fails on any derivative mismatch or crossing.
pub fn glue_profiles_checked(params: &CaseParams, n: usize) -> Result<GluedProfile> {
    let g = glue_profiles(params, n)?;
    for i in 0..3 {
        if g.derivative_match.gaps[i] > GLUE_TOLERANCES[i] {
            return Err(ExtrinsicError::GlueMismatch {
                order: i as u8 + 1,
                gap: g.derivative_match.gaps[i],
            });
        }
    }
    if let Some((i, j)) = g.self_intersection {
        return Err(ExtrinsicError::SelfIntersection(i, j));
    }
    Ok(g)
}

impl Branch {
    /// The branch a glued-parameter sign belongs to.
    pub fn of_r(r: f64, params: &CaseParams) -> Branch {
        if r >= 0.0 {
            Branch::first()
        } else {
            Branch::second(params)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_detection() {
        let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        assert!(find_self_intersection(&square).is_none());
        let bow = [(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)];
        assert_eq!(find_self_intersection(&bow), Some((0, 2)));
    }

    #[test]
    fn reflection_is_involution() {
        let g = (0.3, 0.5);
        for m in [0.0, -0.2, 1.7] {
            let p = (0.9, 0.2);
            let q = reflect_across_glue_geodesic(g, m, reflect_across_glue_geodesic(g, m, p));
            assert!((q.0 - p.0).abs() < 1e-14 && (q.1 - p.1).abs() < 1e-14);
            let gg = reflect_across_glue_geodesic(g, m, g);
            assert!((gg.0 - g.0).abs() < 1e-14 && (gg.1 - g.1).abs() < 1e-14);
        }
    }

    #[test]
    fn glued_positive_family() {
        let p = CaseParams::new(1.0).unwrap();
        let g = glue_profiles_checked(&p, 100).unwrap();
        let cf = glue_slope_closed_form(&p).unwrap();
        assert!(cf < 0.0);
        assert!((g.derivative_match.branch1[0] - cf).abs() < 1e-6);
        assert!(g.min_y() > 0.0);
        assert!(g.closure_gap < 1e-9, "{}", g.closure_gap);
        assert!(g.reflection_defect(&p) < 1e-8);
    }
}
