use super::forms::Lin;
use super::{Accum, ResidualStats, Result, VerifyError};
use crate::extrinsic::{ArcSample, CaseParams, P_eval};
use crate::models::MinkowskiVec;

const D1: [f64; 7] = [-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0];
const D2: [f64; 7] = [2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0];

fn step(samples: &[ArcSample]) -> Result<f64> {
    if samples.len() < 7 {
        return Err(VerifyError::NonUniformSamples);
    }
    let h = samples[1].u - samples[0].u;
    let ok = h > 0.0 && samples.windows(2).all(|w| ((w[1].u - w[0].u) - h).abs() <= 1e-9 * h.max(1.0));
    if ok {
        Ok(h)
    } else {
        Err(VerifyError::NonUniformSamples)
    }
}

fn diff<T: Lin>(w: &[f64; 7], den: f64, i: usize, f: impl Fn(usize) -> T) -> T {
    let mut acc = T::zero();
    for (k, c) in w.iter().enumerate() {
        acc = acc.axpy(*c / den, f(i + k - 3));
    }
    acc
}

/// ⟨σ,σ⟩ + 1, |σ′|² − 1 and |σ″|² − (κ² − 1) along samples equally spaced
/// in arc length (derivatives by seven-point stencils, interior only).
pub fn profile_constraints_residual(samples: &[ArcSample], _params: &CaseParams) -> Result<Vec<ResidualStats>> {
    let h = step(samples)?;
    let p = |i: usize| -> MinkowskiVec { samples[i].point };
    let mut on = Accum::new("profile_on_hyperboloid", 1e-8);
    let mut unit = Accum::new("profile_unit_speed", 1e-6);
    let mut acc = Accum::new("profile_acceleration", 1e-4);
    for s in samples {
        on.push(s.point.norm_sq() + 1.0);
    }
    for i in 3..samples.len() - 3 {
        let d1 = diff(&D1, 60.0 * h, i, p);
        let d2 = diff(&D2, 180.0 * h * h, i, p);
        let k = samples[i].kappa;
        unit.push(d1.norm_sq() - 1.0);
        acc.push(d2.norm_sq() - (k * k - 1.0));
    }
    Ok(vec![on.finish(), unit.finish(), acc.finish()])
}

/// ((dκ/du)² − P(κ)) / max P over the samples.
pub fn first_integral_residual(samples: &[ArcSample], params: &CaseParams) -> Result<ResidualStats> {
    let h = step(samples)?;
    let mut pmax: f64 = 0.0;
    for s in samples {
        pmax = pmax.max(P_eval(s.kappa, params.c_tilde)?);
    }
    let mut acc = Accum::new("first_integral", 1e-6);
    for i in 3..samples.len() - 3 {
        let dk = diff(&D1, 60.0 * h, i, |k| samples[k].kappa);
        acc.push((dk * dk - P_eval(samples[i].kappa, params.c_tilde)?) / pmax);
    }
    Ok(acc.finish().with_note("normalized by the largest P on the samples"))
}
