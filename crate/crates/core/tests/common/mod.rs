//! Reference computations for the integration tests. Nothing here calls the
//! library: roots by plain bisection on the unfactored functions, integrals
//! by Romberg extrapolation after a smoothing substitution.

#![allow(dead_code)]

pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) <= 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Romberg integration of a smooth integrand.
pub fn romberg(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut rows: Vec<Vec<f64>> = vec![vec![0.5 * (b - a) * (f(a) + f(b))]];
    let mut n = 1usize;
    for k in 1..24 {
        let h = (b - a) / (2 * n) as f64;
        let mid: f64 = (0..n).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
        n *= 2;
        let mut row = vec![0.5 * rows[k - 1][0] + h * mid];
        for j in 1..=k.min(8) {
            let p = 4f64.powi(j as i32);
            row.push(row[j - 1] + (row[j - 1] - rows[k - 1][j - 1]) / (p - 1.0));
        }
        let last = *row.last().unwrap();
        let prev = *rows[k - 1].last().unwrap();
        rows.push(row);
        if k > 4 && (last - prev).abs() <= tol * last.abs().max(1.0) {
            return last;
        }
    }
    *rows.last().unwrap().last().unwrap()
}

/// 16/9 − 16κ² + C̃κ^{3/2}, i.e. P(κ)/κ².
pub fn p_reduced(kappa: f64, c: f64) -> f64 {
    16.0 / 9.0 - 16.0 * kappa * kappa + c * kappa.powf(1.5)
}

pub fn kappa01(c: f64) -> f64 {
    bisect(|k| p_reduced(k, c), 1e-6, 2.0)
}

/// μ integrand in κ for the three families.
pub fn mu_integrand(tau: f64, c: f64) -> f64 {
    let p = (tau * tau * p_reduced(tau, c)).max(0.0).sqrt();
    if c == 0.0 {
        // 9/4 τ^{3/4}/√(1 − 9τ²), the same integrand written without P
        return 2.25 * tau.powf(0.75) / (1.0 - 9.0 * tau * tau).sqrt();
    }
    36.0 * c.abs().sqrt() * tau.powf(1.75) / ((9.0 * c * tau.powf(1.5) + 16.0) * p)
}

/// μ integrand at κ₀₁ − d, with the vanishing factor of P written as a
/// difference so that it keeps full relative precision as d → 0.
fn mu_integrand_near_root(d: f64, k01: f64, c: f64) -> f64 {
    let tau = k01 - d;
    // p_reduced(τ) − p_reduced(κ₀₁)
    let dp = 16.0 * d * (2.0 * k01 - d) + c * k01.powf(1.5) * (1.5 * (-d / k01).ln_1p()).exp_m1();
    let num = if c == 0.0 { 3.0 * tau.powf(1.75) } else { 36.0 * c.abs().sqrt() * tau.powf(1.75) / (9.0 * c * tau.powf(1.5) + 16.0) };
    num / (tau * dp.sqrt())
}

/// (μ₀,₋₁, μ₀,₁) with κ₀₀ = κ₀₁/2.
pub fn mu_limits(c: f64) -> (f64, f64) {
    let k01 = kappa01(c);
    let k00 = 0.5 * k01;
    // upper end: τ = κ₀₁ − t² removes the inverse square root
    let dpk = 32.0 * k01 - 1.5 * c * k01.sqrt();
    let num01 = if c == 0.0 { 3.0 * k01.powf(1.75) } else { 36.0 * c.abs().sqrt() * k01.powf(1.75) / (9.0 * c * k01.powf(1.5) + 16.0) };
    let at0 = 2.0 * num01 / (k01 * dpk.sqrt());
    let tu = (k01 - k00).sqrt();
    let up = romberg(|t| if t == 0.0 { at0 } else { 2.0 * t * mu_integrand_near_root(t * t, k01, c) }, 0.0, tu, 1e-14);
    // lower end: τ = t⁴
    let tl = k00.powf(0.25);
    let lo = romberg(|t| if t == 0.0 { 0.0 } else { 4.0 * t.powi(3) * mu_integrand(t.powi(4), c) }, 0.0, tl, 1e-14);
    (-lo, up)
}

pub fn t_fn(xi: f64, c: f64) -> f64 {
    -xi.powf(8.0 / 3.0) + c * xi * xi + 3.0
}

pub fn xi01(c: f64) -> f64 {
    bisect(|x| t_fn(x, c), 1e-6, 10.0)
}

/// √(3/(τ²T(τ))) at τ = ξ₀₁ − d, T written as T(τ) − T(ξ₀₁).
fn rho_integrand_near_root(d: f64, x01: f64, c: f64) -> f64 {
    let tau = x01 - d;
    let dt = -x01.powf(8.0 / 3.0) * (8.0 / 3.0 * (-d / x01).ln_1p()).exp_m1() - c * d * (2.0 * x01 - d);
    (3.0 / (tau * tau * dt)).sqrt()
}

/// ∫_{ξ}^{ξ₀₁} √(3/(τ²T(τ))) dτ, i.e. ω(ξ).
pub fn omega(xi: f64, c: f64) -> f64 {
    let x01 = xi01(c);
    let t_hi = (x01 - xi).max(0.0).sqrt();
    // −T′(ξ₀₁)
    let dt = 8.0 / 3.0 * x01.powf(5.0 / 3.0) - 2.0 * c * x01;
    let at0 = 2.0 * (3.0 / (x01 * x01 * dt)).sqrt();
    romberg(|t| if t == 0.0 { at0 } else { 2.0 * t * rho_integrand_near_root(t * t, x01, c) }, 0.0, t_hi, 1e-14)
}

/// ρ₁ = −∫_{ξ₀₀}^{ξ₀₁}, ξ₀₀ = ξ₀₁/2.
pub fn rho1(c: f64) -> f64 {
    -omega(0.5 * xi01(c), c)
}

/// Γ(w) = 1/ξ with ω(ξ) = |w|, by bisection on the quadrature.
pub fn gamma(w: f64, c: f64) -> f64 {
    let x01 = xi01(c);
    let xi = bisect(|x| omega(x, c) - w.abs(), 1e-3 * x01, x01);
    1.0 / xi
}
