use std::collections::BinaryHeap;
use std::cmp::Ordering;

use super::{NumericsError, Result};

/// Endpoint behaviour declared by the caller: near `a` the integrand is
/// expected to behave like `(t - a)^lower_exponent`, likewise at `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub lower_exponent: f64,
    pub upper_exponent: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            lower_exponent: 0.0,
            upper_exponent: 0.0,
            abs_tol: super::QUAD_TOL,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn regular(abs_tol: f64) -> Self {
        QuadratureSpec {
            abs_tol,
            ..Default::default()
        }
    }

    /// Inverse square root blow-up at the upper end.
    pub fn inv_sqrt_upper(abs_tol: f64) -> Self {
        QuadratureSpec {
            upper_exponent: -0.5,
            abs_tol,
            ..Default::default()
        }
    }

    pub fn inv_sqrt_lower(abs_tol: f64) -> Self {
        QuadratureSpec {
            lower_exponent: -0.5,
            abs_tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        for &p in &[self.lower_exponent, self.upper_exponent] {
            if !p.is_finite() {
                return Err(NumericsError::InvalidSpec("endpoint exponent must be finite"));
            }
            if p <= -1.0 {
                return Err(NumericsError::DivergentIntegrand { exponent: p });
            }
        }
        if !(self.abs_tol > 0.0) {
            return Err(NumericsError::InvalidSpec("tolerance must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(NumericsError::InvalidSpec("max_subdivisions must be positive"));
        }
        Ok(())
    }
}

// 15-point Kronrod abscissae (non-negative half) and weights; the odd
// entries are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One G7K15 panel: (Kronrod value, |Kronrod - Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive G7K15: repeatedly bisects the panel with the largest
/// error estimate until the summed estimate drops below `abs_tol`.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, abs_tol: f64, max_subdivisions: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate_adaptive(f, b, a, abs_tol, max_subdivisions).map(|v| -v);
    }
    let (v, e) = gk15(&f, a, b);
    if !v.is_finite() {
        return Err(NumericsError::ToleranceNotMet {
            tol: abs_tol,
            estimate: f64::INFINITY,
        });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, val: v, err: e });
    let mut total_err = e;
    let mut splits = 0;
    while total_err > abs_tol {
        if splits >= max_subdivisions {
            break;
        }
        let p = heap.pop().expect("heap never empty");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        total_err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, val: v2, err: e2 });
        splits += 1;
    }
    // recompute sums from scratch; the running total drifts
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let val: f64 = panels.iter().map(|p| p.val).sum();
    let err: f64 = panels.iter().map(|p| p.err).sum();
    if !val.is_finite() || err > abs_tol {
        return Err(NumericsError::ToleranceNotMet {
            tol: abs_tol,
            estimate: err,
        });
    }
    Ok(val)
}

/// Integrate with declared endpoint power laws. An exponent `p` in (-1, 0)
/// at `a` triggers the substitution `t = a + s^k` with `k = 1/(1+p)`, which
/// makes the transformed integrand bounded (for `p = -1/2`, `t = a + s²`).
/// When both ends are singular the interval is split at the midpoint.
pub fn integrate_singular<F>(f: F, a: f64, b: f64, spec: QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        let flipped = QuadratureSpec {
            lower_exponent: spec.upper_exponent,
            upper_exponent: spec.lower_exponent,
            ..spec
        };
        return integrate_singular(f, b, a, flipped).map(|v| -v);
    }
    let lo_sing = spec.lower_exponent < 0.0;
    let hi_sing = spec.upper_exponent < 0.0;
    match (lo_sing, hi_sing) {
        (false, false) => integrate_adaptive(&f, a, b, spec.abs_tol, spec.max_subdivisions),
        (true, false) => lower_substituted(&f, a, b, spec.lower_exponent, spec.abs_tol, spec.max_subdivisions),
        (false, true) => upper_substituted(&f, a, b, spec.upper_exponent, spec.abs_tol, spec.max_subdivisions),
        (true, true) => {
            let m = 0.5 * (a + b);
            let half = spec.max_subdivisions / 2 + 1;
            let l = lower_substituted(&f, a, m, spec.lower_exponent, 0.5 * spec.abs_tol, half)?;
            let r = upper_substituted(&f, m, b, spec.upper_exponent, 0.5 * spec.abs_tol, half)?;
            Ok(l + r)
        }
    }
}

fn lower_substituted<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, p: f64, tol: f64, max: usize) -> Result<f64> {
    let k = 1.0 / (1.0 + p);
    let smax = (b - a).powf(1.0 / k);
    integrate_adaptive(
        |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            k * s.powf(k - 1.0) * f(a + s.powf(k))
        },
        0.0,
        smax,
        tol,
        max,
    )
}

fn upper_substituted<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, p: f64, tol: f64, max: usize) -> Result<f64> {
    let k = 1.0 / (1.0 + p);
    let smax = (b - a).powf(1.0 / k);
    integrate_adaptive(
        |s: f64| {
            if s <= 0.0 {
                return 0.0;
            }
            k * s.powf(k - 1.0) * f(b - s.powf(k))
        },
        0.0,
        smax,
        tol,
        max,
    )
}

/// Double-exponential (tanh-sinh) rule with step halving. Independent of the
/// Gauss-Kronrod machinery; tolerates integrable endpoint singularities as
/// long as `f` can be evaluated at points rounding close to the endpoints.
/// Nodes where `f` is not finite are dropped.
pub fn integrate_tanh_sinh<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    use std::f64::consts::FRAC_PI_2;
    if a == b {
        return Ok(0.0);
    }
    let half = 0.5 * (b - a);
    let tmax = 6.5;
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        // 1 - |x| computed without cancellation
        let comp = 1.0 / (u.abs().exp() * ch);
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        let d = half * comp;
        let x = if t >= 0.0 { b - d } else { a + d };
        if d == 0.0 || x <= a.min(b) || x >= a.max(b) {
            return 0.0;
        }
        let fx = f(x);
        if fx.is_finite() {
            fx * w
        } else {
            0.0
        }
    };
    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= tmax {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut prev = sum * h * half;
    for level in 0..12 {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let cur = sum * h * half;
        if (cur - prev).abs() < abs_tol && level >= 2 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(NumericsError::ToleranceNotMet {
        tol: abs_tol,
        estimate: f64::NAN,
    })
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Cumulative integral `x ↦ ∫_{lo}^{x} f` on a fixed panel partition with an
/// n-point Gauss-Legendre rule per panel. The evaluation at arbitrary `x`
/// integrates the partial panel with the same rule, so the result is a
/// smooth function of `x` (no adaptive switching), which is what downstream
/// finite differences need.
pub struct PanelIntegral<F> {
    f: F,
    breaks: Vec<f64>,
    cumulative: Vec<f64>,
    gx: Vec<f64>,
    gw: Vec<f64>,
}

impl<F: Fn(f64) -> f64> PanelIntegral<F> {
    pub fn new(f: F, breaks: Vec<f64>, order: usize) -> Self {
        assert!(breaks.len() >= 2);
        assert!(breaks.windows(2).all(|w| w[1] > w[0]));
        let (gx, gw) = gauss_legendre(order);
        let mut me = PanelIntegral {
            f,
            breaks,
            cumulative: Vec::new(),
            gx,
            gw,
        };
        let mut acc = 0.0;
        let mut cum = vec![0.0];
        for i in 0..me.breaks.len() - 1 {
            acc += me.rule(me.breaks[i], me.breaks[i + 1]);
            cum.push(acc);
        }
        me.cumulative = cum;
        me
    }

    pub fn uniform(f: F, lo: f64, hi: f64, panels: usize, order: usize) -> Self {
        let breaks = (0..=panels)
            .map(|i| lo + (hi - lo) * i as f64 / panels as f64)
            .collect();
        Self::new(f, breaks, order)
    }

    fn rule(&self, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.gx.iter().zip(&self.gw) {
            s += w * (self.f)(c + h * x);
        }
        s * h
    }

    pub fn lo(&self) -> f64 {
        self.breaks[0]
    }

    pub fn hi(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// ∫_{lo}^{x} f. `x` is clamped to the partition range.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(self.lo(), self.hi());
        let i = match self.breaks.binary_search_by(|b| b.total_cmp(&x)) {
            Ok(i) => return self.cumulative[i],
            Err(i) => i - 1,
        };
        // integrate from the nearer panel end to keep the partial piece short
        let (a, b) = (self.breaks[i], self.breaks[i + 1]);
        if x - a <= b - x {
            self.cumulative[i] + self.rule(a, x)
        } else {
            self.cumulative[i + 1] - self.rule(x, b)
        }
    }

    pub fn integrand(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}
