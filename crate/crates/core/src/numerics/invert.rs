use super::{find_bracketed_root, Interval, NumericsError, Result, RootBracket, ROOT_TOL};

/// Solve f(x) = y for strictly monotone f on `domain`.
pub fn invert_monotone<F>(f: F, y: f64, domain: Interval) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let fa = f(domain.lo);
    let fb = f(domain.hi);
    let (lo, hi) = if fa <= fb { (fa, fb) } else { (fb, fa) };
    if !(y >= lo && y <= hi) {
        return Err(NumericsError::OutOfRange { y, lo, hi });
    }
    if y == fa {
        return Ok(domain.lo);
    }
    if y == fb {
        return Ok(domain.hi);
    }
    let tol = ROOT_TOL.min(domain.width() * 1e-14).max(f64::MIN_POSITIVE);
    find_bracketed_root(|x| f(x) - y, RootBracket::new(domain.lo, domain.hi), tol)
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Abscissae strictly increasing, ordinates strictly monotone, so the
/// interpolant is invertible as well.
#[derive(Debug, Clone)]
pub struct MonotoneTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl MonotoneTable {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(NumericsError::NotMonotone);
        }
        if !xs.windows(2).all(|w| w[1] > w[0]) {
            return Err(NumericsError::NotMonotone);
        }
        let inc = ys[1] > ys[0];
        if !ys.windows(2).all(|w| if inc { w[1] > w[0] } else { w[1] < w[0] }) {
            return Err(NumericsError::NotMonotone);
        }
        let delta: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut ds = vec![0.0; n];
        ds[0] = delta[0];
        ds[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            // weighted harmonic mean; same sign as neighbours by monotonicity
            ds[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
        Ok(MonotoneTable { xs, ys, ds })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn x_range(&self) -> Interval {
        Interval::new(self.xs[0], *self.xs.last().unwrap())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return self.ys[i],
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
    }

    /// x with eval(x) = y, by bracketing on the interpolant.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        invert_monotone(|x| self.eval(x), y, self.x_range())
    }
}
