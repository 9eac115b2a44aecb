/// Dense real polynomial, coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![0.0]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| i as f64 * c)
                .collect(),
        )
    }

    /// Synthetic division by (x - r). Returns (quotient, remainder).
    pub fn deflate(&self, r: f64) -> (Poly, f64) {
        let n = self.coeffs.len();
        if n <= 1 {
            return (Poly::new(vec![0.0]), self.coeffs.first().copied().unwrap_or(0.0));
        }
        let mut q = vec![0.0; n - 1];
        let mut acc = self.coeffs[n - 1];
        for i in (0..n - 1).rev() {
            q[i] = acc;
            acc = self.coeffs[i] + acc * r;
        }
        (Poly::new(q), acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deflate_cubic() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let p = Poly::new(vec![6.0, -7.0, 0.0, 1.0]);
        let (q, r) = p.deflate(2.0);
        assert!(r.abs() < 1e-14);
        assert_eq!(q.coeffs, vec![-3.0, 2.0, 1.0]);
        assert!((p.eval(0.5) - 2.625).abs() < 1e-15);
        assert_eq!(p.derivative().coeffs, vec![-7.0, 0.0, 3.0]);
    }
}
