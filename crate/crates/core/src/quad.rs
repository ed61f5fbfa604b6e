//! Gauss-Legendre quadrature with optional adaptive bisection.

use crate::error::{Error, Result};

/// Nodes and weights of an n-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build the rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        let n = n.max(1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Chebyshev-like initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[lo, hi]`.
    pub fn integrate<F>(&self, mut f: F, lo: f64, hi: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x)?;
        }
        let v = acc * half;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("quadrature over [{lo}, {hi}]")))
        }
    }

    /// Adaptive bisection down to the requested relative tolerance.
    pub fn integrate_adaptive<F>(&self, f: &mut F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let whole = self.integrate(&mut *f, lo, hi)?;
        self.adaptive_step(f, lo, hi, rel_tol, whole, 0)
    }

    fn adaptive_step<F>(
        &self,
        f: &mut F,
        lo: f64,
        hi: f64,
        rel_tol: f64,
        whole: f64,
        depth: usize,
    ) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mid = 0.5 * (lo + hi);
        let left = self.integrate(&mut *f, lo, mid)?;
        let right = self.integrate(&mut *f, mid, hi)?;
        let refined = left + right;
        let err = (refined - whole).abs();
        if err <= rel_tol * refined.abs().max(1.0) || depth >= 24 {
            return Ok(refined);
        }
        Ok(self.adaptive_step(f, lo, mid, rel_tol, left, depth + 1)?
            + self.adaptive_step(f, mid, hi, rel_tol, right, depth + 1)?)
    }
}

/// Legendre polynomial value and derivative at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials_up_to_2n_minus_1() {
        let rule = GaussLegendre::new(5);
        for k in 0..=9u32 {
            let exact = 1.0 / (k as f64 + 1.0);
            let got = rule.integrate(|t| Ok(t.powi(k as i32)), 0.0, 1.0).unwrap();
            assert!((got - exact).abs() < 1e-13, "k={k}: {got} vs {exact}");
        }
    }

    #[test]
    fn default_rule_hits_smooth_integrands() {
        let rule = GaussLegendre::new(32);
        let got = rule.integrate(|t| Ok(t.exp()), 0.0, 1.0).unwrap();
        assert!((got - (1f64.exp() - 1.0)).abs() < 1e-14);
        let got = rule.integrate(|t| Ok((3.0 * t).sin()), 0.0, 2.0).unwrap();
        let exact = (1.0 - (6.0f64).cos()) / 3.0;
        assert!((got - exact).abs() < 1e-13);
    }

    #[test]
    fn adaptive_refines_to_tolerance() {
        let rule = GaussLegendre::new(8);
        let mut f = |t: f64| Ok((50.0 * t).sin() * t.exp());
        let got = rule.integrate_adaptive(&mut f, 0.0, 1.0, 1e-12).unwrap();
        // antiderivative of exp(t) sin(50 t): exp(t)(sin(50t) - 50 cos(50t))/2501
        let anti = |t: f64| t.exp() * ((50.0 * t).sin() - 50.0 * (50.0 * t).cos()) / 2501.0;
        let exact = anti(1.0) - anti(0.0);
        assert!((got - exact).abs() <= 1e-10 * exact.abs().max(1.0));
    }
}
