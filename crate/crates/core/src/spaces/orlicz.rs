use crate::error::{Error, Result};
use crate::numerics::bisect;

use super::descriptor::OrliczFunction;

impl OrliczFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            OrliczFunction::Power(a) => t.powf(a.value()),
            OrliczFunction::Mix(a, b) => 0.5 * (t.powf(a.value()) + t.powf(b.value())),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let d = |a: f64| {
            if a == 1.0 {
                1.0
            } else {
                a * t.powf(a - 1.0)
            }
        };
        match self {
            OrliczFunction::Power(a) => d(a.value()),
            OrliczFunction::Mix(a, b) => 0.5 * (d(a.value()) + d(b.value())),
        }
    }

    /// `phi^{-1}(s)` for `s >= 0`.
    pub fn inverse(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            OrliczFunction::Power(a) => s.powf(1.0 / a.value()),
            OrliczFunction::Mix(..) => {
                // phi is increasing with phi(1) = 1, so the root lies between the
                // two pure-power inverses.
                let (lo, hi) = self.exponent_range();
                let (x1, x2) = (s.powf(1.0 / lo), s.powf(1.0 / hi));
                let (a, b) = (x1.min(x2), x1.max(x2));
                if a == b {
                    return a;
                }
                let mut root = bisect(|t| self.eval(t) - s, a, b, 0.0).unwrap_or(a);
                // polish: one Newton step keeps phi(phi^{-1}(s)) = s to machine precision
                let d = self.derivative(root);
                if d > 0.0 {
                    let next = root - (self.eval(root) - s) / d;
                    if next.is_finite() && next >= a && next <= b {
                        root = next;
                    }
                }
                root
            }
        }
    }

    /// `phi(sqrt t)` is concave (grid-free analytic check).
    pub fn sqrt_concave(&self) -> bool {
        self.exponent_range().1 <= 2.0
    }

    /// `phi(sqrt t)` is convex.
    pub fn sqrt_convex(&self) -> bool {
        self.exponent_range().0 >= 2.0
    }
}

/// Grid-based (advisory) shape check of an Orlicz function.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub convex: bool,
    pub sqrt_concave: bool,
    pub zero_at_zero: bool,
    pub one_at_one: bool,
    /// Always true: the midpoint tests only see the supplied grid.
    pub advisory: bool,
}

/// Midpoint convexity of `phi` and midpoint concavity of `t -> phi(sqrt t)` on
/// every pair of grid points, plus the normalizations `phi(0) = 0`, `phi(1) = 1`.
pub fn validate_orlicz(phi: &OrliczFunction, grid: &[f64]) -> Result<ValidationReport> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument("grid points must be positive".into()));
    }
    let tol = 1e-12;
    let mut convex = true;
    let mut sqrt_concave = true;
    let g = |t: f64| phi.eval(t.sqrt());
    for (i, &a) in grid.iter().enumerate() {
        for &b in &grid[i + 1..] {
            let m = 0.5 * (a + b);
            let (fa, fb, fm) = (phi.eval(a), phi.eval(b), phi.eval(m));
            if fm > 0.5 * (fa + fb) * (1.0 + tol) {
                convex = false;
            }
            let (ga, gb, gm) = (g(a), g(b), g(m));
            if gm < 0.5 * (ga + gb) * (1.0 - tol) {
                sqrt_concave = false;
            }
        }
    }
    Ok(ValidationReport {
        convex,
        sqrt_concave,
        zero_at_zero: phi.eval(0.0) == 0.0,
        one_at_one: (phi.eval(1.0) - 1.0).abs() <= 1e-15,
        advisory: true,
    })
}

/// `n` points spaced geometrically between `lo` and `hi`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (r * i as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::Scalar;

    fn power(a: f64) -> OrliczFunction {
        OrliczFunction::Power(Scalar::new(a))
    }

    #[test]
    fn validation_examples() {
        let grid = geometric_grid(1e-4, 1e4, 64);
        let r = validate_orlicz(&power(1.5), &grid).unwrap();
        assert!(r.convex && r.sqrt_concave && r.zero_at_zero && r.one_at_one && r.advisory);
        let r = validate_orlicz(&power(3.0), &grid).unwrap();
        assert!(r.convex && !r.sqrt_concave);
        let r = validate_orlicz(&power(2.0), &grid).unwrap();
        assert!(r.convex && r.sqrt_concave);
    }

    #[test]
    fn empty_grid_is_an_error() {
        assert_eq!(validate_orlicz(&power(2.0), &[]), Err(Error::EmptyGrid));
    }

    #[test]
    fn inverse_round_trips() {
        let grid = geometric_grid(1e-6, 1e6, 97);
        for phi in [
            power(1.5),
            power(3.0),
            OrliczFunction::Mix(Scalar::new(1.5), Scalar::new(3.0)),
            OrliczFunction::Mix(Scalar::new(1.0), Scalar::new(2.0)),
        ] {
            for &s in &grid {
                let t = phi.inverse(s);
                let back = phi.eval(t);
                assert!(((back - s) / s).abs() <= 1e-12, "{phi}: {s} -> {t} -> {back}");
            }
        }
    }

    #[test]
    fn mixed_family_shape() {
        let mix = OrliczFunction::Mix(Scalar::new(1.5), Scalar::new(2.0));
        let grid = geometric_grid(1e-4, 1e4, 64);
        let r = validate_orlicz(&mix, &grid).unwrap();
        assert!(r.convex && r.sqrt_concave);
        assert!(mix.sqrt_concave());
        let mix = OrliczFunction::Mix(Scalar::new(1.5), Scalar::new(3.0));
        assert!(!validate_orlicz(&mix, &grid).unwrap().sqrt_concave);
        assert!(!mix.sqrt_concave());
    }
}
