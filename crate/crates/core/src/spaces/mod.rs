//! Symmetric sequence spaces: descriptors, the base catalog and exact norm
//! evaluation, decreasing rearrangements and fundamental functions.

mod descriptor;
mod eval;
mod orlicz;
mod parse;

use std::fmt;

pub use descriptor::{
    Attestations, FundamentalRule, OrliczFunction, Scalar, SpaceDescriptor, WeightRule,
};
pub use orlicz::{geometric_grid, validate_orlicz, ValidationReport};
pub use parse::{parse_couple, parse_space};

pub(crate) use eval::{evaluate, value_and_gradient};

use crate::duality::{Certification, NormResult};
use crate::error::{Error, Result};
use crate::numerics::SolverConfig;

/// A finite, non-empty real sequence with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Vector(entries))
    }

    pub fn ones(n: usize) -> Self {
        assert!(n >= 1);
        Vector(vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1);
        Vector(vec![0.0; n])
    }

    /// The unit vector `e_k` (0-based `k`) of dimension `n`.
    pub fn unit(n: usize, k: usize) -> Self {
        assert!(k < n);
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Indices ordering `|x|` non-increasingly; ties keep the original index order.
pub fn sort_order(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    idx
}

/// `x*` as a plain slice operation.
pub fn decreasing(x: &[f64]) -> Vec<f64> {
    let mut s: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Decreasing rearrangement `x*` of `|x|`.
pub fn rearrange(x: &Vector) -> Vector {
    Vector(decreasing(&x.0))
}

/// Running Cesàro means `x**_n = (x*_1 + ... + x*_n) / n`.
pub fn cesaro_mean(x: &Vector) -> Vector {
    let s = decreasing(&x.0);
    let mut acc = 0.0;
    Vector(
        s.iter()
            .enumerate()
            .map(|(i, v)| {
                acc += v;
                acc / (i + 1) as f64
            })
            .collect(),
    )
}

/// `||x||_E` with the default solver configuration.
pub fn norm(e: &SpaceDescriptor, x: &Vector) -> Result<NormResult> {
    norm_with(e, x, &SolverConfig::default())
}

/// `||x||_E` with an explicit solver configuration (used by derived spaces).
pub fn norm_with(e: &SpaceDescriptor, x: &Vector, cfg: &SolverConfig) -> Result<NormResult> {
    e.validate()?;
    cfg.validate()?;
    evaluate(e, x.entries(), cfg)
}

/// Fundamental function `lambda_E(n) = ||e_1 + ... + e_n||_E`.
pub fn fundamental(e: &SpaceDescriptor, n: usize) -> Result<NormResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("fundamental needs n >= 1".into()));
    }
    e.validate()?;
    fundamental_unchecked(e, n)
}

pub(crate) fn fundamental_unchecked(e: &SpaceDescriptor, n: usize) -> Result<NormResult> {
    use SpaceDescriptor::*;
    let nf = n as f64;
    let exact = |v: f64| Ok(NormResult::exact(v));
    match e {
        Lp(p) => {
            if p.is_infinite() {
                exact(1.0)
            } else {
                exact(nf.powf(1.0 / p.value()))
            }
        }
        LorentzPQ { p, q } => {
            if q.is_infinite() {
                exact(nf.powf(1.0 / p.value()))
            } else {
                let e = q.value() / p.value() - 1.0;
                let s: f64 = (1..=n).map(|k| (k as f64).powf(e)).sum();
                exact(s.powf(1.0 / q.value()))
            }
        }
        LorentzD { w, p } => exact(w.partial_sum(n).powf(1.0 / p.value())),
        Orlicz(phi) => exact(1.0 / phi.inverse(1.0 / nf)),
        Marcinkiewicz(rule) => {
            let mut best = 0.0f64;
            for k in 1..=n {
                best = best.max(marcinkiewicz_weight(rule, k)?);
            }
            exact(best)
        }
        _ => evaluate(e, &vec![1.0; n], &SolverConfig::default()),
    }
}

pub(crate) fn marcinkiewicz_weight(rule: &FundamentalRule, k: usize) -> Result<f64> {
    match rule {
        FundamentalRule::Pow(b) => Ok((k as f64).powf(b.value())),
        FundamentalRule::Of(e) => Ok(fundamental_unchecked(e, k)?.value),
    }
}

impl NormResult {
    pub(crate) fn exact(value: f64) -> Self {
        NormResult {
            value,
            certification: Certification::Exact,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn vector_invariants() {
        assert_eq!(Vector::new(vec![]), Err(Error::EmptyVector));
        assert_eq!(Vector::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(1)));
        assert_eq!(Vector::unit(3, 1).entries(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn rearrangement_examples() {
        assert_eq!(rearrange(&v(&[-2.0, 0.0, 5.0, 1.0])), v(&[5.0, 2.0, 1.0, 0.0]));
        assert_eq!(rearrange(&v(&[0.0, 0.0, 0.0])), v(&[0.0, 0.0, 0.0]));
        assert_eq!(rearrange(&v(&[1.0, 1.0, 1.0])), v(&[1.0, 1.0, 1.0]));
        assert_eq!(sort_order(&[1.0, -3.0, 3.0, 0.5]), vec![1, 2, 0, 3]);
    }

    #[test]
    fn cesaro_examples() {
        assert_eq!(cesaro_mean(&v(&[4.0, 2.0, 0.0])), v(&[4.0, 3.0, 2.0]));
        assert_eq!(cesaro_mean(&Vector::ones(5)), Vector::ones(5));
        let c = cesaro_mean(&v(&[1.0, 0.0, 0.0, 0.0]));
        for (a, b) in c.entries().iter().zip([1.0, 0.5, 1.0 / 3.0, 0.25]) {
            assert!(close(*a, b, 1e-15));
        }
    }

    #[test]
    fn norm_examples() {
        let l2 = SpaceDescriptor::lp(2.0);
        assert_eq!(norm(&l2, &v(&[3.0, 4.0])).unwrap().value, 5.0);
        let lor: SpaceDescriptor = "lorentz(4/3,2)".parse().unwrap();
        let want = (1.0 + 2f64.sqrt()).sqrt();
        assert!(close(norm(&lor, &v(&[1.0, 1.0])).unwrap().value, want, 1e-14));
        let orl: SpaceDescriptor = "orlicz(power(3/2))".parse().unwrap();
        let r = norm(&orl, &Vector::ones(4)).unwrap();
        assert!(close(r.value, 4f64.powf(2.0 / 3.0), 1e-12));
        let marc: SpaceDescriptor = "marc(pow(1/2))".parse().unwrap();
        assert!(close(norm(&marc, &v(&[1.0, 0.0, 0.0, 0.0])).unwrap().value, 1.0, 1e-15));
    }

    #[test]
    fn lorentz_brute_force_rearrangement_oracle() {
        // maximize sum c_n |x_{s(n)}|^q over all permutations s; decreasing
        // weights are matched with the largest entries
        let x: [f64; 4] = [0.3, -1.2, 0.7, 2.0];
        let (p, q) = (3.0, 2.0);
        let mut best = 0.0f64;
        let mut perm = [0usize, 1, 2, 3];
        permutations(&mut perm, 0, &mut |s| {
            let t: f64 = s
                .iter()
                .enumerate()
                .map(|(n, &i)| ((n + 1) as f64).powf(q / p - 1.0) * x[i].abs().powf(q))
                .sum();
            best = best.max(t);
        });
        let e = SpaceDescriptor::LorentzPQ {
            p: Scalar::integer(3),
            q: Scalar::integer(2),
        };
        assert!(close(norm(&e, &v(&x)).unwrap().value, best.sqrt(), 1e-14));
    }

    fn permutations(a: &mut [usize; 4], k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == a.len() {
            f(a);
            return;
        }
        for i in k..a.len() {
            a.swap(k, i);
            permutations(a, k + 1, f);
            a.swap(k, i);
        }
    }

    #[test]
    fn fundamental_examples() {
        assert_eq!(fundamental(&SpaceDescriptor::lp(1.0), 4).unwrap().value, 4.0);
        let orl: SpaceDescriptor = "orlicz(power(3/2))".parse().unwrap();
        assert!(close(fundamental(&orl, 4).unwrap().value, 4f64.powf(2.0 / 3.0), 1e-12));
        let d: SpaceDescriptor = "dwp(pow(0),2)".parse().unwrap();
        assert!(close(fundamental(&d, 9).unwrap().value, 3.0, 1e-15));
    }

    #[test]
    fn fundamental_agrees_with_norm_of_ones() {
        for src in [
            "lp(3/2)",
            "lp(inf)",
            "lorentz(4/3,2)",
            "lorentz(3,2)",
            "lorentz(3/2,inf)",
            "dwp(pow(1/2),3/2)",
            "orlicz(power(3/2))",
            "orlicz(mix(3/2,3))",
            "marc(pow(1/3))",
            "marc(fund(lp(2)))",
        ] {
            let e: SpaceDescriptor = src.parse().unwrap();
            for n in [1, 2, 7, 33] {
                let a = fundamental(&e, n).unwrap().value;
                let b = norm(&e, &Vector::ones(n)).unwrap().value;
                assert!(close(a, b, 1e-12), "{src} n={n}: {a} vs {b}");
            }
        }
    }
}
