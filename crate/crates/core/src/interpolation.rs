//! Peetre K-functionals `K(t, x; E0, E1) = inf { ||x0||_E0 + t ||x1||_E1 : x = x0 + x1 }`
//! at finite dimension.
//!
//! Couples with `l_inf` as one member reduce to a clip of `|x|` at a level `c`
//! (exact for `(l_1, l_inf)`, golden-section search in `c` otherwise). General
//! couples are solved over `x1 = sign(x) y` with `y` non-increasing in the order
//! of `|x|` and `0 <= y <= |x|`; for symmetric norms this loses nothing, since
//! `x* - y*` is majorized by `x* - y`.

use std::cell::RefCell;

use crate::duality::{Certification, NormResult};
use crate::error::{Error, Result};
use crate::numerics::{golden_section, minimize_convex, SolverConfig};
use crate::spaces::{evaluate, sort_order, value_and_gradient, Scalar, SpaceDescriptor, Vector};

/// A decomposition `x = x0 + x1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    pub x0: Vector,
    pub x1: Vector,
}

impl Splitting {
    fn from_parts(x0: Vec<f64>, x1: Vec<f64>) -> Self {
        Splitting {
            x0: Vector::new(x0).expect("finite split"),
            x1: Vector::new(x1).expect("finite split"),
        }
    }

    /// Numbers of non-zero entries of `x0` and `x1`.
    pub fn support_sizes(&self) -> (usize, usize) {
        let nnz = |v: &Vector| v.entries().iter().filter(|t| **t != 0.0).count();
        (nnz(&self.x0), nnz(&self.x1))
    }

    fn swap(self) -> Self {
        Splitting {
            x0: self.x1,
            x1: self.x0,
        }
    }
}

/// Certification attached to iterative K-functional values.
pub const K_TOLERANCE: f64 = 1e-6;

pub fn k_functional(
    e0: &SpaceDescriptor,
    e1: &SpaceDescriptor,
    t: f64,
    x: &Vector,
) -> Result<(NormResult, Splitting)> {
    k_functional_with(e0, e1, t, x, &SolverConfig::default())
}

pub fn k_functional_with(
    e0: &SpaceDescriptor,
    e1: &SpaceDescriptor,
    t: f64,
    x: &Vector,
    cfg: &SolverConfig,
) -> Result<(NormResult, Splitting)> {
    check_inputs(e0, e1, t, cfg)?;
    let (a, b) = (e0.simplify(), e1.simplify());
    if a == b {
        let v = evaluate(e0, x.entries(), cfg)?;
        let zeros = vec![0.0; x.dim()];
        let xs = x.entries().to_vec();
        return Ok(if t >= 1.0 {
            (v, Splitting::from_parts(xs, zeros))
        } else {
            (
                NormResult {
                    value: t * v.value,
                    certification: v.certification,
                },
                Splitting::from_parts(zeros, xs),
            )
        });
    }
    let linf = |e: &SpaceDescriptor| matches!(e, SpaceDescriptor::Lp(p) if p.is_infinite());
    if linf(&b) {
        if a.is_lp(1.0) {
            return Ok(l1_linf(t, x));
        }
        return clip_solve(e0, t, x, cfg);
    }
    if linf(&a) {
        let (v, split) = clip_solve(e1, 1.0 / t, x, cfg)?;
        return Ok((
            NormResult {
                value: t * v.value,
                certification: v.certification,
            },
            split.swap(),
        ));
    }
    generic(e0, e1, t, x, cfg)
}

/// The convex-splitting solver without any closed-form shortcut.
pub fn k_functional_generic(
    e0: &SpaceDescriptor,
    e1: &SpaceDescriptor,
    t: f64,
    x: &Vector,
    cfg: &SolverConfig,
) -> Result<(NormResult, Splitting)> {
    check_inputs(e0, e1, t, cfg)?;
    generic(e0, e1, t, x, cfg)
}

fn check_inputs(
    e0: &SpaceDescriptor,
    e1: &SpaceDescriptor,
    t: f64,
    cfg: &SolverConfig,
) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveT(t));
    }
    e0.validate()?;
    e1.validate()?;
    cfg.validate()
}

/// `sum_{i <= m} x*_i + (t - m) x*_{m+1}` with `m = floor(t)`, split by clipping
/// at `x*_{m+1}`.
fn l1_linf(t: f64, x: &Vector) -> (NormResult, Splitting) {
    let s = crate::spaces::decreasing(x.entries());
    let n = s.len();
    let m = t.floor();
    let (value, level) = if m >= n as f64 {
        (s.iter().sum(), 0.0)
    } else {
        let m = m as usize;
        let head: f64 = s[..m].iter().sum();
        (head + (t - m as f64) * s[m], s[m])
    };
    (NormResult::exact_value(value), clip_split(x.entries(), level))
}

fn clip_split(x: &[f64], c: f64) -> Splitting {
    let x1: Vec<f64> = x.iter().map(|v| v.signum() * v.abs().min(c)).collect();
    let x0: Vec<f64> = x.iter().zip(&x1).map(|(v, w)| v - w).collect();
    Splitting::from_parts(x0, x1)
}

/// `min_c ||(|x| - c)_+||_E + t c` for the couple `(E, l_inf)`.
fn clip_solve(
    e: &SpaceDescriptor,
    t: f64,
    x: &Vector,
    cfg: &SolverConfig,
) -> Result<(NormResult, Splitting)> {
    let s = crate::spaces::decreasing(x.entries());
    let top = s[0];
    if top == 0.0 {
        let zeros = vec![0.0; x.dim()];
        return Ok((
            NormResult::exact_value(0.0),
            Splitting::from_parts(zeros.clone(), zeros),
        ));
    }
    let mut cert = Certification::Exact;
    let mut failure = None;
    let mut phi = |c: f64| -> f64 {
        let r: Vec<f64> = s.iter().map(|v| (v - c).max(0.0)).collect();
        match evaluate(e, &r, cfg) {
            Ok(v) => {
                cert = cert.combine(v.certification);
                v.value + t * c
            }
            Err(err) => {
                failure = Some(err);
                f64::INFINITY
            }
        }
    };
    let (c, value) = golden_section(&mut phi, 0.0, top, 1e-13 * top);
    if let Some(err) = failure {
        return Err(err);
    }
    let certification = cert.combine(Certification::Numerical(K_TOLERANCE));
    Ok((
        NormResult {
            value,
            certification,
        },
        clip_split(x.entries(), c),
    ))
}

/// Euclidean projection onto `{y : y non-increasing, 0 <= y <= s}` for a
/// non-increasing, non-negative bound `s`: pool-adjacent-violators where each
/// pooled block is minimized over `[0, min s]` of its members.
fn project_band(v: &[f64], s: &[f64]) -> Vec<f64> {
    // blocks: (sum of v, length, upper bound, fitted value)
    let mut blocks: Vec<(f64, usize, f64, f64)> = Vec::with_capacity(v.len());
    for (&vi, &hi) in v.iter().zip(s) {
        blocks.push((vi, 1, hi, vi.clamp(0.0, hi)));
        while blocks.len() > 1 {
            let k = blocks.len();
            if blocks[k - 2].3 >= blocks[k - 1].3 {
                break;
            }
            let (s2, l2, h2, _) = blocks.pop().unwrap();
            let (s1, l1, h1, _) = blocks.pop().unwrap();
            let (sum, len, hi) = (s1 + s2, l1 + l2, h1.min(h2));
            blocks.push((sum, len, hi, (sum / len as f64).clamp(0.0, hi)));
        }
    }
    let mut out = Vec::with_capacity(v.len());
    for (_, l, _, y) in blocks {
        out.extend(std::iter::repeat_n(y, l));
    }
    out
}

/// `min <g, z>` over the band polytope; its vertices take values in `{0, s_k}`.
fn band_linear_min(g: &[f64], s: &[f64]) -> f64 {
    let mut levels: Vec<f64> = s.to_vec();
    levels.push(0.0);
    levels.sort_by(|a, b| a.total_cmp(b));
    levels.dedup();
    let l = levels.len();
    // best[j]: minimal cost of the tail z_{i..n} with z_i <= levels[j]
    let mut best = vec![0.0; l];
    for i in (0..g.len()).rev() {
        let mut next = vec![f64::INFINITY; l];
        let mut running = f64::INFINITY;
        for j in 0..l {
            if levels[j] <= s[i] {
                let here = g[i] * levels[j] + best[j];
                running = running.min(here);
            }
            next[j] = running;
        }
        best = next;
    }
    best[l - 1]
}

fn generic(
    e0: &SpaceDescriptor,
    e1: &SpaceDescriptor,
    t: f64,
    x: &Vector,
    cfg: &SolverConfig,
) -> Result<(NormResult, Splitting)> {
    let order = sort_order(x.entries());
    let s: Vec<f64> = order.iter().map(|&i| x.entries()[i].abs()).collect();
    let n = s.len();
    if s[0] == 0.0 {
        let zeros = vec![0.0; n];
        return Ok((
            NormResult::exact_value(0.0),
            Splitting::from_parts(zeros.clone(), zeros),
        ));
    }
    let tiny = 1e-300;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let mut objective = |y: &[f64]| -> (f64, Vec<f64>) {
        // one-sided subgradients in the feasible directions: zero entries are
        // nudged to +tiny so lattice norms report their right derivatives
        let r: Vec<f64> = s.iter().zip(y).map(|(a, b)| (a - b).max(tiny)).collect();
        let y_pos: Vec<f64> = y.iter().map(|b| b.max(tiny)).collect();
        match (
            value_and_gradient(e0, &r, cfg),
            value_and_gradient(e1, &y_pos, cfg),
        ) {
            (Ok((v0, g0)), Ok((v1, g1))) => {
                let g = g0.iter().zip(&g1).map(|(a, b)| -a + t * b).collect();
                (v0 + t * v1, g)
            }
            (Err(err), _) | (_, Err(err)) => {
                *failure.borrow_mut() = Some(err);
                (f64::INFINITY, vec![0.0; n])
            }
        }
    };
    let project = |v: &[f64]| project_band(v, &s);
    let certificate = |y: &[f64], f: f64, g: &[f64]| -> f64 {
        let gy: f64 = g.iter().zip(y).map(|(a, b)| a * b).sum();
        f + band_linear_min(g, &s) - gy
    };
    let median = s[n / 2];
    let starts = [
        vec![0.0; n],
        s.clone(),
        s.iter().map(|v| v.min(median)).collect::<Vec<f64>>(),
    ];
    let inner = SolverConfig {
        tolerance: cfg.tolerance.max(1e-10),
        ..cfg.clone()
    };
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    for start in &starts {
        let m = minimize_convex(&mut objective, project, start, &inner, Some(&certificate));
        if let Some(err) = failure.borrow_mut().take() {
            return Err(err);
        }
        let lower = m.lower_bound.unwrap_or(f64::NEG_INFINITY);
        let keep = match &best {
            None => true,
            Some((v, _, _)) => m.value < *v,
        };
        let lb = best.as_ref().map_or(lower, |b| b.2.max(lower));
        if keep {
            best = Some((m.value, m.argmin, lb));
        } else if let Some(b) = best.as_mut() {
            b.2 = lb;
        }
        let (v, _, l) = best.as_ref().unwrap();
        if v - l <= inner.tolerance * v.abs() {
            break;
        }
    }
    let (_, y, lower) = best.unwrap();
    // exact re-evaluation at the returned splitting
    let xs = x.entries();
    let mut x1 = vec![0.0; n];
    for (k, &i) in order.iter().enumerate() {
        x1[i] = xs[i].signum() * y[k];
    }
    let x0: Vec<f64> = xs.iter().zip(&x1).map(|(a, b)| a - b).collect();
    let v0 = evaluate(e0, &x0, cfg)?;
    let v1 = evaluate(e1, &x1, cfg)?;
    let value = v0.value + t * v1.value;
    let gap = if value > 0.0 {
        ((value - lower) / value).max(0.0)
    } else {
        0.0
    };
    let certification = v0
        .certification
        .combine(v1.certification)
        .combine(Certification::Numerical(gap.max(K_TOLERANCE)));
    Ok((
        NormResult {
            value,
            certification,
        },
        Splitting::from_parts(x0, x1),
    ))
}

/// `K(t, x; E0^p, E1^p) / K(t^(1/p), |x|^(1/p); E0, E1)^p`.
pub fn power_equivalence_ratio(
    e0: &SpaceDescriptor,
    e1: &SpaceDescriptor,
    p: f64,
    t: f64,
    x: &Vector,
) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!("p must lie in (0,1], got {p}")));
    }
    if p == 1.0 {
        k_functional(e0, e1, t, x)?;
        return Ok(1.0);
    }
    let r = Scalar::new(p);
    let p0 = SpaceDescriptor::power(e0.clone(), r);
    let p1 = SpaceDescriptor::power(e1.clone(), r);
    let (left, _) = k_functional(&p0, &p1, t, x)?;
    let u = Vector::new(x.entries().iter().map(|v| v.abs().powf(1.0 / p)).collect())?;
    let (right, _) = k_functional(e0, e1, t.powf(1.0 / p), &u)?;
    if right.value == 0.0 {
        return Ok(1.0);
    }
    Ok(left.value / right.value.powf(p))
}

impl NormResult {
    fn exact_value(value: f64) -> Self {
        NormResult {
            value,
            certification: Certification::Exact,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{pava_decreasing, stream_rng};
    use rand::Rng;

    fn sp(s: &str) -> SpaceDescriptor {
        s.parse().unwrap()
    }

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    fn assert_split(x: &Vector, split: &Splitting) {
        for ((a, b), c) in split
            .x0
            .entries()
            .iter()
            .zip(split.x1.entries())
            .zip(x.entries())
        {
            assert!((a + b - c).abs() <= 1e-14 * c.abs().max(1.0));
        }
    }

    #[test]
    fn l1_linf_examples() {
        let x = v(&[4.0, 2.0, 1.0]);
        let (k, split) = k_functional(&sp("lp(1)"), &sp("lp(inf)"), 1.5, &x).unwrap();
        assert_eq!(k.value, 5.0);
        assert_eq!(k.certification, Certification::Exact);
        assert_split(&x, &split);
        let (k, _) = k_functional(&sp("lp(1)"), &sp("lp(inf)"), 7.0, &Vector::ones(5)).unwrap();
        assert_eq!(k.value, 5.0);
    }

    #[test]
    fn identical_couple() {
        let x = v(&[3.0, -4.0]);
        let e = sp("lp(2)");
        let (k, split) = k_functional(&e, &e, 1.0, &x).unwrap();
        assert_eq!(k.value, 5.0);
        assert_eq!(split.x1, Vector::zeros(2));
        let (k, _) = k_functional(&e, &e, 0.5, &x).unwrap();
        assert_eq!(k.value, 2.5);
        assert_eq!(
            k_functional(&e, &e, 0.0, &x).unwrap_err(),
            Error::NonPositiveT(0.0)
        );
    }

    #[test]
    fn l2_linf_matches_clip_scan() {
        let x = Vector::ones(4);
        let (k, split) = k_functional(&sp("lp(2)"), &sp("lp(inf)"), 1.0, &x).unwrap();
        let scan = (0..=1_000_000)
            .map(|i| {
                let c = i as f64 * 1e-6;
                2.0 * (1.0 - c) + c
            })
            .fold(f64::INFINITY, f64::min);
        assert!((k.value - scan).abs() <= 1e-9);
        assert_split(&x, &split);
    }

    #[test]
    fn swapped_couple_uses_symmetry() {
        let x = v(&[3.0, -1.0, 0.5, 2.0]);
        let (a, _) = k_functional(&sp("lp(inf)"), &sp("lp(1)"), 0.4, &x).unwrap();
        let (b, _) = k_functional(&sp("lp(1)"), &sp("lp(inf)"), 2.5, &x).unwrap();
        assert!((a.value - 0.4 * b.value).abs() <= 1e-12);
    }

    #[test]
    fn band_projection_matches_alternating_projections() {
        let mut rng = stream_rng(3, 0);
        for _ in 0..50 {
            let mut s: Vec<f64> = (0..7).map(|_| rng.random_range(0.0..2.0)).collect();
            s.sort_by(|a, b| b.total_cmp(a));
            let v: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..3.0)).collect();
            let p = project_band(&v, &s);
            // Dykstra between the monotone cone and the box
            let (mut y, mut pc, mut qc) = (v.clone(), vec![0.0; 7], vec![0.0; 7]);
            for _ in 0..5000 {
                let a: Vec<f64> = y.iter().zip(&pc).map(|(a, b)| a + b).collect();
                let z = pava_decreasing(&a, &[1.0; 7]);
                pc = a.iter().zip(&z).map(|(a, b)| a - b).collect();
                let b: Vec<f64> = z.iter().zip(&qc).map(|(a, b)| a + b).collect();
                y = b.iter().zip(&s).map(|(b, h)| b.clamp(0.0, *h)).collect();
                qc = b.iter().zip(&y).map(|(a, b)| a - b).collect();
            }
            for (a, b) in p.iter().zip(&y) {
                assert!((a - b).abs() < 1e-9, "{p:?} vs {y:?}");
            }
        }
    }

    #[test]
    fn band_linear_min_matches_vertex_enumeration() {
        let s = [3.0, 2.0, 2.0, 0.5];
        let g = [1.0, -2.0, 0.5, -3.0];
        // vertices: non-increasing sequences with entries in {0, s_k}, z <= s
        let vals = [0.0, 0.5, 2.0, 3.0];
        let mut best = f64::INFINITY;
        for a in vals {
            for b in vals {
                for c in vals {
                    for d in vals {
                        let z = [a, b, c, d];
                        let ok = z.windows(2).all(|w| w[0] >= w[1])
                            && z.iter().zip(&s).all(|(zi, si)| zi <= si);
                        if ok {
                            best = best.min(z.iter().zip(&g).map(|(x, y)| x * y).sum());
                        }
                    }
                }
            }
        }
        assert_eq!(band_linear_min(&g, &s), best);
    }

    #[test]
    fn generic_solver_matches_l1_linf_closed_form() {
        let mut rng = stream_rng(11, 0);
        let cfg = SolverConfig::default();
        let (l1, linf) = (sp("lp(1)"), sp("lp(inf)"));
        for _ in 0..30 {
            let n = rng.random_range(1..40);
            let x = v(&(0..n).map(|_| rng.random_range(-3.0..3.0)).collect::<Vec<_>>());
            let t = rng.random_range(0.05..(n as f64 + 2.0));
            let (exact, _) = k_functional(&l1, &linf, t, &x).unwrap();
            let (num, split) = k_functional_generic(&l1, &linf, t, &x, &cfg).unwrap();
            assert!(
                (num.value - exact.value).abs() <= 1e-6 * exact.value,
                "n={n} t={t}: {} vs {}",
                num.value,
                exact.value
            );
            assert_split(&x, &split);
        }
    }

    #[test]
    fn generic_solver_matches_clip_for_l2_linf() {
        let mut rng = stream_rng(12, 0);
        let cfg = SolverConfig::default();
        let (l2, linf) = (sp("lp(2)"), sp("lp(inf)"));
        for _ in 0..10 {
            let x = v(&(0..12).map(|_| rng.random_range(-3.0..3.0)).collect::<Vec<_>>());
            let t = rng.random_range(0.1..4.0);
            let (clip, _) = k_functional(&l2, &linf, t, &x).unwrap();
            let (num, _) = k_functional_generic(&l2, &linf, t, &x, &cfg).unwrap();
            assert!((num.value - clip.value).abs() <= 1e-6 * clip.value);
        }
    }

    #[test]
    fn monotone_and_concave_in_t() {
        let x = v(&[2.0, -1.0, 0.7, 0.2, 1.5]);
        for (a, b) in [("lp(1)", "lp(inf)"), ("lp(2)", "lp(inf)"), ("lp(1)", "lp(2)")] {
            let (e0, e1) = (sp(a), sp(b));
            let ts: Vec<f64> = (0..25).map(|i| 0.05 * 1.3f64.powi(i)).collect();
            let ks: Vec<f64> = ts
                .iter()
                .map(|&t| k_functional(&e0, &e1, t, &x).unwrap().0.value)
                .collect();
            for i in 1..ts.len() {
                assert!(ks[i] >= ks[i - 1] - 1e-9 * ks[i], "{a},{b}");
                assert!(ks[i] / ts[i] <= ks[i - 1] / ts[i - 1] + 1e-9, "{a},{b}");
            }
            for (&t, &k) in ts.iter().zip(&ks) {
                let n0 = evaluate(&e0, x.entries(), &SolverConfig::default()).unwrap().value;
                let n1 = evaluate(&e1, x.entries(), &SolverConfig::default()).unwrap().value;
                assert!(k <= n0.min(t * n1) * (1.0 + 1e-12) && k >= 0.0);
            }
        }
    }

    #[test]
    fn power_equivalence_examples() {
        let (l1, l2, linf) = (sp("lp(1)"), sp("lp(2)"), sp("lp(inf)"));
        let x = v(&[1.0, -0.3, 2.0]);
        assert_eq!(power_equivalence_ratio(&l1, &linf, 1.0, 0.7, &x).unwrap(), 1.0);
        let r = power_equivalence_ratio(&l1, &linf, 0.5, 1.0, &Vector::ones(6)).unwrap();
        assert!((0.5..=2.0).contains(&r));
        let mut rng = stream_rng(5, 0);
        for _ in 0..10 {
            let x = v(&(0..8).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<_>>());
            for t in [0.1, 1.0, 10.0] {
                let r = power_equivalence_ratio(&l2, &linf, 0.5, t, &x).unwrap();
                assert!((0.25..=4.0).contains(&r), "ratio {r}");
            }
        }
    }
}
