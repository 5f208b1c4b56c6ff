use crate::duality::{self, Certification, NormResult};
use crate::error::Result;
use crate::numerics::{bisect, SolverConfig};

use super::descriptor::{OrliczFunction, SpaceDescriptor, WeightRule};
use super::{decreasing, marcinkiewicz_weight, sort_order};

/// Norm of `x` in `e`; `e` is assumed valid.
pub(crate) fn evaluate(e: &SpaceDescriptor, x: &[f64], cfg: &SolverConfig) -> Result<NormResult> {
    use SpaceDescriptor::*;
    match e {
        Dual(inner) => duality::dual_value(inner, x, cfg),
        Power(inner, r) => {
            let u: Vec<f64> = x.iter().map(|v| v.abs().powf(1.0 / r.value())).collect();
            let inner = evaluate(inner, &u, cfg)?;
            Ok(NormResult {
                value: inner.value.powf(r.value()),
                certification: inner.certification,
            })
        }
        Multiplier(from, to) => duality::multiplier_value(from, to, x, cfg),
        Orlicz(phi @ OrliczFunction::Mix(..)) => Ok(NormResult {
            value: luxemburg(phi, &decreasing(x)),
            certification: Certification::Numerical(1e-12),
        }),
        _ => Ok(NormResult::exact(catalog_value(e, &decreasing(x))?)),
    }
}

/// Norm together with a subgradient (in the coordinates of `x`).
pub(crate) fn value_and_gradient(
    e: &SpaceDescriptor,
    x: &[f64],
    cfg: &SolverConfig,
) -> Result<(f64, Vec<f64>)> {
    use SpaceDescriptor::*;
    match e {
        Dual(inner) => duality::dual_value_and_gradient(inner, x, cfg),
        Multiplier(from, to) => duality::multiplier_value_and_gradient(from, to, x, cfg),
        Power(inner, r) => {
            let r = r.value();
            let u: Vec<f64> = x.iter().map(|v| v.abs().powf(1.0 / r)).collect();
            let (v, g) = value_and_gradient(inner, &u, cfg)?;
            if v == 0.0 {
                return Ok((0.0, vec![0.0; x.len()]));
            }
            let floor = 1e-12 * x.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            let outer = v.powf(r - 1.0);
            let grad = x
                .iter()
                .zip(&g)
                .map(|(&xi, &gi)| {
                    if gi == 0.0 {
                        return 0.0;
                    }
                    let a = xi.abs().max(floor);
                    outer * gi * a.powf(1.0 / r - 1.0) * if xi < 0.0 { -1.0 } else { 1.0 }
                })
                .collect();
            Ok((v.powf(r), grad))
        }
        _ => {
            let order = sort_order(x);
            let s: Vec<f64> = order.iter().map(|&i| x[i].abs()).collect();
            let v = match e {
                Orlicz(phi @ OrliczFunction::Mix(..)) => luxemburg(phi, &s),
                _ => catalog_value(e, &s)?,
            };
            let mut grad = vec![0.0; x.len()];
            if v == 0.0 {
                return Ok((0.0, grad));
            }
            let gs = catalog_gradient(e, &s, v)?;
            for (k, &i) in order.iter().enumerate() {
                grad[i] = gs[k] * x[i].signum() * (x[i] != 0.0) as u8 as f64;
            }
            Ok((v, grad))
        }
    }
}

fn lp_value(p: f64, s: &[f64]) -> f64 {
    let m = s.first().copied().unwrap_or(0.0);
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    if p == 1.0 {
        return s.iter().sum();
    }
    if p == 2.0 {
        return m * s.iter().map(|t| (t / m).powi(2)).sum::<f64>().sqrt();
    }
    m * s.iter().map(|t| (t / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `(sum_n c_n s_n^q)^(1/q)` for non-increasing `s`.
fn weighted_value(q: f64, s: &[f64], c: impl Fn(usize) -> f64) -> f64 {
    let m = s.first().copied().unwrap_or(0.0);
    if m == 0.0 {
        return 0.0;
    }
    let total: f64 = s
        .iter()
        .enumerate()
        .map(|(k, t)| c(k + 1) * (t / m).powf(q))
        .sum();
    m * total.powf(1.0 / q)
}

fn lorentz_weight(p: f64, q: f64) -> impl Fn(usize) -> f64 {
    move |n| (n as f64).powf(q / p - 1.0)
}

/// Value on a non-increasing, non-negative `s` for the base catalog.
fn catalog_value(e: &SpaceDescriptor, s: &[f64]) -> Result<f64> {
    use SpaceDescriptor::*;
    Ok(match e {
        Lp(p) => lp_value(p.value(), s),
        LorentzPQ { p, q } => {
            let (p, q) = (p.value(), q.value());
            if q.is_infinite() {
                s.iter()
                    .enumerate()
                    .map(|(k, t)| ((k + 1) as f64).powf(1.0 / p) * t)
                    .fold(0.0, f64::max)
            } else {
                weighted_value(q, s, lorentz_weight(p, q))
            }
        }
        LorentzD { w, p } => weighted_value(p.value(), s, |n| w.weight(n)),
        Orlicz(OrliczFunction::Power(a)) => lp_value(a.value(), s),
        Orlicz(phi) => luxemburg(phi, s),
        Marcinkiewicz(rule) => {
            let mut acc = 0.0;
            let mut best = 0.0f64;
            for (k, t) in s.iter().enumerate() {
                acc += t;
                let n = k + 1;
                best = best.max(marcinkiewicz_weight(rule, n)? * acc / n as f64);
            }
            best
        }
        _ => unreachable!("derived spaces are evaluated in duality"),
    })
}

/// Luxemburg gauge `inf{rho : sum phi(s_i/rho) <= 1}` by bisection on the
/// bracket `[s_1, n s_1]`.
pub(crate) fn luxemburg(phi: &OrliczFunction, s: &[f64]) -> f64 {
    let top = s.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if top == 0.0 {
        return 0.0;
    }
    let modular = |rho: f64| s.iter().map(|t| phi.eval(t.abs() / rho)).sum::<f64>() - 1.0;
    let hi = top * s.len() as f64;
    if s.len() == 1 || modular(hi) >= 0.0 {
        return if s.len() == 1 { top } else { hi };
    }
    bisect(modular, top, hi, 0.0).unwrap_or(top)
}

/// Subgradient on sorted coordinates at `s` with norm `v > 0`.
fn catalog_gradient(e: &SpaceDescriptor, s: &[f64], v: f64) -> Result<Vec<f64>> {
    use SpaceDescriptor::*;
    let n = s.len();
    let power_grad = |p: f64, c: &dyn Fn(usize) -> f64| -> Vec<f64> {
        s.iter()
            .enumerate()
            .map(|(k, t)| {
                if p == 1.0 {
                    c(k + 1)
                } else {
                    c(k + 1) * (t / v).powf(p - 1.0)
                }
            })
            .collect()
    };
    let mut g = vec![0.0; n];
    match e {
        Lp(p) | Orlicz(OrliczFunction::Power(p)) => {
            if p.is_infinite() {
                g[0] = 1.0;
            } else {
                g = power_grad(p.value(), &|_| 1.0);
            }
        }
        LorentzPQ { p, q } => {
            let (p, q) = (p.value(), q.value());
            if q.is_infinite() {
                let (k, _) = s
                    .iter()
                    .enumerate()
                    .map(|(k, t)| (k, ((k + 1) as f64).powf(1.0 / p) * t))
                    .fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
                g[k] = ((k + 1) as f64).powf(1.0 / p);
            } else {
                let c = lorentz_weight(p, q);
                g = power_grad(q, &c);
            }
        }
        LorentzD { w, p } => {
            let w: &WeightRule = w;
            g = power_grad(p.value(), &|k| w.weight(k));
        }
        Orlicz(phi) => {
            let d: Vec<f64> = s.iter().map(|t| phi.derivative(t / v)).collect();
            let denom: f64 = d.iter().zip(s).map(|(di, t)| di * t).sum();
            if denom > 0.0 {
                g = d.iter().map(|di| v * di / denom).collect();
            }
        }
        Marcinkiewicz(rule) => {
            let mut acc = 0.0;
            let (mut best, mut arg, mut coef) = (f64::MIN, 0, 0.0);
            for (k, t) in s.iter().enumerate() {
                acc += t;
                let lam = marcinkiewicz_weight(rule, k + 1)?;
                let val = lam * acc / (k + 1) as f64;
                if val > best {
                    best = val;
                    arg = k;
                    coef = lam / (k + 1) as f64;
                }
            }
            g[..=arg].iter_mut().for_each(|gi| *gi = coef);
        }
        _ => unreachable!("derived spaces are evaluated in duality"),
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::stream_rng;
    use rand::Rng;

    #[test]
    fn gradients_are_supporting_functionals() {
        // <g, x> = ||x|| and <g, y> <= ||y|| for a subgradient g of a norm at x
        let cfg = SolverConfig::default();
        let mut rng = stream_rng(7, 0);
        for src in [
            "lp(1)",
            "lp(3/2)",
            "lp(3)",
            "lp(inf)",
            "lorentz(3,2)",
            "lorentz(2,1)",
            "dwp(pow(1/2),3/2)",
            "dwp(pow(1/3),1)",
            "orlicz(power(3/2))",
            "orlicz(mix(3/2,3))",
            "marc(pow(1/2))",
            "power(lp(1),1/2)",
        ] {
            let e: SpaceDescriptor = src.parse().unwrap();
            for _ in 0..20 {
                let x: Vec<f64> = (0..9).map(|_| rng.random_range(-2.0..2.0)).collect();
                let (v, g) = value_and_gradient(&e, &x, &cfg).unwrap();
                let pair: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
                assert!((pair - v).abs() <= 1e-9 * v, "{src}: <g,x>={pair} vs {v}");
                let y: Vec<f64> = (0..9).map(|_| rng.random_range(-2.0..2.0)).collect();
                let ny = evaluate(&e, &y, &cfg).unwrap().value;
                let gy: f64 = g.iter().zip(&y).map(|(a, b)| a * b).sum();
                assert!(gy <= ny * (1.0 + 1e-9), "{src}: <g,y>={gy} > {ny}");
            }
        }
    }

    #[test]
    fn luxemburg_matches_power_closed_form() {
        let phi = OrliczFunction::Power(crate::spaces::Scalar::ratio(3, 2));
        let s = [3.0, 2.0, 0.5, 0.1];
        let want = lp_value(1.5, &s);
        assert!((luxemburg(&phi, &s) - want).abs() <= 1e-13 * want);
    }
}
