//! Lower bounds for `(E,p)`-summing norms of finite operators from explicit
//! vector families, the theorem-based upper bound for `id: E_n -> l_2^n`, and
//! estimates of 2-concavity constants.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::duality::{identity_norm, BoundPair};
use crate::error::{Error, Result};
use crate::numerics::{gaussian_vec, stream_rng, SolverConfig};
use crate::snumbers::{svd_values, Matrix};
use crate::spaces::{
    evaluate, fundamental, norm, value_and_gradient, Scalar, SpaceDescriptor, Vector,
};

/// A matrix acting from `domain` (dimension `cols`) to `codomain` (dimension `rows`).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOperator {
    pub matrix: Matrix,
    pub domain: SpaceDescriptor,
    pub codomain: SpaceDescriptor,
}

impl FiniteOperator {
    pub fn new(matrix: Matrix, domain: SpaceDescriptor, codomain: SpaceDescriptor) -> Result<Self> {
        domain.validate()?;
        codomain.validate()?;
        Ok(FiniteOperator {
            matrix,
            domain,
            codomain,
        })
    }

    /// The formal identity `X_n -> Y_n`.
    pub fn identity(n: usize, domain: SpaceDescriptor, codomain: SpaceDescriptor) -> Result<Self> {
        FiniteOperator::new(Matrix::identity(n), domain, codomain)
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn scaled(&self, c: f64) -> Self {
        FiniteOperator {
            matrix: self.matrix.scale(c),
            ..self.clone()
        }
    }

    /// `self * diag(d)`.
    pub fn compose_diagonal(&self, d: &[f64]) -> Result<Self> {
        let m = self.matrix.transpose().scale_rows(d)?.transpose();
        Ok(FiniteOperator {
            matrix: m,
            ..self.clone()
        })
    }
}

/// A finite, non-empty family `x_1, ..., x_N` of vectors of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily(Vec<Vector>);

impl VectorFamily {
    pub fn new(vectors: Vec<Vector>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::InvalidArgument("vector family must be non-empty".into()));
        };
        let n = first.dim();
        if let Some(v) = vectors.iter().find(|v| v.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.dim(),
            });
        }
        Ok(VectorFamily(vectors))
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0[0].dim()
    }

    /// Matrix whose rows are the family members.
    pub fn as_matrix(&self) -> Matrix {
        let rows: Vec<Vec<f64>> = self.0.iter().map(|v| v.entries().to_vec()).collect();
        Matrix::from_rows(&rows).expect("family vectors share a dimension")
    }

    /// `(e_1, ..., e_n)`.
    pub fn coordinates(n: usize) -> Self {
        VectorFamily((0..n).map(|k| Vector::unit(n, k)).collect())
    }

    /// Indicator vectors of consecutive blocks of length `size`.
    pub fn blocks(n: usize, size: usize) -> Self {
        let size = size.clamp(1, n);
        let vectors = (0..n)
            .step_by(size)
            .map(|start| {
                let mut v = vec![0.0; n];
                v[start..(start + size).min(n)].iter_mut().for_each(|x| *x = 1.0);
                Vector::new(v).expect("finite")
            })
            .collect();
        VectorFamily(vectors)
    }

    /// `count` Gaussian vectors scaled to Euclidean norm 1.
    pub fn gaussian(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Self {
        let vectors = (0..count.max(1))
            .map(|_| {
                let g = gaussian_vec(rng, n);
                let s = crate::numerics::norm2(&g).max(f64::MIN_POSITIVE);
                Vector::new(g.into_iter().map(|x| x / s).collect()).expect("finite")
            })
            .collect();
        VectorFamily(vectors)
    }

    /// `e_i + eps g_i` for a common Gaussian direction `g`.
    pub fn rank_one_perturbation(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> Self {
        let g = gaussian_vec(rng, n);
        let vectors = (0..n)
            .map(|i| {
                let mut v: Vec<f64> = g.iter().map(|x| eps * x).collect();
                v[i] += 1.0;
                Vector::new(v).expect("finite")
            })
            .collect();
        VectorFamily(vectors)
    }
}

/// `count` seeded random families: Gaussian families of random length, and
/// every fourth one a rank-one perturbation of the coordinates.
pub fn random_families(n: usize, count: usize, seed: u64) -> Vec<VectorFamily> {
    (0..count)
        .map(|i| {
            let mut rng = stream_rng(seed, 1000 + i as u64);
            if i % 4 == 3 {
                let eps = rng.random_range(0.05..1.0);
                VectorFamily::rank_one_perturbation(&mut rng, n, eps)
            } else {
                let len = rng.random_range(1..=2 * n);
                VectorFamily::gaussian(&mut rng, n, len)
            }
        })
        .collect()
}

/// Coordinates, dyadic blocks and `random` seeded random families.
pub fn standard_families(n: usize, random: usize, seed: u64) -> Vec<VectorFamily> {
    let mut out = vec![VectorFamily::coordinates(n)];
    let mut size = 2;
    while size < n {
        out.push(VectorFamily::blocks(n, size));
        size *= 2;
    }
    out.extend(random_families(n, random, seed));
    out
}

/// Largest family for exact sign enumeration.
pub const MAX_EXACT_SIGNS: usize = 20;

fn lp_sum(a: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        a.iter().map(|x| x.abs()).sum()
    } else {
        a.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Sign vectors of length `n` with the first entry fixed to `+1`.
fn for_each_sign(n: usize, mut f: impl FnMut(&[f64])) {
    let mut eps = vec![1.0; n];
    for mask in 0u64..(1u64 << (n - 1)) {
        for (j, e) in eps.iter_mut().enumerate().skip(1) {
            *e = if mask >> (j - 1) & 1 == 1 { -1.0 } else { 1.0 };
        }
        f(&eps);
    }
}

/// `||(x_i)||_{l_p^w(X)} = sup { (sum |<x', x_i>|^p)^(1/p) : ||x'||_{X^x} <= 1 }`.
///
/// Exact (`lower == upper`) for one-element families, for `p = 2` on `l_2`
/// (largest singular value), for `p = 1` and at most [`MAX_EXACT_SIGNS`]
/// members (sign enumeration of `||sum e_i x_i||_X`), and for `X = l_1`
/// (dimension at most [`MAX_EXACT_SIGNS`]) or `X = l_inf`, where the dual ball
/// is a polytope. Otherwise `lower` comes from seeded power-method ascent and
/// `upper` from the strong norm and the singular-value bound.
pub fn weak_p_norm(family: &VectorFamily, p: f64, x: &SpaceDescriptor) -> Result<BoundPair> {
    weak_p_norm_with(family, p, x, &SolverConfig::default())
}

pub fn weak_p_norm_with(
    family: &VectorFamily,
    p: f64,
    x: &SpaceDescriptor,
    cfg: &SolverConfig,
) -> Result<BoundPair> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("weak norm needs 1 <= p < inf, got {p}")));
    }
    x.validate()?;
    let vs = family.vectors();
    let (big_n, n) = (family.len(), family.dim());
    if big_n == 1 {
        return Ok(BoundPair::exact(evaluate(x, vs[0].entries(), cfg)?.value));
    }
    let simple = x.simplify();
    let m = family.as_matrix();
    if p == 2.0 && simple.is_lp(2.0) {
        return Ok(BoundPair::exact(svd_values(&m)?.entries()[0]));
    }
    let pairing = |xp: &[f64]| -> f64 {
        let a: Vec<f64> = vs
            .iter()
            .map(|v| v.entries().iter().zip(xp).map(|(s, t)| s * t).sum())
            .collect();
        lp_sum(&a, p)
    };
    if matches!(&simple, SpaceDescriptor::Lp(q) if q.is_infinite()) {
        let best = (0..n)
            .map(|j| lp_sum(&vs.iter().map(|v| v.entries()[j]).collect::<Vec<_>>(), p))
            .fold(0.0, f64::max);
        return Ok(BoundPair::exact(best));
    }
    if simple.is_lp(1.0) && n <= MAX_EXACT_SIGNS {
        let mut best = 0.0f64;
        for_each_sign(n, |eps| best = best.max(pairing(eps)));
        return Ok(BoundPair::exact(best));
    }
    if p == 1.0 && big_n <= MAX_EXACT_SIGNS {
        let mut best = 0.0f64;
        let mut failure = None;
        let mut sum = vec![0.0; n];
        for_each_sign(big_n, |eps| {
            sum.iter_mut().for_each(|s| *s = 0.0);
            for (e, v) in eps.iter().zip(vs) {
                sum.iter_mut().zip(v.entries()).for_each(|(s, t)| *s += e * t);
            }
            match evaluate(x, &sum, cfg) {
                Ok(r) => best = best.max(r.value),
                Err(err) => failure = Some(err),
            }
        });
        if let Some(err) = failure {
            return Err(err);
        }
        return Ok(BoundPair::exact(best));
    }

    let upper = weak_upper_bound(family, p, x, cfg)?;
    // lower bound: x' = grad ||g||_X lies in the unit ball of X^x
    let mut lower = 0.0f64;
    let mut witness = None;
    let mut starts: Vec<Vec<f64>> = vs.iter().map(|v| v.entries().to_vec()).collect();
    starts.push((0..n).map(|j| vs.iter().map(|v| v.entries()[j]).sum()).collect());
    let mut rng = stream_rng(cfg.seed, 77);
    for _ in 0..cfg.restarts {
        starts.push(gaussian_vec(&mut rng, n));
    }
    for start in starts {
        let (_, mut xp) = value_and_gradient(x, &start, cfg)?;
        let mut val = pairing(&xp);
        for _ in 0..200 {
            let a: Vec<f64> = vs
                .iter()
                .map(|v| v.entries().iter().zip(&xp).map(|(s, t)| s * t).sum())
                .collect();
            let g: Vec<f64> = (0..n)
                .map(|j| {
                    vs.iter()
                        .zip(&a)
                        .map(|(v, ai)| ai.abs().powf(p - 1.0) * ai.signum() * v.entries()[j])
                        .sum()
                })
                .collect();
            if g.iter().all(|t| *t == 0.0) {
                break;
            }
            let (_, next) = value_and_gradient(x, &g, cfg)?;
            let nv = pairing(&next);
            if nv <= val * (1.0 + 1e-13) {
                if nv > val {
                    val = nv;
                    xp = next;
                }
                break;
            }
            val = nv;
            xp = next;
        }
        if val > lower {
            lower = val;
            witness = Some(xp);
        }
    }

    Ok(BoundPair {
        lower,
        upper: upper.max(lower),
        witness,
    })
}

/// `min((sum ||x_i||_X^p)^(1/p), ||id: l_2^N -> l_p^N|| s_1(M) ||id: l_2^n -> X_n||)`
/// where `M` has the family as rows.
fn weak_upper_bound(
    family: &VectorFamily,
    p: f64,
    x: &SpaceDescriptor,
    cfg: &SolverConfig,
) -> Result<f64> {
    let vs = family.vectors();
    let (big_n, n) = (family.len(), family.dim());
    let strong = lp_sum(
        &vs.iter()
            .map(|v| Ok(evaluate(x, v.entries(), cfg)?.value))
            .collect::<Result<Vec<f64>>>()?,
        p,
    );
    let to_lp = if p <= 2.0 {
        (big_n as f64).powf(1.0 / p - 0.5)
    } else {
        1.0
    };
    let sigma = svd_values(&family.as_matrix())?.entries()[0];
    let l2_to_x = identity_norm(&SpaceDescriptor::lp(2.0), x, n)?.upper;
    Ok(strong.min(to_lp * sigma * l2_to_x))
}

/// An upper bound for the weak norm: exact where sign enumeration costs at
/// most about `10^6` operations, otherwise [`weak_upper_bound`].
pub fn weak_p_upper(
    family: &VectorFamily,
    p: f64,
    x: &SpaceDescriptor,
    cfg: &SolverConfig,
) -> Result<f64> {
    let (big_n, n) = (family.len(), family.dim());
    let simple = x.simplify();
    let signs = if simple.is_lp(1.0) { n } else if p == 1.0 { big_n } else { 0 };
    let cheap = signs == 0
        || (signs <= MAX_EXACT_SIGNS && (1u64 << (signs - 1)) * (big_n * n) as u64 <= 1_000_000);
    let polytope = simple.is_lp(1.0) || p == 1.0;
    if big_n == 1
        || (p == 2.0 && simple.is_lp(2.0))
        || matches!(&simple, SpaceDescriptor::Lp(q) if q.is_infinite())
        || (polytope && cheap)
    {
        return Ok(weak_p_norm_with(family, p, x, cfg)?.upper);
    }
    weak_upper_bound(family, p, x, cfg)
}

/// `c_p^E = ||id: l_p -> E||` evaluated at dimension `n`; `1` for `p = 1`.
pub fn inclusion_constant(e: &SpaceDescriptor, p: f64, n: usize) -> Result<f64> {
    if p == 1.0 {
        return Ok(1.0);
    }
    let lp = SpaceDescriptor::lp(p);
    Ok(identity_norm(&lp, e, n)?.upper)
}

fn check_sequence_space(e: &SpaceDescriptor) -> Result<()> {
    e.validate()?;
    let unit = fundamental(e, 1)?.value;
    if (unit - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "summing norms need ||e_n||_E = 1, got {unit} for {e}"
        )));
    }
    Ok(())
}

/// Lower bound for `pi_{E,p}(T)`:
/// `max over families of ||(||T x_i||)||_E / (c_p^E ||(x_i)||_{l_p^w})`.
/// The upper member is `+inf`; callers attach theorem-based bounds themselves.
pub fn summing_lower(
    t: &FiniteOperator,
    e: &SpaceDescriptor,
    p: f64,
    families: &[VectorFamily],
) -> Result<BoundPair> {
    summing_lower_with(t, e, p, families, &SolverConfig::default())
}

pub fn summing_lower_with(
    t: &FiniteOperator,
    e: &SpaceDescriptor,
    p: f64,
    families: &[VectorFamily],
    cfg: &SolverConfig,
) -> Result<BoundPair> {
    check_sequence_space(e)?;
    let mut lower = 0.0f64;
    let mut witness = None;
    for (idx, fam) in families.iter().enumerate() {
        if fam.dim() != t.domain_dim() {
            return Err(Error::DimensionMismatch {
                expected: t.domain_dim(),
                got: fam.dim(),
            });
        }
        let weak = weak_p_upper(fam, p, &t.domain, cfg)?;
        if weak == 0.0 {
            continue;
        }
        let images = fam
            .vectors()
            .iter()
            .map(|v| {
                let tx = t.matrix.apply(v.entries())?;
                Ok(evaluate(&t.codomain, &tx, cfg)?.value)
            })
            .collect::<Result<Vec<f64>>>()?;
        let top = evaluate(e, &images, cfg)?.value;
        let c = inclusion_constant(e, p, fam.len())?;
        let ratio = top / (c * weak);
        if ratio > lower {
            lower = ratio;
            witness = Some(vec![idx as f64]);
        }
    }
    Ok(BoundPair {
        lower,
        upper: f64::INFINITY,
        witness,
    })
}

/// `sqrt(2) * c * M_(2)(E)` with `c = 1`: the bound on
/// `pi_{M(l_2,E),2}(id: E_n -> l_2^n)`.
pub fn summing_upper_main(e: &SpaceDescriptor) -> Result<f64> {
    e.validate()?;
    let a = e.attestations();
    match (a.two_concave, a.two_concavity_constant) {
        (true, Some(m2)) => Ok(std::f64::consts::SQRT_2 * m2),
        _ => Err(Error::MissingAttestation(format!(
            "{e} has no recorded 2-concavity constant"
        ))),
    }
}

fn concavity_ratio(e: &SpaceDescriptor, xs: &[Vec<f64>], cfg: &SolverConfig) -> Result<f64> {
    let n = xs[0].len();
    let mut num = 0.0;
    for x in xs {
        num += evaluate(e, x, cfg)?.value.powi(2);
    }
    let square: Vec<f64> = (0..n)
        .map(|j| xs.iter().map(|x| x[j] * x[j]).sum::<f64>().sqrt())
        .collect();
    let den = evaluate(e, &square, cfg)?.value;
    Ok(if den > 0.0 { num.sqrt() / den } else { 0.0 })
}

/// Lower bound for the 2-concavity constant of `E_n` from `trials` sampled
/// tuples of at most eight vectors, each refined by a short random local
/// search; the upper member is the recorded constant or `+inf`.
pub fn concavity_estimate(e: &SpaceDescriptor, n: usize, trials: usize, seed: u64) -> Result<BoundPair> {
    if n < 2 {
        return Err(Error::InvalidArgument("concavity estimate needs n >= 2".into()));
    }
    e.validate()?;
    let cfg = SolverConfig::default().with_seed(seed);
    let mut rng = stream_rng(seed, 31);
    let mut best = 0.0f64;
    let mut witness = None;
    for trial in 0..trials {
        let m = rng.random_range(1..=8usize);
        let mut xs: Vec<Vec<f64>> = match trial % 3 {
            // disjoint supports
            0 => (0..m)
                .map(|i| {
                    (0..n)
                        .map(|j| if j % m == i { rng.random_range(0.0..1.0) } else { 0.0 })
                        .collect()
                })
                .collect(),
            // sparse
            1 => (0..m)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            if rng.random_bool(0.3) {
                                rng.random_range(-1.0..1.0)
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect(),
            _ => (0..m).map(|_| gaussian_vec(&mut rng, n)).collect(),
        };
        let mut r = concavity_ratio(e, &xs, &cfg)?;
        for step in 0..20 {
            let i = rng.random_range(0..m);
            let j = rng.random_range(0..n);
            let old = xs[i][j];
            xs[i][j] += rng.random_range(-1.0..1.0) / (1.0 + step as f64);
            let nr = concavity_ratio(e, &xs, &cfg)?;
            if nr > r {
                r = nr;
            } else {
                xs[i][j] = old;
            }
        }
        if r > best {
            best = r;
            witness = Some(xs.concat());
        }
    }
    let upper = e
        .attestations()
        .two_concavity_constant
        .unwrap_or(f64::INFINITY)
        .max(best);
    Ok(BoundPair {
        lower: best,
        upper,
        witness,
    })
}

/// Outcome of [`inclusion_consistency`].
#[derive(Debug, Clone, PartialEq)]
pub struct InclusionReport {
    /// `1/r = 1/p - 1/q`.
    pub r: f64,
    /// Lower bound for `pi_{M(l_r,E),q}(T)`.
    pub lhs_lower: f64,
    /// Lower bound for `pi_{E,p}(T)`.
    pub rhs_lower: f64,
    /// `c_p^E (c_q^{M(l_r,E)})^-1 * pi_upper`, when an upper bound was supplied.
    pub rhs_upper: Option<f64>,
    pub consistent: bool,
}

/// Non-contradiction check of `pi_{M(l_r,E),q}(T) <= c_p^E (c_q^{M(l_r,E)})^-1 pi_{E,p}(T)`.
pub fn inclusion_consistency(
    t: &FiniteOperator,
    e: &SpaceDescriptor,
    p: f64,
    q: f64,
    families: &[VectorFamily],
    pi_upper: Option<f64>,
) -> Result<InclusionReport> {
    if !(p >= 1.0 && p < q) {
        return Err(Error::ParameterOrder(format!("need 1 <= p < q, got p={p}, q={q}")));
    }
    let inv_r = 1.0 / p - if q.is_infinite() { 0.0 } else { 1.0 / q };
    let r = 1.0 / inv_r;
    let lr = SpaceDescriptor::Lp(Scalar::new(r));
    let m = SpaceDescriptor::multiplier(lr, e.clone());
    let lhs_lower = summing_lower(t, &m, q, families)?.lower;
    let rhs_lower = summing_lower(t, e, p, families)?.lower;
    let size = families.iter().map(|f| f.len()).max().unwrap_or(1);
    let rhs_upper = match pi_upper {
        Some(u) => Some(inclusion_constant(e, p, size)? / inclusion_constant(&m, q, 1)? * u),
        None => None,
    };
    let consistent = match rhs_upper {
        Some(u) => lhs_lower <= u * (1.0 + 1e-9) + 1e-12,
        None => true,
    };
    Ok(InclusionReport {
        r,
        lhs_lower,
        rhs_lower,
        rhs_upper,
        consistent,
    })
}

/// `||x||_E` for a family-of-norms sequence, exposed for reports.
pub fn sequence_norm(e: &SpaceDescriptor, values: &[f64]) -> Result<f64> {
    Ok(norm(e, &Vector::new(values.to_vec())?)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: &str) -> SpaceDescriptor {
        s.parse().unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn weak_norm_examples() {
        for n in [1usize, 3, 6] {
            let fam = VectorFamily::coordinates(n);
            assert!(close(weak_p_norm(&fam, 2.0, &sp("lp(2)")).unwrap().lower, 1.0, 1e-14));
            let w = weak_p_norm(&fam, 2.0, &sp("lp(1)")).unwrap();
            assert!(close(w.lower, (n as f64).sqrt(), 1e-14) && w.gap() == 0.0);
        }
        let single = VectorFamily::new(vec![Vector::new(vec![3.0, -4.0]).unwrap()]).unwrap();
        for p in [1.0, 2.0, 3.0] {
            assert_eq!(weak_p_norm(&single, p, &sp("lp(2)")).unwrap().lower, 5.0);
        }
    }

    #[test]
    fn weak_one_norm_matches_sign_enumeration_of_dual_pairing() {
        // p = 1, X = l_2: sup over the Euclidean ball of sum |<x', x_i>|
        let mut rng = stream_rng(9, 0);
        let fam = VectorFamily::gaussian(&mut rng, 3, 4);
        let w = weak_p_norm(&fam, 1.0, &sp("lp(2)")).unwrap();
        let mut best = 0.0f64;
        for k in 0..200_000 {
            let a = k as f64 * 0.0001;
            let b = (k as f64 * 0.61803398875).fract() * std::f64::consts::PI;
            let xp = [a.cos() * b.sin(), a.sin() * b.sin(), b.cos()];
            let s: f64 = fam
                .vectors()
                .iter()
                .map(|v| v.entries().iter().zip(&xp).map(|(x, y)| x * y).sum::<f64>().abs())
                .sum();
            best = best.max(s);
        }
        assert!(best <= w.lower * (1.0 + 1e-12) && best >= w.lower * (1.0 - 1e-3));
    }

    #[test]
    fn weak_norm_bounds_bracket_exact_value() {
        let mut rng = stream_rng(4, 0);
        for _ in 0..5 {
            let fam = VectorFamily::gaussian(&mut rng, 5, 7);
            let exact = weak_p_norm(&fam, 2.0, &sp("lp(1)")).unwrap();
            let est = weak_p_norm(&fam, 2.0, &sp("lorentz(3/2,1)")).unwrap();
            assert!(exact.gap() == 0.0);
            assert!(est.lower <= est.upper * (1.0 + 1e-12));
        }
    }

    #[test]
    fn summing_lower_examples() {
        for n in [2usize, 4, 9] {
            let fam = vec![VectorFamily::coordinates(n)];
            let t = FiniteOperator::identity(n, sp("lp(1)"), sp("lp(2)")).unwrap();
            let b = summing_lower(&t, &sp("lp(2)"), 2.0, &fam).unwrap();
            assert!(close(b.lower, 1.0, 1e-14));
            let t = FiniteOperator::identity(n, sp("lp(2)"), sp("lp(2)")).unwrap();
            let b = summing_lower(&t, &sp("lp(2)"), 2.0, &fam).unwrap();
            assert!(close(b.lower, (n as f64).sqrt(), 1e-14));
        }
        let t = FiniteOperator::identity(3, sp("lp(2)"), sp("lp(2)")).unwrap();
        let zero = VectorFamily::new(vec![Vector::zeros(3)]).unwrap();
        assert_eq!(summing_lower(&t, &sp("lp(2)"), 2.0, &[zero]).unwrap().lower, 0.0);
    }

    #[test]
    fn summing_lower_is_monotone_and_homogeneous() {
        let n = 5;
        let fams = standard_families(n, 12, 3);
        let t = FiniteOperator::identity(n, sp("lp(4/3)"), sp("lp(2)")).unwrap();
        let e = sp("lp(4)");
        let mut prev = 0.0;
        for k in 1..=fams.len() {
            let b = summing_lower(&t, &e, 2.0, &fams[..k]).unwrap().lower;
            assert!(b >= prev);
            prev = b;
        }
        let scaled = summing_lower(&t.scaled(-2.5), &e, 2.0, &fams).unwrap().lower;
        assert!(close(scaled, 2.5 * prev, 1e-12));
    }

    #[test]
    fn ideal_property_with_diagonal_operators() {
        let mut rng = stream_rng(8, 0);
        let n = 6;
        let t = FiniteOperator::identity(n, sp("lp(1)"), sp("lp(2)")).unwrap();
        let fams = standard_families(n, 8, 8);
        for _ in 0..5 {
            let d: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let s_norm = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let ts = t.compose_diagonal(&d).unwrap();
            let lower = summing_lower(&ts, &sp("lp(2)"), 2.0, &fams).unwrap().lower;
            // pi_2(id: l_1 -> l_2) = 1 and ||diag(d): l_1 -> l_1|| = max |d|
            assert!(lower <= s_norm * (1.0 + 1e-9));
        }
    }

    #[test]
    fn upper_main_examples() {
        let s2 = std::f64::consts::SQRT_2;
        assert!(close(summing_upper_main(&sp("lp(1)")).unwrap(), s2, 1e-15));
        assert!(close(summing_upper_main(&sp("lp(2)")).unwrap(), s2, 1e-15));
        let v = summing_upper_main(&sp("lp(4/3)")).unwrap();
        assert!((s2..=1.5 * s2).contains(&v));
        assert!(matches!(summing_upper_main(&sp("lp(3)")), Err(Error::MissingAttestation(_))));
    }

    #[test]
    fn concavity_examples() {
        let b = concavity_estimate(&sp("lp(2)"), 6, 300, 1).unwrap();
        assert!(close(b.lower, 1.0, 1e-12));
        let r = concavity_ratio(
            &sp("lp(1)"),
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(close(r, std::f64::consts::SQRT_2 / 2.0, 1e-15));
        for p in ["lp(1)", "lp(4/3)", "lp(3/2)"] {
            let b = concavity_estimate(&sp(p), 8, 500, 2).unwrap();
            assert!(b.lower <= 1.0 + 1e-9, "{p}: {}", b.lower);
        }
        // l_3 is not 2-concave: disjoint supports give n^(1/2 - 1/3)
        let b = concavity_estimate(&sp("lp(3)"), 8, 300, 3).unwrap();
        assert!(b.lower > 1.2 && b.upper.is_infinite());
    }

    #[test]
    fn inclusion_examples() {
        let t = FiniteOperator::identity(4, sp("lp(1)"), sp("lp(2)")).unwrap();
        let fams = standard_families(4, 8, 5);
        // Grothendieck: pi_1(id: l_1 -> l_2) <= K_G < 1.783
        let r = inclusion_consistency(&t, &sp("lp(1)"), 1.0, 2.0, &fams, Some(1.783)).unwrap();
        assert_eq!(r.r, 2.0);
        assert!(r.consistent && r.lhs_lower >= 1.0 - 1e-12);
        assert!(matches!(
            inclusion_consistency(&t, &sp("lp(1)"), 2.0, 2.0, &fams, None),
            Err(Error::ParameterOrder(_))
        ));
    }
}
