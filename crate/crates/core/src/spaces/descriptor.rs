use std::fmt;

use crate::error::{Error, Result};

/// A real parameter that remembers whether it was written as a rational.
///
/// Equality compares the numeric value only, so `2`, `2.0` and `4/2` are equal.
#[derive(Debug, Clone, Copy)]
pub struct Scalar {
    value: f64,
    ratio: Option<(i64, i64)>,
}

impl Scalar {
    pub const INFINITY: Scalar = Scalar {
        value: f64::INFINITY,
        ratio: None,
    };

    pub fn new(value: f64) -> Self {
        Scalar { value, ratio: None }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let s = if den < 0 { -1 } else { 1 };
        let (n, d) = (s * num / g, s * den / g);
        Scalar {
            value: n as f64 / d as f64,
            ratio: Some((n, d)),
        }
    }

    pub fn integer(n: i64) -> Self {
        Scalar::ratio(n, 1)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn as_ratio(&self) -> Option<(i64, i64)> {
        self.ratio
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// Hölder conjugate `s/(s-1)`, with `1 <-> inf`.
    pub fn conjugate(&self) -> Scalar {
        if self.is_infinite() {
            return Scalar::integer(1);
        }
        if self.value == 1.0 {
            return Scalar::INFINITY;
        }
        match self.ratio {
            Some((n, d)) => checked_ratio(n as i128, (n - d) as i128)
                .unwrap_or_else(|| Scalar::new(self.value / (self.value - 1.0))),
            None => Scalar::new(self.value / (self.value - 1.0)),
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        if self.is_infinite() {
            return Scalar::INFINITY;
        }
        match (self.ratio, other.ratio) {
            (Some((a, b)), Some((c, d))) => {
                checked_ratio(a as i128 * d as i128, b as i128 * c as i128)
                    .unwrap_or_else(|| Scalar::new(self.value / other.value))
            }
            _ => Scalar::new(self.value / other.value),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        if self.is_infinite() || other.is_infinite() {
            return Scalar::INFINITY;
        }
        match (self.ratio, other.ratio) {
            (Some((a, b)), Some((c, d))) => {
                checked_ratio(a as i128 * c as i128, b as i128 * d as i128)
                    .unwrap_or_else(|| Scalar::new(self.value * other.value))
            }
            _ => Scalar::new(self.value * other.value),
        }
    }

    /// `1 / (1/self - 1/other)`, the exponent `r` of `1/r = 1/self - 1/other`.
    pub fn harmonic_difference(&self, other: &Scalar) -> Scalar {
        let inv = |s: &Scalar| -> Option<(i128, i128)> {
            if s.is_infinite() {
                Some((0, 1))
            } else {
                s.ratio.map(|(n, d)| (d as i128, n as i128))
            }
        };
        match (inv(self), inv(other)) {
            (Some((a, b)), Some((c, d))) => {
                let num = a * d - c * b;
                let den = b * d;
                if num == 0 {
                    Scalar::INFINITY
                } else {
                    checked_ratio(den, num).unwrap_or_else(|| {
                        Scalar::new(1.0 / (1.0 / self.value - 1.0 / other.value))
                    })
                }
            }
            _ => {
                let d = 1.0 / self.value - 1.0 / other.value;
                if d == 0.0 {
                    Scalar::INFINITY
                } else {
                    Scalar::new(1.0 / d)
                }
            }
        }
    }
}

fn checked_ratio(num: i128, den: i128) -> Option<Scalar> {
    if den == 0 {
        return None;
    }
    let g = gcd(num.unsigned_abs() as u64, den.unsigned_abs() as u64).max(1) as i128;
    let (n, d) = (num / g, den / g);
    let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
    if n.abs() > i64::MAX as i128 || d > i64::MAX as i128 {
        return None;
    }
    Some(Scalar::ratio(n as i64, d as i64))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::new(v)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.value.is_infinite() {
            return write!(f, "inf");
        }
        match self.ratio {
            Some((n, 1)) => write!(f, "{n}"),
            Some((n, d)) => write!(f, "{n}/{d}"),
            None => write!(f, "{:?}", self.value),
        }
    }
}

/// Non-increasing Lorentz weights with `w_1 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightRule {
    /// `w_n = n^(-alpha)`, `alpha >= 0`.
    Pow(Scalar),
}

impl WeightRule {
    pub fn weight(&self, n: usize) -> f64 {
        match self {
            WeightRule::Pow(a) => (n as f64).powf(-a.value()),
        }
    }

    pub fn weights(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.weight(k)).collect()
    }

    /// `W(n) = w_1 + ... + w_n`.
    pub fn partial_sum(&self, n: usize) -> f64 {
        match self {
            WeightRule::Pow(a) if a.value() == 0.0 => n as f64,
            _ => self.weights(n).iter().sum(),
        }
    }

    pub fn exponent(&self) -> f64 {
        match self {
            WeightRule::Pow(a) => a.value(),
        }
    }
}

/// Fundamental function of a Marcinkiewicz space.
#[derive(Debug, Clone, PartialEq)]
pub enum FundamentalRule {
    /// `lambda(n) = n^beta`, `0 <= beta <= 1`.
    Pow(Scalar),
    /// `lambda = lambda_E` for a catalog space `E`.
    Of(Box<SpaceDescriptor>),
}

/// Young function generating an Orlicz space, normalized so `phi(1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum OrliczFunction {
    /// `phi(t) = t^a`, `a >= 1`.
    Power(Scalar),
    /// `phi(t) = (t^a + t^b) / 2`, `a, b >= 1`.
    Mix(Scalar, Scalar),
}

/// Immutable description of a symmetric sequence space.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceDescriptor {
    Lp(Scalar),
    LorentzPQ { p: Scalar, q: Scalar },
    LorentzD { w: WeightRule, p: Scalar },
    Orlicz(OrliczFunction),
    Marcinkiewicz(FundamentalRule),
    Dual(Box<SpaceDescriptor>),
    Power(Box<SpaceDescriptor>, Scalar),
    Multiplier(Box<SpaceDescriptor>, Box<SpaceDescriptor>),
}

/// Analytic lattice facts about a space, carried as catalog attestations.
#[derive(Debug, Clone, PartialEq)]
pub struct Attestations {
    /// False for quasi-normed Lorentz parameter ranges.
    pub normed: bool,
    /// Largest `s` for which the space is `s`-convex with constant 1.
    pub convexity: f64,
    /// Smallest `q` for which the space is `q`-concave with constant 1 (`inf` if none known).
    pub concavity: f64,
    /// Analytic 2-concavity (any constant).
    pub two_concave: bool,
    /// The 2-concavity constant `M_(2)` when it is known.
    pub two_concavity_constant: Option<f64>,
}

fn conj(s: f64) -> f64 {
    if s.is_infinite() {
        1.0
    } else if s <= 1.0 {
        f64::INFINITY
    } else {
        s / (s - 1.0)
    }
}

impl SpaceDescriptor {
    pub fn lp(p: f64) -> Self {
        SpaceDescriptor::Lp(Scalar::new(p))
    }

    pub fn lp_ratio(num: i64, den: i64) -> Self {
        SpaceDescriptor::Lp(Scalar::ratio(num, den))
    }

    pub fn linf() -> Self {
        SpaceDescriptor::Lp(Scalar::INFINITY)
    }

    pub fn dual(inner: SpaceDescriptor) -> Self {
        SpaceDescriptor::Dual(Box::new(inner))
    }

    pub fn power(inner: SpaceDescriptor, r: Scalar) -> Self {
        SpaceDescriptor::Power(Box::new(inner), r)
    }

    pub fn multiplier(from: SpaceDescriptor, to: SpaceDescriptor) -> Self {
        SpaceDescriptor::Multiplier(Box::new(from), Box::new(to))
    }

    pub fn is_lp(&self, p: f64) -> bool {
        matches!(self, SpaceDescriptor::Lp(s) if s.value() == p)
    }

    pub fn attestations(&self) -> Attestations {
        use SpaceDescriptor::*;
        match self {
            Lp(p) => {
                let p = p.value();
                Attestations {
                    normed: true,
                    convexity: p,
                    concavity: p,
                    two_concave: p <= 2.0,
                    two_concavity_constant: (p <= 2.0).then_some(1.0),
                }
            }
            LorentzPQ { p, q } => {
                let (p, q) = (p.value(), q.value());
                let normed = q <= p;
                Attestations {
                    normed,
                    convexity: if normed { q } else { 1.0 },
                    concavity: f64::INFINITY,
                    two_concave: p < 2.0 && q <= 2.0,
                    two_concavity_constant: None,
                }
            }
            LorentzD { w, p } => {
                let p = p.value();
                let is_lp = w.exponent() == 0.0;
                Attestations {
                    normed: true,
                    convexity: p,
                    concavity: if is_lp { p } else { f64::INFINITY },
                    two_concave: p <= 2.0,
                    two_concavity_constant: (is_lp && p <= 2.0).then_some(1.0),
                }
            }
            Orlicz(phi) => {
                let (lo, hi) = phi.exponent_range();
                Attestations {
                    normed: true,
                    convexity: lo,
                    concavity: hi,
                    two_concave: hi <= 2.0,
                    two_concavity_constant: (hi <= 2.0).then_some(1.0),
                }
            }
            Marcinkiewicz(_) => Attestations {
                normed: true,
                convexity: 1.0,
                concavity: f64::INFINITY,
                two_concave: false,
                two_concavity_constant: None,
            },
            Dual(inner) => {
                let a = inner.attestations();
                let concavity = conj(a.convexity);
                Attestations {
                    normed: true,
                    convexity: conj(a.concavity),
                    concavity,
                    two_concave: concavity <= 2.0,
                    two_concavity_constant: (concavity <= 2.0).then_some(1.0),
                }
            }
            Power(inner, r) => {
                let a = inner.attestations();
                let r = r.value();
                let concavity = a.concavity / r;
                Attestations {
                    normed: true,
                    convexity: a.convexity / r,
                    concavity,
                    two_concave: concavity <= 2.0,
                    two_concavity_constant: (concavity <= 2.0).then_some(1.0),
                }
            }
            Multiplier(_, _) => {
                let s = self.simplify();
                if matches!(s, Multiplier(_, _)) {
                    Attestations {
                        normed: true,
                        convexity: 1.0,
                        concavity: f64::INFINITY,
                        two_concave: false,
                        two_concavity_constant: None,
                    }
                } else {
                    s.attestations()
                }
            }
        }
    }

    /// Checks parameter ranges and construction legality.
    pub fn validate(&self) -> Result<()> {
        use SpaceDescriptor::*;
        let bad = |m: String| Err(Error::InvalidDescriptor(m));
        match self {
            Lp(p) => {
                if !(p.value() >= 1.0) {
                    return bad(format!("lp requires p >= 1, got {p}"));
                }
            }
            LorentzPQ { p, q } => {
                if !(p.value() > 1.0 && p.value().is_finite()) {
                    return bad(format!("lorentz requires 1 < p < inf, got {p}"));
                }
                if !(q.value() >= 1.0) {
                    return bad(format!("lorentz requires q >= 1, got {q}"));
                }
            }
            LorentzD { w, p } => {
                if !(p.value() >= 1.0 && p.value().is_finite()) {
                    return bad(format!("dwp requires 1 <= p < inf, got {p}"));
                }
                let a = w.exponent();
                if !(a >= 0.0 && a.is_finite()) {
                    return bad(format!("weight exponent must be >= 0, got {a}"));
                }
            }
            Orlicz(phi) => phi.validate()?,
            Marcinkiewicz(rule) => match rule {
                FundamentalRule::Pow(b) => {
                    if !(0.0..=1.0).contains(&b.value()) {
                        return bad(format!("marc(pow(beta)) requires 0 <= beta <= 1, got {b}"));
                    }
                }
                FundamentalRule::Of(e) => {
                    e.validate()?;
                    if !e.attestations().normed {
                        return bad("fundamental function of a quasi-normed space".into());
                    }
                }
            },
            Dual(inner) => {
                inner.validate()?;
                if !inner.attestations().normed {
                    return bad(format!("Köthe dual of quasi-normed space {inner}"));
                }
            }
            Power(inner, r) => {
                inner.validate()?;
                let r = r.value();
                if !(r > 0.0 && r.is_finite()) {
                    return bad(format!("power requires 0 < r < inf, got {r}"));
                }
                let a = inner.attestations();
                if !a.normed {
                    return bad(format!("power of quasi-normed space {inner}"));
                }
                let need = r.max(1.0);
                if a.convexity + 1e-12 < need {
                    return bad(format!(
                        "power({inner},{r}) needs {need}-convexity with constant 1; only {}-convexity attested",
                        a.convexity
                    ));
                }
            }
            Multiplier(from, to) => {
                from.validate()?;
                to.validate()?;
                if !from.attestations().normed || !to.attestations().normed {
                    return bad("multipliers between quasi-normed spaces".into());
                }
            }
        }
        Ok(())
    }

    /// Rewrites by exact finite-dimensional isometries (`(l_p)^x = l_p'`,
    /// `(l_p)^r = l_(p/r)`, `M(l_p, l_u) = l_r`, `M(l_2, d(w,p)) = d(w^(2/(2-p)), r)`,
    /// `M(E, l_1) = E^x`, ...). Evaluation never depends on this; it only drives
    /// closed-form dispatch.
    pub fn simplify(&self) -> SpaceDescriptor {
        use SpaceDescriptor::*;
        match self {
            Dual(inner) => match inner.simplify() {
                Lp(p) => Lp(p.conjugate()),
                Dual(e) => *e,
                Orlicz(OrliczFunction::Power(a)) => Lp(a.conjugate()),
                e => Dual(Box::new(e)),
            },
            Power(inner, r) => {
                if r.value() == 1.0 {
                    return inner.simplify();
                }
                match inner.simplify() {
                    Lp(p) => Lp(p.div(r)),
                    e => Power(Box::new(e), *r),
                }
            }
            Multiplier(from, to) => {
                let (f, t) = (from.simplify(), to.simplify());
                if f == t {
                    return SpaceDescriptor::linf();
                }
                match (&f, &t) {
                    (_, Lp(u)) if u.is_infinite() => SpaceDescriptor::linf(),
                    (Lp(p), _) if p.value() == 1.0 => SpaceDescriptor::linf(),
                    (Lp(p), Lp(u)) => {
                        if p.value() <= u.value() {
                            SpaceDescriptor::linf()
                        } else {
                            Lp(u.harmonic_difference(p))
                        }
                    }
                    (_, Lp(u)) if u.value() == 1.0 => Dual(Box::new(f)).simplify(),
                    (Lp(two), LorentzD { w, p }) if two.value() == 2.0 => {
                        lorentz_multiplier(w.exponent(), p).unwrap_or(Multiplier(
                            Box::new(f.clone()),
                            Box::new(t.clone()),
                        ))
                    }
                    (Lp(two), LorentzPQ { p, q })
                        if two.value() == 2.0 && q.value() <= p.value() && q.is_finite() =>
                    {
                        let alpha = 1.0 - q.value() / p.value();
                        lorentz_multiplier(alpha, q).unwrap_or(Multiplier(
                            Box::new(f.clone()),
                            Box::new(t.clone()),
                        ))
                    }
                    _ => Multiplier(Box::new(f), Box::new(t)),
                }
            }
            Marcinkiewicz(FundamentalRule::Of(e)) => {
                Marcinkiewicz(FundamentalRule::Of(Box::new(e.simplify())))
            }
            e => e.clone(),
        }
    }
}

/// `M(l_2, d(n^-alpha, p))` for `p <= 2`: by rearrangement the extremal multiplier
/// ball element is non-increasing and the Lagrange condition gives
/// `d(n^(-alpha b), r)` with `b = 2/(2-p)` and `1/r = 1/p - 1/2`.
fn lorentz_multiplier(alpha: f64, p: &Scalar) -> Option<SpaceDescriptor> {
    let pv = p.value();
    if pv > 2.0 {
        return None;
    }
    if pv == 2.0 {
        return Some(SpaceDescriptor::linf());
    }
    let r = p.harmonic_difference(&Scalar::integer(2));
    let b = 2.0 / (2.0 - pv);
    let exponent = Scalar::new(alpha * b);
    if alpha == 0.0 {
        return Some(SpaceDescriptor::Lp(r));
    }
    Some(SpaceDescriptor::LorentzD {
        w: WeightRule::Pow(exponent),
        p: r,
    })
}

impl OrliczFunction {
    pub fn validate(&self) -> Result<()> {
        let ok = |a: &Scalar| a.value() >= 1.0 && a.value().is_finite();
        let good = match self {
            OrliczFunction::Power(a) => ok(a),
            OrliczFunction::Mix(a, b) => ok(a) && ok(b),
        };
        if good {
            Ok(())
        } else {
            Err(Error::InvalidDescriptor(format!(
                "Orlicz exponents must be finite and >= 1: {self}"
            )))
        }
    }

    /// `(min, max)` of the power exponents.
    pub fn exponent_range(&self) -> (f64, f64) {
        match self {
            OrliczFunction::Power(a) => (a.value(), a.value()),
            OrliczFunction::Mix(a, b) => {
                (a.value().min(b.value()), a.value().max(b.value()))
            }
        }
    }
}

impl fmt::Display for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRule::Pow(a) => write!(f, "pow({a})"),
        }
    }
}

impl fmt::Display for FundamentalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FundamentalRule::Pow(b) => write!(f, "pow({b})"),
            FundamentalRule::Of(e) => write!(f, "fund({e})"),
        }
    }
}

impl fmt::Display for OrliczFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrliczFunction::Power(a) => write!(f, "power({a})"),
            OrliczFunction::Mix(a, b) => write!(f, "mix({a},{b})"),
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use SpaceDescriptor::*;
        match self {
            Lp(p) => write!(f, "lp({p})"),
            LorentzPQ { p, q } => write!(f, "lorentz({p},{q})"),
            LorentzD { w, p } => write!(f, "dwp({w},{p})"),
            Orlicz(phi) => write!(f, "orlicz({phi})"),
            Marcinkiewicz(rule) => write!(f, "marc({rule})"),
            Dual(e) => write!(f, "dual({e})"),
            Power(e, r) => write!(f, "power({e},{r})"),
            Multiplier(a, b) => write!(f, "mult({a},{b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_arithmetic_keeps_ratios() {
        let p = Scalar::ratio(4, 3);
        assert_eq!(p.conjugate().as_ratio(), Some((4, 1)));
        assert_eq!(Scalar::ratio(3, 2).conjugate().as_ratio(), Some((3, 1)));
        assert!(Scalar::integer(1).conjugate().is_infinite());
        assert_eq!(Scalar::INFINITY.conjugate().as_ratio(), Some((1, 1)));
        // 1/r = 3/4 - 1/2
        let r = p.harmonic_difference(&Scalar::integer(2));
        assert_eq!(r.as_ratio(), Some((4, 1)));
        assert!(Scalar::integer(2)
            .harmonic_difference(&Scalar::integer(2))
            .is_infinite());
        assert_eq!(Scalar::integer(1).div(&Scalar::ratio(1, 2)).as_ratio(), Some((2, 1)));
    }

    #[test]
    fn simplification_table() {
        use SpaceDescriptor as S;
        let l = |n, d| S::lp_ratio(n, d);
        assert_eq!(S::dual(l(4, 3)).simplify(), l(4, 1));
        assert_eq!(S::dual(S::linf()).simplify(), l(1, 1));
        assert_eq!(S::dual(l(1, 1)).simplify(), S::linf());
        assert_eq!(S::power(l(1, 1), Scalar::ratio(1, 2)).simplify(), l(2, 1));
        assert_eq!(S::multiplier(l(2, 1), l(1, 1)).simplify(), l(2, 1));
        assert_eq!(S::multiplier(l(2, 1), l(4, 3)).simplify(), l(4, 1));
        assert_eq!(S::multiplier(l(1, 1), l(2, 1)).simplify(), S::linf());
        assert_eq!(S::multiplier(l(3, 1), l(3, 1)).simplify(), S::linf());
        // (((l_1)^x)^2)^x)^{1/2} collapses to l_2
        let chain = S::power(
            S::dual(S::power(S::dual(l(1, 1)), Scalar::integer(2))),
            Scalar::ratio(1, 2),
        );
        assert_eq!(chain.simplify(), l(2, 1));
    }

    #[test]
    fn power_legality() {
        use SpaceDescriptor as S;
        assert!(S::power(S::lp(1.0), Scalar::new(0.5)).validate().is_ok());
        assert!(S::power(S::lp(2.0), Scalar::new(2.0)).validate().is_ok());
        assert!(matches!(
            S::power(S::lp(1.0), Scalar::new(2.0)).validate(),
            Err(Error::InvalidDescriptor(_))
        ));
        // dual of a 2-concave space is 2-convex
        assert!(S::power(S::dual(S::lp_ratio(4, 3)), Scalar::integer(2))
            .validate()
            .is_ok());
    }

    #[test]
    fn quasi_normed_lorentz_refuses_duals() {
        let e = SpaceDescriptor::LorentzPQ {
            p: Scalar::ratio(4, 3),
            q: Scalar::integer(2),
        };
        assert!(e.validate().is_ok());
        assert!(!e.attestations().normed);
        assert!(SpaceDescriptor::dual(e).validate().is_err());
    }
}
