//! The acceptance suite: ten checks reproducing the finite-dimensional shadows
//! of the main results, each producing a pass/fail outcome and a CSV table.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::duality::{identity_norm, kothe_dual_norm, m2e_norm, multiplier_norm, Certification};
use crate::error::Result;
use crate::interpolation::{k_functional, k_functional_generic, power_equivalence_ratio};
use crate::numerics::{project_monotone, stream_rng, SolverConfig};
use crate::snumbers::{
    approx_bounds, approx_exact_lp, eigenvalue_multiplier_check, weyl_check, Matrix,
};
use crate::spaces::{fundamental, norm, rearrange, OrliczFunction, SpaceDescriptor, Vector};
use crate::summing::{random_families, summing_lower, summing_upper_main, FiniteOperator, VectorFamily};

/// A CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "pass" } else { "fail" }.to_string())
    }
}

/// Floats with 17 significant digits; `inf`, `-inf` and `nan` spelled out.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A CSV table with a mandatory header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.header.iter().map(|h| quote(h)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Float(f) => format_float(*f),
                    Cell::Text(s) => quote(s),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Result of one acceptance check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub table: Table,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CheckOutcome {
    /// Timing-free status line, stable across runs.
    pub fn status_line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }

    pub fn summary_line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {}: {} ({:.2}s of {}s)",
            if self.passed && self.elapsed <= self.budget { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }

    /// Pass flag including the runtime budget.
    pub fn ok(&self) -> bool {
        self.passed && self.elapsed <= self.budget
    }
}

pub const CHECK_NAMES: [&str; 10] = [
    "pietsch-oracle",
    "szarek-tomczak-sandwich",
    "lorentz-no-logarithm",
    "orlicz-formula",
    "main-theorem-sandwich",
    "multiplier-isometry",
    "k-functional-oracle",
    "weyl-suite",
    "eigenvalue-multiplier",
    "invariants",
];

const BUDGETS: [u64; 10] = [30, 120, 120, 120, 120, 120, 60, 60, 60, 120];

fn sp(s: &str) -> SpaceDescriptor {
    s.parse().expect("built-in descriptor")
}

/// Runs check `id` (1-based).
pub fn run_check(id: usize, seed: u64) -> Result<CheckOutcome> {
    let start = Instant::now();
    let (passed, detail, table) = match id {
        1 => check_pietsch()?,
        2 => check_sandwich()?,
        3 => check_no_log()?,
        4 => check_orlicz()?,
        5 => check_main_theorem(seed)?,
        6 => check_isometry(seed)?,
        7 => check_k_functional(seed)?,
        8 => check_weyl(seed)?,
        9 => check_eigen_multiplier(seed)?,
        10 => check_invariants(seed)?,
        _ => {
            return Err(crate::Error::InvalidArgument(format!(
                "no acceptance check {id}"
            )))
        }
    };
    Ok(CheckOutcome {
        id,
        name: CHECK_NAMES[id - 1],
        passed,
        detail,
        table,
        elapsed: start.elapsed(),
        budget: Duration::from_secs(BUDGETS[id - 1]),
    })
}

pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    (1..=10).map(|id| run_check(id, seed)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

const SWEEP_N: [usize; 5] = [4, 8, 16, 32, 64];

fn check_pietsch() -> Result<(bool, String, Table)> {
    let mut table = Table::new(&["space", "n", "k", "lower_ref", "upper", "exact", "rel_err", "tag"]);
    let mut worst = 0.0f64;
    for (src, p) in [("lp(1)", 1.0), ("lp(4/3)", 4.0 / 3.0), ("lp(3/2)", 1.5)] {
        let e = sp(src);
        for n in SWEEP_N {
            for k in 1..=n {
                let b = approx_bounds(&e, n, k)?;
                let exact = approx_exact_lp(n, k, p, 2.0)?;
                let err = rel(b.upper, exact);
                worst = worst.max(err);
                table.push(vec![
                    src.into(),
                    n.into(),
                    k.into(),
                    b.lower.into(),
                    b.upper.into(),
                    exact.into(),
                    err.into(),
                    "exact".into(),
                ]);
            }
        }
    }
    Ok((worst <= 1e-9, format!("max relative error {worst:.3e}"), table))
}

fn check_sandwich() -> Result<(bool, String, Table)> {
    let mut table = Table::new(&["space", "m", "reference", "lower", "upper", "ratio", "tag"]);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut lower_exact = true;
    let l2 = SpaceDescriptor::lp(2.0);
    for src in [
        "lp(1)",
        "lp(4/3)",
        "lorentz(4/3,2)",
        "dwp(pow(1/2),3/2)",
        "orlicz(power(3/2))",
    ] {
        let e = sp(src);
        for m in 4..=256usize {
            let b = identity_norm(&l2, &e, m)?;
            let reference = fundamental(&e, m)?.value / (m as f64).sqrt();
            let ratio = b.upper / reference;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            lower_exact &= rel(b.lower, reference) <= 1e-12;
            let tag = if b.gap() == 0.0 { "exact" } else { "numerical" };
            table.push(vec![
                src.into(),
                m.into(),
                reference.into(),
                b.lower.into(),
                b.upper.into(),
                ratio.into(),
                tag.into(),
            ]);
        }
    }
    let passed = lo >= 1.0 - 1e-9 && hi <= 2.0 && lower_exact;
    Ok((
        passed,
        format!("ratio range [{lo:.6}, {hi:.6}], lower = reference: {lower_exact}"),
        table,
    ))
}

fn check_no_log() -> Result<(bool, String, Table)> {
    let mut table = Table::new(&["p", "q", "n", "k", "upper", "scale", "ratio", "tag"]);
    let mut ok = true;
    let mut spreads = Vec::new();
    for (src, p) in [
        ("lorentz(4/3,1)", 4.0 / 3.0),
        ("lorentz(4/3,2)", 4.0 / 3.0),
        ("lorentz(3/2,2)", 1.5),
    ] {
        let e = sp(src);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for n in [16usize, 64, 256, 1024] {
            let k = n / 2;
            let b = approx_bounds(&e, n, k)?;
            let scale = ((n - k + 1) as f64).powf(1.0 / p - 0.5);
            let ratio = b.upper / scale;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            let q = if src.contains(",1)") { "1" } else { "2" };
            table.push(vec![
                format!("{p}").into(),
                q.into(),
                n.into(),
                k.into(),
                b.upper.into(),
                scale.into(),
                ratio.into(),
                if b.gap() == 0.0 { "exact" } else { "numerical" }.into(),
            ]);
        }
        ok &= hi / lo <= 2.0;
        spreads.push(format!("{src}: {:.4}", hi / lo));
    }
    Ok((ok, format!("max/min spread {}", spreads.join(", ")), table))
}

fn check_orlicz() -> Result<(bool, String, Table)> {
    let mut table = Table::new(&["n", "k", "upper", "scale", "ratio", "lp_upper", "tag"]);
    let orl = SpaceDescriptor::Orlicz(OrliczFunction::Power(crate::Scalar::ratio(3, 2)));
    let lp = sp("lp(3/2)");
    let (mut lo, mut hi, mut cross) = (f64::INFINITY, 0.0f64, 0.0f64);
    for n in SWEEP_N {
        for k in 1..=n {
            let m = (n - k + 1) as f64;
            let b = approx_bounds(&orl, n, k)?;
            let inv = (1.0 / m).powf(2.0 / 3.0);
            let scale = 1.0 / inv / m.sqrt();
            let ratio = b.upper / scale;
            let reference = approx_bounds(&lp, n, k)?.upper;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            cross = cross.max(rel(b.upper, reference));
            table.push(vec![
                n.into(),
                k.into(),
                b.upper.into(),
                scale.into(),
                ratio.into(),
                reference.into(),
                "exact".into(),
            ]);
        }
    }
    // the ratio is 1 up to rounding; allow the same relative slack as the cross-check
    let passed = lo >= 1.0 - 1e-9 && hi <= 2.0 && cross <= 1e-9;
    Ok((
        passed,
        format!("ratio range [{lo:.12}, {hi:.12}], l_3/2 cross-check {cross:.3e}"),
        table,
    ))
}

fn check_main_theorem(seed: u64) -> Result<(bool, String, Table)> {
    let mut table = Table::new(&["space", "n", "coordinate", "lower", "upper", "tag"]);
    let mut ok = true;
    let l2 = SpaceDescriptor::lp(2.0);
    let mut notes = Vec::new();
    for src in ["lp(1)", "lp(4/3)"] {
        let e = sp(src);
        let m = SpaceDescriptor::multiplier(l2.clone(), e.clone());
        let upper = summing_upper_main(&e)?;
        for n in [4usize, 8, 16, 32] {
            let t = FiniteOperator::identity(n, e.clone(), l2.clone())?;
            let coord = summing_lower(&t, &m, 2.0, &[VectorFamily::coordinates(n)])?.lower;
            let mut families = vec![VectorFamily::coordinates(n)];
            families.extend(random_families(n, 256, seed ^ n as u64));
            let lower = summing_lower(&t, &m, 2.0, &families)?.lower;
            ok &= lower >= 1.0 - 1e-12 && lower <= upper * (1.0 + 1e-6);
            if src == "lp(1)" {
                ok &= (lower - 1.0).abs() <= 1e-12 && (coord - 1.0).abs() <= 1e-12;
            }
            table.push(vec![
                src.into(),
                n.into(),
                coord.into(),
                lower.into(),
                upper.into(),
                "numerical".into(),
            ]);
            notes.push(lower);
        }
    }
    let (lo, hi) = notes
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    Ok((ok, format!("lower bounds in [{lo:.12}, {hi:.12}], upper sqrt(2)"), table))
}

fn random_vector(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vector {
    Vector::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("finite")
}

fn check_isometry(seed: u64) -> Result<(bool, String, Table)> {
    let mut table = Table::new(&["space", "trial", "n", "m2e", "multiplier_lower", "rel_diff", "tag"]);
    let l2 = SpaceDescriptor::lp(2.0);
    let mut worst = 0.0f64;
    for (s_idx, src) in ["lp(1)", "lp(4/3)", "dwp(pow(1/2),3/2)"].iter().enumerate() {
        let f = sp(src);
        let mut rng = stream_rng(seed, 600 + s_idx as u64);
        for trial in 0..50 {
            let n = rng.random_range(1..=32usize);
            let x = random_vector(&mut rng, n);
            let chain = m2e_norm(&f, &x)?;
            let direct = multiplier_norm(&l2, &f, &x)?;
            let d = (chain.value - direct.lower).abs() / chain.value.max(f64::MIN_POSITIVE);
            worst = worst.max(d);
            table.push(vec![
                (*src).into(),
                trial.into(),
                n.into(),
                chain.value.into(),
                direct.lower.into(),
                d.into(),
                chain.certification.tag().into(),
            ]);
        }
    }
    Ok((worst <= 1e-4, format!("max relative difference {worst:.3e}"), table))
}

fn check_k_functional(seed: u64) -> Result<(bool, String, Table)> {
    let mut table = Table::new(&["couple", "case", "n", "t", "closed_form", "generic", "rel_err", "tag"]);
    let (l1, l2, linf) = (sp("lp(1)"), sp("lp(2)"), sp("lp(inf)"));
    let cfg = SolverConfig::default().with_seed(seed);
    let mut rng = stream_rng(seed, 700);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let n = rng.random_range(1..=100usize);
        let x = Vector::new((0..n).map(|_| rng.random_range(-5.0..5.0)).collect())?;
        let t = if case % 2 == 0 {
            rng.random_range(0.01..1.0)
        } else {
            rng.random_range(1.0..(n as f64 + 2.0))
        };
        let (exact, _) = k_functional(&l1, &linf, t, &x)?;
        let (num, _) = k_functional_generic(&l1, &linf, t, &x, &cfg)?;
        let err = rel(num.value, exact.value);
        worst = worst.max(err);
        table.push(vec![
            "lp(1),lp(inf)".into(),
            case.into(),
            n.into(),
            t.into(),
            exact.value.into(),
            num.value.into(),
            err.into(),
            num.certification.tag().into(),
        ]);
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (c_idx, (name, e0)) in [("lp(1),lp(inf)", &l1), ("lp(2),lp(inf)", &l2)].iter().enumerate() {
        let mut rng = stream_rng(seed, 710 + c_idx as u64);
        for case in 0..20 {
            let n = rng.random_range(1..=32usize);
            let x = if case == 0 { Vector::ones(n) } else { random_vector(&mut rng, n) };
            for t in [0.1, 1.0, 10.0] {
                let r = power_equivalence_ratio(e0, &linf, 0.5, t, &x)?;
                lo = lo.min(r);
                hi = hi.max(r);
                table.push(vec![
                    format!("power {name}").into(),
                    case.into(),
                    n.into(),
                    t.into(),
                    Cell::Float(f64::NAN),
                    r.into(),
                    Cell::Float(f64::NAN),
                    "numerical".into(),
                ]);
            }
        }
    }
    let passed = worst <= 1e-6 && lo >= 0.25 && hi <= 4.0;
    Ok((
        passed,
        format!("generic vs closed form {worst:.3e}; power ratio in [{lo:.4}, {hi:.4}]"),
        table,
    ))
}

fn check_weyl(seed: u64) -> Result<(bool, String, Table)> {
    let mut table = Table::new(&[
        "size",
        "trial",
        "space",
        "product_ratio",
        "eigen_norm",
        "singular_norm",
        "holds",
    ]);
    let mut ok = true;
    let mut worst = 0.0f64;
    let spaces = [sp("lp(1)"), sp("lorentz(4/3,2)")];
    for (size, count) in [(8usize, 200usize), (16, 50)] {
        for trial in 0..count {
            let mut rng = stream_rng(seed, 800 + (size * 1000 + trial) as u64);
            let a = Matrix::gaussian(&mut rng, size, size);
            for f in &spaces {
                let r = weyl_check(&a, f)?;
                let holds = r.multiplicative_holds && r.norm_form_holds;
                ok &= holds;
                worst = worst.max(r.worst_product_ratio);
                table.push(vec![
                    size.into(),
                    trial.into(),
                    f.to_string().into(),
                    r.worst_product_ratio.into(),
                    r.eigen_norm.into(),
                    r.singular_norm.into(),
                    holds.into(),
                ]);
            }
        }
    }
    Ok((ok, format!("worst leading-product ratio {worst:.12}"), table))
}

fn check_eigen_multiplier(seed: u64) -> Result<(bool, String, Table)> {
    let mut table = Table::new(&[
        "space",
        "trial",
        "n",
        "singular_norm",
        "bound",
        "eigen_norm",
        "eigen_bound",
        "holds",
    ]);
    let mut ok = true;
    let mut worst = 0.0f64;
    for (s_idx, src) in ["lp(1)", "lp(4/3)"].iter().enumerate() {
        let e = sp(src);
        let mut rng = stream_rng(seed, 900 + s_idx as u64);
        for trial in 0..100 {
            let n = rng.random_range(1..=32usize);
            let sigma = random_vector(&mut rng, n);
            let r = Matrix::gaussian(&mut rng, n, n);
            let rep = eigenvalue_multiplier_check(&sigma, &r, &e)?;
            let holds = rep.singular_holds && rep.eigen_holds;
            ok &= holds;
            if rep.singular_bound > 0.0 {
                worst = worst.max(rep.singular_norm / rep.singular_bound);
            }
            table.push(vec![
                (*src).into(),
                trial.into(),
                n.into(),
                rep.singular_norm.into(),
                rep.singular_bound.into(),
                rep.eigen_norm.into(),
                rep.eigen_bound.into(),
                holds.into(),
            ]);
        }
    }
    Ok((ok, format!("worst norm/bound {worst:.6}"), table))
}

fn check_invariants(seed: u64) -> Result<(bool, String, Table)> {
    let mut table = Table::new(&["property", "space", "cases", "worst", "holds"]);
    let spaces = [
        "lp(1)",
        "lp(3/2)",
        "lp(inf)",
        "lorentz(3,2)",
        "lorentz(4/3,1)",
        "dwp(pow(1/2),3/2)",
        "orlicz(power(3/2))",
        "orlicz(mix(3/2,3))",
        "marc(pow(1/2))",
        "dual(lorentz(3,2))",
        "power(lp(1),1/2)",
    ];
    let mut all_ok = true;
    let mut rng = stream_rng(seed, 1000);
    let mut record = |table: &mut Table, prop: &str, space: &str, cases: usize, worst: f64, ok: bool| {
        all_ok &= ok;
        table.push(vec![prop.into(), space.into(), cases.into(), worst.into(), ok.into()]);
    };
    for src in spaces {
        let e = sp(src);
        let (mut sym, mut hom, mut tri, mut hold) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        let cases = 20;
        for _ in 0..cases {
            let n = rng.random_range(1..=12usize);
            let x = random_vector(&mut rng, n);
            let y = random_vector(&mut rng, n);
            let nx = norm(&e, &x)?;
            let tol = 1e-9f64.max(nx.certification.tolerance() * 4.0);
            // symmetry: reversal with sign flips
            let mut z: Vec<f64> = x.entries().iter().rev().cloned().collect();
            z.iter_mut().step_by(2).for_each(|v| *v = -*v);
            let nz = norm(&e, &Vector::new(z)?)?.value;
            sym = sym.max(rel(nz, nx.value) / tol);
            // homogeneity
            let c = rng.random_range(-3.0..3.0);
            let scaled = Vector::new(x.entries().iter().map(|v| c * v).collect())?;
            let ns = norm(&e, &scaled)?.value;
            hom = hom.max((ns - c.abs() * nx.value).abs() / (c.abs() * nx.value).max(1e-300) / tol);
            // triangle
            let ny = norm(&e, &y)?.value;
            let sum = Vector::new(x.entries().iter().zip(y.entries()).map(|(a, b)| a + b).collect())?;
            let nsum = norm(&e, &sum)?.value;
            tri = tri.max((nsum - nx.value - ny) / (nx.value + ny) / tol);
            // duality: Hölder pairing
            let pair: f64 = x.entries().iter().zip(y.entries()).map(|(a, b)| (a * b).abs()).sum();
            let dual = kothe_dual_norm(&e, &y)?;
            let dtol = tol.max(dual.certification.tolerance() * 4.0);
            hold = hold.max((pair - nx.value * dual.value) / (nx.value * dual.value).max(1e-300) / dtol);
        }
        record(&mut table, "symmetry", src, cases, sym, sym <= 1.0);
        record(&mut table, "homogeneity", src, cases, hom, hom <= 1.0);
        record(&mut table, "triangle", src, cases, tri, tri <= 1.0);
        record(&mut table, "holder", src, cases, hold, hold <= 1.0);
    }
    // Marcinkiewicz domination: ||x||_{marc(lambda_E)} <= C ||x||_E
    for (src, bound) in [
        ("lp(3/2)", 1.0 + 1e-9),
        ("lp(4)", 1.0 + 1e-9),
        ("dwp(pow(1/2),3/2)", 1.0 + 1e-9),
        ("lorentz(4/3,1)", 2.0),
        ("lorentz(3,2)", 2.0),
        ("orlicz(power(3/2))", 2.0),
        ("orlicz(mix(3/2,3))", 2.0),
    ] {
        let e = sp(src);
        let m = sp(&format!("marc(fund({src}))"));
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let n = rng.random_range(1..=12usize);
            let x = random_vector(&mut rng, n);
            worst = worst.max(norm(&m, &x)?.value / norm(&e, &x)?.value);
        }
        record(&mut table, "marcinkiewicz-domination", src, 20, worst, worst <= bound);
    }
    // dual of the dual
    for src in ["lorentz(3,2)", "dwp(pow(1/2),3/2)", "orlicz(mix(3/2,3))"] {
        let e = sp(src);
        let dd = SpaceDescriptor::dual(SpaceDescriptor::dual(e.clone()));
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let n = rng.random_range(2..=8usize);
            let x = random_vector(&mut rng, n);
            let a = norm(&e, &x)?.value;
            let b = norm(&dd, &x)?;
            let tol = 1e-6f64.max(b.certification.tolerance() * 4.0);
            worst = worst.max(rel(b.value, a) / tol);
        }
        record(&mut table, "bidual", src, 5, worst, worst <= 1.0);
    }
    // monotone projection is idempotent and rearrangement is a fixed point of itself
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(1..=30usize);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let p1 = project_monotone(&v);
        let p2 = project_monotone(&p1);
        worst = worst.max(p1.iter().zip(&p2).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        let r = rearrange(&Vector::new(v)?);
        if rearrange(&r) != r {
            worst = f64::INFINITY;
        }
    }
    record(&mut table, "projection-idempotence", "-", 50, worst, worst <= 1e-15);
    // determinism: the same seeded computation twice, byte for byte
    let a = check_isometry(seed)?.2.to_csv();
    let b = check_isometry(seed)?.2.to_csv();
    record(&mut table, "determinism", "-", 2, if a == b { 0.0 } else { 1.0 }, a == b);
    let failed: Vec<String> = table
        .rows
        .iter()
        .filter(|r| r[4] == Cell::from(false))
        .map(|r| match (&r[0], &r[1]) {
            (Cell::Text(p), Cell::Text(s)) => format!("{p}/{s}"),
            _ => String::new(),
        })
        .collect();
    let detail = if failed.is_empty() {
        format!("{} invariant rows hold", table.rows.len())
    } else {
        format!("failed: {}", failed.join(" "))
    };
    Ok((all_ok, detail, table))
}

/// Human-readable summary of a suite run.
pub fn summary(outcomes: &[CheckOutcome]) -> String {
    let mut s = String::new();
    for o in outcomes {
        let _ = writeln!(s, "{}", o.status_line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let _ = writeln!(s, "{passed}/{} criteria passed", outcomes.len());
    s
}

/// Certification column value for a result.
pub fn tag(c: Certification) -> &'static str {
    c.tag()
}
