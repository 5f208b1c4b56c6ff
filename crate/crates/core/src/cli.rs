//! Command-line driver. Every subcommand resolves its options from flags, then
//! the `[subcommand]` section of the `--config` file, then the file's global
//! keys, then built-in defaults (`SEQNORM_SEED` supplies the default seed).
//! Results are written as CSV with a certification tag on every row.
//!
//! Exit status: 0 when every assertion holds, 1 when some row fails, 2 on a
//! usage or configuration error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::duality::{kothe_dual_norm_with, multiplier_norm_with};
use crate::error::Error;
use crate::interpolation::k_functional_with;
use crate::numerics::{stream_rng, SolverConfig};
use crate::snumbers::{approx_bounds, approx_exact_lp, weyl_check, Matrix};
use crate::spaces::{fundamental, norm_with, parse_couple, parse_space, SpaceDescriptor, Vector};
use crate::summing::{
    concavity_estimate, random_families, summing_lower_with, summing_upper_main, FiniteOperator,
    VectorFamily,
};
use crate::verification::{self, Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "seqnorm", version, about = "Finite-dimensional symmetric sequence space toolkit")]
pub struct Cli {
    /// Seed for every randomized estimator (default: $SEQNORM_SEED, then 42).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative tolerance of the iterative solvers.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file (or directory for report-all); stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Line-oriented `key = value` configuration file with `[subcommand]` sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default, Clone)]
pub struct Opts {
    /// Space descriptor, e.g. "lorentz(4/3,2)".
    #[arg(long)]
    pub space: Option<String>,
    /// Couple of descriptors, e.g. "lp(1),lp(inf)".
    #[arg(long)]
    pub couple: Option<String>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub to: Option<String>,
    /// Comma-separated vector entries.
    #[arg(long, allow_hyphen_values = true)]
    pub vec: Option<String>,
    /// Comma-separated dimensions.
    #[arg(long)]
    pub n: Option<String>,
    /// `all`, or comma-separated integers or fractions of n such as `1/2`.
    #[arg(long)]
    pub k: Option<String>,
    /// Comma-separated values of t.
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    /// Summation exponent p.
    #[arg(long)]
    pub p: Option<String>,
    /// Dense matrix in CSV: a `rows,cols` line followed by the rows.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Norm of a vector.
    Norm(Opts),
    /// Köthe dual norm of a vector.
    DualNorm(Opts),
    /// Multiplier norm of a vector in M(from, to).
    MultNorm(Opts),
    /// Fundamental function values.
    Fundamental(Opts),
    /// Approximation-number bounds for id: l_2^n -> E_n.
    AkTable(Opts),
    /// Lower bounds for (E,p)-summing norms.
    SummingEstimate(Opts),
    /// Peetre K-functional over a list of t.
    Kfun(Opts),
    /// Lower bounds for the 2-concavity constant.
    Concavity(Opts),
    /// Weyl inequalities on seeded Gaussian or supplied matrices.
    SpectraCheck(Opts),
    /// The full acceptance suite.
    ReportAll(Opts),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Norm(_) => "norm",
            Command::DualNorm(_) => "dual-norm",
            Command::MultNorm(_) => "mult-norm",
            Command::Fundamental(_) => "fundamental",
            Command::AkTable(_) => "ak-table",
            Command::SummingEstimate(_) => "summing-estimate",
            Command::Kfun(_) => "kfun",
            Command::Concavity(_) => "concavity",
            Command::SpectraCheck(_) => "spectra-check",
            Command::ReportAll(_) => "report-all",
        }
    }

    fn opts(&self) -> &Opts {
        match self {
            Command::Norm(o)
            | Command::DualNorm(o)
            | Command::MultNorm(o)
            | Command::Fundamental(o)
            | Command::AkTable(o)
            | Command::SummingEstimate(o)
            | Command::Kfun(o)
            | Command::Concavity(o)
            | Command::SpectraCheck(o)
            | Command::ReportAll(o) => o,
        }
    }
}

/// Failure of a CLI run, mapped to an exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configuration or descriptors (exit 2).
    Config(String),
    /// Some assertion failed (exit 1); the failed rows are listed.
    Assertion(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Assertion(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundViolation(m) => CliError::Assertion(vec![m]),
            other => CliError::Config(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Sections of a `key = value` file; keys before any section live under `""`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return Err(format!("line {}: unterminated section header", lineno + 1));
                };
                current = name.trim().to_string();
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(format!("line {}: expected `key = value`", lineno + 1));
            };
            let key = k.trim();
            if key.is_empty() {
                return Err(format!("line {}: empty key", lineno + 1));
            }
            sections
                .entry(current.clone())
                .or_default()
                .insert(key.to_string(), v.trim().trim_matches('"').to_string());
        }
        Ok(ConfigFile { sections })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .or_else(|| self.sections.get("").and_then(|s| s.get(key)))
            .map(|s| s.as_str())
    }
}

/// Which `k` to tabulate for a dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum KPolicy {
    All,
    Fractions(Vec<f64>),
    Values(Vec<usize>),
}

impl KPolicy {
    pub fn parse(src: &str) -> std::result::Result<Self, String> {
        let s = src.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(KPolicy::All);
        }
        if s.contains('/') || s.contains('.') {
            let fr = s
                .split(',')
                .map(|f| parse_fraction(f.trim()))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if fr.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
                return Err(format!("k fractions must lie in (0,1]: {src}"));
            }
            return Ok(KPolicy::Fractions(fr));
        }
        let ks = parse_list::<usize>(s, "k")?;
        if ks.contains(&0) {
            return Err("k must be >= 1".into());
        }
        Ok(KPolicy::Values(ks))
    }

    pub fn ks(&self, n: usize) -> Vec<usize> {
        let mut ks: Vec<usize> = match self {
            KPolicy::All => (1..=n).collect(),
            KPolicy::Fractions(f) => f
                .iter()
                .map(|f| ((f * n as f64).round() as usize).clamp(1, n))
                .collect(),
            KPolicy::Values(v) => v.iter().copied().filter(|k| *k <= n).collect(),
        };
        ks.sort_unstable();
        ks.dedup();
        ks
    }
}

fn parse_fraction(s: &str) -> std::result::Result<f64, String> {
    match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad fraction {s}"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad fraction {s}"))?;
            Ok(a / b)
        }
        None => s.parse().map_err(|_| format!("bad number {s}")),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',')
        .map(|x| x.trim())
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|_| format!("bad value `{x}` in --{what}")))
        .collect()
}

/// Fully resolved options of one run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: String,
    pub spaces: Vec<String>,
    pub dims: Vec<usize>,
    pub k_policy: KPolicy,
    pub solver: SolverConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
    params: BTreeMap<&'static str, String>,
    matrix: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_cli(cli: &Cli) -> CliResult<Self> {
        let file = match &cli.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                ConfigFile::parse(&text).map_err(CliError::Config)?
            }
            None => ConfigFile::default(),
        };
        let kind = cli.command.name();
        let o = cli.command.opts();
        let pick = |flag: &Option<String>, key: &str| -> Option<String> {
            flag.clone().or_else(|| file.get(kind, key).map(str::to_string))
        };
        let mut params = BTreeMap::new();
        for (key, flag) in [
            ("space", &o.space),
            ("couple", &o.couple),
            ("from", &o.from),
            ("to", &o.to),
            ("vec", &o.vec),
            ("t", &o.t),
            ("trials", &o.trials),
            ("p", &o.p),
        ] {
            if let Some(v) = pick(flag, key) {
                params.insert(key, v);
            }
        }
        let cfg_err = |m: String| CliError::Config(m);
        let seed = match cli.seed {
            Some(s) => s,
            None => match file.get(kind, "seed") {
                Some(s) => s.parse().map_err(|_| cfg_err(format!("bad seed `{s}`")))?,
                None => match std::env::var("SEQNORM_SEED") {
                    Ok(s) => s
                        .trim()
                        .parse()
                        .map_err(|_| cfg_err(format!("bad SEQNORM_SEED `{s}`")))?,
                    Err(_) => 42,
                },
            },
        };
        let mut solver = SolverConfig::default().with_seed(seed);
        let tol = match cli.tol {
            Some(t) => Some(t),
            None => match file.get(kind, "tol") {
                Some(s) => Some(s.parse().map_err(|_| cfg_err(format!("bad tol `{s}`")))?),
                None => None,
            },
        };
        if let Some(t) = tol {
            solver.tolerance = t;
        }
        solver.validate().map_err(CliError::from)?;
        let mut dims: Vec<usize> = match pick(&o.n, "n") {
            Some(s) => parse_list(&s, "n").map_err(cfg_err)?,
            None => Vec::new(),
        };
        if dims.contains(&0) {
            return Err(cfg_err("dimensions must be positive".into()));
        }
        dims.sort_unstable();
        dims.dedup();
        let k_policy = match pick(&o.k, "k") {
            Some(s) => KPolicy::parse(&s).map_err(cfg_err)?,
            None => KPolicy::All,
        };
        let spaces = params
            .get("space")
            .map(|s| split_top_level(s))
            .unwrap_or_default();
        let out = cli
            .out
            .clone()
            .or_else(|| file.get(kind, "out").map(PathBuf::from));
        let matrix = o
            .matrix
            .clone()
            .or_else(|| file.get(kind, "matrix").map(PathBuf::from));
        Ok(ExperimentConfig {
            kind: kind.to_string(),
            spaces,
            dims,
            k_policy,
            solver,
            seed,
            out,
            params,
            matrix,
        })
    }

    fn param(&self, key: &str) -> CliResult<&str> {
        self.params
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| CliError::Config(format!("{} needs --{key}", self.kind)))
    }

    fn space(&self) -> CliResult<SpaceDescriptor> {
        Ok(parse_space(self.param("space")?)?)
    }

    fn spaces(&self) -> CliResult<Vec<(String, SpaceDescriptor)>> {
        if self.spaces.is_empty() {
            return Err(CliError::Config(format!("{} needs --space", self.kind)));
        }
        self.spaces
            .iter()
            .map(|s| Ok((s.clone(), parse_space(s)?)))
            .collect()
    }

    fn vector(&self) -> CliResult<Vector> {
        let v: Vec<f64> = parse_list(self.param("vec")?, "vec").map_err(CliError::Config)?;
        Ok(Vector::new(v)?)
    }

    fn floats(&self, key: &str, default: &[f64]) -> CliResult<Vec<f64>> {
        match self.params.get(key) {
            Some(s) => parse_list(s, key).map_err(CliError::Config),
            None => Ok(default.to_vec()),
        }
    }

    fn trials(&self, default: usize) -> CliResult<usize> {
        match self.params.get("trials") {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad --trials `{s}`"))),
            None => Ok(default),
        }
    }

    fn dims_or(&self, default: &[usize]) -> Vec<usize> {
        if self.dims.is_empty() {
            default.to_vec()
        } else {
            self.dims.clone()
        }
    }
}

/// Splits on commas outside parentheses, so `lp(1),lorentz(4/3,2)` yields two items.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Reads a dense matrix: a `rows,cols` line (optionally preceded by the literal
/// header `rows,cols`) and then `rows` lines of `cols` numbers.
pub fn read_matrix(path: &Path) -> CliResult<Matrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut head = lines.next().unwrap_or("");
    if head.replace(' ', "").eq_ignore_ascii_case("rows,cols") {
        head = lines.next().unwrap_or("");
    }
    let dims: Vec<usize> = parse_list(head, "matrix").map_err(CliError::Config)?;
    let [rows, cols] = dims[..] else {
        return Err(CliError::Config("matrix header must be `rows,cols`".into()));
    };
    let mut data = Vec::with_capacity(rows * cols);
    for line in lines {
        data.extend(parse_list::<f64>(line, "matrix").map_err(CliError::Config)?);
    }
    Ok(Matrix::new(rows, cols, data)?)
}

fn exactness(gap: f64) -> &'static str {
    if gap == 0.0 {
        "exact"
    } else {
        "numerical"
    }
}

fn emit(cfg: &ExperimentConfig, table: &Table, stdout: &mut dyn Write) -> CliResult<()> {
    let csv = table.to_csv();
    match &cfg.out {
        Some(path) => fs::write(path, csv)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::Config(format!("cannot write output: {e}"))),
    }
}

/// Executes a resolved configuration, writing CSV to `--out` or `stdout`.
pub fn run(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let mut failures = Vec::new();
    let table = match cfg.kind.as_str() {
        "norm" => {
            let (e, x) = (cfg.space()?, cfg.vector()?);
            let r = norm_with(&e, &x, &cfg.solver)?;
            let mut t = Table::new(&["space", "n", "value", "tag"]);
            t.push(vec![e.to_string().into(), x.dim().into(), r.value.into(), r.certification.tag().into()]);
            t
        }
        "dual-norm" => {
            let (e, x) = (cfg.space()?, cfg.vector()?);
            let r = kothe_dual_norm_with(&e, &x, &cfg.solver)?;
            let mut t = Table::new(&["space", "n", "value", "tag"]);
            t.push(vec![
                SpaceDescriptor::dual(e).to_string().into(),
                x.dim().into(),
                r.value.into(),
                r.certification.tag().into(),
            ]);
            t
        }
        "mult-norm" => {
            let from = parse_space(cfg.param("from")?)?;
            let to = parse_space(cfg.param("to")?)?;
            let x = cfg.vector()?;
            let b = multiplier_norm_with(&from, &to, &x, &cfg.solver)?;
            let mut t = Table::new(&["space", "n", "lower", "upper", "tag"]);
            t.push(vec![
                SpaceDescriptor::multiplier(from, to).to_string().into(),
                x.dim().into(),
                b.lower.into(),
                b.upper.into(),
                exactness(b.gap()).into(),
            ]);
            t
        }
        "fundamental" => {
            let mut t = Table::new(&["space", "n", "value", "tag"]);
            for (name, e) in cfg.spaces()? {
                for n in cfg.dims_or(&[1, 2, 4, 8, 16, 32, 64]) {
                    let r = fundamental(&e, n)?;
                    t.push(vec![name.clone().into(), n.into(), r.value.into(), r.certification.tag().into()]);
                }
            }
            t
        }
        "ak-table" => ak_table(cfg, &mut failures)?,
        "summing-estimate" => summing_table(cfg, &mut failures)?,
        "kfun" => {
            let (e0, e1) = parse_couple(cfg.param("couple")?)?;
            let x = cfg.vector()?;
            let mut t = Table::new(&["t", "k", "x0_support", "x1_support", "tag"]);
            for tv in cfg.floats("t", &[1.0])? {
                let (k, split) = k_functional_with(&e0, &e1, tv, &x, &cfg.solver)?;
                let (s0, s1) = split.support_sizes();
                t.push(vec![tv.into(), k.value.into(), s0.into(), s1.into(), k.certification.tag().into()]);
            }
            t
        }
        "concavity" => {
            let trials = cfg.trials(1000)?;
            let mut t = Table::new(&["space", "n", "lower", "upper", "tag"]);
            for (name, e) in cfg.spaces()? {
                for n in cfg.dims_or(&[8]) {
                    let b = concavity_estimate(&e, n, trials, cfg.seed)?;
                    if b.upper.is_finite() && b.lower > b.upper + 1e-9 {
                        failures.push(format!("{name} n={n}: lower {} exceeds {}", b.lower, b.upper));
                    }
                    t.push(vec![name.clone().into(), n.into(), b.lower.into(), b.upper.into(), "numerical".into()]);
                }
            }
            t
        }
        "spectra-check" => spectra_table(cfg, &mut failures)?,
        "report-all" => return report_all(cfg, stdout),
        other => return Err(CliError::Config(format!("unknown experiment `{other}`"))),
    };
    emit(cfg, &table, stdout)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failures))
    }
}

fn ak_table(cfg: &ExperimentConfig, failures: &mut Vec<String>) -> CliResult<Table> {
    let mut t = Table::new(&[
        "space",
        "n",
        "k",
        "lower_ref",
        "upper",
        "exact_if_known",
        "ratio",
        "lower_tag",
        "upper_tag",
    ]);
    for (name, e) in cfg.spaces()? {
        let exact_p = match e.simplify() {
            SpaceDescriptor::Lp(p) if p.value() < 2.0 => Some(p.value()),
            _ => None,
        };
        for n in cfg.dims_or(&[4, 8, 16, 32, 64]) {
            for k in cfg.k_policy.ks(n) {
                let b = approx_bounds(&e, n, k)?;
                let exact = match exact_p {
                    Some(p) => approx_exact_lp(n, k, p, 2.0)?,
                    None => f64::NAN,
                };
                if exact.is_finite() && (b.upper - exact).abs() > 1e-9 * exact {
                    failures.push(format!("{name} n={n} k={k}: upper {} vs exact {exact}", b.upper));
                }
                t.push(vec![
                    name.clone().into(),
                    n.into(),
                    k.into(),
                    b.lower.into(),
                    b.upper.into(),
                    exact.into(),
                    (b.upper / b.lower).into(),
                    "reference".into(),
                    exactness(if b.gap() == 0.0 || exact.is_finite() { 0.0 } else { 1.0 }).into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn summing_table(cfg: &ExperimentConfig, failures: &mut Vec<String>) -> CliResult<Table> {
    let trials = cfg.trials(64)?;
    let mut t = Table::new(&["space", "p", "n", "lower", "upper", "tag"]);
    let l2 = SpaceDescriptor::lp(2.0);
    if let Some(path) = &cfg.matrix {
        let m = read_matrix(path)?;
        let from = parse_space(cfg.param("from")?)?;
        let to = parse_space(cfg.param("to")?)?;
        let e = cfg.space()?;
        let p = cfg.floats("p", &[2.0])?[0];
        let op = FiniteOperator::new(m, from, to)?;
        let n = op.domain_dim();
        let mut families = vec![VectorFamily::coordinates(n)];
        families.extend(random_families(n, trials, cfg.seed));
        let b = summing_lower_with(&op, &e, p, &families, &cfg.solver)?;
        t.push(vec![e.to_string().into(), p.into(), n.into(), b.lower.into(), b.upper.into(), "numerical".into()]);
        return Ok(t);
    }
    for (name, e) in cfg.spaces()? {
        let m = SpaceDescriptor::multiplier(l2.clone(), e.clone());
        let upper = summing_upper_main(&e).unwrap_or(f64::INFINITY);
        for n in cfg.dims_or(&[4, 8, 16, 32]) {
            let op = FiniteOperator::identity(n, e.clone(), l2.clone())?;
            let mut families = vec![VectorFamily::coordinates(n)];
            families.extend(random_families(n, trials, cfg.seed ^ n as u64));
            let b = summing_lower_with(&op, &m, 2.0, &families, &cfg.solver)?;
            if b.lower > upper * (1.0 + 1e-6) {
                failures.push(format!("{name} n={n}: lower {} above {upper}", b.lower));
            }
            t.push(vec![name.clone().into(), 2.0.into(), n.into(), b.lower.into(), upper.into(), "numerical".into()]);
        }
    }
    Ok(t)
}

fn spectra_table(cfg: &ExperimentConfig, failures: &mut Vec<String>) -> CliResult<Table> {
    let f = match cfg.params.get("space") {
        Some(s) => parse_space(s)?,
        None => SpaceDescriptor::lp(1.0),
    };
    let mut t = Table::new(&["n", "trial", "product_ratio", "eigen_norm", "singular_norm", "holds"]);
    let mut check = |n: usize, trial: usize, a: &Matrix, t: &mut Table| -> CliResult<()> {
        let r = weyl_check(a, &f)?;
        let holds = r.multiplicative_holds && r.norm_form_holds;
        if !holds {
            failures.push(format!("n={n} trial={trial}: Weyl check failed"));
        }
        t.push(vec![
            n.into(),
            trial.into(),
            r.worst_product_ratio.into(),
            r.eigen_norm.into(),
            r.singular_norm.into(),
            Cell::from(holds),
        ]);
        Ok(())
    };
    if let Some(path) = &cfg.matrix {
        let a = read_matrix(path)?;
        check(a.rows(), 0, &a, &mut t)?;
        return Ok(t);
    }
    let trials = cfg.trials(20)?;
    for n in cfg.dims_or(&[8]) {
        for trial in 0..trials {
            let mut rng = stream_rng(cfg.seed, (n * 100_000 + trial) as u64);
            let a = Matrix::gaussian(&mut rng, n, n);
            check(n, trial, &a, &mut t)?;
        }
    }
    Ok(t)
}

fn report_all(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("seqnorm-report"));
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let outcomes = verification::run_all(cfg.seed)?;
    let mut summary = Table::new(&["criterion", "name", "status", "detail"]);
    let mut failures = Vec::new();
    for o in &outcomes {
        let file = dir.join(format!("criterion_{:02}_{}.csv", o.id, o.name));
        fs::write(&file, o.table.to_csv())
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", file.display())))?;
        let _ = writeln!(stdout, "{}", o.summary_line());
        if !o.ok() {
            failures.push(format!("criterion {} {}: {}", o.id, o.name, o.detail));
        }
        summary.push(vec![o.id.into(), o.name.into(), Cell::from(o.passed), o.detail.clone().into()]);
    }
    let file = dir.join("summary.csv");
    fs::write(&file, summary.to_csv())
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", file.display())))?;
    let file = dir.join("summary.txt");
    fs::write(&file, verification::summary(&outcomes))
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", file.display())))?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failures))
    }
}

/// Parses `args` and runs; returns the process exit status.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let result = ExperimentConfig::from_cli(&cli).and_then(|cfg| run(&cfg, stdout));
    match result {
        Ok(()) => 0,
        Err(err) => {
            match &err {
                CliError::Config(m) => {
                    let _ = writeln!(stderr, "error: {m}");
                }
                CliError::Assertion(rows) => {
                    for r in rows {
                        let _ = writeln!(stderr, "FAILED: {r}");
                    }
                }
            }
            err.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with(
            std::iter::once("seqnorm").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_file_sections_and_globals() {
        let c = ConfigFile::parse("seed = 7\n# comment\n[ak-table]\nspace = lp(1)\nn = 4, 8\n").unwrap();
        assert_eq!(c.get("ak-table", "space"), Some("lp(1)"));
        assert_eq!(c.get("ak-table", "seed"), Some("7"));
        assert_eq!(c.get("norm", "space"), None);
        assert!(ConfigFile::parse("[broken\n").is_err());
        assert!(ConfigFile::parse("novalue\n").is_err());
    }

    #[test]
    fn k_policy_forms() {
        assert_eq!(KPolicy::parse("all").unwrap().ks(3), vec![1, 2, 3]);
        assert_eq!(KPolicy::parse("1/2,1").unwrap().ks(8), vec![4, 8]);
        assert_eq!(KPolicy::parse("2,9").unwrap().ks(4), vec![2]);
        assert!(KPolicy::parse("0").is_err());
    }

    #[test]
    fn top_level_split() {
        assert_eq!(split_top_level("lp(1),lorentz(4/3,2)"), vec!["lp(1)", "lorentz(4/3,2)"]);
    }

    #[test]
    fn norm_example() {
        let (code, out, _) = run_args(&["norm", "--space", "orlicz(power(1.5))", "--vec", "1,1,1,1"]);
        assert_eq!(code, 0);
        let value: f64 = out.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
        assert!((value - 4f64.powf(2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn mult_norm_example() {
        let (code, out, _) = run_args(&["mult-norm", "--from", "lp(2)", "--to", "lp(1)", "--vec", "3,4"]);
        assert_eq!(code, 0);
        let row: Vec<&str> = out.lines().nth(1).unwrap().rsplit(',').collect();
        assert_eq!(row[2].parse::<f64>().unwrap(), 5.0);
        assert_eq!(row[0], "exact");
    }

    #[test]
    fn kfun_example() {
        let (code, out, _) = run_args(&["kfun", "--couple", "lp(1),lp(inf)", "--vec", "4,2,1", "--t", "1.5"]);
        assert_eq!(code, 0);
        let k: f64 = out.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(k, 5.0);
    }

    #[test]
    fn ak_table_example() {
        let (code, out, _) = run_args(&["ak-table", "--space", "lp(1)", "--n", "4", "--k", "all"]);
        assert_eq!(code, 0);
        let rows: Vec<&str> = out.lines().skip(1).collect();
        assert_eq!(rows.len(), 4);
        for (i, row) in rows.iter().enumerate() {
            let upper: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
            assert!((upper - ((4 - i) as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn concavity_example() {
        let (code, out, _) = run_args(&["concavity", "--space", "lp(2)", "--n", "8", "--trials", "1000"]);
        assert_eq!(code, 0);
        let lower: f64 = out.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
        assert!(lower <= 1.0 + 1e-9);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&["norm", "--space", "lp(0)", "--vec", "1"]).0, 2);
        assert_eq!(run_args(&["norm", "--vec", "1"]).0, 2);
        assert_eq!(run_args(&["bogus"]).0, 2);
        assert_eq!(run_args(&["kfun", "--couple", "lp(1),lp(inf)", "--vec", "1", "--t", "-1"]).0, 2);
    }

    #[test]
    fn negative_vector_entries_parse() {
        let (code, out, _) = run_args(&["norm", "--space", "lp(1)", "--vec", "-1,2,-3"]);
        assert_eq!(code, 0);
        assert!(out.contains("6.0000000000000000e0"));
    }
}
