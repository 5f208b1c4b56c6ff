//! Dense matrices, singular values and eigenvalue moduli, and the s-number
//! checks built on them: approximation numbers of identities, the Weyl
//! inequalities and the eigenvalue-multiplier bound.

use std::f64::consts::E;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::duality::{identity_norm, m2e_norm, BoundPair};
use crate::error::{Error, Result};
use crate::spaces::{fundamental, norm, SpaceDescriptor, Vector};
use crate::summing::summing_upper_main;

/// `2 sqrt(2e)`, the constant of the generalized Weyl inequality.
pub fn weyl_constant() -> f64 {
    2.0 * (2.0 * E).sqrt()
}

/// Dense real matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix needs positive dimensions".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in d.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Matrix { rows: n, cols: n, data }
    }

    /// Entries drawn independently from the standard normal law.
    pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Self {
        let data = (0..rows * cols).map(|_| StandardNormal.sample(rng)).collect();
        Matrix { rows, cols, data }
    }

    /// Orthogonal matrix from Gram–Schmidt on a Gaussian matrix.
    pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Self {
        loop {
            let g = Matrix::gaussian(rng, n, n);
            let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
            let mut ok = true;
            for j in 0..n {
                let mut v = g.column(j);
                for _ in 0..2 {
                    for u in &q {
                        let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                        v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
                    }
                }
                let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if nv < 1e-8 {
                    ok = false;
                    break;
                }
                q.push(v.into_iter().map(|a| a / nv).collect());
            }
            if ok {
                return Matrix::from_rows(&q).expect("square").transpose();
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[f64]) -> Result<Matrix> {
        if d.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: d.len(),
            });
        }
        let mut out = self.clone();
        for (i, di) in d.iter().enumerate() {
            out.data[i * self.cols..(i + 1) * self.cols]
                .iter_mut()
                .for_each(|v| *v *= di);
        }
        Ok(out)
    }

    /// Spectral norm `||A||_{2 -> 2}`.
    pub fn operator_norm(&self) -> Result<f64> {
        Ok(svd_values(self)?.entries()[0])
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v}")).collect();
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Thin singular value decomposition `A = U diag(s) V^T` with `s` non-increasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

/// One-sided Jacobi SVD. For `rows < cols` the transpose is decomposed.
pub fn svd(a: &Matrix) -> Result<Svd> {
    if a.rows < a.cols {
        let t = svd(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }
    let (m, n) = (a.rows, a.cols);
    // columns of the working matrix and of V, stored column-major
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    let eps = 1e-15;
    let max_sweeps = 80;
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|x| x * x).sum();
                let beta: f64 = w[q].iter().map(|x| x * x).sum();
                let gamma: f64 = w[p].iter().zip(&w[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let (x, y) = (w[p][k], w[q][k]);
                    w[p][k] = c * x - s * y;
                    w[q][k] = s * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (v[p][k], v[q][k]);
                    v[p][k] = c * x - s * y;
                    v[q][k] = s * x + c * y;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure(max_sweeps));
    }
    let norms: Vec<f64> = w.iter().map(|c| crate::numerics::norm2(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut u_rows = vec![vec![0.0; n]; m];
    let mut v_rows = vec![vec![0.0; n]; n];
    for (col, &j) in order.iter().enumerate() {
        let sj = norms[j];
        for k in 0..m {
            u_rows[k][col] = if sj > 0.0 { w[j][k] / sj } else { 0.0 };
        }
        for k in 0..n {
            v_rows[k][col] = v[j][k];
        }
    }
    Ok(Svd {
        u: Matrix::from_rows(&u_rows)?,
        s,
        v: Matrix::from_rows(&v_rows)?,
    })
}

/// Singular values, non-increasing; `min(rows, cols)` of them.
pub fn svd_values(a: &Matrix) -> Result<Vector> {
    Vector::new(svd(a)?.s)
}

/// Eigenvalues `(re, im)` sorted by modulus, then real part, both descending.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<(f64, f64)>> {
    if a.rows != a.cols {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            got: a.cols,
        });
    }
    let n = a.rows;
    let mut h: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    hessenberg(&mut h);
    let mut ev = francis_qr(&mut h)?;
    ev.sort_by(|x, y| {
        let (mx, my) = (x.0.hypot(x.1), y.0.hypot(y.1));
        my.total_cmp(&mx)
            .then(y.0.total_cmp(&x.0))
            .then(y.1.total_cmp(&x.1))
    });
    Ok(ev)
}

/// Moduli of the eigenvalues, non-increasing.
pub fn eig_moduli(a: &Matrix) -> Result<Vector> {
    Vector::new(eigenvalues(a)?.iter().map(|(r, i)| r.hypot(*i)).collect())
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(a: &mut [Vec<f64>]) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<f64> = (k + 1..n).map(|i| a[i][k]).collect();
        let nx = crate::numerics::norm2(&x);
        if nx == 0.0 {
            continue;
        }
        let alpha = if x[0] > 0.0 { -nx } else { nx };
        let mut v = x;
        v[0] -= alpha;
        let nv = crate::numerics::norm2(&v);
        if nv == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|t| *t /= nv);
        // A <- H A
        for j in 0..n {
            let d: f64 = (0..v.len()).map(|i| v[i] * a[k + 1 + i][j]).sum();
            for i in 0..v.len() {
                a[k + 1 + i][j] -= 2.0 * v[i] * d;
            }
        }
        // A <- A H
        for row in a.iter_mut() {
            let d: f64 = (0..v.len()).map(|i| row[k + 1 + i] * v[i]).sum();
            for i in 0..v.len() {
                row[k + 1 + i] -= 2.0 * d * v[i];
            }
        }
        for i in k + 2..n {
            a[i][k] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix, with exceptional
/// shifts and a total budget of `10 n^2` iterations.
fn francis_qr(a: &mut [Vec<f64>]) -> Result<Vec<(f64, f64)>> {
    let n = a.len();
    let mut out = vec![(0.0, 0.0); n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let budget = 10 * n * n;
    let mut total = 0usize;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let u = nn as usize;
            let mut l = u;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[u][u];
            if l == u {
                out[u] = (x + t, 0.0);
                nn -= 1;
                break;
            }
            let mut y = a[u - 1][u - 1];
            let mut w = a[u][u - 1] * a[u - 1][u];
            if l + 1 == u {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    let lo = if z != 0.0 { x - w / z } else { x + z };
                    out[u - 1] = (x + z, 0.0);
                    out[u] = (lo, 0.0);
                } else {
                    out[u - 1] = (x + p, z);
                    out[u] = (x + p, -z);
                }
                nn -= 2;
                break;
            }
            total += 1;
            if total > budget {
                return Err(Error::ConvergenceFailure(budget));
            }
            if its == 10 || its == 20 {
                t += x;
                for (i, row) in a.iter_mut().enumerate().take(u + 1) {
                    row[i] -= x;
                }
                let s = a[u][u - 1].abs() + a[u - 1][u - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let mut m = u - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let uu = a[m][m - 1].abs() * (q.abs() + r.abs());
                let vv = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if uu + vv == vv {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=u {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < u {
                let mut xk = 0.0;
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k + 1 != u { a[k + 2][k - 1] } else { 0.0 };
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != 0.0 {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * xk;
                    }
                    p += s;
                    let xs = p / s;
                    let ys = q / s;
                    let zs = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=u {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k + 1 != u {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * zs;
                        }
                        a[k + 1][j] -= pp * ys;
                        a[k][j] -= pp * xs;
                    }
                    let mmin = if u < k + 3 { u } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        let mut pp = xs * row[k] + ys * row[k + 1];
                        if k + 1 != u {
                            pp += zs * row[k + 2];
                            row[k + 2] -= pp * r;
                        }
                        row[k + 1] -= pp * q;
                        row[k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(out)
}

/// `a_k(id: l_q^n -> l_p^n) = (n - k + 1)^(1/p - 1/q)` for `p < q`.
pub fn approx_exact_lp(n: usize, k: usize, p: f64, q: f64) -> Result<f64> {
    if !(p >= 1.0 && p < q) {
        return Err(Error::ParameterOrder(format!("need 1 <= p < q, got p={p}, q={q}")));
    }
    check_k(n, k)?;
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    Ok(((n - k + 1) as f64).powf(1.0 / p - inv_q))
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    Ok(())
}

fn require_two_concave(e: &SpaceDescriptor) -> Result<()> {
    e.validate()?;
    if !e.attestations().two_concave {
        return Err(Error::MissingAttestation(format!("{e} is not attested 2-concave")));
    }
    Ok(())
}

/// Bounds around `a_k(id: l_2^n -> E_n)`: `upper = ||id: l_2^m -> E_m||` with
/// `m = n - k + 1`, `lower` the reference value `lambda_E(m) / sqrt(m)`.
pub fn approx_bounds(e: &SpaceDescriptor, n: usize, k: usize) -> Result<BoundPair> {
    require_two_concave(e)?;
    check_k(n, k)?;
    let m = n - k + 1;
    let upper = identity_norm(&SpaceDescriptor::lp(2.0), e, m)?.upper;
    let reference = fundamental(e, m)?.value / (m as f64).sqrt();
    Ok(BoundPair {
        lower: reference,
        upper,
        witness: None,
    })
}

/// What the values of an [`SNumberReport`] represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SNumberKind {
    Approximation,
    WeylProxy,
    GelfandLower,
}

impl SNumberKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SNumberKind::Approximation => "approximation",
            SNumberKind::WeylProxy => "weyl-proxy",
            SNumberKind::GelfandLower => "gelfand-lower",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SNumberRow {
    pub k: usize,
    pub bounds: BoundPair,
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SNumberReport {
    pub kind: SNumberKind,
    pub n: usize,
    pub rows: Vec<SNumberRow>,
}

/// `approx_bounds` for `k = 1..=n`, with the exact value attached for `l_p`, `p < 2`.
pub fn approx_report(e: &SpaceDescriptor, n: usize, ks: &[usize]) -> Result<SNumberReport> {
    let exact_p = match e.simplify() {
        SpaceDescriptor::Lp(p) if p.value() < 2.0 => Some(p.value()),
        _ => None,
    };
    let rows = ks
        .iter()
        .map(|&k| {
            Ok(SNumberRow {
                k,
                bounds: approx_bounds(e, n, k)?,
                exact: match exact_p {
                    Some(p) => Some(approx_exact_lp(n, k, p, 2.0)?),
                    None => None,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SNumberReport {
        kind: SNumberKind::Approximation,
        n,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylReport {
    /// `max_m prod_{k<=m} |lambda_k| / prod_{k<=m} s_k`.
    pub worst_product_ratio: f64,
    pub multiplicative_holds: bool,
    pub eigen_norm: f64,
    pub singular_norm: f64,
    pub norm_form_holds: bool,
}

/// Multiplicative Weyl inequality and its norm form with constant `2 sqrt(2e)`.
pub fn weyl_check(a: &Matrix, f: &SpaceDescriptor) -> Result<WeylReport> {
    f.validate()?;
    let lam = eig_moduli(a)?;
    let s = svd_values(a)?;
    let (mut pl, mut ps) = (1.0, 1.0);
    let mut worst = 0.0f64;
    let mut holds = true;
    for (l, sv) in lam.entries().iter().zip(s.entries()) {
        pl *= l;
        ps *= sv;
        if pl > ps * (1.0 + 1e-9) {
            holds = false;
        }
        if ps > 0.0 {
            worst = worst.max(pl / ps);
        } else if pl > 0.0 {
            worst = f64::INFINITY;
        }
    }
    let eigen_norm = norm(f, &lam)?.value;
    let singular_norm = norm(f, &s)?.value;
    Ok(WeylReport {
        worst_product_ratio: worst,
        multiplicative_holds: holds,
        eigen_norm,
        singular_norm,
        norm_form_holds: eigen_norm <= weyl_constant() * singular_norm + 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierReport {
    pub singular_norm: f64,
    pub singular_bound: f64,
    pub singular_holds: bool,
    pub eigen_norm: f64,
    pub eigen_bound: f64,
    pub eigen_holds: bool,
}

/// For `T = diag(sigma) R` with `R` rescaled to spectral norm 1: checks
/// `||s(T)||_{M(l_2,E)} <= sqrt(2) M_(2)(E) ||sigma||_E` and
/// `||lambda(T)*||_{M(l_2,E)} <= 2 sqrt(2e) ||s(T)||_{M(l_2,E)}`.
pub fn eigenvalue_multiplier_check(
    sigma: &Vector,
    r: &Matrix,
    e: &SpaceDescriptor,
) -> Result<MultiplierReport> {
    require_two_concave(e)?;
    if r.rows != r.cols || r.rows != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            got: r.rows,
        });
    }
    let rn = r.operator_norm()?;
    let r1 = if rn > 0.0 { r.scale(1.0 / rn) } else { r.clone() };
    let t = r1.scale_rows(sigma.entries())?;
    let s = svd_values(&t)?;
    let lam = eig_moduli(&t)?;
    let singular_norm = m2e_norm(e, &s)?.value;
    let eigen_norm = m2e_norm(e, &lam)?.value;
    let sigma_norm = norm(e, sigma)?.value;
    let singular_bound = summing_upper_main(e)? * sigma_norm;
    let eigen_bound = weyl_constant() * singular_norm;
    Ok(MultiplierReport {
        singular_norm,
        singular_bound,
        singular_holds: singular_norm <= singular_bound + 1e-6,
        eigen_norm,
        eigen_bound,
        eigen_holds: eigen_norm <= eigen_bound + 1e-6,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiLowerReport {
    /// `C = 2 sqrt(2e) c_2^F`.
    pub constant: f64,
    /// Independently computed quantity the bound is about.
    pub computed: f64,
    /// The bound implied by the supplied summing norm.
    pub implied: f64,
    pub consistent: bool,
}

fn c2(f: &SpaceDescriptor, n: usize) -> Result<f64> {
    Ok(identity_norm(&SpaceDescriptor::lp(2.0), f, n)?.upper)
}

/// `pi_{F,2}(id_X) >= C^-1 lambda_F(n)`: checks `C^-1 lambda_F(n) <= pi_value`.
pub fn pi_identity_lower(f: &SpaceDescriptor, n: usize, pi_value: f64) -> Result<PiLowerReport> {
    f.validate()?;
    let constant = weyl_constant() * c2(f, n)?;
    let lambda = fundamental(f, n)?.value;
    let implied = lambda / constant;
    Ok(PiLowerReport {
        constant,
        computed: pi_value,
        implied,
        consistent: implied <= pi_value * (1.0 + 1e-12),
    })
}

/// `c_k(T) >= C^-1 lambda_F(n-k+1) / pi_{F,2}(T^-1)`: checks the implied lower
/// bound against a known Gelfand number `c_k`.
pub fn gelfand_lower(
    f: &SpaceDescriptor,
    n: usize,
    k: usize,
    pi_inverse: f64,
    c_k: f64,
) -> Result<PiLowerReport> {
    f.validate()?;
    check_k(n, k)?;
    let constant = weyl_constant() * c2(f, n)?;
    let implied = fundamental(f, n - k + 1)?.value / (constant * pi_inverse);
    Ok(PiLowerReport {
        constant,
        computed: c_k,
        implied,
        consistent: implied <= c_k * (1.0 + 1e-12),
    })
}

/// Random vector with entries uniform in `[-1, 1]`.
pub fn uniform_vector(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::new((0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::stream_rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn svd_examples() {
        assert_eq!(svd_values(&Matrix::diag(&[3.0, 2.0, 1.0])).unwrap().entries(), &[3.0, 2.0, 1.0]);
        let s = svd_values(&m(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!(close(s.entries()[0], 1.0, 1e-15) && close(s.entries()[1], 1.0, 1e-15));
        let s = svd_values(&m(&[&[1.0, 1.0], &[0.0, 1.0]])).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(close(s.entries()[0], phi, 1e-14));
        assert!(close(s.entries()[1], phi - 1.0, 1e-14));
    }

    #[test]
    fn svd_factors_are_orthogonal() {
        let mut rng = stream_rng(1, 0);
        for (r, c) in [(6, 4), (4, 6), (9, 9)] {
            let a = Matrix::gaussian(&mut rng, r, c);
            let f = svd(&a).unwrap();
            let scale = f.s[0];
            let k = f.s.len();
            let utu = f.u.transpose().matmul(&f.u).unwrap();
            let vtv = f.v.transpose().matmul(&f.v).unwrap();
            for i in 0..k {
                for j in 0..k {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((utu.get(i, j) - want).abs() <= 1e-9);
                    assert!((vtv.get(i, j) - want).abs() <= 1e-9);
                }
            }
            let rebuilt = f
                .u
                .scale_rows(&vec![1.0; r])
                .unwrap()
                .matmul(&Matrix::diag(&f.s))
                .unwrap()
                .matmul(&f.v.transpose())
                .unwrap();
            for (x, y) in rebuilt.data().iter().zip(a.data()) {
                assert!((x - y).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn diagonal_svd_is_rearrangement() {
        let d = [0.5, -3.0, 2.0, 0.0, -1.0];
        let s = svd_values(&Matrix::diag(&d)).unwrap();
        assert_eq!(s, crate::spaces::rearrange(&Vector::new(d.to_vec()).unwrap()));
    }

    #[test]
    fn eig_examples() {
        assert_eq!(eig_moduli(&Matrix::diag(&[-3.0, 2.0])).unwrap().entries(), &[3.0, 2.0]);
        let rot = eig_moduli(&m(&[&[0.0, -1.0], &[1.0, 0.0]])).unwrap();
        assert!(close(rot.entries()[0], 1.0, 1e-15) && close(rot.entries()[1], 1.0, 1e-15));
        assert_eq!(eig_moduli(&m(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap().entries(), &[0.0, 0.0]);
        let tri = m(&[&[1.0, 5.0, -2.0], &[0.0, -4.0, 3.0], &[0.0, 0.0, 2.5]]);
        let e = eig_moduli(&tri).unwrap();
        for (a, b) in e.entries().iter().zip([4.0, 2.5, 1.0]) {
            assert!(close(*a, b, 1e-13));
        }
    }

    #[test]
    fn eig_ordering_breaks_ties_by_real_part() {
        let ev = eigenvalues(&Matrix::diag(&[-2.0, 2.0, 1.0])).unwrap();
        assert_eq!(ev, vec![(2.0, 0.0), (-2.0, 0.0), (1.0, 0.0)]);
    }

    #[test]
    fn eigenvalue_products_match_determinant_and_trace() {
        let mut rng = stream_rng(2, 0);
        for n in [3, 5, 8, 16] {
            let a = Matrix::gaussian(&mut rng, n, n);
            let ev = eigenvalues(&a).unwrap();
            let trace: f64 = (0..n).map(|i| a.get(i, i)).sum();
            let sum_re: f64 = ev.iter().map(|e| e.0).sum();
            assert!((trace - sum_re).abs() <= 1e-9 * n as f64);
            let sum_im: f64 = ev.iter().map(|e| e.1).sum();
            assert!(sum_im.abs() <= 1e-9);
            // |det A| = prod s_k = prod |lambda_k|
            let pl: f64 = ev.iter().map(|e| e.0.hypot(e.1).ln()).sum();
            let ps: f64 = svd_values(&a).unwrap().entries().iter().map(|s| s.ln()).sum();
            assert!((pl - ps).abs() <= 1e-8);
        }
    }

    #[test]
    fn pietsch_examples() {
        assert!(close(approx_exact_lp(4, 2, 1.0, 2.0).unwrap(), 3f64.sqrt(), 1e-15));
        assert_eq!(approx_exact_lp(7, 7, 1.0, 2.0).unwrap(), 1.0);
        assert_eq!(approx_exact_lp(5, 1, 1.0, f64::INFINITY).unwrap(), 5.0);
        assert!(matches!(approx_exact_lp(5, 1, 2.0, 2.0), Err(Error::ParameterOrder(_))));
    }

    #[test]
    fn approx_bounds_examples() {
        let l1 = SpaceDescriptor::lp(1.0);
        let b = approx_bounds(&l1, 4, 2).unwrap();
        assert!(close(b.upper, 3f64.sqrt(), 1e-15) && close(b.lower, 3f64.sqrt(), 1e-15));
        let b = approx_bounds(&l1, 9, 9).unwrap();
        assert_eq!(b.upper, 1.0);
        let lor: SpaceDescriptor = "lorentz(4/3,2)".parse().unwrap();
        let b = approx_bounds(&lor, 64, 16).unwrap();
        assert!(b.upper / b.lower <= SQRT_2_M2 && b.upper >= b.lower * (1.0 - 1e-9));
        assert!(matches!(
            approx_bounds(&SpaceDescriptor::lp(3.0), 4, 1),
            Err(Error::MissingAttestation(_))
        ));
    }

    const SQRT_2_M2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn weyl_examples() {
        let l1 = SpaceDescriptor::lp(1.0);
        let r = weyl_check(&Matrix::diag(&[3.0, 2.0, 1.0]), &l1).unwrap();
        assert!(r.multiplicative_holds && r.norm_form_holds);
        assert!(close(r.worst_product_ratio, 1.0, 1e-12));
        assert!(close(r.eigen_norm, r.singular_norm, 1e-14));
        let r = weyl_check(&m(&[&[0.0, 1.0], &[0.0, 0.0]]), &l1).unwrap();
        assert!(r.multiplicative_holds && r.eigen_norm == 0.0 && r.singular_norm == 1.0);
    }

    #[test]
    fn multiplier_check_examples() {
        let l1 = SpaceDescriptor::lp(1.0);
        let r = eigenvalue_multiplier_check(&Vector::unit(4, 0), &Matrix::identity(4), &l1).unwrap();
        assert!(close(r.singular_norm, 1.0, 1e-14) && r.singular_holds && r.eigen_holds);
        let r = eigenvalue_multiplier_check(&Vector::zeros(3), &Matrix::identity(3), &l1).unwrap();
        assert_eq!(r.singular_norm, 0.0);
        assert!(r.singular_holds && r.eigen_holds);
    }

    #[test]
    fn pi_identity_examples() {
        let l2 = SpaceDescriptor::lp(2.0);
        for n in [1, 4, 25] {
            let r = pi_identity_lower(&l2, n, (n as f64).sqrt()).unwrap();
            assert!(r.consistent && close(r.constant, weyl_constant(), 1e-15));
            for k in 1..=n {
                assert!(gelfand_lower(&l2, n, k, (n as f64).sqrt(), 1.0).unwrap().consistent);
            }
        }
    }
}
