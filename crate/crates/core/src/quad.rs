//! Quadrature rules.
//!
//! Integrals along paths whose endpoints are algebraic branch points are
//! handled by a polynomial change of variables `tau = I_u(ma, mb)` (the
//! regularised incomplete beta function with integer parameters) followed by
//! Gauss-Legendre in `u`. An endpoint where the integrand is analytic in
//! `tau^(1/m)` becomes analytic in `u` with `ma = m`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

const CACHED: [usize; 8] = [8, 16, 24, 32, 48, 64, 128, 256];

/// Cached Gauss-Legendre rule for the common orders.
pub fn gl_cached(n: usize) -> (&'static [f64], &'static [f64]) {
    static TABLE: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let table = TABLE.get_or_init(|| CACHED.iter().map(|&n| gauss_legendre(n)).collect());
    let i = CACHED
        .iter()
        .position(|&m| m == n)
        .unwrap_or_else(|| panic!("no cached Gauss-Legendre rule of order {n}"));
    (&table[i].0, &table[i].1)
}

fn binom(n: u32, k: u32) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// `(tau, 1 - tau, dtau/du)` for the incomplete-beta map with integer exponents.
pub fn beta_map(ma: u32, mb: u32, u: f64) -> (f64, f64, f64) {
    let n = ma + mb - 1;
    let v = 1.0 - u;
    let mut lo = 0.0;
    let mut hi = 0.0;
    for j in 0..=n {
        let term = binom(n, j) * u.powi(j as i32) * v.powi((n - j) as i32);
        if j >= ma {
            hi += term;
        } else {
            lo += term;
        }
    }
    // 1/B(ma, mb) = n! / ((ma-1)! (mb-1)!) = mb * C(n, mb)
    let inv_beta = mb as f64 * binom(n, mb);
    let d = inv_beta * u.powi(ma as i32 - 1) * v.powi(mb as i32 - 1);
    (hi, lo, d)
}

/// One quadrature node on a unit parameter interval.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub tau: f64,
    /// `1 - tau`, kept separately so that points near the upper end are exact.
    pub tau_c: f64,
    pub weight: f64,
}

/// Nodes of the mapped Gauss-Legendre rule of order `n`, sorted by `tau`.
pub fn mapped_nodes(n: usize, ma: u32, mb: u32) -> Vec<Node> {
    let (x, w) = gl_cached(n);
    x.iter()
        .zip(w)
        .map(|(&xi, &wi)| {
            let u = 0.5 * (xi + 1.0);
            let (tau, tau_c, d) = beta_map(ma, mb, u);
            Node {
                tau,
                tau_c,
                weight: 0.5 * wi * d,
            }
        })
        .collect()
}

/// Integrate over a unit interval with mapped Gauss-Legendre, doubling the
/// order until two successive estimates agree to `tol` (absolute, scaled by
/// `max(1, |I|)`). `eval` receives all nodes of one rule in increasing `tau`
/// and must return the integrand values in the same order.
pub fn integrate_mapped<F>(ma: u32, mb: u32, tol: f64, eval: F) -> Result<Complex64>
where
    F: FnMut(&[Node]) -> Result<Vec<Complex64>>,
{
    integrate_mapped_err(ma, mb, tol, eval).map(|r| r.0)
}

/// As [`integrate_mapped`], also returning the difference of the last two
/// estimates.
pub fn integrate_mapped_err<F>(ma: u32, mb: u32, tol: f64, mut eval: F) -> Result<(Complex64, f64)>
where
    F: FnMut(&[Node]) -> Result<Vec<Complex64>>,
{
    let orders = [16usize, 32, 64, 128, 256];
    let mut prev: Option<Complex64> = None;
    let mut last_err = f64::INFINITY;
    for &n in &orders {
        let nodes = mapped_nodes(n, ma, mb);
        let vals = eval(&nodes)?;
        let sum: Complex64 = nodes.iter().zip(&vals).map(|(nd, v)| v * nd.weight).sum();
        if let Some(p) = prev {
            last_err = (sum - p).norm();
            if last_err <= tol * sum.norm().max(1.0) {
                return Ok((sum, last_err));
            }
        }
        prev = Some(sum);
    }
    Err(Error::QuadratureNotConverged {
        estimate: prev.map_or(f64::NAN, |p| p.norm()),
        error: last_err,
    })
}

/// Real scalar integral of a smooth function on `[a, b]` by adaptive
/// Gauss-Legendre on a binary subdivision.
pub fn integrate_real<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, mut f: F) -> Result<f64> {
    fn rule<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, f: &mut F) -> f64 {
        let (x, w) = gl_cached(n);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        x.iter()
            .zip(w)
            .map(|(&xi, &wi)| wi * f(c + h * xi))
            .sum::<f64>()
            * h
    }
    let mut stack = vec![(a, b, 0u32)];
    let mut total = 0.0;
    while let Some((lo, hi, depth)) = stack.pop() {
        let coarse = rule(lo, hi, 16, &mut f);
        let fine = rule(lo, hi, 32, &mut f);
        if (fine - coarse).abs() <= tol * fine.abs().max(1.0) * ((hi - lo) / (b - a)).max(1e-3)
            || depth > 40
        {
            if depth > 40 {
                return Err(Error::QuadratureNotConverged {
                    estimate: fine,
                    error: (fine - coarse).abs(),
                });
            }
            total += fine;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    Ok(total)
}
