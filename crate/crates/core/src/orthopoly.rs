//! Multiple orthogonal polynomials `P_{n,n}` for the Airy weights on the
//! contour `Gamma_Y`, their zeros, and the comparison with `Sigma_1`, `mu_1`
//! and the strong asymptotics.
//!
//! All pieces of `Gamma_Y` are oriented away from the origin. The weights are
//! entire and satisfy the junction rules at `0` and `z1`, so the moments
//! do not depend on the path. On `Sigma_1` itself the whisker weights reach
//! `e^{n Re(z^3/3 + 2 z^(3/2)/3)/t}` and cancel between the two sides, so the
//! moments are taken on the rays `arg z = +-pi/3` from the origin instead,
//! where the integrands stay bounded.

use crate::curve::{omega_pow, OMEGA, T_STAR};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::geometry::{ArmId, Geometry};
use crate::quad::gl_cached;
use crate::riemann::{SpuriousZero, ThetaContext};
use nalgebra::{linalg::Schur, DMatrix, DVector};
use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// `Ai(0)`.
pub const AI0: f64 = 0.355_028_053_887_817_2;
/// `Ai'(0)`.
pub const AIP0: f64 = -0.258_819_403_792_806_8;
/// Largest degree solved in double precision.
pub const MAX_DEGREE: usize = 16;
/// Condition number above which a solve is flagged.
pub const COND_LIMIT: f64 = 1e12;

const SERIES_RADIUS: f64 = 2.5;
/// Relative change at which the moment quadratures stop refining.
pub const MOMENT_TOL: f64 = 1e-11;
const ASYMPTOTIC_RADIUS: f64 = 12.0;
/// Smallest distance to `Sigma_1`, relative to `z1`, for a spurious flag.
const SPURIOUS_FLOOR: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub ai: C,
    pub aip: C,
}

/// `(ai, aip) * exp(exp)`, keeping the exponential apart until it is
/// combined with the weight factor.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    ai: C,
    aip: C,
    exp: C,
}

fn airy_series(z: C) -> AiryValue {
    // Ai = Ai(0) f + Ai'(0) g with f, g the even and odd Maclaurin solutions.
    let z3 = z * z * z;
    let (mut a, mut b) = (C::new(1.0, 0.0), z);
    let (mut da, mut db) = (C::new(0.0, 0.0), C::new(1.0, 0.0));
    let (mut f, mut g, mut fp, mut gp) = (a, b, da, db);
    for k in 0..200 {
        let kf = k as f64;
        a *= z3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        b *= z3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        da = if k == 0 {
            0.5 * z * z
        } else {
            da * z3 / ((3.0 * kf) * (3.0 * kf + 2.0))
        };
        db *= z3 / ((3.0 * kf + 3.0) * (3.0 * kf + 1.0));
        f += a;
        g += b;
        fp += da;
        gp += db;
        if a.norm() + b.norm() + da.norm() + db.norm()
            <= 1e-17 * (f.norm() + g.norm() + fp.norm() + gp.norm())
        {
            break;
        }
    }
    AiryValue {
        ai: AI0 * f + AIP0 * g,
        aip: AI0 * fp + AIP0 * gp,
    }
}

fn zeta(z: C) -> C {
    2.0 / 3.0 * z * z.sqrt()
}

/// Steepest-descent Laplace integral through the saddle `sqrt z`, valid for
/// `|arg z| < pi`; used for `|arg z| <= 2 pi / 3`.
fn airy_laplace(z: C) -> Scaled {
    let r = z.sqrt();
    let t_max = (40.0 / r.re).sqrt();
    let (x, w) = gl_cached(24);
    let (mut s0, mut s1) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    let mut a = 0.0;
    while a < t_max {
        let h = (3.0 / (2.0 * r.norm() * a + a * a + 1.0))
            .min(0.5)
            .min(t_max - a + 1e-3);
        for (xi, wi) in x.iter().zip(w) {
            let t = a + 0.5 * h * (xi + 1.0);
            let e = (-r * t * t).exp() * (0.5 * h * wi);
            let (sn, cs) = (t * t * t / 3.0).sin_cos();
            s0 += e * cs;
            s1 += e * (r * cs + t * sn);
        }
        a += h;
    }
    Scaled {
        ai: s0 / PI,
        aip: -s1 / PI,
        exp: -zeta(z),
    }
}

fn airy_asymptotic(z: C) -> Scaled {
    let zt = zeta(z);
    let q = z.powf(0.25);
    let (mut su, mut sv) = (C::new(1.0, 0.0), C::new(1.0, 0.0));
    let (mut u, mut p) = (1.0, C::new(1.0, 0.0));
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        p = -p / zt;
        let term = p * u;
        if term.norm() >= last {
            break;
        }
        last = term.norm();
        su += term;
        sv += p * v;
        if last <= 1e-17 {
            break;
        }
    }
    let c = 0.5 / PI.sqrt();
    Scaled {
        ai: c / q * su,
        aip: -c * q * sv,
        exp: -zt,
    }
}

/// `Ai`, `Ai'` as one or two scaled terms.
fn airy_scaled(z: C) -> ([Scaled; 2], usize) {
    let zero = Scaled {
        ai: C::new(0.0, 0.0),
        aip: C::new(0.0, 0.0),
        exp: C::new(0.0, 0.0),
    };
    let r = z.norm();
    if r <= SERIES_RADIUS {
        let v = airy_series(z);
        return (
            [
                Scaled {
                    ai: v.ai,
                    aip: v.aip,
                    exp: C::new(0.0, 0.0),
                },
                zero,
            ],
            1,
        );
    }
    let direct = |z: C| {
        if r >= ASYMPTOTIC_RADIUS {
            airy_asymptotic(z)
        } else {
            airy_laplace(z)
        }
    };
    if z.arg().abs() <= 2.0 * PI / 3.0 {
        return ([direct(z), zero], 1);
    }
    // Ai(z) = -w Ai(wz) - w^2 Ai(w^2 z), Ai'(z) = -w^2 Ai'(wz) - w Ai'(w^2 z).
    let (o, o2) = (OMEGA, OMEGA * OMEGA);
    let a = direct(o * z);
    let b = direct(o2 * z);
    (
        [
            Scaled {
                ai: -o * a.ai,
                aip: -o2 * a.aip,
                exp: a.exp,
            },
            Scaled {
                ai: -o2 * b.ai,
                aip: -o * b.aip,
                exp: b.exp,
            },
        ],
        2,
    )
}

/// `Ai(z)` and `Ai'(z)`: Maclaurin series for `|z| <= 2.5`, a Laplace
/// integral up to `|z| = 12`, the asymptotic expansion beyond, and the
/// connection formula outside `|arg z| <= 2 pi / 3`.
pub fn airy(z: C) -> AiryValue {
    let (terms, k) = airy_scaled(z);
    let mut v = AiryValue {
        ai: C::new(0.0, 0.0),
        aip: C::new(0.0, 0.0),
    };
    for s in &terms[..k] {
        let e = s.exp.exp();
        v.ai += s.ai * e;
        v.aip += s.aip * e;
    }
    v
}

/// `(sum a_k Ai(m_k s), sum b_k Ai'(m_k s)) e^E` for parts `(m_k, a_k, b_k)`.
fn combo(parts: &[(C, C, C)], s: C, e: C) -> (C, C) {
    let (mut w0, mut w1) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for &(m, ca, cp) in parts {
        let (terms, k) = airy_scaled(m * s);
        for t in &terms[..k] {
            let f = (t.exp + e).exp();
            w0 += ca * t.ai * f;
            w1 += cp * t.aip * f;
        }
    }
    (w0, w1)
}

fn arm_sector(arm: ArmId) -> Result<i64> {
    let j = match arm {
        ArmId::Spine(j) | ArmId::WhiskerUp(j) | ArmId::WhiskerDown(j) => j,
    };
    if (0..3).contains(&j) {
        Ok(j)
    } else {
        Err(Error::UnknownArm(format!("{arm:?}")))
    }
}

/// `(w_{0,n}(z), w_{1,n}(z))` on `arm`, where `WhiskerUp(j)` stands for
/// `omega^j (gamma_{1,2} + C_0^+)` and `WhiskerDown(j)` for the `z3` side.
pub fn weights(n: usize, t: f64, z: C, arm: ArmId) -> Result<(C, C)> {
    let j = arm_sector(arm)?;
    let z0 = omega_pow(-j) * z;
    let nf = n as f64;
    let s = (nf / t).powf(2.0 / 3.0) * z0;
    let e = nf / (3.0 * t) * z0 * z0 * z0;
    let one = C::new(1.0, 0.0);
    let (o, o2) = (OMEGA, OMEGA * OMEGA);
    let third = C::new(1.0 / 3.0, 0.0);
    let (w0, w1) = match arm {
        ArmId::Spine(_) => combo(&[(one, one, one)], s, e),
        ArmId::WhiskerUp(_) => combo(&[(one, third, third), (o, -o * third, -o2 * third)], s, e),
        ArmId::WhiskerDown(_) => combo(&[(one, third, third), (o2, -o2 * third, -o * third)], s, e),
    };
    Ok((w0 * omega_pow(2 * j), w1 * omega_pow(j)))
}

/// One quadrature node on `Gamma_Y` in `S0`.
#[derive(Debug, Clone, Copy)]
pub struct YNode {
    pub z: C,
    pub dz: C,
    pub arm: ArmId,
}

fn ray_dir() -> C {
    C::from_polar(1.0, PI / 3.0)
}

/// Ray length beyond which `|z|^m_max (|w_0| + |w_1|)` on `C_0^+` drops
/// below `1e-17` of its largest value.
pub fn ray_truncation(n: usize, t: f64, m_max: usize) -> Result<f64> {
    let size = |r: f64| -> Result<f64> {
        let z = ray_dir() * r;
        let (w0, w1) = weights(n, t, z, ArmId::WhiskerUp(0))?;
        Ok((w0.norm() + w1.norm()) * r.max(1.0).powi(m_max as i32))
    };
    let mut big = size(0.0)?;
    let mut r = 0.0;
    loop {
        r += 0.02;
        let v = size(r)?;
        big = big.max(v);
        if v <= 1e-17 * big || r > 50.0 {
            return Ok(r);
        }
    }
}

/// Nodes on the rays `[0, ray_len] e^{+-i pi/3}` with `2^level` times the
/// base panel count. The spine weight is the sum of the two ray weights,
/// so the junction with the spines is moved to the origin.
pub fn ray_nodes(ray_len: f64, level: u32) -> Vec<YNode> {
    let (x, w) = gl_cached(16);
    let panels = ((ray_len / 0.05).ceil() as usize).max(4) << level;
    let h = 0.5 * ray_len / panels as f64;
    let d = ray_dir();
    let mut out = Vec::with_capacity(2 * panels * x.len());
    for p in 0..panels {
        let a = 2.0 * h * p as f64;
        for (xi, wi) in x.iter().zip(w) {
            let r = a + h * (xi + 1.0);
            out.push(YNode {
                z: d * r,
                dz: d * (h * wi),
                arm: ArmId::WhiskerUp(0),
            });
            out.push(YNode {
                z: d.conj() * r,
                dz: d.conj() * (h * wi),
                arm: ArmId::WhiskerDown(0),
            });
        }
    }
    out
}

/// Moments `mu_a(m) = int_{Gamma_Y} z^m w_{a,n}(z) dz`, `m = 0..=m_max`.
#[derive(Debug, Clone)]
pub struct Moments {
    pub n: usize,
    pub t: f64,
    pub mu0: Vec<C>,
    pub mu1: Vec<C>,
    /// Ray length used.
    pub ray_len: f64,
    /// Largest change against the previous refinement, relative to the
    /// largest moment.
    pub refinement_change: f64,
}

/// Sum of `omega^(j k)` over the three sectors.
fn rotation_sum(k: usize) -> C {
    (0..3).map(|j| omega_pow(j * k as i64)).sum()
}

fn moments_on(
    n: usize,
    t: f64,
    m_max: usize,
    ray_len: f64,
    level: u32,
    exec: Exec,
) -> Result<(Vec<C>, Vec<C>)> {
    let nodes = ray_nodes(ray_len, level);
    let parts = exec::map(exec, &nodes, |nd| -> Result<(Vec<C>, Vec<C>)> {
        let (w0, w1) = weights(n, t, nd.z, nd.arm)?;
        let mut zp = nd.dz;
        let mut a = Vec::with_capacity(m_max + 1);
        let mut b = Vec::with_capacity(m_max + 1);
        for _ in 0..=m_max {
            a.push(zp * w0);
            b.push(zp * w1);
            zp *= nd.z;
        }
        Ok((a, b))
    });
    let mut i0 = vec![C::new(0.0, 0.0); m_max + 1];
    let mut i1 = vec![C::new(0.0, 0.0); m_max + 1];
    for p in parts {
        let (a, b) = p?;
        for m in 0..=m_max {
            i0[m] += a[m];
            i1[m] += b[m];
        }
    }
    // A rotated piece picks up omega^(j(m + 1 + e)), e = 2 for w_0 and 1 for w_1.
    let mu0 = (0..=m_max).map(|m| i0[m] * rotation_sum(m + 3)).collect();
    let mu1 = (0..=m_max).map(|m| i1[m] * rotation_sum(m + 2)).collect();
    Ok((mu0, mu1))
}

impl Moments {
    /// Moments up to `m_max`, refined until two levels agree to `tol`
    /// relative. `ray_factor` scales the truncated ray length.
    pub fn compute(
        n: usize,
        t: f64,
        m_max: usize,
        ray_factor: f64,
        tol: f64,
        exec: Exec,
    ) -> Result<Self> {
        let ray_len = ray_truncation(n, t, m_max)? * ray_factor;
        let (mut mu0, mut mu1) = moments_on(n, t, m_max, ray_len, 0, exec)?;
        let scale = |a: &[C], b: &[C]| a.iter().chain(b).map(|z| z.norm()).fold(0.0, f64::max);
        let mut change = f64::INFINITY;
        for level in 1..=4 {
            let (a, b) = moments_on(n, t, m_max, ray_len, level, exec)?;
            let s = scale(&a, &b).max(f64::MIN_POSITIVE);
            change = a
                .iter()
                .zip(&mu0)
                .chain(b.iter().zip(&mu1))
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
                / s;
            mu0 = a;
            mu1 = b;
            if change <= tol {
                return Ok(Moments {
                    n,
                    t,
                    mu0,
                    mu1,
                    ray_len,
                    refinement_change: change,
                });
            }
        }
        Err(Error::QuadratureNotConverged {
            estimate: scale(&mu0, &mu1),
            error: change,
        })
    }
}

/// Monic `P_{n,n}`; `coeffs[k]` multiplies `z^k`, `coeffs[n] = 1`.
#[derive(Debug, Clone)]
pub struct MonicPoly {
    pub n: usize,
    pub t: f64,
    pub coeffs: Vec<C>,
    /// 2-norm condition number of the row-scaled moment matrix.
    pub cond: f64,
    pub ill_conditioned: bool,
    /// `max |sum_k c_k mu_a(j + k)|` over the conditions, relative to the largest moment.
    pub residual: f64,
}

impl MonicPoly {
    pub fn eval(&self, z: C) -> C {
        self.coeffs
            .iter()
            .rev()
            .fold(C::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_derivative(&self, z: C) -> C {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(C::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * k as f64)
    }

    /// Largest `|Im c_k|` relative to the coefficient norm.
    pub fn imag_ratio(&self) -> f64 {
        let norm = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / norm
    }

    /// Largest coefficient at a degree `!= n mod 3`, relative to the coefficient norm.
    pub fn off_class_ratio(&self) -> f64 {
        let norm = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let off = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| !(self.n - k).is_multiple_of(3))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        off / norm
    }
}

/// Rows of the orthogonality conditions: `(a, j)` for `j < n/2`, `a = 0, 1`.
fn condition_rows(n: usize) -> Vec<(usize, usize)> {
    let half = n / 2;
    (0..half)
        .map(|j| (0, j))
        .chain((0..half).map(|j| (1, j)))
        .collect()
}

/// Solve the moment system for the monic `P_{n,n}`.
pub fn solve_from_moments(m: &Moments) -> Result<MonicPoly> {
    let n = m.n;
    if n == 0 {
        return Ok(MonicPoly {
            n,
            t: m.t,
            coeffs: vec![C::new(1.0, 0.0)],
            cond: 1.0,
            ill_conditioned: false,
            residual: 0.0,
        });
    }
    let rows = condition_rows(n);
    let mu = |a: usize, k: usize| if a == 0 { m.mu0[k] } else { m.mu1[k] };
    let mut mat = DMatrix::<C>::zeros(n, n);
    let mut rhs = DVector::<C>::zeros(n);
    for (r, &(a, j)) in rows.iter().enumerate() {
        let row_max = (0..=n).map(|k| mu(a, j + k).norm()).fold(0.0, f64::max);
        let s = if row_max > 0.0 { 1.0 / row_max } else { 1.0 };
        for k in 0..n {
            mat[(r, k)] = mu(a, j + k) * s;
        }
        rhs[r] = -mu(a, j + n) * s;
    }
    let sv = mat.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let cond = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    let c = mat
        .full_piv_lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Domain(format!("moment system for n = {n} is singular")))?;
    let mut coeffs: Vec<C> = c.iter().copied().collect();
    coeffs.push(C::new(1.0, 0.0));
    let big = m
        .mu0
        .iter()
        .chain(&m.mu1)
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let residual = rows
        .iter()
        .map(|&(a, j)| (0..=n).map(|k| coeffs[k] * mu(a, j + k)).sum::<C>().norm())
        .fold(0.0, f64::max)
        / big;
    Ok(MonicPoly {
        n,
        t: m.t,
        coeffs,
        cond,
        ill_conditioned: !(cond <= COND_LIMIT),
        residual,
    })
}

fn check_degree(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) || n > MAX_DEGREE {
        return Err(Error::Domain(format!(
            "n must be even and at most {MAX_DEGREE}, got {n}"
        )));
    }
    Ok(())
}

/// `P_{n,n}` at `t`: moments for `m < 3n/2` to relative change `tol`, then the solve.
pub fn solve_with(n: usize, t: f64, tol: f64, exec: Exec) -> Result<MonicPoly> {
    check_degree(n)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if n == 0 {
        return Ok(MonicPoly {
            n,
            t,
            coeffs: vec![C::new(1.0, 0.0)],
            cond: 1.0,
            ill_conditioned: false,
            residual: 0.0,
        });
    }
    let m = Moments::compute(n, t, n / 2 - 1 + n, 1.0, tol, exec)?;
    solve_from_moments(&m)
}

pub fn solve_orthogonality(n: usize, t: f64) -> Result<MonicPoly> {
    solve_with(n, t, MOMENT_TOL, Exec::Parallel)
}

/// Roots of the monic polynomial with coefficients `coeffs` (low to high,
/// last = 1): companion eigenvalues and one Newton step each.
pub fn monic_roots(coeffs: &[C]) -> Vec<C> {
    // Exact zero roots are split off; the companion matrix would smear them.
    let m = coeffs
        .iter()
        .take_while(|c| c.norm() == 0.0)
        .count()
        .min(coeffs.len().saturating_sub(1));
    let mut roots = vec![C::new(0.0, 0.0); m];
    roots.extend(companion_roots(&coeffs[m..]));
    roots
}

fn companion_roots(coeffs: &[C]) -> Vec<C> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let mut comp = DMatrix::<C>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = C::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -coeffs[i];
    }
    let (_, tri) = Schur::new(comp).unpack();
    let eig: Vec<C> = (0..n).map(|i| tri[(i, i)]).collect();
    let p = |z: C| {
        coeffs
            .iter()
            .rev()
            .fold(C::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let dp = |z: C| {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(C::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * k as f64)
    };
    eig.iter()
        .map(|&z| {
            let d = dp(z);
            if d.norm() > 0.0 {
                z - p(z) / d
            } else {
                z
            }
        })
        .collect()
}

/// Zeros of `p`. When only the degrees `= n mod 3` are present, `p(z) = z^r Q(z^3)`
/// and the roots come from `Q`, a problem of a third of the degree.
pub fn poly_zeros(p: &MonicPoly) -> Vec<C> {
    let r = p.n % 3;
    if p.n < 3 || p.off_class_ratio() != 0.0 {
        return monic_roots(&p.coeffs);
    }
    let q: Vec<C> = p.coeffs.iter().skip(r).step_by(3).copied().collect();
    let mut zeros = vec![C::new(0.0, 0.0); r];
    for w in monic_roots(&q) {
        let z = w.powf(1.0 / 3.0);
        zeros.extend((0..3).map(|j| z * omega_pow(j)));
    }
    zeros
}

fn seg_dist(p: C, a: C, b: C) -> f64 {
    let d = b - a;
    let u = if d.norm_sqr() > 0.0 {
        (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + d * u - p).norm()
}

/// Distance from `z` to `Sigma_1^o = U [0, omega^j z1]`.
pub fn distance_to_spines(z: C, z1: f64) -> f64 {
    (0..3)
        .map(|j| seg_dist(z, C::new(0.0, 0.0), omega_pow(j) * z1))
        .fold(f64::INFINITY, f64::min)
}

/// Distance from `z` to `Sigma_1`, and whether the nearest point is on a whisker.
pub fn distance_to_sigma1(g: &Geometry, z: C) -> (f64, bool) {
    let spine = distance_to_spines(z, g.z1());
    let mut whisker = f64::INFINITY;
    for arm in ArmId::whiskers() {
        let pts = g.arm_points(arm);
        for w in pts.windows(2) {
            whisker = whisker.min(seg_dist(z, w[0], w[1]));
        }
    }
    (spine.min(whisker), whisker < spine)
}

/// `g_1(z) = int log(z - s) dmu_1(s)` for `|z|` beyond the support, with the
/// cut of `log z` on the negative axis.
pub fn g1(g: &Geometry, z: C) -> Result<C> {
    let reach = g.z1().max(g.sheets.bs.z2.norm());
    if z.norm() <= 1.05 * reach {
        return Err(Error::Domain(format!(
            "g1 is evaluated only for |z| > {:.3}",
            1.05 * reach
        )));
    }
    Ok(z.ln() + g.mu1_integral(|s| (1.0 - s / z).ln())?)
}

/// Strong-asymptotics sample at one test point.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticSample {
    pub z: C,
    /// `P_{n,n}(z) e^{-n g_1(z)}`.
    pub scaled: C,
    pub m11: C,
    pub diff: f64,
    /// `|scaled / m11 - 1|`.
    pub ratio_err: f64,
}

#[derive(Debug, Clone)]
pub struct ZeroReport {
    pub n: usize,
    pub t: f64,
    pub coeffs: Vec<C>,
    pub cond: f64,
    pub zeros: Vec<C>,
    pub distances: Vec<f64>,
    pub near_whisker: Vec<bool>,
    pub spurious: Vec<bool>,
    pub predicted: Option<SpuriousZero>,
    /// Fraction of the non-spurious zeros whose nearest point of `Sigma_1`
    /// is on a whisker.
    pub whisker_fraction: f64,
    pub asymptotics: Vec<AsymptoticSample>,
}

impl ZeroReport {
    pub fn spurious_count(&self) -> usize {
        self.spurious.iter().filter(|&&s| s).count()
    }

    pub fn max_ratio_err(&self) -> f64 {
        self.asymptotics
            .iter()
            .map(|a| a.ratio_err)
            .fold(0.0, f64::max)
    }
}

/// Five test points outside the support, off the negative axis.
pub fn test_points(g: &Geometry) -> [C; 5] {
    let r = 1.25 * g.z1().max(g.sheets.bs.z2.norm());
    [0.2, 0.7, 1.4, 2.6, -0.9].map(|a| C::from_polar(r, a))
}

/// Zeros of `P_{n,n}` against `Sigma_1`, the spurious-zero predictor and
/// the strong asymptotics, for supercritical `t`.
pub fn compare_with(ctx: &ThetaContext, n: usize, exec: Exec) -> Result<ZeroReport> {
    compare_poly(ctx, solve_with(n, ctx.qc.geom.t, MOMENT_TOL, exec)?)
}

/// [`compare_with`] for an already solved `P_{n,n}`.
pub fn compare_poly(ctx: &ThetaContext, p: MonicPoly) -> Result<ZeroReport> {
    let g = &ctx.qc.geom;
    let n = p.n;
    let zeros = poly_zeros(&p);
    let (distances, near_whisker): (Vec<f64>, Vec<bool>) =
        zeros.iter().map(|&z| distance_to_sigma1(g, z)).unzip();
    let mut sorted = distances.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.is_empty() {
        0.0
    } else {
        sorted[sorted.len() / 2]
    };
    let predicted = match ctx.spurious_zero(n) {
        Ok(q) => Some(q),
        Err(Error::NotInIndexSet { .. }) => None,
        Err(e) => return Err(e),
    };
    let targets: Vec<C> = match predicted {
        Some(q) if q.sheet == 1 => (0..3).map(|j| omega_pow(j) * q.x).collect(),
        _ => Vec::new(),
    };
    // Most zeros sit on Sigma_1 to rounding, so the median can vanish; the
    // floor keeps rounding-level distances from being flagged.
    let floor = (3.0 * median).max(SPURIOUS_FLOOR * g.z1());
    let spurious: Vec<bool> = zeros
        .iter()
        .zip(&distances)
        .map(|(&z, &d)| d > floor && targets.iter().any(|&x| (z - x).norm() <= 0.1))
        .collect();
    let regular: Vec<bool> = near_whisker
        .iter()
        .zip(&spurious)
        .filter(|(_, &s)| !s)
        .map(|(&w, _)| w)
        .collect();
    let whisker_fraction = if regular.is_empty() {
        0.0
    } else {
        regular.iter().filter(|&&w| w).count() as f64 / regular.len() as f64
    };
    let mut asymptotics = Vec::new();
    for z in test_points(g) {
        let scaled = p.eval(z) * (-(n as f64) * g1(g, z)?).exp();
        let m11 = ctx.m_n11(n, z)?;
        asymptotics.push(AsymptoticSample {
            z,
            scaled,
            m11,
            diff: (scaled - m11).norm(),
            ratio_err: (scaled / m11 - 1.0).norm(),
        });
    }
    Ok(ZeroReport {
        n,
        t: p.t,
        coeffs: p.coeffs,
        cond: p.cond,
        zeros,
        distances,
        near_whisker,
        spurious,
        predicted,
        whisker_fraction,
        asymptotics,
    })
}

/// [`compare_with`] at `A = A(t)`.
pub fn compare_to_theory(n: usize, t: f64) -> Result<ZeroReport> {
    if t <= T_STAR {
        return Err(Error::Domain(format!(
            "comparison needs supercritical t, got {t}"
        )));
    }
    compare_with(&ThetaContext::boutroux(t)?, n, Exec::Parallel)
}
