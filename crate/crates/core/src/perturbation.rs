//! Blow-up at the critical point: the elliptic curve `y^2 = x^3 + 3x/2 + k`
//! and the leading-order behavior of `A`, the branch points and the droplet
//! tip for `t = t* + dt`.

use crate::boutroux::solve_a;
use crate::curve::{solve_cubic, A_STAR, T_STAR, Z_STAR};
use crate::error::{Error, Result};
use crate::geometry::{droplet_radius, point_in_droplet};
use crate::quad::integrate_mapped;
use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// Bracket for the Boutroux constant `k`.
pub const K_BRACKET: (f64, f64) = (0.0, 2.0);
/// Fingertip coefficient for `T > 0`.
pub const LTW_COEFF: f64 = 0.553594;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticBlowup {
    pub k: f64,
    pub x1: f64,
    /// Root with positive imaginary part; `x3 = conj(x2)`.
    pub x2: C,
    pub x3: C,
    /// `Re` of the beta period at the returned `k`.
    pub beta_residual: f64,
}

/// Roots of `x^3 + 3x/2 + k`: the real one and the one in the upper half plane.
pub fn elliptic_roots(k: f64) -> (f64, C) {
    let r = solve_cubic(C::new(0.0, 0.0), C::new(1.5, 0.0), C::new(k, 0.0));
    let i = (0..3)
        .min_by(|&i, &j| r[i].im.abs().total_cmp(&r[j].im.abs()))
        .unwrap();
    let x1 = r[i].re;
    let x2 = r
        .iter()
        .enumerate()
        .find(|&(j, z)| j != i && z.im > 0.0)
        .map(|(_, z)| *z)
        .unwrap_or(r[(i + 1) % 3]);
    (x1, x2)
}

/// `int_{x1}^{x2} y dx` along the straight segment, with `y > 0` on
/// `(x1, inf)`. The beta period is twice this.
pub fn half_beta_period(k: f64) -> Result<C> {
    let (x1, x2) = elliptic_roots(k);
    let x3 = x2.conj();
    let d = x2 - x1;
    // y = (x - x1)^(1/2) g(x), g^2 = (x - x2)(x - x3), g(x1) = |x1 - x2|.
    let v = integrate_mapped(2, 2, 1e-13, |nodes| {
        let mut g_prev = C::new((x1 - x2).norm(), 0.0);
        let root_d = d.sqrt();
        Ok(nodes
            .iter()
            .map(|nd| {
                let x = if nd.tau <= 0.5 {
                    x1 + d * nd.tau
                } else {
                    x2 - d * nd.tau_c
                };
                let mut g = ((x - x2) * (x - x3)).sqrt();
                if (g * g_prev.conj()).re < 0.0 {
                    g = -g;
                }
                g_prev = g;
                root_d * nd.tau.sqrt() * g
            })
            .collect())
    })?;
    Ok(v * d)
}

/// `Re` of the beta period `2 int_{x1}^{x2} y dx`.
pub fn beta_period_re(k: f64) -> Result<f64> {
    Ok(2.0 * half_beta_period(k)?.re)
}

/// `oint_alpha y dx` on an ellipse enclosing `x2`, `x3` but not `x1`,
/// counterclockwise, with `y > 0` at the right end of the ellipse. Needs
/// `k > 0`, so that `x1 < Re x2`.
pub fn elliptic_alpha_period(k: f64) -> Result<C> {
    let (x1, x2) = elliptic_roots(k);
    let delta = 0.5 * (x2.re - x1);
    if !(delta > 1e-6) {
        return Err(Error::Domain(format!("alpha cycle needs k > 0, got {k}")));
    }
    // Leftmost point halfway between x1 and Re x2; semi-axes (2 delta, 2 Im x2)
    // put x2 at (1/2)^2 + (1/2)^2 < 1.
    let (a, b) = (2.0 * delta, 2.0 * x2.im);
    let cx = x2.re + delta;
    let n = 1024;
    let f = |x: C| x * x * x + 1.5 * x + k;
    let mut y_prev = C::new(f(C::new(cx + a, 0.0)).re.sqrt(), 0.0);
    let mut sum = C::new(0.0, 0.0);
    for j in 0..n {
        let th = 2.0 * PI * j as f64 / n as f64;
        let x = C::new(cx + a * th.cos(), b * th.sin());
        let dx = C::new(-a * th.sin(), b * th.cos());
        let mut y = f(x).sqrt();
        if (y * y_prev.conj()).re < 0.0 {
            y = -y;
        }
        y_prev = y;
        sum += y * dx;
    }
    Ok(sum * (2.0 * PI / n as f64))
}

/// The unique `k` with `Re oint_beta y dx = 0`, by bisection on `K_BRACKET`.
pub fn solve_elliptic_k() -> Result<EllipticBlowup> {
    let (mut lo, mut hi) = K_BRACKET;
    let (f_lo, f_hi) = (beta_period_re(lo)?, beta_period_re(hi)?);
    if f_lo >= 0.0 || f_hi <= 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_period_re(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    let (x1, x2) = elliptic_roots(k);
    Ok(EllipticBlowup {
        k,
        x1,
        x2,
        x3: x2.conj(),
        beta_residual: beta_period_re(k)?,
    })
}

/// Leading-order predictions for `t = t* + dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub a: f64,
    pub z1: f64,
    pub z2: C,
}

pub fn predicted_expansion(e: &EllipticBlowup, dt: f64) -> Expansion {
    let s = dt.max(0.0).sqrt();
    Expansion {
        a: A_STAR + 9.0 / 16.0 * dt - e.k * dt * s,
        z1: Z_STAR + e.x1 * s,
        z2: Z_STAR + e.x2 * s,
    }
}

/// Fingertip law `e(T)`: `-2 sqrt(-T)` for `T < 0`, `-0.553594 sqrt(T)` for `T > 0`.
pub fn ltw_fingertip(time: f64) -> f64 {
    if time < 0.0 {
        -2.0 * (-time).sqrt()
    } else {
        -LTW_COEFF * time.sqrt()
    }
}

/// Comparison of the fingertip law with `z1 - z*` under `T = dt / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtwComparison {
    /// `0.553594 / sqrt 2`, the `dt^(1/2)` coefficient for `dt > 0`.
    pub super_coeff: f64,
    pub x1_abs: f64,
    pub super_diff: f64,
    /// `2 / sqrt 2`, the coefficient for `dt < 0`.
    pub sub_coeff: f64,
    /// Coefficient from the subcritical `z1 = (3/4)(1 - sqrt(1 - 8t))^(2/3)`,
    /// estimated at `dt = -1e-8`.
    pub sub_measured: f64,
}

pub fn ltw_comparison(e: &EllipticBlowup) -> LtwComparison {
    let super_coeff = -ltw_fingertip(1.0) / 2f64.sqrt();
    let sub_coeff = -ltw_fingertip(-0.5);
    let dt: f64 = -1e-8;
    let t = T_STAR + dt;
    let z1 = 0.75 * (1.0 - (1.0 - 8.0 * t).sqrt()).powf(2.0 / 3.0);
    LtwComparison {
        super_coeff,
        x1_abs: e.x1.abs(),
        super_diff: (super_coeff - e.x1.abs()).abs(),
        sub_coeff,
        sub_measured: (Z_STAR - z1) / (-dt).sqrt(),
    }
}

/// Droplet tip on the positive axis against the branch points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipReport {
    pub dt: f64,
    pub a: f64,
    pub z_hat: f64,
    pub z1: f64,
    pub z2: C,
    /// `|z_hat - z1| / dt`.
    pub tip_ratio: f64,
    /// `|z2 - z1| / sqrt(dt)`.
    pub spread_ratio: f64,
    pub z1_inside: bool,
}

pub fn droplet_tip_vs_branchpoint(dt: f64) -> Result<TipReport> {
    if dt <= 0.0 {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let s = solve_a(T_STAR + dt)?;
    let t = s.t;
    let z_hat = droplet_radius(t, s.a, 0.0);
    let (z1, z2) = (s.branch.z1, s.branch.z2);
    Ok(TipReport {
        dt,
        a: s.a,
        z_hat,
        z1,
        z2,
        tip_ratio: (z_hat - z1).abs() / dt,
        spread_ratio: (z2 - z1).norm() / dt.sqrt(),
        z1_inside: point_in_droplet(t, s.a, C::new(z1, 0.0)),
    })
}
