//! The Boutroux period `h(t, A)`, the curve constant `A(t)`, the second
//! critical time and the harmonic function `H`.
//!
//! Integrals of `xi_1 - xi_2` use the labels continued from the real axis to
//! the right of `z1`, where `xi_1 - xi_2 > 0`. The period of the whisker cycle
//! is taken with the labels of the opposite side, so
//! `h = -Re int_{z1}^{z2} (xi_1 - xi_2) dz` in the right-side labels.

use crate::contour::{arc_points, integrate_from, integrate_polyline};
use crate::curve::{
    a3_of_t, branch_points, continue_segment, BranchMode, BranchSet, CurveParams, CutKind, Sheets,
    T_STAR,
};
use crate::error::{Error, Result};
use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// Absolute quadrature tolerance for periods.
pub const QUAD_TOL: f64 = 1e-10;
/// Lower end of the `A` bracket.
pub const EPS_A: f64 = 1e-12;
/// Bracket width at which [`solve_a`] stops.
pub const A_BRACKET: f64 = 1e-11;
/// Bracket width at which [`solve_t_double_star`] stops.
pub const T_BRACKET: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodResult {
    pub h: f64,
    /// Imaginary part of the same integral (diagnostic).
    pub imag_part: f64,
    pub quad_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoutrouxSolution {
    pub t: f64,
    pub a: f64,
    pub branch: BranchSet,
    pub bracket_width: f64,
}

/// Branch-point mode for `(t, A)`: collisions are expected at `A = 0` on the
/// degenerate curve, at `A = A_3(t)` and at the critical point.
pub fn mode_for(t: f64, a: f64) -> BranchMode {
    if a == 0.0 || a >= a3_of_t(t) * (1.0 - 1e-9) || (t - T_STAR).abs() < 1e-12 {
        BranchMode::Critical
    } else {
        BranchMode::Strict
    }
}

pub fn sheets_for(t: f64, a: f64) -> Result<Sheets> {
    Sheets::new(CurveParams::new(t, a)?, mode_for(t, a))
}

/// A point on the real axis to the right of `z1` together with the labeled
/// triple there.
pub fn right_start(sheets: &Sheets) -> Result<(f64, [C; 3])> {
    let bs = &sheets.bs;
    let x0 = bs.z1 + (bs.z2 - bs.z1).norm().max(0.25 * bs.scale());
    let xi = sheets.eval(C::new(x0, 0.0))?;
    Ok((x0, xi))
}

fn endpoint_class(bs: &BranchSet) -> u32 {
    if bs.double_root {
        3
    } else {
        2
    }
}

fn diff12(_: C, x: &[C; 3]) -> C {
    x[0] - x[1]
}

/// `int_{z1}^{z2} (xi_1 - xi_2) dz` along the chord, right-side labels.
/// Returns the value and an error estimate.
pub fn chord_integral(sheets: &Sheets, tol: f64) -> Result<(C, f64)> {
    chord_integral_with(sheets, tol, diff12)
}

/// `int_{z1}^{z2} f(z, xi) dz` along the chord, with the triple continued
/// from the real axis right of `z1`.
pub fn chord_integral_with<F>(sheets: &Sheets, tol: f64, f: F) -> Result<(C, f64)>
where
    F: Fn(C, &[C; 3]) -> C,
{
    let bs = &sheets.bs;
    let z1 = C::new(bs.z1, 0.0);
    let z2 = bs.z2;
    if (z2 - z1).norm() < 1e-12 * bs.scale() {
        return Ok((C::new(0.0, 0.0), 0.0));
    }
    let params = &sheets.params;
    let (x0, xi0) = right_start(sheets)?;
    let m = 0.5 * (z1 + z2);
    let xi_m = continue_segment(params, C::new(x0, 0.0), m, xi0)?;
    let (to_z1, e1) = integrate_from(params, m, z1, xi_m, 2, tol, &f)?;
    let (to_z2, e2) = integrate_from(params, m, z2, xi_m, endpoint_class(bs), tol, &f)?;
    Ok((to_z2 - to_z1, e1 + e2))
}

/// The Boutroux period function `h(t, A)`.
pub fn period_h(t: f64, a: f64, tol: f64) -> Result<PeriodResult> {
    let sheets = sheets_for(t, a)?;
    period_h_on(&sheets, tol)
}

pub fn period_h_on(sheets: &Sheets, tol: f64) -> Result<PeriodResult> {
    let (v, e) = chord_integral(sheets, tol)?;
    Ok(PeriodResult {
        h: -v.re,
        imag_part: -v.im,
        quad_error: e,
    })
}

fn h_value(t: f64, a: f64) -> Result<f64> {
    Ok(period_h(t, a, QUAD_TOL)?.h)
}

/// `A(t)` by bisection on `(EPS_A, A_3(t))`, using that `h` increases in `A`.
pub fn solve_a(t: f64) -> Result<BoutrouxSolution> {
    if t <= T_STAR {
        return Err(Error::Domain(format!(
            "the Boutroux condition selects A(t) only for t > 1/8, got {t}"
        )));
    }
    let (mut lo, mut hi) = (EPS_A, a3_of_t(t));
    if hi <= lo {
        return Err(Error::Domain(format!("A_3({t}) is not positive")));
    }
    let (mut h_lo, mut h_hi) = (h_value(t, lo)?, h_value(t, hi)?);
    if h_lo >= 0.0 || h_hi <= 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > A_BRACKET {
        let mid = 0.5 * (lo + hi);
        let h = h_value(t, mid)?;
        if h < 0.0 {
            (lo, h_lo) = (mid, h);
        } else {
            (hi, h_hi) = (mid, h);
        }
    }
    // Near the critical time h is tiny on the whole bracket and the whisker
    // tracer needs A to near machine precision; finish with a few secant
    // steps inside the bracket.
    let mut a = 0.5 * (lo + hi);
    for _ in 0..4 {
        let s = lo - h_lo * (hi - lo) / (h_hi - h_lo);
        if !(s > lo && s < hi) {
            break;
        }
        a = s;
        let h = h_value(t, s)?;
        if h == 0.0 {
            break;
        } else if h < 0.0 {
            (lo, h_lo) = (s, h);
        } else {
            (hi, h_hi) = (s, h);
        }
    }
    let branch = branch_points(&CurveParams::new(t, a)?, mode_for(t, a))?;
    Ok(BoutrouxSolution {
        t,
        a,
        branch,
        bracket_width: hi - lo,
    })
}

/// The time `t**` at which `h(t, 0)` changes sign.
pub fn solve_t_double_star() -> Result<f64> {
    let (mut lo, mut hi) = (T_STAR, 8.0);
    if h_value(lo, 0.0)? >= 0.0 || h_value(hi, 0.0)? <= 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > T_BRACKET {
        let mid = 0.5 * (lo + hi);
        if h_value(mid, 0.0)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Central difference of `h` in `A`.
pub fn check_monotone_h(t: f64, a: f64, delta: f64) -> Result<f64> {
    if a - delta <= 0.0 || a + delta >= a3_of_t(t) {
        return Err(Error::Domain(format!(
            "stencil [{}, {}] leaves (0, A_3)",
            a - delta,
            a + delta
        )));
    }
    Ok((h_value(t, a + delta)? - h_value(t, a - delta)?) / (2.0 * delta))
}

/// `oint_{alpha_0} xi_1 dz`: counterclockwise loop around `z2`, `z3` on the
/// first sheet, leaving `z1` outside.
pub fn alpha_period(sheets: &Sheets, tol: f64) -> Result<C> {
    let bs = &sheets.bs;
    let cx = bs.z2.re;
    let rx = 0.5 * (cx - bs.z1).abs().max(1e-3 * bs.scale());
    let ry = 1.5 * bs.z2.im.abs() + rx;
    let pts: Vec<C> = (0..=96)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / 96.0;
            C::new(cx + rx * th.cos(), ry * th.sin())
        })
        .collect();
    let xi0 = sheets.eval(pts[0])?;
    let (v, _, _) = integrate_polyline(&sheets.params, &pts, xi0, tol, |_, x| x[0])?;
    Ok(v)
}

/// `(1 / 2 pi i) oint xi_1 dz` over a circle enclosing all branch points.
pub fn residue_at_infinity(sheets: &Sheets, tol: f64) -> Result<C> {
    let r = 4.0 * sheets.bs.scale();
    let mut pts = vec![C::new(r, 0.0)];
    pts.extend(arc_points(r, 0.0, 2.0 * PI, PI / 24.0));
    let xi0 = sheets.eval(pts[0])?;
    let (v, _, _) = integrate_polyline(&sheets.params, &pts, xi0, tol, |_, x| x[0])?;
    Ok(v / C::new(0.0, 2.0 * PI))
}

/// The harmonic function `H(z) = Re int_{z1}^z (xi_1 - xi_2) ds` on the
/// closed sector `|arg z| <= pi/3`.
///
/// The integral is continued from the real axis right of `z1` along an
/// outer route; each crossing of `Sigma_1` on the way flips the sign. This
/// is the labeled value when `H` vanishes on `Sigma_1`, i.e. at `A = A(t)`.
#[derive(Debug, Clone)]
pub struct HField {
    pub sheets: Sheets,
    x0: f64,
    xi0: [C; 3],
    f0: f64,
    tol: f64,
}

impl HField {
    pub fn new(sheets: Sheets) -> Result<Self> {
        let tol = QUAD_TOL;
        let (x0, xi0) = right_start(&sheets)?;
        let z1 = C::new(sheets.bs.z1, 0.0);
        let (v, _) = integrate_from(&sheets.params, C::new(x0, 0.0), z1, xi0, 2, tol, diff12)?;
        Ok(HField {
            sheets,
            x0,
            xi0,
            f0: -v.re,
            tol,
        })
    }

    pub fn at(t: f64, a: f64) -> Result<Self> {
        Self::new(sheets_for(t, a)?)
    }

    fn special(&self) -> Vec<C> {
        let bs = &self.sheets.bs;
        let mut v: Vec<C> = bs.z_points.to_vec();
        v.push(C::new(0.0, 0.0));
        v
    }

    fn leg_is_safe(&self, p: C, q: C, target: C) -> bool {
        let d0 = 0.02 * self.sheets.bs.scale();
        let scale = self.sheets.bs.scale();
        self.special()
            .iter()
            .filter(|&&s| (target - s).norm() > 1e-12 * scale)
            .all(|&s| {
                let d = q - p;
                let u = (((s - p) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
                let dist = (p + d * u - s).norm();
                dist >= 0.5 * (target - s).norm().min(d0) && dist > 1e-12
            })
    }

    /// Route from the real start point to `z`.
    pub fn route(&self, z: C) -> Result<Vec<C>> {
        let x0 = C::new(self.x0, 0.0);
        if z.im == 0.0 && z.re >= self.sheets.bs.z1 {
            return Ok(vec![x0, z]);
        }
        let th = z.arg();
        if th.abs() > PI / 3.0 + 1e-12 {
            return Err(Error::Domain(format!(
                "H is evaluated on |arg z| <= pi/3, got z = {z}"
            )));
        }
        let r_out = 2.0 * self.sheets.bs.scale().max(z.norm()).max(self.x0);
        let inward = if th >= 0.0 { -1.0 } else { 1.0 };
        for &delta in &[0.0, 0.05, 0.1, 0.2, 0.4, 0.6] {
            let th1 = th + inward * delta;
            let mut path = vec![x0, C::new(r_out, 0.0)];
            path.extend(arc_points(r_out, 0.0, th1, PI / 24.0));
            path.push(C::from_polar(z.norm(), th1));
            if delta != 0.0 {
                path.extend(arc_points(z.norm(), th1, th, PI / 24.0));
            }
            *path.last_mut().unwrap() = z;
            path.dedup();
            let n = path.len();
            let ok = path.windows(2).enumerate().all(|(i, w)| {
                if i + 2 == n {
                    self.leg_is_safe(w[0], w[1], z)
                } else {
                    self.leg_is_safe(w[0], w[1], w[1])
                }
            });
            if ok {
                return Ok(path);
            }
        }
        Err(Error::ContinuationAmbiguous { z })
    }

    /// `H(z)` with the crossing count of `Sigma_1` along the route.
    pub fn eval(&self, z: C) -> Result<f64> {
        let path = self.route(z)?;
        let params = &self.sheets.params;
        let n = path.len();
        let (mut total, _, xi) =
            integrate_polyline(params, &path[..n - 1], self.xi0, self.tol, diff12)?;
        let (last, _) = integrate_from(params, path[n - 2], path[n - 1], xi, 2, self.tol, diff12)?;
        total += last;
        let crossings: usize = path
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let cr = self.sheets.cuts.crossings(w[0], w[1], i + 2 < n);
                cr.iter().filter(|c| c.1 == CutKind::Sigma1).count()
            })
            .sum();
        let h = self.f0 + total.re;
        Ok(if crossings.is_multiple_of(2) { h } else { -h })
    }
}

/// `H` at a single point.
pub fn h_field(t: f64, a: f64, z: C) -> Result<f64> {
    HField::at(t, a)?.eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_vanishes_at_the_critical_point() {
        let r = period_h(T_STAR, crate::curve::A_STAR, QUAD_TOL).unwrap();
        assert!(r.h.abs() <= 1e-8);
    }

    #[test]
    fn period_is_positive_at_a3() {
        for t in [0.2, 1.0, 4.0, 7.5] {
            let r = period_h(t, a3_of_t(t), QUAD_TOL).unwrap();
            assert!(r.h > 0.0, "t = {t}: {r:?}");
        }
    }

    #[test]
    fn period_is_negative_for_small_a() {
        let r = period_h(0.2, 1e-3, QUAD_TOL).unwrap();
        assert!(r.h < 0.0, "{r:?}");
    }
}
