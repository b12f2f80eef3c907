//! Whiskers, the motherbody measure `mu_1`, the measure `mu_2` on the rays,
//! the droplet boundary and the harmonic moments.

use crate::boutroux::{
    chord_integral, chord_integral_with, right_start, sheets_for, solve_a, HField,
};
use crate::contour::{arc_points, integrate_from};
use crate::curve::{continue_segment, omega_pow, Cuts, Sheets};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::quad::integrate_real;
use num_complex::Complex64 as C;
use std::f64::consts::PI;

const TOL: f64 = 1e-12;

/// Which endpoint a whisker runs to from `z1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Z2,
    Z3,
}

/// A traced whisker: polyline from `omega^j z1` to `omega^j z2` (or `z3`).
#[derive(Debug, Clone)]
pub struct Whisker {
    pub points: Vec<C>,
    pub arclength: Vec<f64>,
    /// Distance to the target of the last integrated point, before the
    /// target itself is appended.
    pub approach: f64,
    /// Largest `|Re F|` tracked along the curve, `F = int_{z1} (xi_1 - xi_2)`.
    pub max_abs_h: f64,
}

impl Whisker {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Point at arclength `s` by linear interpolation.
    pub fn at_arclength(&self, s: f64) -> C {
        let i = self
            .arclength
            .partition_point(|&x| x < s)
            .clamp(1, self.points.len() - 1);
        let (s0, s1) = (self.arclength[i - 1], self.arclength[i]);
        let u = if s1 > s0 {
            ((s - s0) / (s1 - s0)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        self.points[i - 1] + (self.points[i] - self.points[i - 1]) * u
    }

    pub fn total_length(&self) -> f64 {
        *self.arclength.last().unwrap_or(&0.0)
    }

    /// No two non-adjacent segments intersect.
    pub fn is_simple(&self) -> bool {
        let cross = |a: C, b: C| a.re * b.im - a.im * b.re;
        let n = self.points.len();
        for i in 0..n.saturating_sub(1) {
            let (p, r) = (self.points[i], self.points[i + 1] - self.points[i]);
            for j in i + 2..n - 1 {
                let (q, s) = (self.points[j], self.points[j + 1] - self.points[j]);
                let den = cross(r, s);
                if den == 0.0 {
                    continue;
                }
                let u = cross(q - p, s) / den;
                let v = cross(q - p, r) / den;
                if (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v) {
                    return false;
                }
            }
        }
        true
    }
}

fn diff12(_: C, x: &[C; 3]) -> C {
    x[0] - x[1]
}

/// Trace the zero level curve of `Re int_{z1}^z (xi_1 - xi_2) ds` from
/// `omega^j z1` to the target in the same sector.
pub fn trace_whisker_on(sheets: &Sheets, target: Target, sector: i64) -> Result<Whisker> {
    let bs = &sheets.bs;
    let params = &sheets.params;
    let o = omega_pow(sector);
    let z1 = o * bs.z1;
    let zt = o * if target == Target::Z2 { bs.z2 } else { bs.z3 };
    let sign = if target == Target::Z2 { 1.0 } else { -1.0 };
    let span = (zt - z1).norm();
    if span < 1e-12 * bs.scale() {
        return Ok(Whisker {
            points: vec![z1],
            arclength: vec![0.0],
            approach: 0.0,
            max_abs_h: 0.0,
        });
    }
    let (x0, _) = right_start(sheets)?;
    let p0 = o * x0;
    let xi_p0 = sheets.eval(p0)?;
    // Seed on the launch ray, reached around a small arc centered at z1.
    let eps = 1e-3 * span;
    let base = o.arg();
    let mut xi = continue_segment(params, p0, z1 + o * eps, xi_p0)?;
    let mut z = z1 + o * eps;
    for p in arc_points(eps, base, base + sign * PI / 3.0, PI / 48.0) {
        xi = continue_segment(params, z, z1 + p, xi)?;
        z = z1 + p;
    }
    let (v, _) = integrate_from(params, z, z1, xi, 2, TOL, diff12)?;
    let mut f = -v;

    let dir = |xi: &[C; 3]| -> C {
        let d = xi[0] - xi[1];
        C::new(0.0, sign) * d.conj() / d.norm()
    };
    let correct = |z: &mut C, xi: &mut [C; 3], f: &mut C| -> Result<()> {
        for _ in 0..3 {
            let d = xi[0] - xi[1];
            let dz = -f.re * d.conj() / d.norm_sqr();
            if dz.norm() < 1e-15 * span {
                break;
            }
            let znew = *z + dz;
            let (inc, _) = integrate_from(params, *z, znew, *xi, 1, TOL, diff12)?;
            *xi = continue_segment(params, *z, znew, *xi)?;
            *f += inc;
            *z = znew;
        }
        Ok(())
    };
    correct(&mut z, &mut xi, &mut f)?;

    let h_max = span / 300.0;
    let stop = 1e-8 * bs.scale();
    let bound = 3.0 * bs.z2.norm().max(bs.z1);
    let mut points = vec![z1, z];
    let mut max_abs_h = f.re.abs();
    for _ in 0..100_000 {
        let dist_t = (z - zt).norm();
        if dist_t < stop {
            break;
        }
        let h = h_max.min(0.5 * dist_t).min(0.5 * (z - z1).norm());
        let u1 = dir(&xi);
        let zp = z + u1 * h;
        let xip = continue_segment(params, z, zp, xi)?;
        let u2 = dir(&xip);
        let znew = z + (u1 + u2) * (0.5 * h);
        let (inc, _) = integrate_from(params, z, znew, xi, 1, TOL, diff12)?;
        let mut xi_new = continue_segment(params, z, znew, xi)?;
        let mut f_new = f + inc;
        let mut z_new = znew;
        correct(&mut z_new, &mut xi_new, &mut f_new)?;
        // Close to the target the direction field degenerates; stop once
        // the distance no longer decreases.
        if (z_new - zt).norm() >= dist_t && dist_t < 1e-4 * span {
            break;
        }
        (z, xi, f) = (z_new, xi_new, f_new);
        max_abs_h = max_abs_h.max(f.re.abs());
        if z.norm() > bound {
            return Err(Error::TrajectoryEscaped { z });
        }
        points.push(z);
    }
    let approach = (z - zt).norm();
    if approach > 1e-6 * bs.scale() {
        return Err(Error::TrajectoryEscaped { z });
    }
    points.push(zt);
    let mut arclength = vec![0.0];
    for w in points.windows(2) {
        let s = arclength.last().unwrap() + (w[1] - w[0]).norm();
        arclength.push(s);
    }
    Ok(Whisker {
        points,
        arclength,
        approach,
        max_abs_h,
    })
}

pub fn trace_whisker(t: f64, a: f64, target: Target) -> Result<Whisker> {
    trace_whisker_on(&sheets_for(t, a)?, target, 0)
}

/// One of the nine arcs of `Sigma_1`, rotated into sector `j` (0, 1, 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArmId {
    Spine(i64),
    WhiskerUp(i64),
    WhiskerDown(i64),
}

impl ArmId {
    pub fn all() -> Vec<ArmId> {
        (0..3)
            .flat_map(|j| [ArmId::Spine(j), ArmId::WhiskerUp(j), ArmId::WhiskerDown(j)])
            .collect()
    }

    pub fn whiskers() -> Vec<ArmId> {
        (0..3)
            .flat_map(|j| [ArmId::WhiskerUp(j), ArmId::WhiskerDown(j)])
            .collect()
    }

    fn sector(self) -> i64 {
        match self {
            ArmId::Spine(j) | ArmId::WhiskerUp(j) | ArmId::WhiskerDown(j) => j,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ArmSample {
    pub s: C,
    /// Density of `mu_1` with respect to arclength.
    pub density: f64,
    /// Imaginary part left over in the density (should vanish).
    pub residual: f64,
    /// Argument of the outward line element.
    pub phase: f64,
}

/// Sampled density of `mu_1` on one arm.
#[derive(Debug, Clone)]
pub struct MeasureArm {
    pub arm: ArmId,
    pub samples: Vec<ArmSample>,
}

/// Supercritical geometry at fixed `(t, A)`: traced whiskers installed as cuts.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub t: f64,
    pub a: f64,
    pub sheets: Sheets,
    pub upper: Whisker,
    pub lower: Whisker,
    /// `int_{z1}^{z2} (xi_1 - xi_2) ds` in the labels continued from the
    /// real axis right of `z1`.
    pub chord: C,
}

impl Geometry {
    pub fn new(t: f64, a: f64) -> Result<Self> {
        let prov = sheets_for(t, a)?;
        let upper = trace_whisker_on(&prov, Target::Z2, 0)?;
        let lower = trace_whisker_on(&prov, Target::Z3, 0)?;
        let cuts = Cuts::with_whiskers(&prov.bs, &upper.points, &lower.points);
        let sheets = prov.replace_cuts(cuts);
        let (chord, _) = chord_integral(&sheets, TOL)?;
        Ok(Geometry {
            t,
            a,
            sheets,
            upper,
            lower,
            chord,
        })
    }

    /// Geometry at `A = A(t)`.
    pub fn boutroux(t: f64) -> Result<Self> {
        Self::new(t, solve_a(t)?.a)
    }

    pub fn z1(&self) -> f64 {
        self.sheets.bs.z1
    }

    pub fn h_field(&self) -> Result<HField> {
        HField::new(self.sheets.clone())
    }

    /// Outward polyline of an arm.
    pub fn arm_points(&self, arm: ArmId) -> Vec<C> {
        let o = omega_pow(arm.sector());
        match arm {
            ArmId::Spine(_) => vec![C::new(0.0, 0.0), o * self.z1()],
            ArmId::WhiskerUp(_) => self.upper.points.iter().map(|&p| o * p).collect(),
            ArmId::WhiskerDown(_) => self.lower.points.iter().map(|&p| o * p).collect(),
        }
    }

    /// Boundary values `[xi_1, xi_2, xi_3]` on the `+` side (left of the
    /// outward orientation) at a point `s` of an arm with unit tangent `e`.
    pub fn plus_values(&self, s: C, e: C) -> Result<[C; 3]> {
        self.sheets.eval_side(s, C::new(0.0, 1.0) * e)
    }

    /// `mu_1` density with respect to arclength at `s` on `arm`, from the
    /// `+` boundary values. Returns (density, imaginary residual).
    pub fn mu1_density(&self, s: C, arm: ArmId) -> Result<(f64, f64)> {
        let e = self.tangent(s, arm)?;
        let xi = self.plus_values(s, e)?;
        let v = (xi[1] - xi[0]) * e / C::new(0.0, 2.0 * PI * self.t);
        Ok((v.re, v.im))
    }

    fn tangent(&self, s: C, arm: ArmId) -> Result<C> {
        let pts = self.arm_points(arm);
        let (mut best, mut bi) = (f64::INFINITY, 0);
        for (i, w) in pts.windows(2).enumerate() {
            let d = w[1] - w[0];
            let u = (((s - w[0]) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
            let dist = (w[0] + d * u - s).norm();
            if dist < best {
                best = dist;
                bi = i;
            }
        }
        if best > 1e-6 * self.sheets.bs.scale() {
            return Err(Error::UnknownArm(format!("{s} is not on {arm:?}")));
        }
        let d = pts[bi + 1] - pts[bi];
        Ok(d / d.norm())
    }

    /// Density samples at the polyline vertices (interior points only).
    pub fn sample_arm(&self, arm: ArmId, n: usize) -> Result<MeasureArm> {
        let pts = self.arm_points(arm);
        let svals: Vec<C> = match arm {
            ArmId::Spine(_) => (1..n).map(|k| pts[1] * (k as f64 / n as f64)).collect(),
            _ => {
                let w = if matches!(arm, ArmId::WhiskerUp(_)) {
                    &self.upper
                } else {
                    &self.lower
                };
                let o = omega_pow(arm.sector());
                (1..n)
                    .map(|k| o * w.at_arclength(w.total_length() * k as f64 / n as f64))
                    .collect()
            }
        };
        let samples = svals
            .iter()
            .map(|&s| {
                let e = self.tangent(s, arm)?;
                let (density, residual) = self.mu1_density(s, arm)?;
                Ok(ArmSample {
                    s,
                    density,
                    residual,
                    phase: e.arg(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MeasureArm { arm, samples })
    }

    /// `int_0^{z1} (xi_2,+ - xi_1,+) dx` on the spine in `S0`, with a
    /// weight `g(x)`.
    fn spine_integral<G: Fn(C) -> C>(&self, g: G) -> Result<C> {
        let z1 = self.z1();
        let m = C::new(0.5 * z1, 0.0);
        let xi_m = self.plus_values(m, C::new(1.0, 0.0))?;
        let f = |x: C, xi: &[C; 3]| (xi[1] - xi[0]) * g(x);
        let params = &self.sheets.params;
        let (hi, _) = integrate_from(params, m, C::new(z1, 0.0), xi_m, 2, TOL, f)?;
        let (lo, _) = integrate_from(params, m, C::new(0.0, 0.0), xi_m, 1, TOL, f)?;
        Ok(hi - lo)
    }

    /// `mu_1` mass of one spine.
    pub fn spine_mass(&self) -> Result<f64> {
        let v = self.spine_integral(|_| C::new(1.0, 0.0))? / C::new(0.0, 2.0 * PI * self.t);
        Ok(v.re)
    }

    /// `mu_1` mass of one whisker, from the chord integral.
    pub fn whisker_mass(&self) -> Result<f64> {
        Ok(self.chord.im / (2.0 * PI * self.t))
    }

    /// `int (xi_2,+ - xi_1,+) g(s) ds` along the traced upper whisker
    /// polyline, by Gauss-Legendre on each segment of the continued pair.
    pub fn whisker_integral_along_trace<G: Fn(C) -> C>(&self, g: G) -> Result<C> {
        let params = &self.sheets.params;
        let (x0, xi0) = right_start(&self.sheets)?;
        let pts = &self.upper.points;
        let n = pts.len();
        let f = |z: C, xi: &[C; 3]| (xi[0] - xi[1]) * g(z);
        // Start in the middle of the trace, integrate to both ends.
        let mid = n / 2;
        let mut xi_mid = continue_segment(params, C::new(x0, 0.0), pts[mid], xi0)?;
        let xi_keep = xi_mid;
        let mut total = C::new(0.0, 0.0);
        for i in mid..n - 1 {
            let mb = if i + 2 == n { 2 } else { 1 };
            total += integrate_from(params, pts[i], pts[i + 1], xi_mid, mb, TOL, f)?.0;
            if i + 2 < n {
                xi_mid = continue_segment(params, pts[i], pts[i + 1], xi_mid)?;
            }
        }
        let mut xi_back = xi_keep;
        for i in (1..=mid).rev() {
            let mb = if i == 1 { 2 } else { 1 };
            total -= integrate_from(params, pts[i], pts[i - 1], xi_back, mb, TOL, f)?.0;
            if i > 1 {
                xi_back = continue_segment(params, pts[i], pts[i - 1], xi_back)?;
            }
        }
        Ok(total)
    }

    /// Mass of `mu_1` on a set of arms.
    pub fn mu1_mass(&self, arms: &[ArmId]) -> Result<f64> {
        let spine = self.spine_mass()?;
        let whisker = self.whisker_mass()?;
        Ok(arms
            .iter()
            .map(|a| {
                if matches!(a, ArmId::Spine(_)) {
                    spine
                } else {
                    whisker
                }
            })
            .sum())
    }

    /// `beta = mu_1(Sigma_1^w) / 6`.
    pub fn beta(&self) -> Result<f64> {
        Ok(self.mu1_mass(&ArmId::whiskers())? / 6.0)
    }

    /// `mu_2` density on the ray `arg s = pi` at `s = -rho`, with respect to
    /// `rho`, and the imaginary residual.
    pub fn mu2_density(&self, rho: f64) -> Result<(f64, f64)> {
        let sgn = self.mu2_sign()?;
        self.mu2_density_with(rho, sgn)
    }

    fn mu2_density_with(&self, rho: f64, sgn: f64) -> Result<(f64, f64)> {
        // Outward direction -1; the + side (left of it) is below the axis.
        let s = C::new(-rho, 0.0);
        let xi = self.sheets.eval_side(s, C::new(0.0, -1.0))?;
        let root = C::new(0.0, -rho.sqrt());
        let v = (sgn * 2.0 * root + xi[2] - xi[1]) * (-1.0) / C::new(0.0, 2.0 * PI * self.t);
        Ok((v.re, v.im))
    }

    /// Sign in front of `2 s^(1/2)` making the `mu_2` integrand decay.
    fn mu2_sign(&self) -> Result<f64> {
        let rho = 100.0 * self.sheets.bs.scale();
        let xi = self
            .sheets
            .eval_side(C::new(-rho, 0.0), C::new(0.0, -1.0))?;
        let root = C::new(0.0, -rho.sqrt());
        let g = xi[2] - xi[1];
        Ok(if (g + 2.0 * root).norm() < (g - 2.0 * root).norm() {
            1.0
        } else {
            -1.0
        })
    }

    /// Total `mu_2` mass on the three rays. The integral over one ray is
    /// taken on `[0, R]`; the tail uses the `rho^(-5/2)` decay.
    pub fn mu2_mass(&self) -> Result<f64> {
        let sgn = self.mu2_sign()?;
        let scale = self.sheets.bs.scale();
        let r_max = 1e3 * scale;
        let mut edges = vec![0.0, 0.5 * scale];
        while *edges.last().unwrap() < r_max {
            let next = (edges.last().unwrap() * 2.0).min(r_max);
            edges.push(next);
        }
        let mut total = 0.0;
        let mut err: Option<Error> = None;
        for w in edges.windows(2) {
            total += integrate_real(w[0], w[1], 1e-11, |rho| {
                match self.mu2_density_with(rho, sgn) {
                    Ok(v) => v.0,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                }
            })?;
        }
        if let Some(e) = err {
            return Err(e);
        }
        let tail = self.mu2_density_with(r_max, sgn)?.0 * r_max * 2.0 / 3.0;
        Ok(3.0 * (total + tail))
    }

    /// `mu_1` cumulative mass from `z1` to the point at arclength `s` along
    /// the upper whisker.
    pub fn whisker_cumulative_mass(&self, s: f64) -> Result<f64> {
        let p = self.upper.at_arclength(s);
        let params = &self.sheets.params;
        let z1 = C::new(self.z1(), 0.0);
        let (x0, xi0) = right_start(&self.sheets)?;
        let xi_p = continue_segment(params, C::new(x0, 0.0), p, xi0)?;
        let (v, _) = integrate_from(params, p, z1, xi_p, 2, TOL, diff12)?;
        Ok((-v / C::new(0.0, 2.0 * PI * self.t)).re)
    }

    /// Harmonic moment `(1/2 pi i) oint s_bar s^(-k) ds + t int dmu_1 / s^k`
    /// over the boundary and the whiskers.
    pub fn harmonic_moment(&self, k: u32, n_theta: usize, exec: Exec) -> Result<C> {
        let boundary = droplet_moment(self.t, self.a, k, n_theta, exec);
        Ok(boundary + self.t * self.whisker_moment(k)?)
    }

    /// `int_{Sigma_1^w} dmu_1(s) / s^k` over all six whiskers.
    pub fn whisker_moment(&self, k: u32) -> Result<C> {
        let rot: C = (0..3).map(|j| omega_pow(-(j as i64) * k as i64)).sum();
        if rot.norm() < 1e-12 {
            return Ok(C::new(0.0, 0.0));
        }
        let params = &self.sheets.params;
        let z1 = C::new(self.z1(), 0.0);
        let z2 = self.sheets.bs.z2;
        let (x0, xi0) = right_start(&self.sheets)?;
        let m = 0.5 * (z1 + z2);
        let xi_m = continue_segment(params, C::new(x0, 0.0), m, xi0)?;
        let f = |z: C, xi: &[C; 3]| (xi[0] - xi[1]) * z.powi(-(k as i32));
        let (hi, _) = integrate_from(params, m, z2, xi_m, 2, TOL, f)?;
        let (lo, _) = integrate_from(params, m, z1, xi_m, 2, TOL, f)?;
        let i12 = hi - lo;
        // Upper whisker carries (xi_1 - xi_2) in the right-side labels, the
        // lower one minus the conjugate.
        let pair = (i12 - i12.conj()) / C::new(0.0, 2.0 * PI * self.t);
        Ok(rot * pair)
    }

    /// `int g dmu_1` over all of `Sigma_1`, for `g` analytic between each
    /// whisker and its chord.
    pub fn mu1_integral<G: Fn(C) -> C>(&self, g: G) -> Result<C> {
        let two_pi_it = C::new(0.0, 2.0 * PI * self.t);
        let mut total = C::new(0.0, 0.0);
        for j in 0..3 {
            let o = omega_pow(j);
            let gj = |s: C| g(o * s);
            total += self.spine_integral(gj)? / two_pi_it;
            let (up, _) = chord_integral_with(&self.sheets, TOL, |z, x| (x[0] - x[1]) * gj(z))?;
            // The lower whisker is the mirror image of the upper one.
            let (down, _) = chord_integral_with(&self.sheets, TOL, |z, x| {
                (x[0] - x[1]) * gj(z.conj()).conj()
            })?;
            total += up / two_pi_it + (down / two_pi_it).conj();
        }
        Ok(total)
    }

    /// Number of crossings of the upper whisker with the droplet boundary.
    pub fn whisker_boundary_intersections(&self) -> usize {
        let inside: Vec<bool> = self
            .upper
            .points
            .iter()
            .map(|&p| point_in_droplet(self.t, self.a, p))
            .collect();
        inside.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Polar form of the droplet boundary, `2 r^3 cos 3θ - r^4 - (1+t) r^2 + A`.
pub fn droplet_polar(t: f64, a: f64, r: f64, theta: f64) -> f64 {
    let r2 = r * r;
    2.0 * r2 * r * (3.0 * theta).cos() - r2 * r2 - (1.0 + t) * r2 + a
}

/// The unique positive zero of the polar form (strictly decreasing in `r`
/// for `t > 1/8`).
pub fn droplet_radius(t: f64, a: f64, theta: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let f = |r: f64| droplet_polar(t, a, r, theta);
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `dr/dθ` by implicit differentiation of the polar form.
pub fn droplet_radius_derivative(t: f64, r: f64, theta: f64) -> f64 {
    let f_r = 6.0 * r * r * (3.0 * theta).cos() - 4.0 * r * r * r - 2.0 * (1.0 + t) * r;
    let f_th = -6.0 * r * r * r * (3.0 * theta).sin();
    -f_th / f_r
}

pub fn point_in_droplet(t: f64, a: f64, z: C) -> bool {
    z.norm() < droplet_radius(t, a, z.arg())
}

/// Sampled droplet boundary.
#[derive(Debug, Clone)]
pub struct DropletBoundary {
    pub t: f64,
    pub a: f64,
    pub theta: Vec<f64>,
    pub r: Vec<f64>,
}

/// `r(θ)` on `n` equispaced angles in `[-pi, pi)`.
pub fn droplet_boundary(t: f64, a: f64, n: usize, exec: Exec) -> DropletBoundary {
    let theta: Vec<f64> = (0..n)
        .map(|k| -PI + 2.0 * PI * k as f64 / n as f64)
        .collect();
    let r = exec::map(exec, &theta, |&th| droplet_radius(t, a, th));
    DropletBoundary { t, a, theta, r }
}

/// `(1/2 pi i) oint_{boundary} s_bar s^(-k) ds` by the trapezoidal rule.
pub fn droplet_moment(t: f64, a: f64, k: u32, n: usize, exec: Exec) -> C {
    let b = droplet_boundary(t, a, n, exec);
    let h = 2.0 * PI / n as f64;
    let terms = exec::map_range(exec, n, |i| {
        let (th, r) = (b.theta[i], b.r[i]);
        let e = C::from_polar(1.0, th);
        let s = r * e;
        let ds = (droplet_radius_derivative(t, r, th) + C::new(0.0, r)) * e;
        s.conj() * s.powi(-(k as i32)) * ds
    });
    terms.iter().sum::<C>() * h / C::new(0.0, 2.0 * PI)
}

/// Droplet area divided by pi.
pub fn droplet_area_over_pi(t: f64, a: f64, n: usize, exec: Exec) -> f64 {
    droplet_moment(t, a, 0, n, exec).re
}
