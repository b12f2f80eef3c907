//! The spectral curve `xi^3 - z^2 xi^2 - (1+t) z xi + z^3 + A = 0`.
//!
//! Roots are labeled by sheet through continuation from an anchor on the
//! positive real axis, where `xi_1 ~ z^2`, `xi_2 ~ +z^(1/2)` and
//! `xi_3 ~ -z^(1/2)`. Crossing a cut permutes labels: `Sigma_1` (spines and
//! whiskers) exchanges sheets 1 and 2, `Sigma_2` (the rays `z^3 < 0`)
//! exchanges sheets 2 and 3.

use crate::error::{Error, Result};
use num_complex::Complex64 as C;
use std::f64::consts::PI;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Primitive cube root of unity `exp(2 pi i / 3)`.
pub const OMEGA: C = C::new(-0.5, 0.5 * SQRT3);

/// Critical time at which the branch points collide.
pub const T_STAR: f64 = 0.125;
/// Value of `A` at the critical time.
pub const A_STAR: f64 = 27.0 / 256.0;
/// Location of the triple branch point at the critical time.
pub const Z_STAR: f64 = 0.75;

pub fn omega_pow(k: i64) -> C {
    match k.rem_euclid(3) {
        0 => C::new(1.0, 0.0),
        1 => OMEGA,
        _ => OMEGA.conj(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveParams {
    pub t: f64,
    pub a: f64,
}

impl CurveParams {
    pub fn new(t: f64, a: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("t must be positive, got {t}")));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("A must be non-negative, got {a}")));
        }
        Ok(Self { t, a })
    }

    pub fn p(&self, xi: C, z: C) -> C {
        ((xi - z * z) * xi - (1.0 + self.t) * z) * xi + z * z * z + self.a
    }

    /// `dP/dxi = 3 xi^2 - 2 z^2 xi - (1+t) z`.
    pub fn dp_dxi(&self, xi: C, z: C) -> C {
        (3.0 * xi - 2.0 * z * z) * xi - (1.0 + self.t) * z
    }

    /// The three roots in `xi`, sorted lexicographically by (re, im).
    pub fn roots(&self, z: C) -> [C; 3] {
        let mut r = self.roots_unsorted(z);
        r.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        r
    }

    pub(crate) fn roots_unsorted(&self, z: C) -> [C; 3] {
        solve_cubic(-z * z, -(1.0 + self.t) * z, z * z * z + self.a)
    }

    pub fn q_coeffs(&self) -> [f64; 4] {
        let (t, a) = (self.t, self.a);
        [
            4.0,
            t * t + 20.0 * t + 4.0 * a - 8.0,
            4.0 * (1.0 + t).powi(3) + 18.0 * a * t - 36.0 * a,
            -27.0 * a * a,
        ]
    }

    /// Discriminant polynomial `Q(w)` by Horner's scheme.
    pub fn discriminant_q(&self, w: C) -> C {
        let c = self.q_coeffs();
        ((w * c[0] + c[1]) * w + c[2]) * w + c[3]
    }
}

/// Closed form of the discriminant of `Q`:
/// `16 (t^2 - 7t - 8 + 3A)^3 (t(1+t)^3 + 8At^2 - 20At + 16A^2 - A)`.
/// The second factor vanishes at `A_1(t)` and `A_2(t)`, the first at `A_3(t)`.
pub fn discriminant_of_q(t: f64, a: f64) -> f64 {
    16.0 * (t * t - 7.0 * t - 8.0 + 3.0 * a).powi(3)
        * (t * (1.0 + t).powi(3) + 8.0 * a * t * t - 20.0 * a * t + 16.0 * a * a - a)
}

pub fn a1_of_t(t: f64) -> Result<f64> {
    if t > T_STAR {
        return Err(Error::Domain(format!("A1 needs t <= 1/8, got {t}")));
    }
    Ok((1.0 + 20.0 * t - 8.0 * t * t - (1.0 - 8.0 * t).powf(1.5)) / 32.0)
}

pub fn a2_of_t(t: f64) -> Result<f64> {
    if t > T_STAR {
        return Err(Error::Domain(format!("A2 needs t <= 1/8, got {t}")));
    }
    Ok((1.0 + 20.0 * t - 8.0 * t * t + (1.0 - 8.0 * t).powf(1.5)) / 32.0)
}

pub fn a3_of_t(t: f64) -> f64 {
    (1.0 + t) * (8.0 - t) / 3.0
}

fn cbrt_c(z: C) -> C {
    if z.norm() == 0.0 {
        return C::new(0.0, 0.0);
    }
    C::from_polar(z.norm().cbrt(), z.arg() / 3.0)
}

fn polish(b: C, c: C, d: C, x: C, steps: usize) -> C {
    let mut x = x;
    for _ in 0..steps {
        let f = ((x + b) * x + c) * x + d;
        let df = (3.0 * x + 2.0 * b) * x + c;
        if df.norm() == 0.0 || f.norm() == 0.0 {
            break;
        }
        let nx = x - f / df;
        // Only accept a step that does not increase the residual.
        let nf = ((nx + b) * nx + c) * nx + d;
        if nx.is_finite() && nf.norm() <= f.norm() {
            x = nx;
        } else {
            break;
        }
    }
    x
}

/// Roots of the monic cubic `x^3 + b x^2 + c x + d`.
///
/// Cardano gives the root of largest modulus; the other two come from the
/// deflated quadratic (Vieta), which stays accurate when the root moduli are
/// very different. Every root then gets two Newton steps.
pub fn solve_cubic(b: C, c: C, d: C) -> [C; 3] {
    let b3 = b / 3.0;
    let p = c - b * b3;
    let q = 2.0 * b3 * b3 * b3 - b3 * c + d;
    let disc = (q * q * 0.25 + p * p * p / 27.0).sqrt();
    let s1 = -0.5 * q + disc;
    let s2 = -0.5 * q - disc;
    let s = if s1.norm() >= s2.norm() { s1 } else { s2 };
    let u = cbrt_c(s);
    let mut r = [C::new(0.0, 0.0); 3];
    for (k, rk) in r.iter_mut().enumerate() {
        let uk = u * omega_pow(k as i64);
        let y = if uk.norm() == 0.0 {
            C::new(0.0, 0.0)
        } else {
            uk - p / (3.0 * uk)
        };
        *rk = y - b3;
    }
    let imax = (0..3)
        .max_by(|&i, &j| r[i].norm().total_cmp(&r[j].norm()))
        .unwrap();
    let x1 = polish(b, c, d, r[imax], 3);
    if x1.norm() > 0.0 {
        // x2 + x3 = -b - x1, x2 x3 = -d / x1
        let sum = -b - x1;
        let prod = -d / x1;
        let sq = (sum * sum - 4.0 * prod).sqrt();
        let (ra, rb) = (0.5 * (sum + sq), 0.5 * (sum - sq));
        let big = if ra.norm() >= rb.norm() { ra } else { rb };
        let small = if big.norm() > 0.0 {
            prod / big
        } else {
            C::new(0.0, 0.0)
        };
        r = [x1, big, small];
    }
    for rk in r.iter_mut() {
        *rk = polish(b, c, d, *rk, 2);
    }
    r
}

/// Branch-point configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchMode {
    /// Reject collisions of discriminant roots.
    Strict,
    /// Accept collisions (critical configurations `A = A_1`, `A = A_3`, triple point).
    Critical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchSet {
    /// Roots of `Q`: `w[0]` real and non-negative, `w[1]` with `Im >= 0`, `w[2] = conj(w[1])`.
    pub w: [C; 3],
    pub z1: f64,
    pub z2: C,
    pub z3: C,
    /// All nine branch points `omega^j w_k^(1/3)`.
    pub z_points: [C; 9],
    /// `w[1] = w[2]` is a double root (a node of the curve when positive).
    pub double_root: bool,
}

impl BranchSet {
    /// Length scale of the branch-point configuration.
    pub fn scale(&self) -> f64 {
        1f64.max(self.z1).max(self.z2.norm())
    }
}

fn newton_q(params: &CurveParams, mut w: C) -> C {
    let c = params.q_coeffs();
    for _ in 0..4 {
        let f = params.discriminant_q(w);
        let df = (3.0 * c[0] * w + 2.0 * c[1]) * w + c[2];
        if df.norm() == 0.0 {
            break;
        }
        let nw = w - f / df;
        if params.discriminant_q(nw).norm() <= f.norm() {
            w = nw;
        } else {
            break;
        }
    }
    w
}

pub fn branch_points(params: &CurveParams, mode: BranchMode) -> Result<BranchSet> {
    let c = params.q_coeffs();
    let mut w: Vec<C> = if params.a == 0.0 {
        // Q(w) = w [4w^2 + c1 w + c2]
        let disc = C::new(c[1] * c[1] - 16.0 * c[2], 0.0).sqrt();
        vec![C::new(0.0, 0.0), (-c[1] + disc) / 8.0, (-c[1] - disc) / 8.0]
    } else {
        solve_cubic(
            C::new(c[1] / 4.0, 0.0),
            C::new(c[2] / 4.0, 0.0),
            C::new(c[3] / 4.0, 0.0),
        )
        .iter()
        .map(|&x| newton_q(params, x))
        .collect()
    };
    let scale = w.iter().map(|x| x.norm()).fold(1e-300, f64::max);
    let rel = |x: C, y: C| (x - y).norm() / scale;
    let mut collide = false;
    for i in 0..3 {
        for j in i + 1..3 {
            if rel(w[i], w[j]) < 1e-10 {
                collide = true;
            }
        }
    }
    if collide && mode == BranchMode::Strict {
        return Err(Error::DegenerateDiscriminant {
            t: params.t,
            a: params.a,
        });
    }
    // Snap nearly-real roots onto the axis.
    let real_tol = if mode == BranchMode::Critical {
        1e-6
    } else {
        1e-11
    };
    for x in w.iter_mut() {
        if x.im.abs() <= real_tol * (1.0 + x.norm()) {
            *x = C::new(x.re, 0.0);
        }
    }
    let nreal = w.iter().filter(|x| x.im == 0.0).count();
    let (w1, w2, double_root);
    if nreal == 1 {
        let i = w.iter().position(|x| x.im == 0.0).unwrap();
        w1 = w[i].re;
        let others: Vec<C> = w
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &x)| x)
            .collect();
        w2 = if others[0].im > 0.0 {
            others[0]
        } else {
            others[1]
        };
        double_root = false;
    } else {
        let mut ws: Vec<f64> = w.iter().map(|x| x.re).collect();
        ws.sort_by(f64::total_cmp);
        // Find the simple root; a double root is a node (positive) or the
        // A = A_3 configuration (negative).
        let close = |x: f64, y: f64| (x - y).abs() / scale < 1e-6;
        if close(ws[0], ws[1]) && close(ws[1], ws[2]) {
            w1 = ws[1];
            w2 = C::new(ws[1], 0.0);
            double_root = true;
        } else if close(ws[0], ws[1]) {
            w1 = ws[2];
            w2 = C::new(0.5 * (ws[0] + ws[1]), 0.0);
            double_root = true;
        } else if close(ws[1], ws[2]) {
            w1 = ws[0];
            w2 = C::new(0.5 * (ws[1] + ws[2]), 0.0);
            double_root = true;
        } else {
            if mode == BranchMode::Strict {
                return Err(Error::Domain(format!(
                    "Q has three distinct real roots at t = {}, A = {}",
                    params.t, params.a
                )));
            }
            w1 = ws.iter().copied().find(|&x| x >= 0.0).unwrap_or(ws[2]);
            w2 = C::new(
                ws.iter()
                    .copied()
                    .filter(|&x| x != w1)
                    .fold(f64::NEG_INFINITY, f64::max),
                0.0,
            );
            double_root = false;
        }
    }
    if w1 < 0.0 {
        return Err(Error::Domain(format!(
            "no non-negative real discriminant root at t = {}, A = {}",
            params.t, params.a
        )));
    }
    let z1 = w1.cbrt();
    let z2 = if w2.im == 0.0 && w2.re < 0.0 {
        C::from_polar((-w2.re).cbrt(), PI / 3.0)
    } else {
        cbrt_c(w2)
    };
    let z3 = z2.conj();
    let mut z_points = [C::new(0.0, 0.0); 9];
    for j in 0..3 {
        let o = omega_pow(j as i64);
        z_points[3 * j] = o * z1;
        z_points[3 * j + 1] = o * z2;
        z_points[3 * j + 2] = o * z3;
    }
    Ok(BranchSet {
        w: [C::new(w1, 0.0), w2, w2.conj()],
        z1,
        z2,
        z3,
        z_points,
        double_root,
    })
}

// ---------------------------------------------------------------------------
// Continuation

fn min_sep(r: &[C; 3]) -> f64 {
    (r[0] - r[1])
        .norm()
        .min((r[0] - r[2]).norm())
        .min((r[1] - r[2]).norm())
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn best_match(pred: &[C; 3], r: &[C; 3]) -> ([C; 3], f64) {
    let mut best = ([C::new(0.0, 0.0); 3], f64::INFINITY);
    for p in PERMS.iter() {
        let cand = [r[p[0]], r[p[1]], r[p[2]]];
        let d: f64 = (0..3).map(|i| (cand[i] - pred[i]).norm()).sum();
        if d < best.1 {
            best = (cand, d);
        }
    }
    best
}

/// Each matched root must have moved less than a quarter of its distance to
/// the nearest other root; then no other assignment is plausible.
fn match_is_safe(pred: &[C; 3], cand: &[C; 3]) -> bool {
    (0..3).all(|i| {
        let sep = (0..3)
            .filter(|&j| j != i)
            .map(|j| (cand[i] - cand[j]).norm())
            .fold(f64::INFINITY, f64::min);
        (cand[i] - pred[i]).norm() < 0.25 * sep
    })
}

/// All zeros of the discriminant in `z` (cube roots of the roots of `Q`),
/// cached per parameter pair.
fn branch_cloud(params: &CurveParams) -> [C; 9] {
    thread_local! {
        static CACHE: std::cell::Cell<Option<(f64, f64, [C; 9])>> = const { std::cell::Cell::new(None) };
    }
    CACHE.with(|c| {
        if let Some((t, a, v)) = c.get() {
            if t == params.t && a == params.a {
                return v;
            }
        }
        let q = params.q_coeffs();
        let w = solve_cubic(
            C::new(q[1] / 4.0, 0.0),
            C::new(q[2] / 4.0, 0.0),
            C::new(q[3] / 4.0, 0.0),
        );
        let mut v = [C::new(0.0, 0.0); 9];
        for (k, wk) in w.iter().enumerate() {
            let r = cbrt_c(*wk);
            for j in 0..3 {
                v[3 * k + j] = r * omega_pow(j as i64);
            }
        }
        c.set(Some((params.t, params.a, v)));
        v
    })
}

/// Continue a root triple along the straight segment `a -> b` (no cut
/// bookkeeping). Returns the continued triple at `b`.
///
/// Steps never exceed half the distance to the nearest branch point other
/// than the endpoints, so a step cannot slip around one.
pub fn continue_segment(params: &CurveParams, a: C, b: C, start: [C; 3]) -> Result<[C; 3]> {
    if a == b {
        return Ok(start);
    }
    let len = (b - a).norm();
    let tiny = 1e-9 * (1.0 + a.norm().max(b.norm()));
    let cloud: Vec<C> = branch_cloud(params)
        .into_iter()
        .filter(|p| (p - a).norm() > tiny && (p - b).norm() > tiny)
        .collect();
    let max_h = |z: C| -> f64 {
        let d = cloud
            .iter()
            .map(|p| (p - z).norm())
            .fold(f64::INFINITY, f64::min);
        (0.5 * d / len).max(1e-9)
    };
    let mut cur = start;
    let mut prev: Option<([C; 3], f64)> = None;
    let mut s = 0.0;
    let mut h: f64 = 1.0;
    let scale = 1.0 + start.iter().map(|x| x.norm()).fold(0.0, f64::max);
    while s < 1.0 {
        h = h.min(1.0 - s).min(max_h(a + (b - a) * s));
        let s_new = if h >= 1.0 - s { 1.0 } else { s + h };
        let z = if s_new == 1.0 { b } else { a + (b - a) * s_new };
        let r = params.roots_unsorted(z);
        let pred = match prev {
            Some((pv, hp)) if hp > 0.0 => {
                let f = h / hp;
                [
                    cur[0] + (cur[0] - pv[0]) * f,
                    cur[1] + (cur[1] - pv[1]) * f,
                    cur[2] + (cur[2] - pv[2]) * f,
                ]
            }
            _ => cur,
        };
        let (cand, disp) = best_match(&pred, &r);
        let collision = min_sep(&r) < 1e-9 * scale;
        if match_is_safe(&pred, &cand) || (collision && disp < 1e-6 * scale) {
            prev = Some((cur, h));
            cur = cand;
            s = s_new;
            h *= 2.0;
        } else {
            h *= 0.5;
            prev = None;
            if h < 1e-12 {
                return Err(Error::ContinuationAmbiguous { z });
            }
        }
    }
    Ok(cur)
}

/// Continue a root triple along a polyline.
pub fn continue_path(params: &CurveParams, path: &[C], start: [C; 3]) -> Result<[C; 3]> {
    let mut cur = start;
    for w in path.windows(2) {
        cur = continue_segment(params, w[0], w[1], cur)?;
    }
    Ok(cur)
}

/// Continue a pair of roots along a path. The third root is recovered from
/// the trace `xi_1 + xi_2 + xi_3 = z^2` at the seed.
pub fn continue_xi_pair(params: &CurveParams, path: &[C], seed: [C; 2]) -> Result<Vec<[C; 2]>> {
    if path.is_empty() {
        return Ok(vec![]);
    }
    let z0 = path[0];
    let mut cur = [seed[0], seed[1], z0 * z0 - seed[0] - seed[1]];
    let mut out = vec![seed];
    for w in path.windows(2) {
        cur = continue_segment(params, w[0], w[1], cur)?;
        out.push([cur[0], cur[1]]);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Cuts and labeled evaluation

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutKind {
    /// Exchanges sheets 1 and 2.
    Sigma1,
    /// Exchanges sheets 2 and 3.
    Sigma2,
}

#[derive(Debug, Clone, Copy)]
pub struct CutSeg {
    pub a: C,
    pub b: C,
    pub kind: CutKind,
}

/// Cut geometry in the z-plane.
#[derive(Debug, Clone)]
pub struct Cuts {
    pub segs: Vec<CutSeg>,
}

const FAR: f64 = 1e9;

impl Cuts {
    fn base(bs: &BranchSet) -> Vec<CutSeg> {
        let mut segs = Vec::new();
        for j in 0..3 {
            let o = omega_pow(j);
            if bs.z1 > 0.0 {
                segs.push(CutSeg {
                    a: C::new(0.0, 0.0),
                    b: o * bs.z1,
                    kind: CutKind::Sigma1,
                });
            }
        }
        for &th in &[PI / 3.0, PI, -PI / 3.0] {
            segs.push(CutSeg {
                a: C::new(0.0, 0.0),
                b: C::from_polar(FAR, th),
                kind: CutKind::Sigma2,
            });
        }
        segs
    }

    fn add_rotated_polyline(segs: &mut Vec<CutSeg>, pts: &[C]) {
        for j in 0..3 {
            let o = omega_pow(j);
            for w in pts.windows(2) {
                segs.push(CutSeg {
                    a: o * w[0],
                    b: o * w[1],
                    kind: CutKind::Sigma1,
                });
            }
        }
    }

    /// Spines plus straight whiskers `z1 -> z2`, `z1 -> z3` (and rotations).
    /// For a real `z2` (subcritical node) only the spines are cuts.
    pub fn provisional(bs: &BranchSet) -> Self {
        let mut segs = Self::base(bs);
        if bs.z2.im != 0.0 {
            let z1 = C::new(bs.z1, 0.0);
            Self::add_rotated_polyline(&mut segs, &[z1, bs.z2]);
            Self::add_rotated_polyline(&mut segs, &[z1, bs.z3]);
        }
        Cuts { segs }
    }

    /// Spines plus traced whiskers. `upper` runs from `z1` to `z2`, `lower`
    /// from `z1` to `z3`.
    pub fn with_whiskers(bs: &BranchSet, upper: &[C], lower: &[C]) -> Self {
        let mut segs = Self::base(bs);
        Self::add_rotated_polyline(&mut segs, upper);
        Self::add_rotated_polyline(&mut segs, lower);
        Cuts { segs }
    }

    /// Crossings of the segment `p -> q`, as (path parameter, kind), sorted
    /// along the path. The start point never counts; the end point counts
    /// when `include_end` is set, so that a polyline whose vertex lies on a
    /// cut registers the crossing exactly once.
    pub fn crossings(&self, p: C, q: C, include_end: bool) -> Vec<(f64, CutKind)> {
        let d = q - p;
        let mut out = Vec::new();
        for seg in &self.segs {
            let e = seg.b - seg.a;
            let den = d.re * e.im - d.im * e.re;
            if den.abs() < 1e-300 {
                continue;
            }
            let f = seg.a - p;
            let s = (f.re * e.im - f.im * e.re) / den;
            let u = (f.re * d.im - f.im * d.re) / den;
            let s_ok = s > 1e-14 && (s < 1.0 - 1e-14 || (include_end && s <= 1.0 + 1e-14));
            if s_ok && (0.0..1.0).contains(&u) {
                out.push((s, seg.kind));
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }
}

fn apply_swap(x: &mut [C; 3], kind: CutKind) {
    match kind {
        CutKind::Sigma1 => x.swap(0, 1),
        CutKind::Sigma2 => x.swap(1, 2),
    }
}

/// Sheet-labeled evaluation of the three roots.
#[derive(Debug, Clone)]
pub struct Sheets {
    pub params: CurveParams,
    pub bs: BranchSet,
    pub cuts: Cuts,
    pub anchor: f64,
    anchor_xi: [C; 3],
}

impl Sheets {
    /// Sheets with provisional straight whiskers.
    pub fn new(params: CurveParams, mode: BranchMode) -> Result<Self> {
        let bs = branch_points(&params, mode)?;
        let cuts = Cuts::provisional(&bs);
        Ok(Self::with_cuts(params, bs, cuts))
    }

    pub fn with_cuts(params: CurveParams, bs: BranchSet, cuts: Cuts) -> Self {
        let anchor = 100.0 * (1.0 + bs.scale());
        let mut r = params.roots(C::new(anchor, 0.0));
        r.sort_by(|x, y| y.re.total_cmp(&x.re));
        Sheets {
            params,
            bs,
            cuts,
            anchor,
            anchor_xi: r,
        }
    }

    pub fn replace_cuts(&self, cuts: Cuts) -> Self {
        Self::with_cuts(self.params, self.bs.clone(), cuts)
    }

    fn special_points(&self) -> impl Iterator<Item = C> + '_ {
        self.bs
            .z_points
            .iter()
            .copied()
            .chain(std::iter::once(C::new(0.0, 0.0)))
    }

    fn segment_is_safe(&self, p: C, q: C, target: C) -> bool {
        let d0 = 0.01 * self.bs.scale();
        for s in self.special_points() {
            let d = q - p;
            let len2 = d.norm_sqr();
            let u = if len2 == 0.0 {
                0.0
            } else {
                (((s - p) * d.conj()).re / len2).clamp(0.0, 1.0)
            };
            let dist = (p + d * u - s).norm();
            let lim = 0.5 * (target - s).norm().min(d0);
            if dist < lim || dist < 1e-12 {
                return false;
            }
        }
        true
    }

    fn arc(r: f64, from: f64, to: f64, out: &mut Vec<C>) {
        let n = ((to - from).abs() / (PI / 12.0)).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(C::from_polar(r, from + (to - from) * k as f64 / n as f64));
        }
    }

    /// Route from the anchor to `z`: arc at the anchor radius, radial leg,
    /// with angular detours around branch points.
    pub fn route(&self, z: C) -> Result<Vec<C>> {
        let r_anchor = self.anchor;
        let th = z.arg();
        let rz = z.norm();
        if rz == 0.0 {
            return Err(Error::Pole("z = 0 is a junction of all cuts".into()));
        }
        for &delta in &[
            0.0, 0.02, -0.02, 0.05, -0.05, 0.1, -0.1, 0.2, -0.2, 0.4, -0.4,
        ] {
            let th1 = th + delta;
            let mut path = vec![C::new(r_anchor, 0.0)];
            Self::arc(r_anchor, 0.0, th1, &mut path);
            path.push(C::from_polar(rz, th1));
            if delta != 0.0 {
                Self::arc(rz, th1, th, &mut path);
                *path.last_mut().unwrap() = z;
            } else {
                *path.last_mut().unwrap() = z;
            }
            let ok = path.windows(2).all(|w| self.segment_is_safe(w[0], w[1], z));
            if ok {
                return Ok(path);
            }
        }
        Err(Error::ContinuationAmbiguous { z })
    }

    /// Continue a labeled triple along `path`, permuting labels at cut crossings.
    pub fn continue_labeled(&self, path: &[C], start: [C; 3]) -> Result<[C; 3]> {
        let mut cur = start;
        let last = path.len().saturating_sub(2);
        for (i, w) in path.windows(2).enumerate() {
            cur = continue_segment(&self.params, w[0], w[1], cur)?;
            for (_, kind) in self.cuts.crossings(w[0], w[1], i < last) {
                apply_swap(&mut cur, kind);
            }
        }
        Ok(cur)
    }

    /// Labeled roots `[xi_1, xi_2, xi_3]` at `z` (off the cuts).
    pub fn eval(&self, z: C) -> Result<[C; 3]> {
        let path = self.route(z)?;
        self.continue_labeled(&path, self.anchor_xi)
    }

    /// Boundary values at a point `z` on a cut, taken from the side the unit
    /// vector `normal` points into.
    pub fn eval_side(&self, z: C, normal: C) -> Result<[C; 3]> {
        // Stay well inside the sector between nearby cut junctions.
        let near = self
            .bs
            .z_points
            .iter()
            .chain(std::iter::once(&C::new(0.0, 0.0)))
            .map(|p| (p - z).norm())
            .filter(|&d| d > 0.0)
            .fold(f64::INFINITY, f64::min);
        let delta = (1e-4 * self.bs.scale()).min(0.25 * near);
        let off = z + normal * delta;
        let xi = self.eval(off)?;
        continue_segment(&self.params, off, z, xi)
    }

    /// Labeled roots at the anchor.
    pub fn anchor_values(&self) -> [C; 3] {
        self.anchor_xi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_solver_matches_vieta() {
        let r = solve_cubic(C::new(1.0, 2.0), C::new(-3.0, 0.5), C::new(0.25, -1.0));
        let s: C = r.iter().sum();
        assert!((s + C::new(1.0, 2.0)).norm() < 1e-13);
        let p = r[0] * r[1] * r[2];
        assert!((p + C::new(0.25, -1.0)).norm() < 1e-13);
    }

    #[test]
    fn cubic_solver_triple_root() {
        let r = solve_cubic(C::new(-3.0, 0.0), C::new(3.0, 0.0), C::new(-1.0, 0.0));
        for x in r {
            assert!((x - 1.0).norm() < 1e-5);
        }
    }

    #[test]
    fn anchor_labels_follow_asymptotics() {
        let s = Sheets::new(CurveParams::new(0.2, 0.1).unwrap(), BranchMode::Strict).unwrap();
        let z = 1e6;
        let xi = s.eval(C::new(z, 0.0)).unwrap();
        assert!((xi[0] - z * z).norm() / (z * z) < 1e-9);
        assert!((xi[1] - z.sqrt()).norm() < 1e-3, "{xi:?}");
        assert!((xi[2] + z.sqrt()).norm() < 1e-3);
    }
}
