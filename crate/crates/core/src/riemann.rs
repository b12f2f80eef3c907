//! The genus-one quotient `w = z^3`, `eta = z xi`: normalized differential,
//! period `tau`, Abel map, theta function and the prefactor `M_{n,11}`.
//!
//! Periods and Abel integrals are computed in the z-plane, where the sheet
//! labels already exist: `omega_S` pulls back to `omega_R = 3C dz / P_xi`.
//! A point `w` off the negative axis is represented by its principal cube
//! root, which lies in the closed sector `|arg z| <= pi/3`. The sector minus
//! the spine and the two whiskers is simply connected, so every Abel path is
//! planned inside it on a visibility graph.

use crate::boutroux::chord_integral_with;
use crate::contour::integrate_from;
use crate::curve::{continue_segment, solve_cubic};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::quad::integrate_mapped;
use num_complex::Complex64 as C;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

const TOL: f64 = 1e-12;
/// Legs ending at `w1` meet a double root, which caps the attainable accuracy.
const REAL_TOL: f64 = 1e-10;
const SECTOR: f64 = PI / 3.0;

/// `eta^3 - w eta^2 - (1+t) w eta + w^2 + A w = 0`.
#[derive(Debug, Clone)]
pub struct QuotientCurve {
    pub t: f64,
    pub a: f64,
    pub w1: f64,
    /// Image of `z2`; `w3 = conj(w2)`.
    pub w2: C,
    pub w3: C,
    /// Double root `eta` over `w1`.
    pub eta_c: f64,
    pub geom: Geometry,
}

impl QuotientCurve {
    pub fn new(geom: Geometry) -> Self {
        let bs = &geom.sheets.bs;
        let (w1, w2) = (bs.z1.powi(3), bs.z2.powi(3));
        let mut qc = QuotientCurve {
            t: geom.t,
            a: geom.a,
            w1,
            w2,
            w3: w2.conj(),
            eta_c: 0.0,
            geom,
        };
        // Newton on P = P_eta = 0 from the mean of the merging pair.
        let mut r = qc.eta_roots(C::new(w1, 0.0));
        r.sort_by(|a, b| b.re.total_cmp(&a.re));
        let (mut e, mut w) = (0.5 * (r[0].re + r[1].re), w1);
        let t1 = 1.0 + qc.t;
        for _ in 0..20 {
            let f1 = e * e * e - w * e * e - t1 * w * e + w * w + qc.a * w;
            let f2 = 3.0 * e * e - 2.0 * w * e - t1 * w;
            let pw = -e * e - t1 * e + 2.0 * w + qc.a;
            let (pee, pew) = (6.0 * e - 2.0 * w, -2.0 * e - t1);
            let det = f2 * pew - pw * pee;
            if det == 0.0 {
                break;
            }
            let de = (f1 * pew - pw * f2) / det;
            let dw = (f2 * f2 - f1 * pee) / det;
            e -= de;
            w -= dw;
            if de.abs() + dw.abs() <= 1e-16 * (1.0 + w.abs()) {
                break;
            }
        }
        qc.w1 = w;
        qc.eta_c = e;
        qc
    }

    /// Real branches over `w = w1 + eps`, `eps >= 0`, from the cubic in
    /// `eta - eta_c`, whose coefficients carry no cancellation near the double
    /// root. Returns `eta` and `P_eta` for sheets 1 to 3, largest `eta` first.
    pub fn branches_above_w1(&self, eps: f64) -> [(f64, f64); 3] {
        let (e, t1) = (self.eta_c, 1.0 + self.t);
        let w = self.w1 + eps;
        let pw = -e * e - t1 * e + 2.0 * self.w1 + self.a;
        let (c2, c1, c0) = (3.0 * e - w, -(2.0 * e + t1) * eps, (pw + eps) * eps);
        let mut d = solve_cubic(C::new(c2, 0.0), C::new(c1, 0.0), C::new(c0, 0.0)).map(|r| r.re);
        for x in d.iter_mut() {
            for _ in 0..4 {
                let f = ((*x + c2) * *x + c1) * *x + c0;
                let df = (3.0 * *x + 2.0 * c2) * *x + c1;
                if df == 0.0 {
                    break;
                }
                *x -= f / df;
            }
        }
        d.sort_by(|a, b| b.total_cmp(a));
        let (d01, d02, d12) = (d[0] - d[1], d[0] - d[2], d[1] - d[2]);
        [
            (e + d[0], d01 * d02),
            (e + d[1], -d01 * d12),
            (e + d[2], d02 * d12),
        ]
    }

    pub fn boutroux(t: f64) -> Result<Self> {
        Ok(Self::new(Geometry::boutroux(t)?))
    }

    pub fn residual(&self, w: C, eta: C) -> C {
        eta * eta * eta - w * eta * eta - (1.0 + self.t) * w * eta + w * w + self.a * w
    }

    /// `d/d eta` of the cubic, the denominator of `omega_S`.
    pub fn denominator(&self, w: C, eta: C) -> C {
        3.0 * eta * eta - 2.0 * w * eta - (1.0 + self.t) * w
    }

    /// Unlabeled roots in `eta`.
    pub fn eta_roots(&self, w: C) -> [C; 3] {
        solve_cubic(-w, -(1.0 + self.t) * w, w * w + self.a * w)
    }

    /// Labeled roots `[eta_1, eta_2, eta_3]`, through `eta_j(z^3) = z xi_j(z)`
    /// with `z` the principal cube root.
    pub fn eta_branches(&self, w: C) -> Result<[C; 3]> {
        if w.norm() == 0.0 {
            return Ok([C::new(0.0, 0.0); 3]);
        }
        let z = principal_cbrt(w);
        let xi = self.geom.sheets.eval(z)?;
        Ok([z * xi[0], z * xi[1], z * xi[2]])
    }

    /// Real root on a real leg of `c_S`: sheet 1 for `w < 0` or `w > w1`,
    /// sheet 3 for `w > 0`, sheet 2 for `w > w1`. Returns `(eta, denominator)`.
    pub fn real_branch(&self, w: f64, sheet: usize) -> Result<(f64, f64)> {
        let r = self.eta_roots(C::new(w, 0.0));
        let bad = || Error::Domain(format!("no real point of sheet {sheet} over w = {w}"));
        // One real root; near w1 the conjugate pair is nearly real too, and
        // then sheet 3 is the leftmost root (sheet 1 the rightmost for w < 0).
        let single = |r: &[C; 3], right: bool| {
            let small = 1e-6 * (1.0 + w.abs());
            let real: Vec<usize> = (0..3).filter(|&i| r[i].im.abs() <= small).collect();
            if real.len() == 1 {
                real[0]
            } else {
                let key = |i: usize| if right { r[i].re } else { -r[i].re };
                (0..3).max_by(|&i, &j| key(i).total_cmp(&key(j))).unwrap()
            }
        };
        let w1 = self.w1;
        let pick = match sheet {
            1 if w < 0.0 => r[single(&r, true)].re,
            3 if w > 0.0 && w <= w1 => r[single(&r, false)].re,
            1..=3 if w > w1 => return Ok(self.branches_above_w1(w - w1)[sheet - 1]),
            _ => return Err(bad()),
        };
        Ok((pick, self.denominator(C::new(w, 0.0), C::new(pick, 0.0)).re))
    }

    fn far(&self) -> f64 {
        4.0 * self.w1.max(self.w2.norm()).max(1.0)
    }

    /// `int dw / P_eta` over `[lo, hi]` on a real leg. Infinite ends use
    /// `w = W / v` with a graded mesh in `v`.
    pub fn real_leg(&self, sheet: usize, lo: f64, hi: f64) -> Result<f64> {
        let big = self.far();
        if lo == hi {
            return Ok(0.0);
        }
        if hi.is_infinite() && lo.is_infinite() {
            return Err(Error::Domain("doubly infinite leg".into()));
        }
        if hi == f64::INFINITY {
            let cut = lo.max(big);
            let head = if cut > lo {
                self.finite_leg(sheet, lo, cut)?
            } else {
                0.0
            };
            return Ok(head + self.tail(sheet, cut)?);
        }
        if lo == f64::NEG_INFINITY {
            let cut = hi.min(-big);
            let head = if cut < hi {
                self.finite_leg(sheet, cut, hi)?
            } else {
                0.0
            };
            return Ok(head + self.tail(sheet, cut)?);
        }
        self.finite_leg(sheet, lo, hi)
    }

    fn end_class(&self, w: f64, sheet: usize) -> u32 {
        if w == 0.0 {
            3
        } else if w == self.w1 && sheet != 3 {
            2
        } else {
            1
        }
    }

    fn finite_leg(&self, sheet: usize, lo: f64, hi: f64) -> Result<f64> {
        // Every sheet is singular at w = 0. When a leg ends close to it
        // (w1 and A both vanish near t**), split into panels geometric in |w|.
        let near0 = if lo > 0.0 {
            lo
        } else if hi < 0.0 {
            -hi
        } else {
            0.0
        };
        if near0 == 0.0 || near0 >= 0.25 * (hi - lo) {
            return self.finite_panel(sheet, lo, hi);
        }
        let mut total = 0.0;
        let mut a = near0;
        let far = if lo > 0.0 { hi } else { -lo };
        while a < far {
            let b = if 4.0 * a < far { 4.0 * a } else { far };
            total += if lo > 0.0 {
                self.finite_panel(sheet, a, b)?
            } else {
                self.finite_panel(sheet, -b, -a)?
            };
            a = b;
        }
        Ok(total)
    }

    fn finite_panel(&self, sheet: usize, lo: f64, hi: f64) -> Result<f64> {
        let (ma, mb) = (self.end_class(lo, sheet), self.end_class(hi, sheet));
        let near = lo == self.w1 && sheet != 3;
        let v = integrate_mapped(ma, mb, TOL, |nodes| {
            nodes
                .iter()
                .map(|nd| {
                    let d = if near {
                        // Offset from w1 taken exactly, not through w - w1.
                        let eps = if nd.tau <= 0.5 {
                            (hi - lo) * nd.tau
                        } else {
                            (hi - lo) - (hi - lo) * nd.tau_c
                        };
                        self.branches_above_w1(eps)[sheet - 1].1
                    } else {
                        let w = if nd.tau <= 0.5 {
                            lo + (hi - lo) * nd.tau
                        } else {
                            hi - (hi - lo) * nd.tau_c
                        };
                        self.real_branch(w, sheet)?.1
                    };
                    Ok(C::new(1.0 / d, 0.0))
                })
                .collect()
        })?;
        Ok(v.re * (hi - lo))
    }

    /// `int dw / P_eta` between `w0` and the infinity on the same side,
    /// oriented left to right.
    pub fn tail(&self, sheet: usize, w0: f64) -> Result<f64> {
        // w = w0 / v, v in (0, 1]; sheets 2 and 3 decay like w^(-3/2).
        let mb = if sheet == 1 { 1 } else { 2 };
        let v = integrate_mapped(mb, 1, REAL_TOL, |nodes| {
            nodes
                .iter()
                .map(|nd| {
                    let v = nd.tau;
                    let w = w0 / v;
                    Ok(C::new(w0 / (v * v) / self.real_branch(w, sheet)?.1, 0.0))
                })
                .collect()
        })?;
        Ok(if w0 > 0.0 { v.re } else { -v.re })
    }

    /// `oint_{c_S} dw / P_eta`: sheet 1 on `[w1, inf)` and `(-inf, 0]`, sheet 3
    /// on `[0, inf)`, sheet 2 from `inf` back to `w1`.
    pub fn cs_integral(&self) -> Result<f64> {
        let inf = f64::INFINITY;
        Ok(self.real_leg(1, self.w1, inf)?
            + self.real_leg(1, -inf, 0.0)?
            + self.real_leg(3, 0.0, inf)?
            - self.real_leg(2, self.w1, inf)?)
    }
}

/// `theta(s) = sum_n exp(pi i n^2 (1+tau)/2 + 2 pi i n s)`.
pub fn theta(s: C, tau: C) -> C {
    let i = C::new(0.0, 1.0);
    let p = 0.5 * (1.0 + tau);
    // Reduce mod L, then sum over a window where the tail is below 1e-18.
    let k = (s.im / p.im).round();
    let mut r = s - k * p;
    r -= r.re.round();
    let q_abs = (-PI * p.im).exp();
    let mut m = 1i64;
    while q_abs.powi((m * m) as i32) * (2.0 * PI * m as f64 * r.im.abs()).exp() >= 1e-18 && m < 200
    {
        m += 1;
    }
    let mut sum = C::new(0.0, 0.0);
    for n in -m..=m {
        let nf = n as f64;
        sum += (i * PI * p * nf * nf + 2.0 * PI * i * nf * r).exp();
    }
    sum * (-i * PI * k * k * p - 2.0 * PI * i * k * r).exp()
}

/// Distance on `R / Z`.
pub fn circle_dist(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Domain {
    /// Sheets 1 and 2: spine and whiskers are walls.
    Walled,
    Free,
}

#[derive(Clone, Copy, PartialEq)]
struct Open(f64, usize);

impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Open {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
    }
}

/// Visibility-graph paths inside the closed sector `|arg z| <= pi/3`.
#[derive(Debug, Clone)]
struct Planner {
    scale: f64,
    grid: Vec<C>,
    walls: Vec<(C, C)>,
    /// Ranges of `walls` with bounding boxes `[xmin, xmax, ymin, ymax]`.
    chunks: Vec<(usize, usize, [f64; 4])>,
    avoid: Vec<C>,
    vis: [Vec<bool>; 2],
}

impl Planner {
    fn new(qc: &QuotientCurve) -> Self {
        let bs = &qc.geom.sheets.bs;
        let scale = bs.z1.max(bs.z2.norm());
        let mut walls = vec![(C::new(0.0, 0.0), C::new(bs.z1, 0.0))];
        for w in [&qc.geom.upper.points, &qc.geom.lower.points] {
            walls.extend(w.windows(2).map(|p| (p[0], p[1])));
        }
        let chunks = walls
            .chunks(16)
            .enumerate()
            .map(|(k, ch)| {
                let mut bb = [
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                ];
                for (a, b) in ch {
                    for p in [a, b] {
                        bb = [
                            bb[0].min(p.re),
                            bb[1].max(p.re),
                            bb[2].min(p.im),
                            bb[3].max(p.im),
                        ];
                    }
                }
                (16 * k, 16 * k + ch.len(), bb)
            })
            .collect();
        let radii = [
            0.1, 0.25, 0.4, 0.55, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.35, 1.6, 2.0, 2.6, 3.3, 4.0,
        ];
        let mut grid = vec![C::new(4.0 * scale, 0.0)];
        for &r in &radii {
            for k in 0..=16 {
                let th = -SECTOR + 2.0 * SECTOR * k as f64 / 16.0;
                grid.push(C::from_polar(r * scale, th));
            }
        }
        let avoid = vec![C::new(bs.z1, 0.0), bs.z2, bs.z3];
        let mut pl = Planner {
            scale,
            grid,
            walls,
            chunks,
            avoid,
            vis: [Vec::new(), Vec::new()],
        };
        let n = pl.grid.len();
        for (d, dom) in [Domain::Walled, Domain::Free].into_iter().enumerate() {
            let mut v = vec![false; n * n];
            for i in 0..n {
                for j in i + 1..n {
                    let ok = pl.clear(pl.grid[i], pl.grid[j], None, dom);
                    v[i * n + j] = ok;
                    v[j * n + i] = ok;
                }
            }
            pl.vis[d] = v;
        }
        pl
    }

    fn crosses_walls(&self, p: C, q: C) -> bool {
        let (x0, x1) = (p.re.min(q.re), p.re.max(q.re));
        let (y0, y1) = (p.im.min(q.im), p.im.max(q.im));
        let d = q - p;
        for &(lo, hi, bb) in &self.chunks {
            if bb[0] > x1 || bb[1] < x0 || bb[2] > y1 || bb[3] < y0 {
                continue;
            }
            for &(a, b) in &self.walls[lo..hi] {
                let e = b - a;
                let den = d.re * e.im - d.im * e.re;
                if den.abs() < 1e-300 {
                    continue;
                }
                let f = a - p;
                let s = (f.re * e.im - f.im * e.re) / den;
                let u = (f.re * d.im - f.im * d.re) / den;
                if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&u) {
                    return true;
                }
            }
        }
        false
    }

    /// Segment `p -> q` avoids the walls (in the walled domain) and keeps
    /// a margin from the branch points; `end` relaxes the margin near a
    /// query point.
    fn clear(&self, p: C, q: C, end: Option<C>, dom: Domain) -> bool {
        let d = q - p;
        let l2 = d.norm_sqr();
        for b in &self.avoid {
            let mut m = 0.02 * self.scale;
            if let Some(e) = end {
                m = m.min(0.5 * (e - b).norm());
            }
            let s = if l2 > 0.0 {
                ((b - p).re * d.re + (b - p).im * d.im) / l2
            } else {
                0.0
            };
            if (p + d * s.clamp(0.0, 1.0) - b).norm() < m {
                return false;
            }
        }
        dom == Domain::Free || !self.crosses_walls(p, q)
    }

    /// Shortest visibility path from `from` to `to`.
    fn path(&self, from: C, to: C, dom: Domain) -> Result<Vec<C>> {
        let n = self.grid.len();
        let vis = &self.vis[if dom == Domain::Walled { 0 } else { 1 }];
        let near = |e: C| {
            self.avoid
                .iter()
                .map(|b| (e - b).norm())
                .fold(f64::INFINITY, f64::min)
        };
        // Local rings let a query point close to a wall see the grid.
        let mut extra = vec![from, to];
        for &c in &[from, to] {
            let wall = self
                .walls
                .iter()
                .map(|&(a, b)| seg_dist(c, a, b))
                .fold(f64::INFINITY, f64::min);
            let d0 = wall.min(near(c)).max(1e-12 * self.scale);
            let mut r = 2.0 * d0;
            while r < 0.2 * self.scale {
                for k in 0..12 {
                    let p = c + C::from_polar(r, 2.0 * PI * k as f64 / 12.0 + 0.1);
                    if p.arg().abs() <= SECTOR {
                        extra.push(p);
                    }
                }
                r *= 3.0;
            }
        }
        let all: Vec<C> = self.grid.iter().chain(&extra).copied().collect();
        let (src, dst) = (n, n + 1);
        let edge = |i: usize, j: usize| -> bool {
            if i < n && j < n {
                return vis[i * n + j];
            }
            let end = if i == src || j == src {
                Some(from)
            } else if i == dst || j == dst {
                Some(to)
            } else {
                None
            };
            self.clear(all[i], all[j], end, dom)
        };
        let mut dist = vec![f64::INFINITY; all.len()];
        let mut prev = vec![usize::MAX; all.len()];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Open((all[src] - to).norm(), src));
        while let Some(Open(_, i)) = heap.pop() {
            if i == dst {
                break;
            }
            for j in 0..all.len() {
                if j == i {
                    continue;
                }
                let nd = dist[i] + (all[i] - all[j]).norm();
                if nd < dist[j] && edge(i, j) {
                    dist[j] = nd;
                    prev[j] = i;
                    heap.push(Open(nd + (all[j] - to).norm(), j));
                }
            }
        }
        if !dist[dst].is_finite() {
            return Err(Error::ContinuationAmbiguous { z: to });
        }
        let mut out = vec![to];
        let mut k = dst;
        while prev[k] != usize::MAX {
            k = prev[k];
            out.push(all[k]);
        }
        out.reverse();
        Ok(out)
    }
}

fn seg_dist(c: C, a: C, b: C) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    let s = if l2 > 0.0 {
        ((c - a).re * d.re + (c - a).im * d.im) / l2
    } else {
        0.0
    };
    (a + d * s.clamp(0.0, 1.0) - c).norm()
}

/// The surface data at one `(t, A)`. Immutable once built.
#[derive(Debug, Clone)]
pub struct ThetaContext {
    pub qc: QuotientCurve,
    /// Normalization of `omega_S`.
    pub c: f64,
    pub tau: C,
    /// `oint_{b_S} omega_S`, equal to `(1 + tau)/2`.
    pub b_period: C,
    pub s0: C,
    pub beta: f64,
    /// `u_1(-A)`, the Abel integral from `inf_1` to `(-A^(1/3), 0)`.
    pub u1_at_minus_a: f64,
    pub beta_star: f64,
    planner: Planner,
    far: C,
    far_xi: [C; 3],
    far_u1: f64,
}

/// Where a spurious zero sits on `c_S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpuriousZero {
    pub n: usize,
    /// Real `w` and sheet of `Q_n`.
    pub w: f64,
    pub sheet: usize,
    /// Real cube root of `w`.
    pub x: f64,
    /// Target Abel value mod 1 and the value at the returned point.
    pub target: f64,
    pub achieved: f64,
}

impl ThetaContext {
    pub fn boutroux(t: f64) -> Result<Self> {
        Self::new(QuotientCurve::boutroux(t)?)
    }

    pub fn new(qc: QuotientCurve) -> Result<Self> {
        let cs = qc.cs_integral()?;
        if !(cs > 0.0) {
            return Err(Error::Domain(format!("c_S integral {cs} is not positive")));
        }
        let c = 1.0 / cs;
        let params = qc.geom.sheets.params;
        let (i12, _) = chord_integral_with(&qc.geom.sheets, REAL_TOL, |z, x| {
            3.0 * c * (1.0 / params.dp_dxi(x[0], z) - 1.0 / params.dp_dxi(x[1], z))
        })?;
        let tau = i12 - i12.conj();
        let beta = qc.geom.beta()?;
        let u1_at_minus_a = c * qc.real_leg(1, f64::NEG_INFINITY, -qc.a)?;
        let planner = Planner::new(&qc);
        let far = planner.grid[0];
        let far_xi = qc.geom.sheets.eval(far)?;
        let far_u1 = -c * qc.real_leg(1, far.re.powi(3), f64::INFINITY)?;
        let mut ctx = ThetaContext {
            qc,
            c,
            tau,
            b_period: i12,
            s0: 0.25 * (tau - 1.0),
            beta,
            u1_at_minus_a,
            beta_star: 0.0,
            planner,
            far,
            far_xi,
            far_u1,
        };
        ctx.beta_star = (0.5 + ctx.log2_shift() + u1_at_minus_a).rem_euclid(1.0);
        Ok(ctx)
    }

    /// `(tau / 2 pi i) log 2`, real since `tau` is imaginary.
    pub fn log2_shift(&self) -> f64 {
        (self.tau / C::new(0.0, 2.0 * PI)).re * 2f64.ln()
    }

    /// `nu = n beta - (tau / 2 pi i) log 2`.
    pub fn nu(&self, n: usize) -> f64 {
        n as f64 * self.beta - self.log2_shift()
    }

    pub fn nu_star(&self) -> f64 {
        (0.5 + self.u1_at_minus_a).rem_euclid(1.0)
    }

    /// `n` lies in `N_eps`: `dist(n beta, beta*) >= eps` on the circle, and
    /// never at an exact hit.
    pub fn in_n_epsilon(&self, n: usize, eps: f64) -> bool {
        let d = circle_dist(n as f64 * self.beta, self.beta_star);
        d >= eps && d > 0.0
    }

    /// `omega_R / (3C)` integrand on the tracked root `k`.
    fn integrate_path(&self, pts: &[C], xi0: [C; 3], k: usize) -> Result<(C, [C; 3])> {
        let params = &self.qc.geom.sheets.params;
        let mut total = C::new(0.0, 0.0);
        let mut xi = xi0;
        for w in pts.windows(2) {
            let (v, _) = integrate_from(params, w[0], w[1], xi, 1, TOL, |z, x| {
                1.0 / params.dp_dxi(x[k], z)
            })?;
            total += v;
            xi = continue_segment(params, w[0], w[1], xi)?;
        }
        Ok((total * (3.0 * self.c), xi))
    }

    /// `sqrt(P_xi)` on root `k`, continued along `pts` from `s_start`.
    fn track_sqrt(&self, pts: &[C], xi0: [C; 3], k: usize, s_start: C) -> Result<C> {
        let params = &self.qc.geom.sheets.params;
        let mut xi = xi0;
        let mut s = s_start;
        for w in pts.windows(2) {
            // P_xi grows like z^4, so far out the step must shrink relative
            // to |z| for the phase to change slowly.
            let len = (w[1] - w[0]).norm();
            let mut prev = w[0];
            let mut done = 0.0;
            while done < len {
                let h = (len / 64.0).min(0.05 * prev.norm().max(self.planner.scale));
                done = (done + h).min(len);
                let z = w[0] + (w[1] - w[0]) * (done / len);
                xi = continue_segment(params, prev, z, xi)?;
                prev = z;
                let mut r = params.dp_dxi(xi[k], z).sqrt();
                if (r * s.conj()).re < 0.0 {
                    r = -r;
                }
                s = r;
            }
        }
        Ok(s)
    }

    /// Sheet-1 path from the far point to `z`, its Abel value and end triple.
    fn sheet1(&self, z: C) -> Result<(Vec<C>, C, [C; 3])> {
        let pts = self.planner.path(self.far, z, Domain::Walled)?;
        let (v, xi) = self.integrate_path(&pts, self.far_xi, 0)?;
        Ok((pts, self.far_u1 + v, xi))
    }

    fn sheet2(&self, z: C) -> Result<(C, [C; 3])> {
        let bs = &self.qc.geom.sheets.bs;
        let dy = 1e-3 * self.planner.scale;
        let (up, down) = (C::new(0.5 * bs.z1, dy), C::new(0.5 * bs.z1, -dy));
        let (_, u_up, xi_up) = self.sheet1(up)?;
        // Crossing the spine downward continues sheet 1 into sheet 2.
        let (v, xi_down) = self.integrate_path(&[up, down], xi_up, 0)?;
        let pts = self.planner.path(down, z, Domain::Walled)?;
        let (w, xi) = self.integrate_path(&pts, xi_down, 0)?;
        Ok((u_up + v + w, xi))
    }

    fn sheet3(&self, z: C) -> Result<C> {
        // u_{2,+} = u_{3,-} on the negative w-axis: from sheet 2 just inside
        // arg z = pi/3 to sheet 3 just inside arg z = -pi/3.
        let r = 0.5 * self.planner.scale;
        let (za, zb) = (C::from_polar(r, SECTOR), C::from_polar(r, -SECTOR));
        let (u_a, _) = self.sheet2(za)?;
        let xi_b = self
            .qc
            .geom
            .sheets
            .eval_side(zb, C::from_polar(1.0, PI / 6.0))?;
        let pts = self.planner.path(zb, z, Domain::Free)?;
        let (v, _) = self.integrate_path(&pts, xi_b, 2)?;
        Ok(u_a + v)
    }

    /// `u_j(w) = int_{inf_1}^{w^(j)} omega_S`, with `w` off the cuts of sheet `j`.
    pub fn abel_u(&self, sheet: usize, w: C) -> Result<C> {
        let z = principal_cbrt(w);
        match sheet {
            1 => Ok(self.sheet1(z)?.1),
            2 => Ok(self.sheet2(z)?.0),
            3 => self.sheet3(z),
            _ => Err(Error::Domain(format!("sheet {sheet}"))),
        }
    }

    /// `u_j` at the point at infinity of sheet `j`, completed along the real
    /// axis from `x0 > z1`.
    pub fn abel_u_infinity(&self, sheet: usize) -> Result<C> {
        let x0 = 2.0 * self.planner.scale;
        let w0 = x0.powi(3);
        let base = self.abel_u(sheet, C::new(w0, 0.0))?;
        let tail = self.c * self.qc.real_leg(sheet, w0, f64::INFINITY)?;
        Ok(base + tail)
    }

    /// `F = eta_1^2 / P_eta` on sheet 1.
    pub fn f_sheet1(&self, w: C) -> Result<C> {
        let eta = self.qc.eta_branches(w)?[0];
        Ok(eta * eta / self.qc.denominator(w, eta))
    }

    /// `u_1(z^3)` and `v_1 = xi_1 / sqrt(P_xi)` with `v_1(inf) = 1`, sharing one path.
    pub fn abel_and_v1(&self, z: C) -> Result<(C, C)> {
        let zs = to_sector(z);
        let (pts, u, xi) = self.sheet1(zs)?;
        let params = &self.qc.geom.sheets.params;
        let s0 = params.dp_dxi(self.far_xi[0], self.far).sqrt();
        let s = self.track_sqrt(&pts, self.far_xi, 0, s0)?;
        Ok((u, xi[0] / s))
    }

    /// The 11-entry of the model solution for even `n`.
    pub fn m_n11(&self, n: usize, z: C) -> Result<C> {
        if n % 2 == 1 {
            return Err(Error::Domain(format!("odd n = {n} is not covered")));
        }
        if circle_dist(n as f64 * self.beta, self.beta_star) < 1e-12 {
            return Err(Error::NotInIndexSet { n, eps: 0.0 });
        }
        let w = z * z * z;
        if (w + self.qc.a).norm() <= 1e-12 * self.qc.a.max(1.0) {
            return Err(Error::Pole(format!("z = {z} is a zero of xi_1")));
        }
        let (u1, v1) = self.abel_and_v1(z)?;
        let ua = C::new(self.u1_at_minus_a, 0.0);
        let big_u = u1 - ua;
        let sh = self.nu(n) - 0.5;
        let th = |s: C| theta(s, self.tau);
        let pref = (-2.0 * 2f64.ln() * u1).exp();
        Ok(
            pref * th(self.s0 - ua) / th(self.s0 + big_u) * th(self.s0 + big_u + sh)
                / th(self.s0 - ua + sh)
                * v1,
        )
    }

    /// Pieces of `c_S` from `-A`, in order.
    fn cs_pieces(&self) -> Result<Vec<Piece>> {
        let (a, w1, far) = (self.qc.a, self.qc.w1, self.qc.far());
        Ok(vec![
            Piece::W {
                sheet: 1,
                a: -a,
                b: 0.0,
            },
            Piece::W {
                sheet: 3,
                a: 0.0,
                b: far,
            },
            Piece::Out { sheet: 3, w0: far },
            Piece::In { sheet: 2, w0: far },
            Piece::W {
                sheet: 2,
                a: far,
                b: w1,
            },
            Piece::W {
                sheet: 1,
                a: w1,
                b: far,
            },
            Piece::Out { sheet: 1, w0: far },
            Piece::In { sheet: 1, w0: -far },
            Piece::W {
                sheet: 1,
                a: -far,
                b: -a,
            },
        ])
    }

    fn tail_to(&self, sheet: usize, w: f64) -> Result<f64> {
        if w.is_infinite() {
            Ok(0.0)
        } else {
            self.qc.tail(sheet, w)
        }
    }

    /// `C int omega` over a piece, from its start to coordinate `x` in `[0, 1]`.
    fn piece_partial(&self, p: &Piece, x: f64) -> Result<f64> {
        let v = match *p {
            Piece::W { sheet, a, b } => {
                let w = p.point(x);
                // Integrate from the nearer end, away from the singular one.
                if x <= 0.5 {
                    self.oriented(sheet, a, w)?
                } else {
                    self.oriented(sheet, a, b)? - self.oriented(sheet, w, b)?
                }
            }
            Piece::Out { sheet, w0 } => {
                self.qc.tail(sheet, w0)? - self.tail_to(sheet, p.point(x))?
            }
            Piece::In { sheet, w0 } => {
                let t = self.tail_to(sheet, p.point(x))?;
                if w0 < 0.0 {
                    t
                } else {
                    -t
                }
            }
        };
        Ok(self.c * v)
    }

    fn oriented(&self, sheet: usize, from: f64, to: f64) -> Result<f64> {
        if from <= to {
            self.qc.real_leg(sheet, from, to)
        } else {
            Ok(-self.qc.real_leg(sheet, to, from)?)
        }
    }

    /// `int_{-A}^{Q} omega_S` along `c_S`, for `Q` at coordinate `x` on piece `k`.
    pub fn cs_abel(&self, k: usize, x: f64) -> Result<f64> {
        let pieces = self.cs_pieces()?;
        let mut acc = 0.0;
        for p in &pieces[..k] {
            acc += self.piece_partial(p, 1.0)?;
        }
        Ok(acc + self.piece_partial(&pieces[k], x)?)
    }

    /// Point `Q_n` on `c_S` with `int_{-A}^{Q_n} omega = -n beta + (tau/2 pi i) log 2 + 1/2` mod 1.
    pub fn spurious_zero(&self, n: usize) -> Result<SpuriousZero> {
        if !self.in_n_epsilon(n, 0.0) {
            return Err(Error::NotInIndexSet { n, eps: 0.0 });
        }
        let target = (-(n as f64) * self.beta + self.log2_shift() + 0.5).rem_euclid(1.0);
        let pieces = self.cs_pieces()?;
        let mut acc = 0.0;
        for (k, p) in pieces.iter().enumerate() {
            let m = self.piece_partial(p, 1.0)?;
            if target <= acc + m || k == pieces.len() - 1 {
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if acc + self.piece_partial(p, mid)? < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let x = 0.5 * (lo + hi);
                let w = p.point(x);
                let achieved = (acc + self.piece_partial(p, x)?).rem_euclid(1.0);
                return Ok(SpuriousZero {
                    n,
                    w,
                    sheet: p.sheet(),
                    x: w.cbrt(),
                    target,
                    achieved,
                });
            }
            acc += m;
        }
        unreachable!()
    }
}

/// A piece of `c_S`. `Out` runs from `w0` to the infinity on its side, `In`
/// comes back from it.
#[derive(Debug, Clone, Copy)]
enum Piece {
    W { sheet: usize, a: f64, b: f64 },
    Out { sheet: usize, w0: f64 },
    In { sheet: usize, w0: f64 },
}

impl Piece {
    fn sheet(&self) -> usize {
        match *self {
            Piece::W { sheet, .. } | Piece::Out { sheet, .. } | Piece::In { sheet, .. } => sheet,
        }
    }

    fn point(&self, x: f64) -> f64 {
        match *self {
            Piece::W { a, b, .. } => (a + (b - a) * x).clamp(a.min(b), a.max(b)),
            Piece::Out { w0, .. } => w0 / (1.0 - x),
            Piece::In { w0, .. } => w0 / x,
        }
    }
}

/// Principal cube root, in the closed sector `|arg| <= pi/3`.
pub fn principal_cbrt(w: C) -> C {
    if w.norm() == 0.0 {
        return w;
    }
    C::from_polar(w.norm().cbrt(), w.arg() / 3.0)
}

/// Rotate `z` by a power of `omega` into the closed sector `|arg| <= pi/3`.
pub fn to_sector(z: C) -> C {
    let k = (z.arg() / (2.0 * SECTOR)).round();
    z * C::from_polar(1.0, -2.0 * SECTOR * k)
}
