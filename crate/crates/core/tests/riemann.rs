use boutroux_core::curve::CurveParams;
use boutroux_core::quad::integrate_real;
use boutroux_core::riemann::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};
use std::f64::consts::PI;
use std::sync::OnceLock;

fn ctx() -> &'static ThetaContext {
    static CTX: OnceLock<ThetaContext> = OnceLock::new();
    CTX.get_or_init(|| ThetaContext::boutroux(0.2).unwrap())
}

fn cube(z: C) -> C {
    z * z * z
}

/// Random `w` whose cube root sits in the open sector, away from the cuts.
fn random_w(rng: &mut StdRng) -> C {
    let g = &ctx().qc.geom;
    let walls: Vec<C> = g
        .upper
        .points
        .iter()
        .chain(&g.lower.points)
        .copied()
        .collect();
    loop {
        let z = C::from_polar(rng.gen_range(0.05..2.5), rng.gen_range(-1.0..1.0));
        let near_wall = walls.iter().any(|p| (p - z).norm() < 0.02);
        let near_spine = z.re < g.z1() + 0.02 && z.im.abs() < 0.02;
        if !near_wall && !near_spine {
            return cube(z);
        }
    }
}

#[test]
fn eta_roots_at_special_points() {
    let qc = &ctx().qc;
    for r in qc.eta_roots(C::new(0.0, 0.0)) {
        assert!(r.norm() <= 1e-12);
    }
    assert_eq!(
        qc.eta_branches(C::new(0.0, 0.0)).unwrap(),
        [C::new(0.0, 0.0); 3]
    );
    let r = qc.eta_roots(C::new(-qc.a, 0.0));
    assert!(r.iter().any(|e| e.norm() <= 1e-12), "{r:?}");
}

#[test]
fn eta_branches_match_the_z_plane() {
    let qc = &ctx().qc;
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..20 {
        let w = random_w(&mut rng);
        let z = principal_cbrt(w);
        let xi = qc.geom.sheets.eval(z).unwrap();
        let eta = qc.eta_branches(w).unwrap();
        for j in 0..3 {
            assert!((eta[j] - z * xi[j]).norm() <= 1e-8);
            assert!(qc.residual(w, eta[j]).norm() <= 1e-10 * (1.0 + w.norm_sqr()));
        }
        let far = qc.eta_branches(C::new(1e4, 0.0)).unwrap();
        assert!((far[0] - (1e4 + 0.2)).norm() <= 1e-2, "{far:?}");
    }
}

#[test]
fn denominator_sign_pattern() {
    let qc = &ctx().qc;
    let w1 = qc.w1;
    let pts = |lo: f64, hi: f64| (0..10).map(move |k| lo + (hi - lo) * (k as f64 + 0.5) / 10.0);
    for w in pts(-5.0, -1e-3).chain(pts(w1 + 1e-3, 5.0)) {
        let (eta, d) = qc.real_branch(w, 1).unwrap();
        assert!(d > 0.0, "sheet 1 at {w}");
        assert!(
            (qc.denominator(C::new(w, 0.0), C::new(eta, 0.0)).re - d).abs()
                <= 1e-8 * d.abs().max(1.0)
        );
    }
    for w in pts(1e-3, 5.0) {
        assert!(qc.real_branch(w, 3).unwrap().1 > 0.0, "sheet 3 at {w}");
    }
    for w in pts(w1 + 1e-3, 5.0) {
        assert!(qc.real_branch(w, 2).unwrap().1 < 0.0, "sheet 2 at {w}");
    }
}

#[test]
fn normalization() {
    let c = ctx();
    assert!(c.c > 0.0);
    let again = c.c * c.qc.cs_integral().unwrap();
    assert!((again - 1.0).abs() <= 1e-8, "{again}");
}

#[test]
fn tau_and_the_b_periods() {
    let c = ctx();
    assert!(c.tau.re.abs() <= 1e-8 && c.tau.im > 0.0, "{}", c.tau);
    let b = c.b_period;
    assert!((b - 0.5 * (1.0 + c.tau)).norm() <= 1e-7, "{b}");
    assert!((b.conj() - 0.5 * (1.0 - c.tau)).norm() <= 1e-7);
    assert!((b + b.conj() - 1.0).norm() <= 1e-7);
}

#[test]
fn abel_map_at_infinity() {
    let c = ctx();
    assert!(c.abel_u(1, C::new(1e9, 0.0)).unwrap().norm() <= 1e-8);
    let (u2, u3) = (c.abel_u_infinity(2).unwrap(), c.abel_u_infinity(3).unwrap());
    assert!((u2 - u3).norm() <= 1e-8, "{u2} {u3}");
}

#[test]
fn abel_sum_is_constant() {
    let c = ctx();
    let mut rng = StdRng::seed_from_u64(11);
    let sums: Vec<C> = (0..10)
        .map(|_| {
            let w = random_w(&mut rng);
            (1..=3).map(|j| c.abel_u(j, w).unwrap()).sum()
        })
        .collect();
    for s in &sums {
        assert!((s - sums[0]).norm() <= 1e-7, "{sums:?}");
    }
    let at_inf = c.abel_u_infinity(2).unwrap() + c.abel_u_infinity(3).unwrap();
    assert!((sums[0] - at_inf).norm() <= 1e-7);
}

#[test]
fn abel_jumps_on_the_spine_and_negative_axis() {
    let c = ctx();
    // The one-sided error is O(d).
    let d = 1e-9;
    for k in 1..=5 {
        let x = c.qc.geom.z1() * k as f64 / 6.0;
        let (up, dn) = (cube(C::new(x, d)), cube(C::new(x, -d)));
        let a = c.abel_u(1, up).unwrap() - c.abel_u(2, dn).unwrap();
        let b = c.abel_u(1, dn).unwrap() - c.abel_u(2, up).unwrap();
        assert!(a.norm() <= 1e-7 && b.norm() <= 1e-7, "{x}: {a} {b}");
    }
    for k in 1..=5 {
        let w = -0.3 * k as f64;
        let a = c.abel_u(2, C::new(w, d)).unwrap() - c.abel_u(3, C::new(w, -d)).unwrap();
        let b = c.abel_u(3, C::new(w, d)).unwrap() - c.abel_u(2, C::new(w, -d)).unwrap();
        assert!(a.norm() <= 1e-7 && b.norm() <= 1e-7, "{w}: {a} {b}");
    }
}

#[test]
fn abel_jumps_on_the_whiskers() {
    let c = ctx();
    let d = 1e-9;
    let g = &c.qc.geom;
    // Oriented from w1; + is the left side.
    for (pts, want) in [
        (&g.upper.points, 0.5 * (c.tau - 1.0)),
        (&g.lower.points, -0.5 * (1.0 + c.tau)),
    ] {
        for k in 1..=5 {
            let i = k * (pts.len() - 1) / 6;
            let e = pts[i + 1] - pts[i - 1];
            let n = C::new(0.0, 1.0) * e / e.norm();
            let (l, r) = (cube(pts[i] + n * d), cube(pts[i] - n * d));
            let a = c.abel_u(1, l).unwrap() - c.abel_u(2, r).unwrap();
            let b = c.abel_u(1, r).unwrap() - c.abel_u(2, l).unwrap();
            assert!(
                (a - want).norm() <= 1e-7 && (b - want).norm() <= 1e-7,
                "{a} {b} vs {want}"
            );
        }
    }
}

#[test]
fn f_at_the_origin_and_infinity() {
    let c = ctx();
    let f0 = c.f_sheet1(C::from_polar(1e-24, 1.0)).unwrap();
    assert!((f0 - 1.0 / 3.0).norm() <= 1e-7, "{f0}");
    let f_inf = c.f_sheet1(C::new(1e10, 0.0)).unwrap();
    assert!((f_inf - 1.0).norm() <= 1e-8, "{f_inf}");
}

#[test]
fn theta_identities() {
    let tau = ctx().tau;
    let i = C::new(0.0, 1.0);
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..5 {
        let s = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
        let th = theta(s, tau);
        assert!((theta(s + 1.0, tau) - th).norm() <= 1e-12);
        assert!((theta(-s, tau) - th).norm() <= 1e-12);
        let p = 0.5 * (1.0 + tau);
        let want = (-i * PI * p - 2.0 * PI * i * s).exp() * th;
        assert!((theta(s + p, tau) - want).norm() <= 1e-12 * want.norm().max(1.0));
    }
    assert!(theta(ctx().s0, tau).norm() <= 1e-12);
}

/// `int_{-inf}^{-A^(1/3)} 3 C dz / P_xi` on the real root, in the z-plane.
fn u1_minus_a_in_z(c: &ThetaContext) -> f64 {
    let p = CurveParams::new(c.qc.t, c.qc.a).unwrap();
    let f = |z: f64| {
        let r = p.roots(C::new(z, 0.0));
        let xi = r
            .iter()
            .min_by(|a, b| a.im.abs().total_cmp(&b.im.abs()))
            .unwrap();
        3.0 * c.c / p.dp_dxi(*xi, C::new(z, 0.0)).re
    };
    let (za, big) = (-c.qc.a.cbrt(), 4.0);
    let head = integrate_real(-big, za, 1e-13, f).unwrap();
    // z = -big / v
    let tail = integrate_real(0.0, 1.0, 1e-13, |v| {
        if v == 0.0 {
            0.0
        } else {
            f(-big / v) * big / (v * v)
        }
    })
    .unwrap();
    head + tail
}

#[test]
fn beta_star_is_real_and_consistent() {
    let c = ctx();
    let u = c.abel_u(1, C::new(-c.qc.a, 0.0)).unwrap();
    assert!(u.im.abs() <= 1e-8, "{u}");
    let bs = (0.5 + c.log2_shift() + u.re).rem_euclid(1.0);
    assert!(circle_dist(bs, c.beta_star) <= 1e-8);
    assert!(circle_dist(c.beta_star - c.log2_shift(), c.nu_star()) <= 1e-8);
    let z_form = u1_minus_a_in_z(c);
    assert!(
        (z_form - c.u1_at_minus_a).abs() <= 1e-8,
        "{z_form} vs {}",
        c.u1_at_minus_a
    );
}

#[test]
fn index_set() {
    let c = ctx();
    let eps = 0.01;
    let excluded = (1..=10_000).filter(|&n| !c.in_n_epsilon(n, eps)).count() as f64 / 1e4;
    assert!(excluded > eps && excluded < 4.0 * eps, "{excluded}");
    assert!((1..=1000).all(|n| c.in_n_epsilon(n, 0.0)));
    for n in 1..=1000 {
        if c.in_n_epsilon(n, 0.05) {
            assert!(c.in_n_epsilon(n, 0.02));
        }
    }
}

#[test]
fn m_n11_is_finite_at_the_zero_of_xi1() {
    let c = ctx();
    let za = -c.qc.a.cbrt();
    let (m4, m5) = (
        c.m_n11(10, C::new(za + 1e-4, 0.0)).unwrap(),
        c.m_n11(10, C::new(za + 1e-5, 0.0)).unwrap(),
    );
    assert!(
        m4.norm().is_finite() && (m4.norm() / m5.norm() - 1.0).abs() <= 0.1,
        "{m4} {m5}"
    );
}

#[test]
fn m_n11_tends_to_one() {
    let c = ctx();
    for n in [2, 10, 40] {
        for arg in [0.0, 0.4, -0.9, 1.0, 2.0, PI] {
            let (a, b) = (
                c.m_n11(n, C::from_polar(1e3, arg)).unwrap(),
                c.m_n11(n, C::from_polar(1e4, arg)).unwrap(),
            );
            assert!(
                (a - b).norm() <= 1e-2 && (b - 1.0).norm() <= 1e-2,
                "{arg}: {a} {b}"
            );
        }
    }
    assert!(c.m_n11(3, C::new(1.0, 1.0)).is_err());
}

#[test]
fn spurious_zeros_on_the_first_sheet() {
    let c = ctx();
    let mut hits = 0;
    for n in (2..=40).step_by(2) {
        let q = c.spurious_zero(n).unwrap();
        assert!(circle_dist(q.achieved, q.target) <= 1e-8, "{q:?}");
        if q.sheet != 1 {
            continue;
        }
        hits += 1;
        let x = C::new(q.x, 0.0);
        let scale = (0..8)
            .map(|k| {
                c.m_n11(
                    n,
                    x + C::from_polar(0.05 * q.x.abs().max(0.2), k as f64 * PI / 4.0 + 0.1),
                )
                .unwrap()
                .norm()
            })
            .fold(0.0, f64::max);
        for j in 0..3 {
            let z = x * C::from_polar(1.0, 2.0 * PI * j as f64 / 3.0);
            let m = c.m_n11(n, z).unwrap();
            assert!(m.norm() <= 1e-6 * scale, "n = {n}, j = {j}: {m}");
        }
    }
    assert!(hits >= 3, "{hits}");
}

#[test]
fn tau_and_beta_vary_smoothly() {
    let at = |t: f64| {
        let c = ThetaContext::boutroux(t).unwrap();
        (c.tau, c.beta)
    };
    let (t0, t1, t2) = (at(0.2), at(0.201), at(0.21));
    assert!((t1.0 - t0.0).norm() <= 10.0 * (t2.0 - t0.0).norm());
    assert!((t1.1 - t0.1).abs() <= 10.0 * (t2.1 - t0.1).abs());
    assert!((t1.0 - t0.0).norm() > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn theta_quasi_periodicity(x in -2.0f64..2.0, y in -1.0f64..1.0) {
        let tau = ctx().tau;
        let s = C::new(x, y);
        let p = 0.5 * (1.0 + tau);
        let i = C::new(0.0, 1.0);
        let want = (-i * PI * p - 2.0 * PI * i * s).exp() * theta(s, tau);
        prop_assert!((theta(s + p, tau) - want).norm() <= 1e-11 * want.norm().max(1.0));
    }
}

#[test]
fn context_near_the_second_critical_time() {
    // w1 and A are both small here, so the real legs pass close to w = 0.
    let c = ThetaContext::boutroux(3.5).unwrap();
    assert!(c.qc.w1 < 1e-4 && c.qc.a < 0.02);
    assert!(c.tau.re.abs() <= 1e-8 && c.tau.im > 0.0, "{}", c.tau);
    assert!((c.c * c.qc.cs_integral().unwrap() - 1.0).abs() <= 1e-8);
    let leg = |lo, hi| c.qc.real_leg(1, lo, hi).unwrap();
    // On sheet 1, (-inf, -A] and [-A, 0] carry equal integrals (to rounding
    // at every t tried); the panel split near w = 0 has to keep that.
    assert!((leg(f64::NEG_INFINITY, -c.qc.a) - leg(-c.qc.a, 0.0)).abs() <= 1e-10);
}
