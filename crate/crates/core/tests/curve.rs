use boutroux_core::curve::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;

const A_02: f64 = 0.137_662_774_984_527_67;

fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn dist_to_segment(p: C, a: C, b: C) -> f64 {
    let d = b - a;
    let u = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (a + d * u - p).norm()
}

fn dist_to_cuts(s: &Sheets, z: C) -> f64 {
    s.cuts
        .segs
        .iter()
        .map(|c| dist_to_segment(z, c.a, c.b))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn root_vanishes_where_constant_term_does() {
    let p = CurveParams::new(0.3, 0.2).unwrap();
    let z = C::new(-(0.2f64).cbrt(), 0.0);
    let r = p.roots(z);
    assert!(r.iter().any(|x| x.norm() < 1e-12), "{r:?}");
}

#[test]
fn roots_at_large_z_follow_asymptotics() {
    let t = 0.2;
    let p = CurveParams::new(t, A_02).unwrap();
    let z = C::new(1e6, 0.0);
    let r = p.roots(z);
    let expect = [
        z * z + t / z,
        z.sqrt() - t / (2.0 * z),
        -z.sqrt() - t / (2.0 * z),
    ];
    for e in expect {
        let best = r
            .iter()
            .map(|x| (x - e).norm() / e.norm())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-6, "{e} vs {r:?}");
    }
}

#[test]
fn roots_collide_at_z1() {
    let p = CurveParams::new(0.2, A_02).unwrap();
    let bs = branch_points(&p, BranchMode::Strict).unwrap();
    assert!(p.discriminant_q(C::new(bs.z1.powi(3), 0.0)).norm() < 1e-9);
    let r = p.roots(C::new(bs.z1, 0.0));
    let sep = (r[0] - r[1])
        .norm()
        .min((r[1] - r[2]).norm())
        .min((r[0] - r[2]).norm());
    assert!(sep < 1e-5, "{r:?}");
}

#[test]
fn labels_at_the_anchor_direction() {
    let s = Sheets::new(CurveParams::new(0.2, A_02).unwrap(), BranchMode::Strict).unwrap();
    let z = 1e6f64;
    let xi = s.eval(C::new(z, 0.0)).unwrap();
    let r = s.params.roots(C::new(z, 0.0));
    let nearest = |target: f64| {
        *r.iter()
            .min_by(|a, b| (*a - target).norm().total_cmp(&(*b - target).norm()))
            .unwrap()
    };
    assert_eq!(xi[0], nearest(z * z));
    assert_eq!(xi[1], nearest(z.sqrt()));
    assert_eq!(xi[2], nearest(-z.sqrt()));
}

#[test]
fn labels_are_real_right_of_z1_when_subcritical() {
    let t = 0.1;
    let s = Sheets::new(
        CurveParams::new(t, a1_of_t(t).unwrap()).unwrap(),
        BranchMode::Critical,
    )
    .unwrap();
    for x in [s.bs.z1 + 0.05, s.bs.z1 + 0.5, 2.0, 5.0] {
        let xi = s.eval(C::new(x, 0.0)).unwrap();
        for v in xi {
            assert!(v.im.abs() < 1e-9, "x = {x}: {xi:?}");
        }
    }
}

#[test]
fn xi1_below_parabola_on_negative_axis_at_a3() {
    let t = 0.2;
    let s = Sheets::new(
        CurveParams::new(t, a3_of_t(t)).unwrap(),
        BranchMode::Critical,
    )
    .unwrap();
    let r2 = s.bs.z2.norm();
    for k in 1..10 {
        let x = -r2 * k as f64 / 10.0;
        let xi = s.eval(C::new(x, 0.0)).unwrap();
        assert!(xi[0].im.abs() < 1e-9, "{xi:?}");
        assert!(xi[0].re < x * x / 3.0);
    }
}

#[test]
fn discriminant_polynomial_examples() {
    let p = CurveParams::new(0.4, 0.3).unwrap();
    assert!(close(
        p.discriminant_q(C::new(0.0, 0.0)),
        C::new(-27.0 * 0.09, 0.0),
        1e-15
    ));

    let t: f64 = 0.7;
    let p = CurveParams::new(t, a3_of_t(t)).unwrap();
    let scale = 1.0 + (t - 8.0).powi(4);
    assert!(
        p.discriminant_q(C::new((t - 8.0).powi(2) / 12.0, 0.0))
            .norm()
            < 1e-10 * scale
    );
    let w = C::new(-3.0 * (1.0 + t), 0.0);
    assert!(p.discriminant_q(w).norm() < 1e-10 * scale);
    let c = p.q_coeffs();
    let dq = (3.0 * c[0] * w + 2.0 * c[1]) * w + c[2];
    assert!(dq.norm() < 1e-10 * scale, "double root: Q'(w) = {dq}");

    let p = CurveParams::new(t, 0.0).unwrap();
    for w in [C::new(0.3, 0.2), C::new(-1.5, 2.0)] {
        let f = w * (4.0 * w * w + (t * t + 20.0 * t - 8.0) * w + 4.0 * (1.0 + t).powi(3));
        assert!(close(p.discriminant_q(w), f, 1e-12));
    }
}

#[test]
fn branch_points_subcritical_closed_form() {
    let t: f64 = 0.02;
    let p = CurveParams::new(t, a1_of_t(t).unwrap()).unwrap();
    let bs = branch_points(&p, BranchMode::Critical).unwrap();
    let r = (1.0 - 8.0 * t).sqrt();
    assert!((bs.z1 - 0.75 * (1.0 - r).powf(2.0 / 3.0)).abs() < 1e-10);
    assert!(
        close(bs.z2, C::new(0.25 * (3.0 + r), 0.0), 1e-10),
        "{:?}",
        bs.z2
    );
}

#[test]
fn branch_points_triple_collision() {
    let p = CurveParams::new(T_STAR, A_STAR).unwrap();
    let bs = branch_points(&p, BranchMode::Critical).unwrap();
    for z in [C::new(bs.z1, 0.0), bs.z2, bs.z3] {
        assert!(close(z, C::new(Z_STAR, 0.0), 1e-5), "{z}");
    }
    assert!(branch_points(&p, BranchMode::Strict).is_err());
}

#[test]
fn branch_points_degenerate_curve() {
    let t: f64 = 3.591_121_474;
    let p = CurveParams::new(t, 0.0).unwrap();
    let bs = branch_points(&p, BranchMode::Critical).unwrap();
    assert_eq!(bs.z1, 0.0);
    let w = C::new(8.0 - 20.0 * t - t * t, (t * (8.0 - t).powi(3)).sqrt());
    let z2 = 0.5 * w.powf(1.0 / 3.0);
    assert!(close(bs.z2, z2, 1e-10), "{:?} vs {z2}", bs.z2);
    assert!(close(bs.z3, z2.conj(), 1e-10));
}

#[test]
fn branch_set_invariants() {
    let p = CurveParams::new(0.2, A_02).unwrap();
    let bs = branch_points(&p, BranchMode::Strict).unwrap();
    assert!(bs.z1 > 0.0);
    assert_eq!(bs.z3, bs.z2.conj());
    assert!(bs.z2.im > 0.0 && bs.z2.arg() <= std::f64::consts::FRAC_PI_3);
    for w in bs.w {
        assert!(p.discriminant_q(w).norm() <= 1e-9 * (1.0 + w.norm().powi(3)));
    }
}

#[test]
fn critical_constants() {
    assert!((a1_of_t(T_STAR).unwrap() - A_STAR).abs() < 1e-15);
    assert_eq!(a1_of_t(0.0).unwrap(), 0.0);
    assert_eq!(a2_of_t(0.0).unwrap(), 1.0 / 16.0);
    assert_eq!(a3_of_t(8.0), 0.0);
    assert!(a1_of_t(0.2).is_err());
    assert!(a2_of_t(0.2).is_err());
}

#[test]
fn discriminant_of_q_vanishes_at_special_constants() {
    for k in 0..20 {
        let ts = 0.125 * k as f64 / 19.0;
        for a in [a1_of_t(ts).unwrap(), a2_of_t(ts).unwrap()] {
            assert!(discriminant_of_q(ts, a).abs() < 1e-8, "t = {ts}, A = {a}");
        }
        let tl = 0.1 + 7.8 * k as f64 / 19.0;
        let d = discriminant_of_q(tl, a3_of_t(tl));
        assert!(d.abs() < 1e-8 * (1.0 + tl).powi(9), "t = {tl}: {d}");
    }
}

#[test]
fn constant_path_returns_seed() {
    let p = CurveParams::new(0.2, A_02).unwrap();
    let z = C::new(0.3, 0.4);
    let r = p.roots(z);
    let out = continue_xi_pair(&p, &[z], [r[0], r[1]]).unwrap();
    assert_eq!(out, vec![[r[0], r[1]]]);
}

#[test]
fn difference_stays_positive_right_of_z1() {
    let s = Sheets::new(CurveParams::new(0.2, A_02).unwrap(), BranchMode::Strict).unwrap();
    let z1 = s.bs.z1;
    let start = s.eval(C::new(10.0, 0.0)).unwrap();
    let path: Vec<C> = (0..=200)
        .map(|k| C::new(10.0 - (10.0 - z1) * k as f64 / 200.5, 0.0))
        .collect();
    let out = continue_xi_pair(&s.params, &path, [start[0], start[1]]).unwrap();
    for [a, b] in out {
        let d = a - b;
        assert!(d.re > 0.0 && d.im.abs() < 1e-9 * (1.0 + d.re), "{d}");
    }
}

#[test]
fn small_loop_around_z1_exchanges_the_pair() {
    let s = Sheets::new(CurveParams::new(0.2, A_02).unwrap(), BranchMode::Strict).unwrap();
    let z1 = s.bs.z1;
    let r = 1e-3;
    let path: Vec<C> = (0..=64)
        .map(|k| z1 + C::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / 64.0))
        .collect();
    let start = s.eval(path[0]).unwrap();
    let end = continue_path(&s.params, &path, start).unwrap();
    assert!(
        close(end[0], start[1], 1e-12) && close(end[1], start[0], 1e-12),
        "{start:?} -> {end:?}"
    );
    assert!(close(end[2], start[2], 1e-12));
}

#[test]
fn labeled_roots_respect_rotation_and_reflection() {
    let s = Sheets::new(CurveParams::new(0.2, A_02).unwrap(), BranchMode::Strict).unwrap();
    let w2 = OMEGA * OMEGA;
    let mut checked = 0;
    for i in 0..12 {
        for j in 0..12 {
            let z = C::new(-1.7 + 0.31 * i as f64, -1.6 + 0.29 * j as f64);
            if dist_to_cuts(&s, z) < 0.05
                || dist_to_cuts(&s, OMEGA * z) < 0.05
                || dist_to_cuts(&s, z.conj()) < 0.05
            {
                continue;
            }
            let a = s.eval(z).unwrap();
            let b = s.eval(OMEGA * z).unwrap();
            let c = s.eval(z.conj()).unwrap();
            for k in 0..3 {
                assert!(
                    close(b[k], w2 * a[k], 1e-9 * (1.0 + a[k].norm())),
                    "z = {z}, sheet {k}"
                );
                assert!(
                    close(c[k], a[k].conj(), 1e-9 * (1.0 + a[k].norm())),
                    "z = {z}, sheet {k}"
                );
            }
            checked += 1;
        }
    }
    assert!(checked > 50);
}

proptest! {
    #[test]
    fn vieta_relations(t in 0.01f64..6.0, a in 0.0f64..3.0, re in -50.0f64..50.0, im in -50.0f64..50.0) {
        let p = CurveParams::new(t, a).unwrap();
        let z = C::new(re, im);
        let r = p.roots(z);
        let scale = |v: C| 1e-9 * v.norm().max(1.0);
        let s1 = r[0] + r[1] + r[2];
        let s2 = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
        let s3 = r[0] * r[1] * r[2];
        prop_assert!((s1 - z * z).norm() <= scale(z * z));
        prop_assert!((s2 + (1.0 + t) * z).norm() <= 1e-9 * (z.norm() * (1.0 + t) + z.norm().powi(3)).max(1.0));
        prop_assert!((s3 + z * z * z + a).norm() <= scale(z * z * z));
        for x in r {
            prop_assert!(p.p(x, z).norm() <= 1e-10 * z.norm().powi(6).max(1.0));
        }
    }

    #[test]
    fn closed_form_discriminant_matches_coefficients(t in 0.01f64..8.0, a in 0.0f64..4.0) {
        let c = CurveParams::new(t, a).unwrap().q_coeffs();
        let (a3, b, cc, d) = (c[0], c[1], c[2], c[3]);
        let direct = 18.0 * a3 * b * cc * d - 4.0 * b.powi(3) * d + b * b * cc * cc - 4.0 * a3 * cc.powi(3) - 27.0 * a3 * a3 * d * d;
        let scale = 1.0 + b.abs().powi(2) * cc.abs().powi(2) + cc.abs().powi(3) * 4.0 + d.abs() * b.abs().powi(3) * 4.0;
        prop_assert!((discriminant_of_q(t, a) - direct).abs() <= 1e-11 * scale);
    }
}
