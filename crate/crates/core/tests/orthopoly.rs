use boutroux_core::curve::{omega_pow, OMEGA};
use boutroux_core::exec::Exec;
use boutroux_core::geometry::{ArmId, Geometry};
use boutroux_core::orthopoly::*;
use boutroux_core::riemann::ThetaContext;
use boutroux_core::Error;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};
use std::f64::consts::PI;
use std::sync::OnceLock;

const GAMMA_1_3: f64 = 2.678_938_534_707_747_6;
const GAMMA_2_3: f64 = 1.354_117_939_426_400_4;

fn ctx() -> &'static ThetaContext {
    static CTX: OnceLock<ThetaContext> = OnceLock::new();
    CTX.get_or_init(|| ThetaContext::boutroux(0.2).unwrap())
}

/// Oracle: Taylor steps of `y'' = z y` from the data at 0 along the segment to `z`.
fn airy_ode(z: C) -> (C, C) {
    let steps = (z.norm() / 0.1).ceil().max(1.0) as usize;
    let h = z / steps as f64;
    let (mut y, mut yp) = (C::new(AI0, 0.0), C::new(AIP0, 0.0));
    for s in 0..steps {
        let c = h * s as f64;
        let mut a = vec![y, yp];
        for k in 0..40 {
            let prev = if k == 0 { C::new(0.0, 0.0) } else { a[k - 1] };
            a.push((c * a[k] + prev) / ((k + 2) as f64 * (k + 1) as f64));
        }
        let (mut ny, mut nyp, mut hp) = (C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0));
        for (k, &ak) in a.iter().enumerate() {
            ny += ak * hp;
            if k + 1 < a.len() {
                nyp += a[k + 1] * (k + 1) as f64 * hp;
            }
            hp *= h;
        }
        y = ny;
        yp = nyp;
    }
    (y, yp)
}

/// Oracle: 20 terms of the large-argument series on the positive axis.
fn airy_series_at_infinity(x: f64) -> f64 {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (mut u, mut sum) = (1.0, 1.0);
    for k in 1..20 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        sum += u * (-1.0 / zeta).powi(k);
    }
    (-zeta).exp() / (2.0 * PI.sqrt() * x.powf(0.25)) * sum
}

#[test]
fn airy_at_the_origin() {
    let v = airy(C::new(0.0, 0.0));
    assert!((v.ai.re - 3f64.powf(-2.0 / 3.0) / GAMMA_2_3).abs() <= 1e-15);
    assert!((v.aip.re + 3f64.powf(-1.0 / 3.0) / GAMMA_1_3).abs() <= 1e-15);
}

#[test]
fn airy_matches_the_ode_oracle() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..40 {
        // Directions where Ai does not decay, so the oracle is stable.
        let z = C::from_polar(
            rng.gen_range(0.1..8.0),
            rng.gen_range(PI / 3.0..PI) * if rng.gen() { 1.0 } else { -1.0 },
        );
        let (ai, aip) = airy_ode(z);
        let v = airy(z);
        assert!(
            (v.ai - ai).norm() <= 1e-11 * ai.norm().max(1.0),
            "{z}: {} vs {ai}",
            v.ai
        );
        assert!(
            (v.aip - aip).norm() <= 1e-11 * aip.norm().max(1.0),
            "{z}: {} vs {aip}",
            v.aip
        );
    }
    for x in [0.5, 1.0, 2.0, 2.4, 2.6, 3.0] {
        let (ai, aip) = airy_ode(C::new(x, 0.0));
        let v = airy(C::new(x, 0.0));
        assert!((v.ai - ai).norm() <= 1e-11 * ai.norm(), "{x}");
        assert!((v.aip - aip).norm() <= 1e-11 * aip.norm(), "{x}");
    }
}

#[test]
fn airy_connection_formula() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..10 {
        let z = C::from_polar(rng.gen_range(0.0..15.0), rng.gen_range(-PI..PI));
        let terms = [
            airy(z).ai,
            OMEGA * airy(OMEGA * z).ai,
            OMEGA * OMEGA * airy(OMEGA * OMEGA * z).ai,
        ];
        let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        let sum: C = terms.iter().sum();
        assert!(sum.norm() <= 1e-12 * scale, "{z}: {sum}");
    }
}

#[test]
fn airy_decay_on_the_positive_axis() {
    for x in [4.0f64, 9.0] {
        let ai = airy(C::new(x, 0.0)).ai.re;
        assert!(ai > 0.0 && ai <= (-2.0 / 3.0 * x.powf(1.5)).exp());
        let tol = if x < 5.0 { 1e-4 } else { 1e-12 };
        let oracle = airy_series_at_infinity(x);
        assert!((ai - oracle).abs() <= tol * oracle, "{x}: {ai} vs {oracle}");
    }
}

#[test]
fn weights_satisfy_the_junction_rules() {
    // At z1 the two outgoing whisker weights add up to the spine weight; at
    // the origin the three outgoing spine weights cancel.
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..10 {
        let z = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (s0, s1) = weights(10, 0.2, z, ArmId::Spine(0)).unwrap();
        let (u0, u1) = weights(10, 0.2, z, ArmId::WhiskerUp(0)).unwrap();
        let (d0, d1) = weights(10, 0.2, z, ArmId::WhiskerDown(0)).unwrap();
        let scale = u0.norm() + d0.norm() + s0.norm() + u1.norm() + d1.norm() + s1.norm();
        assert!((u0 + d0 - s0).norm() <= 1e-12 * scale, "{z}");
        assert!((u1 + d1 - s1).norm() <= 1e-12 * scale, "{z}");
        let spines: Vec<(C, C)> = (0..3)
            .map(|j| weights(10, 0.2, z, ArmId::Spine(j)).unwrap())
            .collect();
        let scale: f64 = spines.iter().map(|w| w.0.norm() + w.1.norm()).sum();
        let (a, b) = spines
            .iter()
            .fold((C::new(0.0, 0.0), C::new(0.0, 0.0)), |acc, w| {
                (acc.0 + w.0, acc.1 + w.1)
            });
        assert!(a.norm() + b.norm() <= 1e-12 * scale, "{z}");
    }
}

#[test]
fn weight_symmetry() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..10 {
        let z = C::from_polar(rng.gen_range(0.0..1.5), rng.gen_range(-1.0..1.0));
        for arm in [ArmId::Spine(0), ArmId::WhiskerUp(0), ArmId::WhiskerDown(0)] {
            let (w0, w1) = weights(12, 0.2, z, arm).unwrap();
            let rot = match arm {
                ArmId::Spine(_) => ArmId::Spine(1),
                ArmId::WhiskerUp(_) => ArmId::WhiskerUp(1),
                ArmId::WhiskerDown(_) => ArmId::WhiskerDown(1),
            };
            let (r0, r1) = weights(12, 0.2, OMEGA * z, rot).unwrap();
            assert!(
                (r0 - OMEGA * OMEGA * w0).norm() <= 1e-10 * w0.norm().max(1e-300),
                "{z} {arm:?}"
            );
            assert!(
                (r1 - OMEGA * w1).norm() <= 1e-10 * w1.norm().max(1e-300),
                "{z} {arm:?}"
            );
        }
    }
}

#[test]
fn spine_weights_are_real() {
    for k in 0..=10 {
        let x = 0.07 * k as f64;
        let (w0, w1) = weights(8, 0.1, C::new(x, 0.0), ArmId::Spine(0)).unwrap();
        assert_eq!(w0.im, 0.0);
        assert_eq!(w1.im, 0.0);
    }
}

#[test]
fn unknown_arm() {
    assert!(matches!(
        weights(8, 0.1, C::new(0.1, 0.0), ArmId::Spine(3)),
        Err(Error::UnknownArm(_))
    ));
}

#[test]
fn weights_decay_along_the_ray() {
    let (n, t) = (12, 0.2);
    let r = ray_truncation(n, t, 17).unwrap();
    let at = |r: f64| {
        weights(n, t, C::from_polar(r, PI / 3.0), ArmId::WhiskerUp(0))
            .unwrap()
            .0
            .norm()
    };
    let max = (0..=200)
        .map(|k| at(r * k as f64 / 200.0))
        .fold(0.0, f64::max);
    assert!(at(r) <= 1e-16 * max, "{} vs {max}", at(r));
}

#[test]
fn moments_do_not_depend_on_the_truncation() {
    for (n, t) in [(8, 0.1), (12, 0.2)] {
        let m_max = n / 2 - 1 + n;
        let a = Moments::compute(n, t, m_max, 1.0, 1e-11, Exec::Parallel).unwrap();
        let b = Moments::compute(n, t, m_max, 2.0, 1e-11, Exec::Sequential).unwrap();
        for (x, y) in [(&a.mu0, &b.mu0), (&a.mu1, &b.mu1)] {
            let scale = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for m in 0..=m_max {
                assert!(
                    (x[m] - y[m]).norm() <= 1e-12 * scale,
                    "n {n} m {m}: {} vs {}",
                    x[m],
                    y[m]
                );
            }
        }
    }
}

#[test]
fn degree_zero_and_two() {
    let p = solve_orthogonality(0, 0.1).unwrap();
    assert_eq!(p.coeffs, vec![C::new(1.0, 0.0)]);
    let p = solve_orthogonality(2, 0.1).unwrap();
    assert!(p.residual <= 1e-10, "{}", p.residual);
    // Only degrees = n mod 3 survive, so P_{2,2} = z^2.
    assert!(p.coeffs[0].norm() + p.coeffs[1].norm() <= 1e-12);
    assert!(matches!(solve_orthogonality(3, 0.1), Err(Error::Domain(_))));
    assert!(matches!(
        solve_orthogonality(18, 0.1),
        Err(Error::Domain(_))
    ));
}

#[test]
fn moment_residual_small() {
    for n in [2, 4, 8, 12] {
        let p = solve_orthogonality(n, 0.1).unwrap();
        assert!(p.residual <= 1e-10, "n {n}: {}", p.residual);
    }
}

#[test]
fn coefficients_are_real_and_sparse() {
    for (n, t) in [(8, 0.1), (12, 0.1), (8, 0.2), (12, 0.2)] {
        let p = solve_orthogonality(n, t).unwrap();
        assert!(p.imag_ratio() <= 1e-8, "n {n} t {t}: {}", p.imag_ratio());
        assert!(
            p.off_class_ratio() <= 1e-8,
            "n {n} t {t}: {}",
            p.off_class_ratio()
        );
    }
}

#[test]
fn conditioning_stays_below_the_limit() {
    let mut last = 0.0;
    for n in [4, 6, 8, 10, 12] {
        let p = solve_orthogonality(n, 0.1).unwrap();
        eprintln!("t = 0.1, n = {n}: cond {:.3e}", p.cond);
        assert!(!p.ill_conditioned && p.cond < COND_LIMIT);
        assert!(p.cond >= 0.1 * last, "n {n}");
        last = p.cond;
    }
}

#[test]
fn roots_of_simple_polynomials() {
    let mut r = monic_roots(&[C::new(-1.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)]);
    r.sort_by(|a, b| a.re.total_cmp(&b.re));
    assert!(
        (r[0] + 1.0).norm() <= 1e-14 && (r[1] - 1.0).norm() <= 1e-14,
        "{r:?}"
    );
    let mut rng = StdRng::seed_from_u64(13);
    let roots: Vec<C> = (0..6)
        .map(|_| C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect();
    let mut coeffs = vec![C::new(1.0, 0.0)];
    for &x in &roots {
        let mut next = vec![C::new(0.0, 0.0); coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= x * c;
        }
        coeffs = next;
    }
    let found = monic_roots(&coeffs);
    for x in roots {
        let d = found
            .iter()
            .map(|y| (x - y).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(d <= 1e-9, "{x}: {d}");
    }
    // z^2 (z^3 - 8) has an exact double root at the origin.
    let mut c = vec![C::new(0.0, 0.0); 6];
    c[2] = C::new(-8.0, 0.0);
    c[5] = C::new(1.0, 0.0);
    let r = monic_roots(&c);
    assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
    assert!(
        r.iter()
            .filter(|z| z.norm() > 0.0)
            .all(|z| (z.norm() - 2.0).abs() <= 1e-13),
        "{r:?}"
    );
}

#[test]
fn zeros_have_z3_symmetry() {
    let p = solve_orthogonality(8, 0.1).unwrap();
    assert!(p.off_class_ratio() <= 1e-8);
    let zeros = poly_zeros(&p);
    assert_eq!(zeros.len(), 8);
    for &z in &zeros {
        let d = zeros
            .iter()
            .map(|&y| (OMEGA * z - y).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(d <= 1e-6, "{z}: {d}");
        assert!(p.eval(z).norm() <= 1e-8 * (1.0 + z.norm()).powi(8));
    }
}

#[test]
fn subcritical_zeros_approach_the_spines() {
    let t: f64 = 0.1;
    let z1 = 0.75 * (1.0 - (1.0 - 8.0 * t).sqrt()).powf(2.0 / 3.0);
    let mean = |n: usize| {
        let p = solve_orthogonality(n, t).unwrap();
        let d: Vec<f64> = poly_zeros(&p)
            .iter()
            .map(|&z| distance_to_spines(z, z1))
            .collect();
        (
            d.iter().sum::<f64>() / n as f64,
            d.iter().fold(0.0f64, |a, &b| a.max(b)),
            p.cond,
        )
    };
    let (m8, max8, _) = mean(8);
    let (m12, max12, cond12) = mean(12);
    assert!(max8 <= 0.15 && max12 <= 0.15, "{max8} {max12}");
    // Both sit on the spines up to the accuracy of the moment solve, so the
    // comparison is made at that accuracy.
    let acc = cond12 * f64::EPSILON * z1;
    assert!(m8 <= acc && m12 <= acc, "{m8} {m12} {acc}");
    assert!(m12 <= m8 + acc, "{m8} {m12}");
}

#[test]
fn supercritical_comparison() {
    let c = ctx();
    let mut max_err = Vec::new();
    for n in [8, 12] {
        assert!(c.in_n_epsilon(n, 0.05));
        let r = compare_with(c, n, Exec::Parallel).unwrap();
        assert_eq!(r.zeros.len(), n);
        assert!(r.spurious_count() <= 3, "{:?}", r.spurious);
        for a in &r.asymptotics {
            assert!(a.ratio_err <= 0.5, "n {n}: {a:?}");
        }
        eprintln!(
            "n = {n}: whisker fraction {:.3}, 6 beta = {:.3}",
            r.whisker_fraction,
            6.0 * c.beta
        );
        max_err.push(r.max_ratio_err());
    }
    assert!(max_err[1] < max_err[0], "{max_err:?}");
}

#[test]
fn spurious_zero_matches_the_predictor() {
    let c = ctx();
    let q = c.spurious_zero(12).unwrap();
    assert_eq!(q.sheet, 1);
    let r = compare_with(c, 12, Exec::Parallel).unwrap();
    for j in 0..3 {
        let x = omega_pow(j) * q.x;
        let d = r
            .zeros
            .iter()
            .map(|&z| (z - x).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(d <= 0.1, "{x}: {d}");
    }
    assert_eq!(r.spurious_count(), 3, "{:?}", r.zeros);
}

#[test]
fn g1_against_density_quadrature() {
    let g: &Geometry = &ctx().qc.geom;
    let z = C::from_polar(1.2, 0.4);
    let v = g1(g, z).unwrap();
    // Oracle: midpoint sums of log(z - s) against the sampled density.
    let mut sum = C::new(0.0, 0.0);
    let n = 4000;
    for arm in ArmId::all() {
        let pts = g.arm_points(arm);
        let (mut acc, total): (f64, f64) =
            (0.0, pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum());
        let ds = total / n as f64;
        let mut seg = 0;
        for k in 0..n {
            let target = (k as f64 + 0.5) * ds;
            while acc + (pts[seg + 1] - pts[seg]).norm() < target {
                acc += (pts[seg + 1] - pts[seg]).norm();
                seg += 1;
            }
            let e = pts[seg + 1] - pts[seg];
            let s = pts[seg] + e * ((target - acc) / e.norm());
            let (dens, _) = g.mu1_density(s, arm).unwrap();
            sum += (z - s).ln() * dens * ds;
        }
    }
    assert!((v - sum).norm() <= 1e-3, "{v} vs {sum}");
    assert!(matches!(g1(g, C::new(0.3, 0.0)), Err(Error::Domain(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn airy_wronskian(r in 0.0f64..20.0, th in -PI..PI) {
        // W(Ai(z), Ai(w z)) = e^{-i pi/6} / (2 pi) with w = e^{2 pi i/3}.
        let z = C::from_polar(r, th);
        let (a, b) = (airy(z), airy(OMEGA * z));
        let w = a.ai * OMEGA * b.aip - a.aip * b.ai;
        let want = C::from_polar(1.0 / (2.0 * PI), -PI / 6.0);
        let scale = (a.ai.norm() * b.aip.norm() + a.aip.norm() * b.ai.norm()).max(1.0);
        prop_assert!((w - want).norm() <= 1e-11 * scale, "{} vs {}", w, want);
    }
}
