//! Randomized invariants: jet arithmetic against finite differences,
//! algebraic jet identities, geodesic symmetries, the equal-length cut pair,
//! and metric axioms of the fan-search distance.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use revcut_core::expr::{eval_jet, parse};
use revcut_core::geodesic::{shoot, tangency_check, EventKind, Sample, StepControl};
use revcut_core::halfperiod;
use revcut_core::oracle::{distance, OracleConfig};
use revcut_core::surface::{custom, lambda_surface, SurfacePoint};

/// A family of expressions that are finite (and where needed, positive) on
/// |t| <= 2 for the sampled parameter ranges.
fn template(idx: usize, a: f64, b: f64, c: f64) -> String {
    match idx % 6 {
        0 => format!("{a}*sin({b}*t)+{c}"),
        1 => format!("cosh(t)/sqrt({a}+{b}*sinh(t)^2)"),
        2 => format!("exp(-{a}*t^2)*({b}+cos(t))"),
        3 => format!("({c}+sin(t))/({a}+cosh(t))"),
        4 => format!("log({a}+t^2+cosh(t))"),
        5 => format!("tanh({b}*t)*{c}+{a}+1"),
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// d1 matches a central difference of the value and d2 a central
    /// difference of d1, both at step 1e-5, within 1e-6 relative.
    #[test]
    fn jet_derivatives_match_finite_differences(
        idx in 0usize..6,
        a in 0.5f64..3.0,
        b in 0.1f64..2.0,
        c in -2.0f64..2.0,
        t in -2.0f64..2.0,
    ) {
        let e = parse(&template(idx, a, b, c)).unwrap();
        let h = 1e-5;
        let j = eval_jet(&e, t).unwrap();
        let up = eval_jet(&e, t + h).unwrap();
        let dn = eval_jet(&e, t - h).unwrap();
        let fd1 = (up.v - dn.v) / (2.0 * h);
        let fd2 = (up.d1 - dn.d1) / (2.0 * h);
        prop_assert!((j.d1 - fd1).abs() <= 1e-6 * (1.0 + fd1.abs()), "d1 {} vs {}", j.d1, fd1);
        prop_assert!((j.d2 - fd2).abs() <= 1e-6 * (1.0 + fd2.abs()), "d2 {} vs {}", j.d2, fd2);
    }

    /// e * (1/e) carries the jet (1, 0, 0) wherever e is nonzero.
    #[test]
    fn jet_multiplicative_inverse_identity(
        idx in 0usize..6,
        a in 0.5f64..3.0,
        b in 0.1f64..2.0,
        t in -2.0f64..2.0,
    ) {
        // positive templates only, so 1/e is defined on the whole range
        let base = template(idx, a, b, /* c = */ 0.25, );
        // shift sign-changing templates well away from zero: near a zero of e
        // the product rule cancels large terms and the 1e-12 bound is about
        // conditioning, not correctness
        let guarded = match idx % 6 {
            0 | 2 | 3 => format!("4+{base}"),
            _ => base,
        };
        let e = parse(&format!("({guarded})*(1/({guarded}))")).unwrap();
        let j = eval_jet(&e, t).unwrap();
        prop_assert!((j.v - 1.0).abs() < 1e-12);
        prop_assert!(j.d1.abs() < 1e-12);
        prop_assert!(j.d2.abs() < 1e-12);
    }

    /// Mirror symmetry in t: launching from (-u, theta) at angle pi - a
    /// traces the reflection of the launch from (u, theta) at angle a.
    #[test]
    fn shooting_respects_reflective_symmetry(
        u in -1.2f64..1.2,
        angle in 0.1f64..3.0,
    ) {
        let s = lambda_surface(3.0).unwrap();
        let ctrl = StepControl { abs_tol: 1e-12, rel_tol: 1e-12, ..StepControl::default() };
        let up = shoot(&s, SurfacePoint::new(u, 0.0), angle, 4.0, &ctrl).unwrap();
        let dn = shoot(&s, SurfacePoint::new(-u, 0.0), PI - angle, 4.0, &ctrl).unwrap();
        for k in 1..20 {
            let at = 4.0 * f64::from(k) / 20.0;
            let (t_up, th_up) = eval_at(&up.samples, at);
            let (t_dn, th_dn) = eval_at(&dn.samples, at);
            prop_assert!((t_up + t_dn).abs() < 1e-8, "s={at}: t {t_up} vs {t_dn}");
            prop_assert!((th_up - th_dn).abs() < 1e-8, "s={at}: theta {th_up} vs {th_dn}");
        }
    }
}

/// Interpolated (t, theta) of a trace at arc length `at`.
fn eval_at(samples: &[Sample], at: f64) -> (f64, f64) {
    let i = samples.partition_point(|p| p.s < at).clamp(1, samples.len() - 1);
    hermite(&samples[i - 1], &samples[i], at)
}

/// Cubic Hermite interpolation of (t, theta) between two samples.
fn hermite(p0: &Sample, p1: &Sample, s: f64) -> (f64, f64) {
    let h = p1.s - p0.s;
    let x = (s - p0.s) / h;
    let h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
    let h10 = x * (1.0 - x) * (1.0 - x);
    let h01 = x * x * (3.0 - 2.0 * x);
    let h11 = x * x * (x - 1.0);
    (
        h00 * p0.t + h10 * h * p0.vt + h01 * p1.t + h11 * h * p1.vt,
        h00 * p0.theta + h10 * h * p0.vtheta + h01 * p1.theta + h11 * h * p1.vtheta,
    )
}

/// The geodesic that first dips to its turning parallel and comes back up
/// reaches (u, phi(nu)) from (-u, 0) at arc length ell(nu): the defining
/// equal-length connection of cut-arc points.
#[test]
fn descending_geodesic_lands_at_half_period_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ctrl = StepControl { max_step: 0.01, ..StepControl::default() };
    for _ in 0..10 {
        let l = rng.gen_range(1.5..5.0);
        let u = rng.gen_range(0.1..0.8);
        let s = lambda_surface(l).unwrap();
        let m_u = s.m(u).unwrap();
        let (lo, _) = s.nu_domain();
        let nu = rng.gen_range(lo + 0.2 * (m_u - lo)..m_u - 1e-3);

        let phi = halfperiod::phi(&s, nu).unwrap();
        let ell = halfperiod::ell(&s, nu).unwrap();

        // angle with sin a = nu / m(-u) and vt < 0: descend first
        let a = PI - (nu / m_u).asin();
        let tr = shoot(&s, SurfacePoint::new(-u, 0.0), a, ell + 1.0, &ctrl).unwrap();

        // first upward crossing of t = u
        let mut crossing = None;
        for w in tr.samples.windows(2) {
            if w[0].t < u && w[1].t >= u {
                let (mut lo_s, mut hi_s) = (w[0].s, w[1].s);
                for _ in 0..80 {
                    let mid = 0.5 * (lo_s + hi_s);
                    if hermite(&w[0], &w[1], mid).0 < u {
                        lo_s = mid;
                    } else {
                        hi_s = mid;
                    }
                }
                let s_cross = 0.5 * (lo_s + hi_s);
                crossing = Some((s_cross, hermite(&w[0], &w[1], s_cross).1));
                break;
            }
        }
        let (s_cross, theta_cross) = crossing.expect("geodesic reaches the opposite parallel");
        assert!(
            (s_cross - ell).abs() < 1e-6,
            "lambda={l} u={u} nu={nu}: length {s_cross} vs ell {ell}"
        );
        assert!(
            (theta_cross - phi).abs() < 1e-6,
            "lambda={l} u={u} nu={nu}: theta {theta_cross} vs phi {phi}"
        );
    }
}

/// On a surface with a finite neck (m = 2 + cos t, neck at t = pi):
/// equator-started geodesics with nu below the neck radius never become
/// tangent to a parallel, and the neck parallel itself is a geodesic.
#[test]
fn finite_neck_tangency_and_neck_parallel()  {
    let s = custom("2+cos(t)", 20.0).unwrap();
    let ctrl = StepControl::default();
    for nu in [0.2, 0.5, 0.8, 0.95] {
        let a = (nu / 3.0f64).asin(); // m(0) = 3
        let tr = shoot(&s, SurfacePoint::new(0.0, 0.0), a, 50.0, &ctrl).unwrap();
        assert!(!tangency_check(&tr), "nu={nu} tangent to a parallel");
        assert!(
            !tr.events.iter().any(|e| e.kind == EventKind::TurningPoint),
            "nu={nu} has a turning point"
        );
    }
    let neck = shoot(&s, SurfacePoint::new(PI, 0.0), PI / 2.0, 10.0, &ctrl).unwrap();
    assert!(neck.is_parallel);
    for p in &neck.samples {
        assert!((p.t - PI).abs() < 1e-8);
    }
}

/// Fan-search distance obeys the metric axioms within oracle tolerance.
#[test]
fn oracle_distance_is_symmetric_and_triangular() {
    let s = lambda_surface(2.0).unwrap();
    let cfg = OracleConfig { fan_size: 128, max_winding: 1, ..OracleConfig::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut pt = |rng: &mut ChaCha8Rng| {
        SurfacePoint::new(rng.gen_range(-0.7..0.7), rng.gen_range(0.0..2.0 * PI))
    };

    for i in 0..10 {
        let q = pt(&mut rng);
        let x = pt(&mut rng);
        let d_qx = distance(&s, q, x, &cfg).unwrap().best_length;
        let d_xq = distance(&s, x, q, &cfg).unwrap().best_length;
        assert!((d_qx - d_xq).abs() <= 1e-4, "pair {i}: {d_qx} vs {d_xq}");
    }

    for i in 0..10 {
        let q = pt(&mut rng);
        let x = pt(&mut rng);
        let y = pt(&mut rng);
        let d_qy = distance(&s, q, y, &cfg).unwrap().best_length;
        let d_qx = distance(&s, q, x, &cfg).unwrap().best_length;
        let d_xy = distance(&s, x, y, &cfg).unwrap().best_length;
        assert!(d_qy <= d_qx + d_xy + 1e-4, "triple {i}: {d_qy} > {d_qx} + {d_xy}");
    }
}
