//! Self-verification suite: ten numbered checks pitting every numerical
//! route against an independent one (closed forms vs quadrature, quadrature
//! vs ODE shooting, exact construction vs brute-force oracle). Each check
//! returns structured pass/fail evidence instead of panicking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::cutlocus;
use crate::error::{Error, Result};
use crate::expr;
use crate::geodesic::{equator_return, first_conjugate, shoot, tangency_check, EventKind, StepControl};
use crate::halfperiod::{self, default_profile};
use crate::lambda::{self, LambdaParams};
use crate::oracle::{self, OracleConfig};
use crate::quad;
use crate::surface::{custom, lambda_surface, tamura, SurfaceModel, SurfacePoint};

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    /// Seed for every randomized sample in the suite.
    pub seed: u64,
    /// Multiplier on every tolerance (1.0 = the nominal gates).
    pub tol_scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 7, tol_scale: 1.0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub const CRITERION_COUNT: usize = 10;

pub fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "closed_form_phi_agreement",
        2 => "singular_integral_identity",
        3 => "curvature_via_ad",
        4 => "integrator_conservation",
        5 => "two_route_consistency",
        6 => "switch_height",
        7 => "cut_locus_vs_oracle",
        8 => "conjugate_points",
        9 => "hypothesis_checks",
        10 => "finite_neck_properties",
        _ => "unknown",
    }
}

/// Run one check by id (1..=10).
pub fn run_criterion(id: usize, cfg: &VerifyConfig) -> Result<CriterionResult> {
    let body = match id {
        1 => c1_phi_agreement,
        2 => c2_integral_identity,
        3 => c3_curvature_ad,
        4 => c4_conservation,
        5 => c5_two_routes,
        6 => c6_switch_height,
        7 => c7_oracle,
        8 => c8_conjugate,
        9 => c9_hypotheses,
        10 => c10_finite_neck,
        _ => {
            return Err(Error::OutOfRange {
                what: "criterion id",
                value: id as f64,
                lo: 1.0,
                hi: CRITERION_COUNT as f64,
            })
        }
    };
    let (passed, detail) = match body(cfg) {
        Ok(pd) => pd,
        Err(e) => (false, format!("errored: {e}")),
    };
    Ok(CriterionResult { id, name: criterion_name(id).to_string(), passed, detail })
}

/// Run the whole suite in order.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<CriterionResult>> {
    (1..=CRITERION_COUNT).map(|id| run_criterion(id, cfg)).collect()
}

type Outcome = Result<(bool, String)>;

fn c1_phi_agreement(cfg: &VerifyConfig) -> Outcome {
    let tol = 1e-8 * cfg.tol_scale;
    let mut worst: f64 = 0.0;
    for l in [1.5, 2.0, 4.0, 5.0] {
        let s = lambda_surface(l)?;
        let p = LambdaParams::new(l)?;
        let (lo, hi) = s.nu_domain();
        let range = hi - lo;
        for i in 0..50 {
            let nu = lo + range * (0.01 + 0.989 * (i as f64) / 49.0);
            let numeric = halfperiod::phi(&s, nu)?;
            let exact = lambda::phi_closed(p, nu)?;
            worst = worst.max((numeric - exact).abs());
        }
    }
    Ok((worst <= tol, format!("max |phi_numeric - phi_closed| = {worst:.3e} (tol {tol:.1e}), 4 surfaces x 50 nu")))
}

fn c2_integral_identity(cfg: &VerifyConfig) -> Outcome {
    let tol = 1e-7 * cfg.tol_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a: f64 = rng.gen_range(0.05..0.85);
        let b: f64 = rng.gen_range((a + 0.05)..0.95);
        // endpoint distances from the quadrature are exact where x is not
        let f = |x: f64, d_a: f64, d_b: f64| -> Result<f64> {
            Ok(1.0 / (x * (x - a) * (d_a * d_b).sqrt()))
        };
        let numeric = quad::tanh_sinh(&f, b, 1.0, 1e-10)?;
        let exact = lambda::lemma52_rhs(a, b)?;
        worst = worst.max((numeric - exact).abs());
    }
    Ok((worst <= tol, format!("max |quadrature - closed form| = {worst:.3e} (tol {tol:.1e}), 20 random (a,b)")))
}

fn c3_curvature_ad(cfg: &VerifyConfig) -> Outcome {
    let rel_tol = 1e-9 * cfg.tol_scale;
    let abs_tol = 1e-10 * cfg.tol_scale;
    let mut worst_rel: f64 = 0.0;
    for l in [1.5, 2.0, 4.0, 5.0] {
        let e = expr::parse(&format!("cosh(t)/sqrt(1+{l}*sinh(t)^2)"))?;
        let p = LambdaParams::new(l)?;
        for i in 0..=300 {
            let t = 3.0 * (i as f64) / 300.0;
            let j = expr::eval_jet(&e, t)?;
            let g_ad = -j.d2 / j.v;
            let g = lambda::curvature_closed(p, t);
            worst_rel = worst_rel.max((g_ad - g).abs() / (1.0 + g.abs()));
        }
    }
    let e = expr::parse("exp(-t^2)")?;
    let mut worst_abs: f64 = 0.0;
    for i in 0..=300 {
        let t = 3.0 * (i as f64) / 300.0;
        let j = expr::eval_jet(&e, t)?;
        let g_ad = -j.d2 / j.v;
        worst_abs = worst_abs.max((g_ad - (2.0 - 4.0 * t * t)).abs());
    }
    let pass = worst_rel <= rel_tol && worst_abs <= abs_tol;
    Ok((pass, format!("one-parameter family max rel err {worst_rel:.3e} (tol {rel_tol:.1e}); gaussian-bell max abs err {worst_abs:.3e} (tol {abs_tol:.1e})")))
}

fn c4_conservation(cfg: &VerifyConfig) -> Outcome {
    let tol = 1e-9 * cfg.tol_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(4));
    let ctrl = StepControl { abs_tol: 1e-12, rel_tol: 1e-12, ..StepControl::default() };
    let mut worst_speed: f64 = 0.0;
    let mut worst_clairaut: f64 = 0.0;
    let surfaces: Vec<(&str, SurfaceModel)> = vec![
        ("gaussian-bell", tamura()),
        ("family lambda=2", lambda_surface(2.0)?),
        ("family lambda=5", lambda_surface(5.0)?),
    ];
    for (name, s) in &surfaces {
        let unbounded_cusp = *name == "gaussian-bell";
        for _ in 0..100 {
            let t0: f64 = rng.gen_range(-1.0..1.0);
            let th0: f64 = rng.gen_range(0.0..(2.0 * PI));
            let mut angle: f64 = rng.gen_range(0.0..(2.0 * PI));
            // on the surface with an unbounded cusp, a shot that is almost
            // but not exactly meridional climbs until m underflows; keep the
            // Clairaut constant representable
            while unbounded_cusp && angle.sin().abs() * s.m(t0)? < 1e-4 {
                angle = rng.gen_range(0.0..(2.0 * PI));
            }
            let tr = shoot(s, SurfacePoint::new(t0, th0), angle, 50.0, &ctrl)?;
            for p in &tr.samples {
                let m = s.m(p.t)?;
                worst_speed =
                    worst_speed.max((p.vt * p.vt + m * m * p.vtheta * p.vtheta - 1.0).abs());
                worst_clairaut = worst_clairaut.max((m * m * p.vtheta - tr.nu).abs());
            }
        }
    }
    let pass = worst_speed <= tol && worst_clairaut <= tol;
    Ok((pass, format!("300 shots, length 50: max speed defect {worst_speed:.3e}, max Clairaut defect {worst_clairaut:.3e} (tol {tol:.1e})")))
}

fn c5_two_routes(cfg: &VerifyConfig) -> Outcome {
    let tol = 1e-6 * cfg.tol_scale;
    let mut worst_phi: f64 = 0.0;
    let mut worst_ell: f64 = 0.0;
    for s in [tamura(), lambda_surface(2.0)?] {
        let (lo, hi) = s.nu_domain();
        let range = hi - lo;
        for i in 0..20 {
            let nu = lo + range * (0.05 + 0.9 * (i as f64) / 19.0);
            let (theta, len) = equator_return(&s, nu)?;
            worst_phi = worst_phi.max((theta - halfperiod::phi(&s, nu)?).abs());
            worst_ell = worst_ell.max((len - halfperiod::ell(&s, nu)?).abs());
        }
    }
    let pass = worst_phi <= tol && worst_ell <= tol;
    Ok((pass, format!("ODE return vs quadrature, 2 surfaces x 20 nu: max |dtheta| {worst_phi:.3e}, max |dlength| {worst_ell:.3e} (tol {tol:.1e})")))
}

fn c6_switch_height(cfg: &VerifyConfig) -> Outcome {
    let tol = 1e-4 * cfg.tol_scale;
    let s5 = lambda_surface(5.0)?;
    let prof5 = default_profile(&s5, 40)?;
    let t5 = halfperiod::t_pi(&s5, &prof5)?;
    let expected = 0.44f64.sqrt().asinh();
    let err5 = (t5 - expected).abs();

    let s2 = lambda_surface(2.0)?;
    let prof2 = default_profile(&s2, 40)?;
    let t2 = halfperiod::t_pi(&s2, &prof2)?;

    let pass = err5 <= tol && t2 == 0.0;
    Ok((pass, format!("lambda=5: {t5:.6} vs {expected:.6} (err {err5:.2e}, tol {tol:.1e}); lambda=2: {t2} (expected 0)")))
}

fn c7_oracle(cfg: &VerifyConfig) -> Outcome {
    // Resolution near the arc onset is set by two scalings measured on this
    // family: just below the onset the flanking near-tangent connections miss
    // the target by ~4e-4 per radian of theta, so a loose hit tolerance fires
    // the tie early by hit_tol / 4e-4; just inside the arc the genuine pair
    // separates in launch angle like ~0.02 sqrt(theta excess), so a coarse
    // angle separation fires it late by (angle_sep / 0.02)^2. The values
    // below keep both biases near 1e-4 while the tangent-point connections
    // (miss ~5e-9, angle offset 1.5e-4) still clear both thresholds.
    let scan_cfg = OracleConfig {
        fan_size: 256,
        max_winding: 1,
        tie_tol: 1e-6,
        hit_tol: 5e-8,
        angle_sep: 3e-4,
        ..OracleConfig::default()
    };
    let audit_cfg = OracleConfig { fan_size: 384, ..OracleConfig::default() };
    let onset_tol = 2e-3 * cfg.tol_scale;

    let s5 = lambda_surface(5.0)?;
    let q = SurfacePoint::new(-0.3, 0.0);
    let p5 = LambdaParams::new(5.0)?;
    let phi_expected = lambda::phi_closed(p5, lambda::m_closed(p5, 0.3).v)?;
    let onset = oracle::scan_parallel_for_cut(&s5, q, 48, &scan_cfg)?;
    let onset_err = (onset - phi_expected).abs();

    let prof5 = default_profile(&s5, 40)?;
    let predicted = cutlocus::cut_locus(&s5, q, &prof5)?;
    let report = oracle::audit_cut_point(&s5, q, &predicted, &audit_cfg)?;
    let tie = report
        .checks
        .iter()
        .find(|c| c.name == "first_cut_tie")
        .map_or(false, |c| c.passed);
    let two = report
        .checks
        .iter()
        .find(|c| c.name == "first_cut_minimizer_count")
        .map_or(false, |c| c.passed);

    let s2 = lambda_surface(2.0)?;
    let no_tie = matches!(
        oracle::scan_parallel_for_cut(&s2, q, 48, &scan_cfg),
        Err(Error::TieNotFound)
    );

    let pass = onset_err <= onset_tol && tie && two && no_tie;
    Ok((pass, format!("lambda=5 onset {onset:.5} vs {phi_expected:.5} (err {onset_err:.2e}, tol {onset_tol:.1e}); first-cut tie: {tie}; exactly two minimizers: {two}; lambda=2 no tie in (0,pi): {no_tie}")))
}

fn c8_conjugate(cfg: &VerifyConfig) -> Outcome {
    let tol = 1e-6 * cfg.tol_scale;
    let ctrl = StepControl::default();
    let mut worst: f64 = 0.0;
    let cases: Vec<(SurfaceModel, f64)> = vec![
        (lambda_surface(2.0)?, 1.0),
        (lambda_surface(5.0)?, 4.0),
        (tamura(), 2.0),
    ];
    for (s, g0) in &cases {
        let expected = PI / g0.sqrt();
        let tr = shoot(s, SurfacePoint::new(0.0, 0.0), PI / 2.0, expected + 1.0, &ctrl)?;
        let z = first_conjugate(s, &tr)?
            .ok_or(Error::QuadratureStall { estimate: f64::NAN })?;
        worst = worst.max((z - expected).abs());
    }
    let mut meridians_clear = true;
    for (s, _) in &cases {
        let tr = shoot(s, SurfacePoint::new(0.0, 0.0), 0.0, 50.0, &ctrl)?;
        if first_conjugate(s, &tr)?.is_some() {
            meridians_clear = false;
        }
    }
    let pass = worst <= tol && meridians_clear;
    Ok((pass, format!("equator first Jacobi zero vs pi/sqrt(G(0)): max err {worst:.3e} (tol {tol:.1e}); no zero on meridians to length 50: {meridians_clear}")))
}

fn c9_hypotheses(_cfg: &VerifyConfig) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, s) in [
        ("gaussian-bell", tamura()),
        ("family lambda=2", lambda_surface(2.0)?),
        ("family lambda=5", lambda_surface(5.0)?),
    ] {
        let prof = default_profile(&s, 40)?;
        let rep = cutlocus::check_hypotheses(&s, &prof)?;
        ok &= rep.verdict && rep.phi_decreasing;
        parts.push(format!(
            "{name}: verdict {} (max phi increase {:.2e})",
            rep.verdict, rep.evidence.max_phi_increase
        ));
    }
    let s = custom("exp(t^2)", 3.0)?;
    let prof = default_profile(&s, 10)?;
    let rep = cutlocus::check_hypotheses(&s, &prof)?;
    ok &= !rep.verdict;
    parts.push(format!("exp(t^2): verdict {} (expected false)", rep.verdict));
    Ok((ok, parts.join("; ")))
}

fn c10_finite_neck(cfg: &VerifyConfig) -> Outcome {
    let drift_tol = 1e-8 * cfg.tol_scale;
    let s = custom("2+cos(t)", 20.0)?;
    let ctrl = StepControl::default();
    let m0 = s.m(0.0)?;

    let mut no_turning = true;
    for nu in [0.2, 0.5, 0.9, 0.99] {
        let tr = shoot(&s, SurfacePoint::new(0.0, 0.0), (nu / m0).asin(), 50.0, &ctrl)?;
        if tangency_check(&tr)
            || tr.events.iter().any(|e| e.kind == EventKind::EquatorCrossing)
        {
            no_turning = false;
        }
    }

    let tr = shoot(&s, SurfacePoint::new(PI, 0.0), PI / 2.0, 50.0, &ctrl)?;
    let drift = tr.samples.iter().map(|p| (p.t - PI).abs()).fold(0.0f64, f64::max);

    let pass = no_turning && drift <= drift_tol;
    Ok((pass, format!("m=2+cos(t): no turning for nu<m(neck) over length 50: {no_turning}; neck-parallel t-drift {drift:.3e} (tol {drift_tol:.1e})")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_dispatch_and_carry_names() {
        let cfg = VerifyConfig::default();
        assert!(run_criterion(0, &cfg).is_err());
        assert!(run_criterion(11, &cfg).is_err());
        let r = run_criterion(6, &cfg).unwrap();
        assert_eq!(r.name, "switch_height");
        assert!(r.passed, "{}", r.detail);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let cfg = VerifyConfig { seed: 42, tol_scale: 1.0 };
        let a = run_criterion(2, &cfg).unwrap();
        let b = run_criterion(2, &cfg).unwrap();
        assert_eq!(a.detail, b.detail);
        assert!(a.passed, "{}", a.detail);
    }
}
