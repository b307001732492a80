//! Brute-force, theorem-free verification of cut-locus predictions.
//!
//! Distance is computed by shooting a dense fan of geodesics from the source,
//! tracking closest approaches to every cylinder lift of the target, and
//! refining promising directions by golden-section over the launch angle.
//! Cut points are detected as two distinct equal-length minimizers; nothing
//! here consults the half-period function or the structure theorem.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::cutlocus::{CutLocusShape, CutLocusVariant};
use crate::error::{Error, Result};
use crate::geodesic::{shoot, GeodesicTrace, Sample, StepControl};
use crate::roots::golden_min;
use crate::surface::{SurfaceModel, SurfacePoint};

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Number of launch directions in the coarse fan.
    pub fan_size: usize,
    /// Lifts k with |k| <= max_winding are searched (target theta + 2 pi k).
    pub max_winding: i32,
    /// Lengths within this of the best count as tied minimizers.
    pub tie_tol: f64,
    /// Launch angles closer than this are the same minimizer.
    pub angle_sep: f64,
    /// A refined approach counts as a hit only if it passes this close.
    pub hit_tol: f64,
    /// Coarse-fan approaches farther than this are not refined.
    pub gate: f64,
    pub ctrl: StepControl,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            fan_size: 512,
            max_winding: 2,
            tie_tol: 1e-5,
            angle_sep: 1e-3,
            hit_tol: 1e-6,
            gate: 0.25,
            ctrl: StepControl { max_step: 0.05, ..StepControl::default() },
        }
    }
}

/// One refined connection from the source to a lift of the target.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Hit {
    pub angle: f64,
    pub length: f64,
    pub winding: i32,
    /// Residual closest-approach distance of the refined shot.
    pub miss: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FanSearchResult {
    pub target: SurfacePoint,
    pub best_length: f64,
    /// Launch angles achieving within tie_tol of best_length, deduplicated
    /// by angle separation.
    pub best_angles: Vec<f64>,
    /// winding k -> shortest connection found through that lift.
    pub per_lift: Vec<(i32, f64)>,
    pub hits: Vec<Hit>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerificationReport {
    fn push(&mut self, name: &str, passed: bool, measured: f64, expected: f64, tolerance: f64) {
        self.passed &= passed;
        self.checks.push(CheckResult { name: name.to_string(), passed, measured, expected, tolerance });
    }
}

/// Cubic Hermite position interpolation between two trace samples.
fn hermite(p0: &Sample, p1: &Sample, s: f64) -> (f64, f64) {
    let h = p1.s - p0.s;
    if h <= 0.0 {
        return (p0.t, p0.theta);
    }
    let u = (s - p0.s) / h;
    let (u2, u3) = (u * u, u * u * u);
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    let t = h00 * p0.t + h10 * h * p0.vt + h01 * p1.t + h11 * h * p1.vt;
    let th = h00 * p0.theta + h10 * h * p0.vtheta + h01 * p1.theta + h11 * h * p1.vtheta;
    (t, th)
}

/// Distance proxy near the target: sqrt(dt^2 + m(t_target)^2 dtheta^2).
fn miss_at(p: (f64, f64), t_x: f64, th_x: f64, w: f64) -> f64 {
    let dt = p.0 - t_x;
    let dth = (p.1 - th_x) * w;
    (dt * dt + dth * dth).sqrt()
}

/// Closest approaches of a trace to a cover point, one per local minimum of
/// the sampled approach distance that comes within `gate`. Each is refined by
/// golden-section over arc length on the Hermite interpolant.
fn closest_approaches(
    trace: &GeodesicTrace,
    t_x: f64,
    th_x: f64,
    w: f64,
    gate: f64,
) -> Vec<(f64, f64)> {
    let samples = &trace.samples;
    let n = samples.len();
    if n < 2 {
        return Vec::new();
    }
    let d: Vec<f64> =
        samples.iter().map(|p| miss_at((p.t, p.theta), t_x, th_x, w)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || d[i] <= d[i - 1];
        let right_ok = i + 1 == n || d[i] <= d[i + 1];
        if !(left_ok && right_ok && d[i] < gate) {
            continue;
        }
        let lo = if i == 0 { 0 } else { i - 1 };
        let hi = (i + 1).min(n - 1);
        let mut eval = |s: f64| -> f64 {
            // pick the segment containing s
            let seg = if s <= samples[lo + 1].s || hi == lo + 1 { lo } else { lo + 1 };
            miss_at(hermite(&samples[seg], &samples[seg + 1], s), t_x, th_x, w)
        };
        let (s_best, d_best) = golden_min(&mut eval, samples[lo].s, samples[hi].s, 1e-11);
        out.push((s_best, d_best));
    }
    out
}

fn shot_budget(surface: &SurfaceModel, q: SurfacePoint, x: SurfacePoint, max_winding: i32) -> f64 {
    let m0 = surface.m_at_0();
    let dth = (x.theta - q.theta).abs() + 2.0 * PI * f64::from(max_winding);
    4.0 * ((x.t - q.t).abs() + m0 * dth)
}

/// Brute-force distance from `q` to `x` on the cylinder by fan search over
/// launch directions and all lifts |k| <= max_winding.
pub fn distance(
    surface: &SurfaceModel,
    q: SurfacePoint,
    x: SurfacePoint,
    cfg: &OracleConfig,
) -> Result<FanSearchResult> {
    let fan = cfg.fan_size.max(64);
    let budget = shot_budget(surface, q, x, cfg.max_winding);
    let windings: Vec<i32> = (-cfg.max_winding..=cfg.max_winding).collect();
    let w = surface.m(x.t)?;
    let angle = |i: usize| -PI + 2.0 * PI * (i as f64) / (fan as f64);

    // coarse fan: one shot per direction, evaluated against every lift
    let coarse: Vec<Vec<Option<(f64, f64)>>> = (0..fan)
        .into_par_iter()
        .map(|i| -> Result<Vec<Option<(f64, f64)>>> {
            let tr = shoot(surface, q, angle(i), budget, &cfg.ctrl)?;
            Ok(windings
                .iter()
                .map(|&k| {
                    let th_k = x.theta + 2.0 * PI * f64::from(k);
                    closest_approaches(&tr, x.t, th_k, w, cfg.gate)
                        .into_iter()
                        .min_by(|a, b| a.1.total_cmp(&b.1))
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    // basin refinement: golden-section over the angle around every coarse
    // local minimum of the approach distance
    let mut basins: Vec<(usize, usize)> = Vec::new(); // (lift index, fan index)
    for (li, _) in windings.iter().enumerate() {
        for i in 0..fan {
            let here = match coarse[i][li] {
                Some((_, d)) => d,
                None => continue,
            };
            let prev = coarse[(i + fan - 1) % fan][li].map_or(f64::INFINITY, |c| c.1);
            let next = coarse[(i + 1) % fan][li].map_or(f64::INFINITY, |c| c.1);
            if here <= prev && here <= next {
                basins.push((li, i));
            }
        }
    }

    let hits: Vec<Hit> = basins
        .into_par_iter()
        .map(|(li, i)| -> Result<Vec<Hit>> {
            let k = windings[li];
            let th_k = x.theta + 2.0 * PI * f64::from(k);
            let probe = |a: f64| -> Result<(f64, f64)> {
                let tr = shoot(surface, q, a, budget, &cfg.ctrl)?;
                Ok(closest_approaches(&tr, x.t, th_k, w, cfg.gate)
                    .into_iter()
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap_or((f64::NAN, f64::INFINITY)))
            };
            let refine = |lo: f64, hi: f64| -> Result<Option<Hit>> {
                let mut err: Option<Error> = None;
                let mut f = |a: f64| -> f64 {
                    match probe(a) {
                        Ok((_, d)) => d,
                        Err(e) => {
                            err = Some(e);
                            f64::INFINITY
                        }
                    }
                };
                let (a_best, _) = golden_min(&mut f, lo, hi, 1e-11);
                if let Some(e) = err {
                    return Err(e);
                }
                let (s_best, miss) = probe(a_best)?;
                if miss <= cfg.hit_tol && s_best.is_finite() {
                    Ok(Some(Hit { angle: a_best, length: s_best, winding: k, miss }))
                } else {
                    Ok(None)
                }
            };
            let span = 2.0 * PI / (fan as f64);
            let a0 = angle(i);
            let mut found = Vec::new();
            if let Some(h) = refine(a0 - span, a0 + span)? {
                // two minimizers can share one coarse basin when their launch
                // angles nearly coincide (e.g. the tied pair at a first cut
                // point of a source close to the equator); re-search on both
                // sides of the one just found
                let a = h.angle;
                found.push(h);
                for (lo, hi) in
                    [(a0 - span, a - 0.5 * cfg.angle_sep), (a + 0.5 * cfg.angle_sep, a0 + span)]
                {
                    if hi > lo {
                        if let Some(h2) = refine(lo, hi)? {
                            found.push(h2);
                        }
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    if hits.is_empty() {
        return Err(Error::NoHit);
    }

    let mut per_lift: Vec<(i32, f64)> = Vec::new();
    for &k in &windings {
        if let Some(best) = hits
            .iter()
            .filter(|h| h.winding == k)
            .map(|h| h.length)
            .min_by(f64::total_cmp)
        {
            per_lift.push((k, best));
        }
    }
    let best_length = per_lift.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);

    let best_angles: Vec<f64> =
        tied_representatives(&hits, cfg.tie_tol, cfg.angle_sep).iter().map(|h| h.angle).collect();

    Ok(FanSearchResult { target: x, best_length, best_angles, per_lift, hits })
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let mut d = (a - b).abs() % (2.0 * PI);
    if d > PI {
        d = 2.0 * PI - d;
    }
    d
}

/// Tied minimizers: a maximal set of launch angles, pairwise at least
/// `angle_sep` apart (circularly), whose lengths are all within `tie_tol` of
/// the shortest hit. Greedy sweep in angle order, which maximizes the count.
///
/// This definition covers both tie regimes: a transversal tie (two isolated
/// equal-length geodesics) yields two representatives, and a fold point
/// (coalescing pair at the end of a cut arc, where near-tangent directions
/// form a flat valley of near-minimal connections) yields one representative
/// per side of the tangency.
fn tied_representatives(hits: &[Hit], tie_tol: f64, angle_sep: f64) -> Vec<Hit> {
    let Some(best) = hits.iter().map(|h| h.length).min_by(f64::total_cmp) else {
        return Vec::new();
    };
    let mut tied: Vec<&Hit> = hits.iter().filter(|h| h.length <= best + tie_tol).collect();
    tied.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    let mut out: Vec<Hit> = Vec::new();
    for h in tied {
        if out.last().map_or(true, |p| h.angle - p.angle >= angle_sep) {
            out.push(*h);
        }
    }
    // circular wrap-around: first and last may be the same direction
    while out.len() > 1 {
        let first = out.first().unwrap().angle;
        let last = out.last().unwrap().angle;
        if circular_gap(first, last) < angle_sep {
            out.pop();
        } else {
            break;
        }
    }
    out
}

/// Gap between the shortest connection and the shortest one launched at
/// least `angle_sep` away from it; infinite when no such second connection
/// was found.
fn tie_margin(hits: &[Hit], angle_sep: f64) -> f64 {
    let Some(best) = hits.iter().min_by(|a, b| a.length.total_cmp(&b.length)) else {
        return f64::INFINITY;
    };
    hits.iter()
        .filter(|h| circular_gap(h.angle, best.angle) >= angle_sep)
        .map(|h| h.length - best.length)
        .min_by(f64::total_cmp)
        .unwrap_or(f64::INFINITY)
}

/// Length gap certifying a tie (small) or uniqueness (large). With two or
/// more tied representatives this is their length spread, which is tiny at a
/// genuine tie; with a unique minimizer it falls back to the margin to the
/// nearest distinct competitor.
fn tie_gap(hits: &[Hit], tie_tol: f64, angle_sep: f64) -> f64 {
    let reps = tied_representatives(hits, tie_tol, angle_sep);
    if reps.len() >= 2 {
        let lo = reps.iter().map(|h| h.length).fold(f64::INFINITY, f64::min);
        let hi = reps.iter().map(|h| h.length).fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    } else {
        tie_margin(hits, angle_sep)
    }
}

/// Independently audit a predicted cut locus by fan search. Every check is
/// recorded with its numeric evidence; failures never panic.
pub fn audit_cut_point(
    surface: &SurfaceModel,
    q: SurfacePoint,
    predicted: &CutLocusShape,
    cfg: &OracleConfig,
) -> Result<VerificationReport> {
    let mut report = VerificationReport { checks: Vec::new(), passed: true };

    // the opposite meridian belongs to the cut locus in every decided case:
    // the mirrored pair of minimizers must tie there
    if let Some(mth) = predicted.meridian_theta {
        let x = SurfacePoint::new(q.t, mth);
        match distance(surface, q, x, cfg) {
            Ok(r) => {
                let gap = tie_gap(&r.hits, cfg.tie_tol, cfg.angle_sep);
                report.push("meridian_point_tie", gap <= cfg.tie_tol, gap, 0.0, cfg.tie_tol);
            }
            Err(e) => {
                report.push("meridian_point_tie", false, f64::NAN, 0.0, cfg.tie_tol);
                report.checks.last_mut().unwrap().name = format!("meridian_point_tie ({e})");
            }
        }
    }

    if predicted.variant == CutLocusVariant::MeridianPlusParallel {
        let tp = predicted.parallel_t.unwrap_or(-q.t);
        let [phi_q, _] = predicted.theta_interval.unwrap_or([PI, PI]);

        // (i) first cut point: two equal-length minimizers at predicted distance
        let first = SurfacePoint::new(tp, q.theta + phi_q);
        match distance(surface, q, first, cfg) {
            Ok(r) => {
                let gap = tie_gap(&r.hits, cfg.tie_tol, cfg.angle_sep);
                report.push("first_cut_tie", gap <= cfg.tie_tol, gap, 0.0, cfg.tie_tol);
                let n_tied = r.best_angles.len();
                report.push("first_cut_minimizer_count", n_tied == 2, n_tied as f64, 2.0, 0.0);
                if let Some(d) = predicted.first_cut_distance {
                    report.push(
                        "first_cut_distance",
                        (r.best_length - d).abs() <= 1e-4,
                        r.best_length,
                        d,
                        1e-4,
                    );
                    // minimality: nothing strictly shorter than the prediction
                    report.push(
                        "first_cut_minimality",
                        r.best_length >= d - 1e-4,
                        r.best_length - d,
                        0.0,
                        1e-4,
                    );
                }
            }
            Err(e) => {
                report.push(&format!("first_cut_tie ({e})"), false, f64::NAN, 0.0, cfg.tie_tol);
            }
        }

        // (ii) strictly inside the arc: still two minimizers
        let inside = SurfacePoint::new(tp, q.theta + PI);
        match distance(surface, q, inside, cfg) {
            Ok(r) => {
                let gap = tie_gap(&r.hits, cfg.tie_tol, cfg.angle_sep);
                report.push("arc_interior_tie", gap <= cfg.tie_tol, gap, 0.0, cfg.tie_tol);
            }
            Err(e) => {
                report.push(&format!("arc_interior_tie ({e})"), false, f64::NAN, 0.0, cfg.tie_tol);
            }
        }

        // (iii) strictly before the arc: a unique minimizer with a real gap
        let before = SurfacePoint::new(tp, q.theta + 0.5 * phi_q);
        match distance(surface, q, before, cfg) {
            Ok(r) => {
                let gap = tie_gap(&r.hits, cfg.tie_tol, cfg.angle_sep);
                report.push(
                    "pre_arc_unique_minimizer",
                    gap > 10.0 * cfg.tie_tol,
                    gap,
                    f64::INFINITY,
                    10.0 * cfg.tie_tol,
                );
            }
            Err(e) => {
                report.push(
                    &format!("pre_arc_unique_minimizer ({e})"),
                    false,
                    f64::NAN,
                    f64::INFINITY,
                    cfg.tie_tol,
                );
            }
        }
    }

    Ok(report)
}

/// Smallest theta in (0, pi) on the parallel t = -t(q) where two distinct
/// minimizers from q tie, located by grid scan plus bisection on the tie
/// margin. The endpoint theta = pi always ties by mirror symmetry and does
/// not count: `TieNotFound` means the arc onset does not occur before it.
pub fn scan_parallel_for_cut(
    surface: &SurfaceModel,
    q: SurfacePoint,
    resolution: usize,
    cfg: &OracleConfig,
) -> Result<f64> {
    let resolution = resolution.max(8);
    let tp = -q.t;
    let margin_at = |theta: f64| -> Result<f64> {
        let x = SurfacePoint::new(tp, q.theta + theta);
        match distance(surface, q, x, cfg) {
            Ok(r) => Ok(tie_gap(&r.hits, cfg.tie_tol, cfg.angle_sep)),
            Err(Error::NoHit) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };
    // stay strictly inside (0, pi): at pi the mirror pair ties on any surface
    let mut prev_theta = 0.0;
    for i in 1..resolution {
        let theta = PI * (i as f64) / (resolution as f64);
        if margin_at(theta)? <= cfg.tie_tol {
            if i == 1 {
                return Ok(theta);
            }
            // bisect the tie predicate over (prev_theta, theta)
            let (mut lo, mut hi) = (prev_theta, theta);
            while hi - lo > 1e-4 {
                let mid = 0.5 * (lo + hi);
                if margin_at(mid)? <= cfg.tie_tol {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev_theta = theta;
    }
    Err(Error::TieNotFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::lambda_surface;

    fn small_cfg() -> OracleConfig {
        OracleConfig { fan_size: 128, max_winding: 1, ..OracleConfig::default() }
    }

    #[test]
    fn meridian_distance_is_dt() {
        let s = lambda_surface(2.0).unwrap();
        let r = distance(&s, SurfacePoint::new(0.0, 0.0), SurfacePoint::new(0.1, 0.0), &small_cfg())
            .unwrap();
        assert!((r.best_length - 0.1).abs() < 1e-6, "{}", r.best_length);
    }

    #[test]
    fn equator_distance_wraps_backwards() {
        let s = lambda_surface(2.0).unwrap();
        let x = SurfacePoint::new(0.0, 2.0 * PI - 0.1);
        let r = distance(&s, SurfacePoint::new(0.0, 0.0), x, &small_cfg()).unwrap();
        assert!((r.best_length - 0.1).abs() < 1e-6, "{}", r.best_length);
        // shortest connection winds once backwards
        let best_k = r
            .per_lift
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        assert_eq!(best_k, -1);
    }

    #[test]
    fn symmetric_pair_ties_at_opposite_meridian() {
        let s = lambda_surface(2.0).unwrap();
        let q = SurfacePoint::new(-0.3, 0.0);
        let x = SurfacePoint::new(-0.3, PI);
        let r = distance(&s, q, x, &small_cfg()).unwrap();
        let gap = tie_gap(&r.hits, 1e-5, 1e-3);
        assert!(gap <= 1e-5, "gap {gap}");
        assert!(r.best_angles.len() >= 2, "{:?}", r.best_angles);
    }

    #[test]
    fn hermite_interpolation_is_exact_on_cubics() {
        let f = |s: f64| (s * s * s - s, 2.0 * s * s);
        let df = |s: f64| (3.0 * s * s - 1.0, 4.0 * s);
        let p0 = Sample { s: 0.2, t: f(0.2).0, theta: f(0.2).1, vt: df(0.2).0, vtheta: df(0.2).1 };
        let p1 = Sample { s: 0.9, t: f(0.9).0, theta: f(0.9).1, vt: df(0.9).0, vtheta: df(0.9).1 };
        for k in 0..=10 {
            let s = 0.2 + 0.07 * f64::from(k);
            let (t, th) = hermite(&p0, &p1, s);
            assert!((t - f(s).0).abs() < 1e-12);
            assert!((th - f(s).1).abs() < 1e-12);
        }
    }

    #[test]
    fn unreachable_target_reports_no_hit() {
        let s = lambda_surface(2.0).unwrap();
        // gate of 0 suppresses every basin: nothing can qualify as a hit
        let cfg = OracleConfig { fan_size: 64, gate: 0.0, ..OracleConfig::default() };
        match distance(&s, SurfacePoint::new(0.0, 0.0), SurfacePoint::new(0.5, 1.0), &cfg) {
            Err(Error::NoHit) => {}
            other => panic!("expected NoHit, got {other:?}"),
        }
    }
}
