//! Unit-speed geodesic integration on the universal cover.
//!
//! The full second-order system in (t, theta, vt, vtheta) is integrated
//! rather than the first-order Clairaut reduction t' = ±sqrt(1 - nu^2/m^2):
//! the reduction is singular exactly at turning points, where the geometry is
//! most delicate, while the full system is regular there.
//!
//!   t'      = vt
//!   theta'  = vtheta
//!   vt'     = m m' vtheta^2
//!   vtheta' = -2 (m'/m) vt vtheta
//!
//! The Clairaut constant nu = m^2 vtheta is recorded at launch and never
//! enforced afterwards; its conservation is a diagnostic, not a constraint.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::{SurfaceModel, SurfacePoint};

/// Step-size control for the embedded Dormand-Prince 5(4) pair.
#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
    pub init_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { abs_tol: 1e-10, rel_tol: 1e-10, max_step: 0.1, init_step: 1e-3 }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sample {
    pub s: f64,
    pub t: f64,
    pub theta: f64,
    pub vt: f64,
    pub vtheta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    TurningPoint,
    EquatorCrossing,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Event {
    pub kind: EventKind,
    pub s: f64,
    pub t: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicTrace {
    /// Clairaut constant recorded at launch.
    pub nu: f64,
    pub start_angle: f64,
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    /// True when the trace runs along a parallel that is itself a geodesic
    /// (m' = 0 at its height); integrated exactly in that case.
    pub is_parallel: bool,
}

impl GeodesicTrace {
    pub fn length(&self) -> f64 {
        self.samples.last().map_or(0.0, |x| x.s)
    }

    pub fn start(&self) -> SurfacePoint {
        let s0 = &self.samples[0];
        SurfacePoint::new(s0.t, s0.theta)
    }

    /// CSV with header `s,t,theta,vt,vtheta` and an event footer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,t,theta,vt,vtheta\n");
        for p in &self.samples {
            out.push_str(&format!("{},{},{},{},{}\n", p.s, p.t, p.theta, p.vt, p.vtheta));
        }
        for e in &self.events {
            let kind = match e.kind {
                EventKind::TurningPoint => "turning_point",
                EventKind::EquatorCrossing => "equator_crossing",
            };
            out.push_str(&format!("# event,{},{},{},{}\n", kind, e.s, e.t, e.theta));
        }
        out
    }
}

// Dormand-Prince 5(4) coefficients.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One accepted/rejected DP5(4) step attempt. Returns (y_new, err_norm).
fn dp_step<const N: usize, F>(rhs: &F, s: f64, y: &[f64; N], h: f64) -> Result<([f64; N], f64)>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let add = |y: &[f64; N], ks: &[&[f64; N]], cs: &[f64], h: f64| {
        let mut out = *y;
        for (k, c) in ks.iter().zip(cs.iter()) {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
        out
    };
    let k1 = rhs(s, y)?;
    let k2 = rhs(s + h / 5.0, &add(y, &[&k1], &A2, h))?;
    let k3 = rhs(s + 3.0 * h / 10.0, &add(y, &[&k1, &k2], &A3, h))?;
    let k4 = rhs(s + 4.0 * h / 5.0, &add(y, &[&k1, &k2, &k3], &A4, h))?;
    let k5 = rhs(s + 8.0 * h / 9.0, &add(y, &[&k1, &k2, &k3, &k4], &A5, h))?;
    let k6 = rhs(s + h, &add(y, &[&k1, &k2, &k3, &k4, &k5], &A6, h))?;
    let y5 = add(y, &[&k1, &k2, &k3, &k4, &k5, &k6], &B5, h);
    let k7 = rhs(s + h, &y5)?;
    let y4 = add(y, &[&k1, &k2, &k3, &k4, &k5, &k6, &k7], &B4, h);

    let mut err_sq = 0.0;
    for i in 0..N {
        let sc = 1.0; // scale applied by caller through tolerances
        let _ = sc;
        err_sq += (y5[i] - y4[i]) * (y5[i] - y4[i]);
    }
    Ok((y5, err_sq))
}

/// Adaptive integration of y' = rhs(s, y) from `s0` to `s_end`.
/// `on_accept(s_prev, y_prev, s_new, y_new)` fires after every accepted step;
/// returning `false` stops the integration early.
pub(crate) fn integrate<const N: usize, F, G>(
    rhs: &F,
    s0: f64,
    y0: [f64; N],
    s_end: f64,
    ctrl: &StepControl,
    mut on_accept: G,
) -> Result<([f64; N], f64)>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    G: FnMut(f64, &[f64; N], f64, &[f64; N]) -> bool,
{
    let mut s = s0;
    let mut y = y0;
    let mut h = ctrl.init_step.min(ctrl.max_step).min(s_end - s0);
    if h <= 0.0 {
        return Ok((y, s));
    }
    loop {
        if s + h > s_end {
            h = s_end - s;
        }
        let (y_new, err_sq) = dp_step(rhs, s, &y, h)?;
        let mut scale_sq: f64 = 0.0;
        for i in 0..N {
            let sc = ctrl.abs_tol + ctrl.rel_tol * y[i].abs().max(y_new[i].abs());
            scale_sq = scale_sq.max(1.0 / (sc * sc));
        }
        let err = (err_sq * scale_sq / N as f64).sqrt();
        if err <= 1.0 {
            let s_new = s + h;
            let go_on = on_accept(s, &y, s_new, &y_new);
            s = s_new;
            y = y_new;
            if !go_on || s >= s_end - 1e-15 * s_end.abs().max(1.0) {
                return Ok((y, s));
            }
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
        h = h.min(ctrl.max_step);
        if h < 1e-14 {
            return Err(Error::StepFailure { s });
        }
    }
}

fn geodesic_rhs(surface: &SurfaceModel) -> impl Fn(f64, &[f64; 4]) -> Result<[f64; 4]> + '_ {
    move |_s, y: &[f64; 4]| {
        let j = surface.m_jet(y[0])?;
        let (m, mp) = (j.v, j.d1);
        // vtheta = 0 is invariant (meridians); skipping the division keeps it
        // exact even where m underflows and mp/m would be 0/0
        let vtheta_rate = if y[3] == 0.0 { 0.0 } else { -2.0 * (mp / m) * y[2] * y[3] };
        Ok([y[2], y[3], m * mp * y[3] * y[3], vtheta_rate])
    }
}

/// Integrate from a known state by `span`; used for event refinement.
fn state_after(
    surface: &SurfaceModel,
    y0: [f64; 4],
    span: f64,
    ctrl: &StepControl,
) -> Result<[f64; 4]> {
    if span <= 0.0 {
        return Ok(y0);
    }
    let rhs = geodesic_rhs(surface);
    let (y, _) = integrate(&rhs, 0.0, y0, span, ctrl, |_, _, _, _| true)?;
    Ok(y)
}

/// Shoot the unit-speed geodesic with gamma(0) = `start` and initial angle
/// `direction_angle` measured from the meridian direction d/dt. The Clairaut
/// constant nu = m(t(start)) sin(direction_angle) is recorded on the trace.
pub fn shoot(
    surface: &SurfaceModel,
    start: SurfacePoint,
    direction_angle: f64,
    length: f64,
    ctrl: &StepControl,
) -> Result<GeodesicTrace> {
    if !(length > 0.0) {
        return Err(Error::OutOfRange { what: "length", value: length, lo: 0.0, hi: f64::INFINITY });
    }
    let j0 = surface.m_jet(start.t)?;
    let m0 = j0.v;
    let (sin_a, cos_a) = (direction_angle.sin(), direction_angle.cos());
    let nu = m0 * sin_a;

    // A parallel with m' = 0 is itself a geodesic (and an unstable one:
    // integrating it numerically would drift off exponentially), so when the
    // launch is tangent to such a parallel the exact solution is followed.
    if cos_a.abs() < 1e-14 && j0.d1.abs() <= 1e-10 {
        let dtheta = sin_a.signum() / m0;
        let mut samples = Vec::new();
        let n = (length / ctrl.max_step).ceil().max(1.0) as usize;
        for i in 0..=n {
            let s = length * (i as f64) / (n as f64);
            samples.push(Sample {
                s,
                t: start.t,
                theta: start.theta + s * dtheta,
                vt: 0.0,
                vtheta: dtheta,
            });
        }
        return Ok(GeodesicTrace {
            nu,
            start_angle: direction_angle,
            samples,
            events: Vec::new(),
            is_parallel: true,
        });
    }

    let y0 = [start.t, start.theta, cos_a, sin_a / m0];
    let rhs = geodesic_rhs(surface);
    let mut samples = vec![Sample { s: 0.0, t: y0[0], theta: y0[1], vt: y0[2], vtheta: y0[3] }];
    let mut events: Vec<Event> = Vec::new();
    let mut pending: Vec<(EventKind, f64, [f64; 4], f64)> = Vec::new();

    let (_, _) = integrate(&rhs, 0.0, y0, length, ctrl, |s_prev, y_prev, s_new, y_new| {
        samples.push(Sample { s: s_new, t: y_new[0], theta: y_new[1], vt: y_new[2], vtheta: y_new[3] });
        // t sign change: equator crossing (component 0)
        if y_prev[0] != 0.0 && y_prev[0] * y_new[0] < 0.0 {
            pending.push((EventKind::EquatorCrossing, s_prev, *y_prev, s_new - s_prev));
        }
        // vt sign change: turning point (component 2)
        if y_prev[2] != 0.0 && y_prev[2] * y_new[2] < 0.0 {
            pending.push((EventKind::TurningPoint, s_prev, *y_prev, s_new - s_prev));
        }
        true
    })?;

    for (kind, s_base, y_base, width) in pending {
        let idx = match kind {
            EventKind::EquatorCrossing => 0,
            EventKind::TurningPoint => 2,
        };
        let (s_ev, y_ev) = refine_event(surface, y_base, width, idx, ctrl)?;
        events.push(Event { kind, s: s_base + s_ev, t: y_ev[0], theta: y_ev[1] });
    }
    events.sort_by(|a, b| a.s.total_cmp(&b.s));

    Ok(GeodesicTrace { nu, start_angle: direction_angle, samples, events, is_parallel: false })
}

/// Bisection on a sign bracket of state component `idx` within one step.
fn refine_event(
    surface: &SurfaceModel,
    y_base: [f64; 4],
    width: f64,
    idx: usize,
    ctrl: &StepControl,
) -> Result<(f64, [f64; 4])> {
    let g0 = y_base[idx];
    let mut lo = 0.0;
    let mut hi = width;
    for _ in 0..60 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let y_mid = state_after(surface, y_base, mid, ctrl)?;
        if g0 * y_mid[idx] <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s_ev = 0.5 * (lo + hi);
    let y_ev = state_after(surface, y_base, s_ev, ctrl)?;
    Ok((s_ev, y_ev))
}

/// Theta advance and arc length of the first return of gamma_nu (launched at
/// the equator point (0,0)) to the equator t = 0.
pub fn equator_return(surface: &SurfaceModel, nu: f64) -> Result<(f64, f64)> {
    let m0 = surface.m_at_0();
    if nu >= m0 {
        return Err(Error::OutOfRange { what: "nu", value: nu, lo: surface.inf_m(), hi: m0 });
    }
    if nu <= surface.inf_m() + 1e-12 {
        return Err(Error::NoReturn { nu });
    }
    let angle = (nu / m0).asin();
    let ctrl = StepControl::default();
    let mut budget = 20.0;
    while budget <= 20.0 * 256.0 {
        let trace = shoot(surface, SurfacePoint::new(0.0, 0.0), angle, budget, &ctrl)?;
        if let Some(ev) =
            trace.events.iter().find(|e| e.kind == EventKind::EquatorCrossing && e.s > 1e-9)
        {
            return Ok((ev.theta, ev.s));
        }
        budget *= 2.0;
    }
    Err(Error::NoReturn { nu })
}

/// First return angle phi(nu) extracted from the ODE route.
pub fn equator_return_angle(surface: &SurfaceModel, nu: f64) -> Result<f64> {
    equator_return(surface, nu).map(|(theta, _)| theta)
}

/// Smallest s > 0 at which the Jacobi field with y(0) = 0, y'(0) = 1 along
/// the traced geodesic vanishes again; `None` if it stays positive over the
/// whole trace.
///
/// The field is tracked through its Pruefer phase psi (y = r sin psi), which
/// obeys psi' = cos^2 psi + G sin^2 psi with psi(0) = 0 and crosses every
/// multiple of pi strictly upward (psi' = 1 there). The first zero of y is
/// the first crossing of pi. Unlike y itself, psi stays bounded even where
/// G is strongly negative and y would overflow.
pub fn first_conjugate(surface: &SurfaceModel, trace: &GeodesicTrace) -> Result<Option<f64>> {
    use std::f64::consts::PI;
    let length = trace.length();
    let s0 = &trace.samples[0];
    let ctrl = StepControl { abs_tol: 1e-12, rel_tol: 1e-12, ..StepControl::default() };

    fn first_pi_crossing<const N: usize, F>(
        rhs: &F,
        y0: [f64; N],
        length: f64,
        ctrl: &StepControl,
        idx: usize,
    ) -> Result<Option<f64>>
    where
        F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let mut bracket: Option<(f64, [f64; N], f64)> = None;
        integrate(rhs, 0.0, y0, length, ctrl, |sp, yp, sn, yn| {
            if yp[idx] < PI && yn[idx] >= PI {
                bracket = Some((sp, *yp, sn - sp));
                return false;
            }
            true
        })?;
        let Some((s_base, y_base, width)) = bracket else {
            return Ok(None);
        };
        let f = |ds: f64| -> Result<f64> {
            let (y, _) = integrate(rhs, 0.0, y_base, ds, ctrl, |_, _, _, _| true)?;
            Ok(y[idx] - PI)
        };
        let ds = crate::roots::bisect(&f, 0.0, width, 1e-13)?;
        Ok(Some(s_base + ds))
    }

    if trace.is_parallel {
        // constant curvature in s along a geodesic parallel
        let g = surface.gaussian_curvature(s0.t)?;
        let rhs = move |_s: f64, y: &[f64; 1]| -> Result<[f64; 1]> {
            let (sp, cp) = y[0].sin_cos();
            Ok([cp * cp + g * sp * sp])
        };
        return first_pi_crossing(&rhs, [0.0], length, &ctrl, 0);
    }

    let y0 = [s0.t, s0.theta, s0.vt, s0.vtheta, 0.0];
    let rhs = |_s: f64, y: &[f64; 5]| -> Result<[f64; 5]> {
        let j = surface.m_jet(y[0])?;
        let (m, mp) = (j.v, j.d1);
        let g = surface.gaussian_curvature(y[0])?;
        let vtheta_rate = if y[3] == 0.0 { 0.0 } else { -2.0 * (mp / m) * y[2] * y[3] };
        let (sp, cp) = y[4].sin_cos();
        Ok([y[2], y[3], m * mp * y[3] * y[3], vtheta_rate, cp * cp + g * sp * sp])
    };
    first_pi_crossing(&rhs, y0, length, &ctrl, 4)
}

/// True iff the trace contains an interior tangency to a parallel.
pub fn tangency_check(trace: &GeodesicTrace) -> bool {
    trace.events.iter().any(|e| e.kind == EventKind::TurningPoint)
}
