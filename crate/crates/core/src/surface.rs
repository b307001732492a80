//! Validated surface models: a warping function bundled with cached
//! geometric constants (t0, m(0), inf m) and pointwise Gaussian curvature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, Expression};
use crate::jet::Jet2;
use crate::lambda::{self, LambdaParams};

pub const DEFAULT_T_MAX_SCAN: f64 = 50.0;

/// Tolerance for declaring m'(t) = 0 during the t0 search. The paper never
/// bounds how fast m may flatten at t0; this cutoff is our choice.
pub const T0_ROOT_TOL: f64 = 1e-10;

/// Below this magnitude the warping function is considered underflowed and
/// the scan horizon is truncated rather than declaring the surface invalid.
const UNDERFLOW_FLOOR: f64 = 1e-290;

#[derive(Clone, Debug)]
pub enum WarpSpec {
    Tamura,
    Lambda(LambdaParams),
    Custom(Expression),
}

/// Point on the surface (or its universal cover, where `theta` is unbounded).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub t: f64,
    pub theta: f64,
}

impl SurfacePoint {
    pub fn new(t: f64, theta: f64) -> Self {
        SurfacePoint { t, theta }
    }
}

/// sup{t > 0 : m'(t) < 0}, as far as a finite scan can certify it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NeckHeight {
    Finite(f64),
    /// m' < 0 all the way to the scan horizon; the true t0 may be infinite.
    HorizonLimited,
}

impl NeckHeight {
    pub fn as_finite(&self) -> Option<f64> {
        match self {
            NeckHeight::Finite(t) => Some(*t),
            NeckHeight::HorizonLimited => None,
        }
    }

    /// Upper end of the t-interval on which m is known to be decreasing,
    /// clamped to `horizon` when t0 is horizon-limited.
    pub fn effective(&self, horizon: f64) -> f64 {
        self.as_finite().map_or(horizon, |t| t.min(horizon))
    }
}

#[derive(Clone, Debug)]
pub struct SurfaceModel {
    spec: WarpSpec,
    t_max_scan: f64,
    /// Largest |t| at which m is representable (smaller than `t_max_scan`
    /// only when m underflows, e.g. exp(-t^2) beyond |t| ~ 27).
    t_scan_eff: f64,
    t0: NeckHeight,
    m_at_0: f64,
    inf_m: f64,
    inf_m_horizon_limited: bool,
    evenness_certified: bool,
}

/// Small JSON descriptor for a surface: {kind, params|source, t_max_scan}.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SurfaceDescriptor {
    Tamura { t_max_scan: f64 },
    Lambda { lambda: f64, t_max_scan: f64 },
    Custom { source: String, t_max_scan: f64 },
}

impl SurfaceModel {
    pub fn descriptor(&self) -> SurfaceDescriptor {
        match &self.spec {
            WarpSpec::Tamura => SurfaceDescriptor::Tamura { t_max_scan: self.t_max_scan },
            WarpSpec::Lambda(p) => {
                SurfaceDescriptor::Lambda { lambda: p.lambda(), t_max_scan: self.t_max_scan }
            }
            WarpSpec::Custom(e) => {
                SurfaceDescriptor::Custom { source: e.to_string(), t_max_scan: self.t_max_scan }
            }
        }
    }

    pub fn from_descriptor(d: &SurfaceDescriptor) -> Result<Self> {
        match d {
            SurfaceDescriptor::Tamura { t_max_scan } => {
                build_surface(WarpSpec::Tamura, *t_max_scan)
            }
            SurfaceDescriptor::Lambda { lambda, t_max_scan } => {
                build_surface(WarpSpec::Lambda(LambdaParams::new(*lambda)?), *t_max_scan)
            }
            SurfaceDescriptor::Custom { source, t_max_scan } => {
                build_surface(WarpSpec::Custom(expr::parse(source)?), *t_max_scan)
            }
        }
    }

    /// m(t) with first and second derivative.
    pub fn m_jet(&self, t: f64) -> Result<Jet2> {
        match &self.spec {
            WarpSpec::Tamura => {
                let m = (-t * t).exp();
                Ok(Jet2 { v: m, d1: -2.0 * t * m, d2: (4.0 * t * t - 2.0) * m })
            }
            WarpSpec::Lambda(p) => Ok(lambda::m_closed(*p, t)),
            WarpSpec::Custom(e) => expr::eval_jet(e, t),
        }
    }

    pub fn m(&self, t: f64) -> Result<f64> {
        Ok(self.m_jet(t)?.v)
    }

    /// Gaussian curvature G = -m''/m.
    pub fn gaussian_curvature(&self, t: f64) -> Result<f64> {
        match &self.spec {
            // the ratio m''/m stays exact even where m itself underflows
            WarpSpec::Tamura => Ok(2.0 - 4.0 * t * t),
            _ => {
                let j = self.m_jet(t)?;
                Ok(-j.d2 / j.v)
            }
        }
    }

    pub fn spec(&self) -> &WarpSpec {
        &self.spec
    }

    pub fn lambda_params(&self) -> Option<LambdaParams> {
        match &self.spec {
            WarpSpec::Lambda(p) => Some(*p),
            _ => None,
        }
    }

    pub fn t_max_scan(&self) -> f64 {
        self.t_max_scan
    }

    pub fn t_scan_eff(&self) -> f64 {
        self.t_scan_eff
    }

    pub fn t0(&self) -> NeckHeight {
        self.t0
    }

    pub fn m_at_0(&self) -> f64 {
        self.m_at_0
    }

    /// m(t0) when t0 is finite; otherwise the value at the scan horizon,
    /// flagged by `inf_m_horizon_limited`.
    pub fn inf_m(&self) -> f64 {
        self.inf_m
    }

    pub fn inf_m_horizon_limited(&self) -> bool {
        self.inf_m_horizon_limited
    }

    pub fn evenness_certified(&self) -> bool {
        self.evenness_certified
    }

    /// Domain of the half-period function: (inf m, m(0)).
    pub fn nu_domain(&self) -> (f64, f64) {
        (self.inf_m, self.m_at_0)
    }

    /// Smallest t > 0 with m(t) = nu, by bisection to near machine
    /// precision (the half-period integrals lose accuracy like the square
    /// root of the endpoint error, so xi must be as exact as possible).
    pub fn xi(&self, nu: f64) -> Result<f64> {
        let (lo, hi) = self.nu_domain();
        if !(nu > lo && nu < hi) {
            return Err(Error::OutOfRange { what: "nu", value: nu, lo, hi });
        }
        let t_hi = self.t0.effective(self.t_scan_eff);
        let f = |t: f64| Ok(self.m(t)? - nu);
        crate::roots::bisect(&f, 0.0, t_hi, 1e-15)
    }
}

pub fn build_surface(spec: WarpSpec, t_max_scan: f64) -> Result<SurfaceModel> {
    if !(t_max_scan > 0.0) || !t_max_scan.is_finite() {
        return Err(Error::OutOfRange {
            what: "t_max_scan",
            value: t_max_scan,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let probe = SurfaceModel {
        spec,
        t_max_scan,
        t_scan_eff: t_max_scan,
        t0: NeckHeight::HorizonLimited,
        m_at_0: 0.0,
        inf_m: 0.0,
        inf_m_horizon_limited: false,
        evenness_certified: false,
    };

    let m_at_0_jet = probe.m_jet(0.0)?;
    let m_at_0 = m_at_0_jet.v;
    if m_at_0 <= 0.0 {
        return Err(Error::NotPositive(0.0));
    }
    if m_at_0_jet.d1.abs() > 1e-10 {
        return Err(Error::NotEven(0.0));
    }

    // Positivity and evenness on a grid, truncating the scan horizon where m
    // underflows to subnormal/zero instead of rejecting the surface.
    let grid_n = 2000usize;
    let mut t_scan_eff = t_max_scan;
    let mut prev = m_at_0;
    for i in 1..=grid_n {
        let t = t_max_scan * (i as f64) / (grid_n as f64);
        if t > t_scan_eff {
            break;
        }
        let mp = probe.m_jet(t)?;
        if mp.v <= 0.0 {
            if prev < UNDERFLOW_FLOOR {
                t_scan_eff = t_max_scan * ((i - 1) as f64) / (grid_n as f64);
                break;
            }
            return Err(Error::NotPositive(t));
        }
        let mn = probe.m_jet(-t)?;
        if (mp.v - mn.v).abs() > 1e-12 * mp.v {
            return Err(Error::NotEven(t));
        }
        prev = mp.v;
    }

    let (t0, degenerate_scale) = find_t0_scan(&probe, t_scan_eff)?;
    let _ = degenerate_scale;
    let (inf_m, inf_m_horizon_limited) = match t0 {
        NeckHeight::Finite(t) => (probe.m(t)?, false),
        NeckHeight::HorizonLimited => (probe.m(t_scan_eff)?, true),
    };

    Ok(SurfaceModel { t_scan_eff, t0, m_at_0, inf_m, inf_m_horizon_limited, evenness_certified: true, ..probe })
}

/// Scan m' at step 1e-3 and bisect the first sign change.
fn find_t0_scan(s: &SurfaceModel, t_scan_eff: f64) -> Result<(NeckHeight, f64)> {
    let step = 1e-3;
    let n = (t_scan_eff / step).floor() as usize;

    // Degenerate check: m' must actually go negative somewhere near 0.
    let mut any_negative = false;
    let mut all_tiny = true;
    let probe_until = (0.5f64).min(t_scan_eff * 0.5);
    let mut k = 1;
    while (k as f64) * step <= probe_until {
        let d1 = s.m_jet((k as f64) * step)?.d1;
        if d1 < -T0_ROOT_TOL {
            any_negative = true;
            all_tiny = false;
            break;
        }
        if d1.abs() > T0_ROOT_TOL {
            all_tiny = false;
            break;
        }
        k += 1;
    }
    if all_tiny {
        return Err(Error::DegenerateAtZero);
    }
    if !any_negative {
        // m increases right away: the set {t > 0 : m'(t) < 0} is empty near 0.
        return Ok((NeckHeight::Finite(0.0), 0.0));
    }

    let mut t_prev = step;
    for i in 2..=n {
        let t = (i as f64) * step;
        let j = s.m_jet(t)?;
        if j.d1 >= 0.0 {
            if j.d1 == 0.0 && j.v < UNDERFLOW_FLOOR {
                // derivative underflow in a decaying tail, not a real root
                return Ok((NeckHeight::HorizonLimited, 0.0));
            }
            let f = |x: f64| Ok(s.m_jet(x)?.d1);
            let root = crate::roots::bisect(&f, t_prev, t, T0_ROOT_TOL)?;
            return Ok((NeckHeight::Finite(root), 0.0));
        }
        t_prev = t;
    }
    Ok((NeckHeight::HorizonLimited, 0.0))
}

/// Convenience constructors for the built-in surfaces.
pub fn tamura() -> SurfaceModel {
    build_surface(WarpSpec::Tamura, DEFAULT_T_MAX_SCAN).expect("tamura surface is valid")
}

pub fn lambda_surface(lambda: f64) -> Result<SurfaceModel> {
    build_surface(WarpSpec::Lambda(LambdaParams::new(lambda)?), DEFAULT_T_MAX_SCAN)
}

pub fn custom(source: &str, t_max_scan: f64) -> Result<SurfaceModel> {
    build_surface(WarpSpec::Custom(expr::parse(source)?), t_max_scan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tamura_constants() {
        let s = tamura();
        assert_eq!(s.t0(), NeckHeight::HorizonLimited);
        assert_eq!(s.m_at_0(), 1.0);
        assert!(s.inf_m() < 1e-200);
        assert!(s.inf_m_horizon_limited());
        assert!(s.evenness_certified());
    }

    #[test]
    fn lambda_constants() {
        let s = lambda_surface(2.0).unwrap();
        assert_eq!(s.t0(), NeckHeight::HorizonLimited);
        assert_eq!(s.m_at_0(), 1.0);
        assert!((s.inf_m() - 1.0 / 2.0f64.sqrt()).abs() < 1e-9);
        assert!(s.inf_m_horizon_limited());
    }

    #[test]
    fn cosine_surface_has_finite_neck() {
        let s = custom("2+cos(t)", 20.0).unwrap();
        match s.t0() {
            NeckHeight::Finite(t) => assert!((t - PI).abs() < 1e-10),
            other => panic!("expected finite t0, got {other:?}"),
        }
        assert!((s.inf_m() - 1.0).abs() < 1e-9);
        assert!(!s.inf_m_horizon_limited());
    }

    #[test]
    fn increasing_surface_gets_zero_neck() {
        let s = custom("exp(t^2)", 3.0).unwrap();
        assert_eq!(s.t0(), NeckHeight::Finite(0.0));
    }

    #[test]
    fn constant_surface_is_degenerate() {
        match custom("2", 10.0) {
            Err(Error::DegenerateAtZero) => {}
            other => panic!("expected DegenerateAtZero, got {other:?}"),
        }
    }

    #[test]
    fn odd_surface_rejected() {
        match custom("2+sin(t)", 10.0) {
            Err(Error::NotEven(t)) => assert_eq!(t, 0.0),
            other => panic!("expected NotEven, got {other:?}"),
        }
    }

    #[test]
    fn non_positive_surface_rejected() {
        match custom("cos(t)", 10.0) {
            Err(Error::NotPositive(_)) => {}
            other => panic!("expected NotPositive, got {other:?}"),
        }
    }

    #[test]
    fn curvature_values() {
        let s = tamura();
        assert!((s.gaussian_curvature(0.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((s.gaussian_curvature(1.0).unwrap() + 2.0).abs() < 1e-12);
        let l4 = lambda_surface(4.0).unwrap();
        assert!((l4.gaussian_curvature(0.0).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn xi_inverts_m() {
        let s = tamura();
        let x = s.xi(0.5).unwrap();
        assert!((x - (2.0f64.ln()).sqrt()).abs() < 1e-10);
        assert!((s.m(x).unwrap() - 0.5).abs() < 1e-10);

        let l2 = lambda_surface(2.0).unwrap();
        let x = l2.xi(0.8).unwrap();
        assert!((x - 0.972_955_0).abs() < 1e-6);

        // continuity at the equator: xi(nu) -> 0 as nu -> m(0)
        let x = l2.xi(1.0 - 1e-8).unwrap();
        assert!(x < 1e-3);
    }

    #[test]
    fn xi_out_of_range() {
        let l2 = lambda_surface(2.0).unwrap();
        assert!(l2.xi(0.5).is_err());
        assert!(l2.xi(1.5).is_err());
    }

    #[test]
    fn descriptor_roundtrip() {
        let s = lambda_surface(3.0).unwrap();
        let json = serde_json::to_string(&s.descriptor()).unwrap();
        let d: SurfaceDescriptor = serde_json::from_str(&json).unwrap();
        let s2 = SurfaceModel::from_descriptor(&d).unwrap();
        assert_eq!(s.m(1.3).unwrap(), s2.m(1.3).unwrap());

        let c = custom("2+cos(t)", 20.0).unwrap();
        let json = serde_json::to_string(&c.descriptor()).unwrap();
        let c2 = SurfaceModel::from_descriptor(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(c.m(0.77).unwrap(), c2.m(0.77).unwrap());
    }
}
