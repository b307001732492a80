//! The half-period function phi(nu) = 2 int_0^xi(nu) nu / (m sqrt(m^2 - nu^2)) dt
//! and the companion arc length ell(nu), plus the switch height t_pi solving
//! phi(m(t)) = pi.
//!
//! The integrands have an inverse-square-root singularity at the upper
//! endpoint (m(xi) = nu), handled by tanh-sinh quadrature. An independent
//! cross-check route (`phi_via_substitution`) removes the singularity with
//! u = sqrt(xi - t) and integrates with adaptive Gauss-Kronrod.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad;
use crate::surface::SurfaceModel;

/// Margin around the nu-domain endpoints below which evaluation is refused:
/// the conditioning of the xi(nu) root degrades there.
pub const NU_MARGIN: f64 = 1e-9;

const QUAD_TOL: f64 = 1e-11;

/// Below this distance to the turning endpoint the vanishing factor
/// m(t) - m(xi) is evaluated by its Taylor expansion at xi (using the exact
/// endpoint distance) instead of direct subtraction: the subtraction loses
/// all relative accuracy there, while the expansion keeps ~1e-10.
const ENDPOINT_SWITCH: f64 = 1e-5;

fn check_nu(surface: &SurfaceModel, nu: f64) -> Result<()> {
    let (lo, hi) = surface.nu_domain();
    if !(nu >= lo + NU_MARGIN && nu <= hi - NU_MARGIN) {
        return Err(Error::OutOfRange { what: "nu", value: nu, lo, hi });
    }
    Ok(())
}

/// Turning data for the singular integrals: the computed endpoint, the
/// snapped Clairaut value nu* = m(xi) (so the integrand factor vanishes
/// exactly at the endpoint), and the jet there for the Taylor fallback.
struct Turning {
    xi: f64,
    nu_s: f64,
    mp: f64,
    mpp: f64,
}

impl Turning {
    fn of(surface: &SurfaceModel, nu: f64) -> Result<Turning> {
        let xi = surface.xi(nu)?;
        let j = surface.m_jet(xi)?;
        Ok(Turning { xi, nu_s: j.v, mp: j.d1, mpp: j.d2 })
    }

    /// m(t) - nu* where d = xi - t is the exact endpoint distance.
    fn vanishing_factor(&self, m: f64, d: f64) -> f64 {
        if d < ENDPOINT_SWITCH {
            // m(xi - d) - m(xi) = -m'(xi) d + m''(xi) d^2/2 + O(d^3)
            d * (-self.mp + 0.5 * self.mpp * d)
        } else {
            m - self.nu_s
        }
    }
}

/// Half-period integral, tanh-sinh route, absolute accuracy target 1e-10.
pub fn phi(surface: &SurfaceModel, nu: f64) -> Result<f64> {
    check_nu(surface, nu)?;
    let tp = Turning::of(surface, nu)?;
    let f = |t: f64, _d_a: f64, d_b: f64| -> Result<f64> {
        let m = surface.m(t)?;
        // (m - nu)(m + nu) instead of m^2 - nu^2: avoids catastrophic
        // cancellation next to the singular endpoint
        let d = tp.vanishing_factor(m, d_b) * (m + tp.nu_s);
        Ok(tp.nu_s / (m * d.sqrt()))
    };
    Ok(2.0 * quad::tanh_sinh(&f, 0.0, tp.xi, QUAD_TOL)?)
}

/// Arc length of gamma_nu between consecutive equator crossings:
/// ell(nu) = 2 int_0^xi m / sqrt(m^2 - nu^2) dt.
pub fn ell(surface: &SurfaceModel, nu: f64) -> Result<f64> {
    check_nu(surface, nu)?;
    let tp = Turning::of(surface, nu)?;
    let f = |t: f64, _d_a: f64, d_b: f64| -> Result<f64> {
        let m = surface.m(t)?;
        let d = tp.vanishing_factor(m, d_b) * (m + tp.nu_s);
        Ok(m / d.sqrt())
    };
    Ok(2.0 * quad::tanh_sinh(&f, 0.0, tp.xi, QUAD_TOL)?)
}

/// Independent route: substitute u = sqrt(xi - t), which turns the
/// inverse-square-root endpoint singularity into a bounded integrand, then
/// integrate with adaptive Gauss-Kronrod.
pub fn phi_via_substitution(surface: &SurfaceModel, nu: f64) -> Result<f64> {
    check_nu(surface, nu)?;
    let xi = surface.xi(nu)?;
    let f = |u: f64| -> Result<f64> {
        let t = xi - u * u;
        let m = surface.m(t)?;
        let d = (m - nu) * (m + nu);
        Ok(2.0 * u * nu / (m * d.sqrt()))
    };
    Ok(2.0 * quad::gauss_kronrod(&f, 0.0, xi.sqrt(), 1e-10)?)
}

/// Tabulated phi/ell/xi over a nu grid.
#[derive(Clone, Debug, Serialize)]
pub struct HalfPeriodProfile {
    pub nu_grid: Vec<f64>,
    pub phi_values: Vec<f64>,
    pub ell_values: Vec<f64>,
    pub xi_values: Vec<f64>,
}

impl HalfPeriodProfile {
    pub fn is_empty(&self) -> bool {
        self.nu_grid.is_empty()
    }
}

pub fn build_profile(
    surface: &SurfaceModel,
    nu_min: f64,
    nu_max: f64,
    steps: usize,
) -> Result<HalfPeriodProfile> {
    if steps == 0 || !(nu_min < nu_max) {
        return Ok(HalfPeriodProfile {
            nu_grid: Vec::new(),
            phi_values: Vec::new(),
            ell_values: Vec::new(),
            xi_values: Vec::new(),
        });
    }
    let nu_grid: Vec<f64> = (0..steps)
        .map(|i| {
            if steps == 1 {
                nu_min
            } else {
                nu_min + (nu_max - nu_min) * (i as f64) / ((steps - 1) as f64)
            }
        })
        .collect();
    let rows: Vec<(f64, f64, f64)> = nu_grid
        .par_iter()
        .map(|&nu| Ok((phi(surface, nu)?, ell(surface, nu)?, surface.xi(nu)?)))
        .collect::<Result<_>>()?;
    Ok(HalfPeriodProfile {
        nu_grid,
        phi_values: rows.iter().map(|r| r.0).collect(),
        ell_values: rows.iter().map(|r| r.1).collect(),
        xi_values: rows.iter().map(|r| r.2).collect(),
    })
}

/// Default grid spanning the nu domain with small endpoint margins. Empty
/// when the domain is (numerically) empty.
pub fn default_profile(surface: &SurfaceModel, steps: usize) -> Result<HalfPeriodProfile> {
    let (lo, hi) = surface.nu_domain();
    let range = hi - lo;
    if range <= 1e-6 {
        return build_profile(surface, 0.0, 0.0, 0);
    }
    let nu_min = lo + 0.01 * range;
    let nu_max = hi - 1e-3 * range;
    build_profile(surface, nu_min, nu_max, steps)
}

/// Smallest t in [0, t0) with phi(m(t)) = pi, or 0 when phi(m(t)) >= pi on
/// the whole interval. The composite phi . m is increasing there, so a sign
/// scan plus bisection suffices. Requires the structure-theorem hypotheses.
pub fn t_pi(surface: &SurfaceModel, profile: &HalfPeriodProfile) -> Result<f64> {
    let report = crate::cutlocus::check_hypotheses(surface, profile)?;
    if !report.verdict {
        return Err(Error::HypothesesNotVerified);
    }
    t_pi_unchecked(surface)
}

pub(crate) fn t_pi_unchecked(surface: &SurfaceModel) -> Result<f64> {
    let (lo, hi) = surface.nu_domain();
    let range = hi - lo;
    let g = |t: f64| -> Result<f64> {
        let nu = surface.m(t)?.clamp(lo + 2.0 * NU_MARGIN, hi - 2.0 * NU_MARGIN);
        Ok(phi(surface, nu)? - std::f64::consts::PI)
    };
    // near the equator end of the domain: nu -> m(0)
    let t_lo = surface.xi(hi - (1e-7f64).max(1e-6 * range))?;
    if g(t_lo)? >= 0.0 {
        return Ok(0.0);
    }
    // scan upward for the sign change; phi(m(t)) -> infinity as t -> t0
    let t_max = surface.t0().effective(surface.t_scan_eff());
    let mut prev = t_lo;
    let n = 200;
    for i in 1..=n {
        let t = t_lo + (t_max - t_lo) * (i as f64) / (n as f64);
        let nu = surface.m(t)?;
        if nu <= lo + 2.0 * NU_MARGIN {
            break;
        }
        if g(t)? >= 0.0 {
            return crate::roots::bisect(&g, prev, t, 1e-9);
        }
        prev = t;
    }
    // phi stayed below pi all the way to the neck, which contradicts the
    // divergence of phi . m at t0; report the horizon edge honestly.
    Err(Error::QuadratureStall { estimate: f64::NAN })
}
