//! Closed-form ground truth for the one-parameter family
//! m(t) = cosh t / sqrt(1 + lambda sinh^2 t), lambda > 1.
//!
//! Everything in this module is pure closed-form arithmetic; it never calls
//! the quadrature or ODE paths, so a disagreement isolates the fault to the
//! numerical side.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jet::Jet2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaParams {
    lambda: f64,
}

impl LambdaParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 1.0) || !lambda.is_finite() {
            return Err(Error::OutOfRange {
                what: "lambda",
                value: lambda,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        Ok(LambdaParams { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// inf m = 1/sqrt(lambda), approached as |t| -> infinity.
    pub fn inf_m(&self) -> f64 {
        1.0 / self.lambda.sqrt()
    }

    fn check_nu(&self, nu: f64) -> Result<()> {
        let lo = self.inf_m();
        if nu <= lo || nu >= 1.0 {
            return Err(Error::OutOfRange { what: "nu", value: nu, lo, hi: 1.0 });
        }
        Ok(())
    }
}

/// Closed-form (m, m', m'') with h(t) = 1 + lambda sinh^2 t:
///   m'  = (1 - lambda) m tanh t / h
///   m'' = (1 - lambda) m ((1 - lambda) tanh^2 t + h / cosh^2 t - h' tanh t) / h^2
pub fn m_closed(p: LambdaParams, t: f64) -> Jet2 {
    let l = p.lambda;
    let sh = t.sinh();
    let ch = t.cosh();
    let th = t.tanh();
    let h = 1.0 + l * sh * sh;
    let hp = 2.0 * l * sh * ch;
    let m = ch / h.sqrt();
    let d1 = (1.0 - l) * m * th / h;
    let d2 = (1.0 - l) * m * ((1.0 - l) * th * th + h / (ch * ch) - hp * th) / (h * h);
    Jet2 { v: m, d1, d2 }
}

/// Gaussian curvature G = (lambda - 1)(3/h^2 - 2/h).
pub fn curvature_closed(p: LambdaParams, t: f64) -> f64 {
    let sh = t.sinh();
    let h = 1.0 + p.lambda * sh * sh;
    (p.lambda - 1.0) * (3.0 / (h * h) - 2.0 / h)
}

/// Half-period function phi(nu) = pi (-sqrt(lambda-1) + lambda nu / sqrt(lambda nu^2 - 1)).
pub fn phi_closed(p: LambdaParams, nu: f64) -> Result<f64> {
    p.check_nu(nu)?;
    let l = p.lambda;
    Ok(PI * (-(l - 1.0).sqrt() + l * nu / (l * nu * nu - 1.0).sqrt()))
}

/// Derivative of `phi_closed` in nu: -pi lambda (lambda nu^2 - 1)^{-3/2}.
///
/// This is the term-by-term derivative of the closed form and agrees with a
/// finite-difference oracle. See `phi_prime_printed` for the variant with an
/// extra constant term that appears in some statements of the formula; the
/// two are kept side by side because they genuinely differ.
pub fn phi_prime_closed(p: LambdaParams, nu: f64) -> Result<f64> {
    p.check_nu(nu)?;
    let l = p.lambda;
    Ok(-PI * l * (l * nu * nu - 1.0).powf(-1.5))
}

/// The alternative printed form -pi (1/(2 sqrt(lambda-1)) + lambda (lambda nu^2 - 1)^{-3/2}).
/// Negative everywhere on the domain, like the true derivative, but offset
/// from it by the constant pi/(2 sqrt(lambda-1)).
pub fn phi_prime_printed(p: LambdaParams, nu: f64) -> Result<f64> {
    p.check_nu(nu)?;
    let l = p.lambda;
    Ok(-PI * (0.5 / (l - 1.0).sqrt() + l * (l * nu * nu - 1.0).powf(-1.5)))
}

/// Turning height: the unique t > 0 with m(t) = nu, via sinh^2 t = (1 - nu^2)/(lambda nu^2 - 1).
pub fn xi_closed(p: LambdaParams, nu: f64) -> Result<f64> {
    p.check_nu(nu)?;
    let l = p.lambda;
    let s2 = (1.0 - nu * nu) / (l * nu * nu - 1.0);
    Ok(s2.sqrt().asinh())
}

/// Closed-form value of
///   int_b^1 dx / (x (x - a) sqrt((x - b)(1 - x)))
///     = pi / (a (1 - a)) ((a - 1)/sqrt(b) + 1/c),   c = sqrt((b - a)/(1 - a)),
/// for 0 < a < b < 1.
pub fn lemma52_rhs(a: f64, b: f64) -> Result<f64> {
    if !(0.0 < a && a < b && b < 1.0) {
        return Err(Error::OutOfRange { what: "(a, b) pair", value: a, lo: 0.0, hi: b.min(1.0) });
    }
    let c = ((b - a) / (1.0 - a)).sqrt();
    Ok(PI / (a * (1.0 - a)) * ((a - 1.0) / b.sqrt() + 1.0 / c))
}
