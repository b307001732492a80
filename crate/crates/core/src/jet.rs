//! Second-order forward-mode jets.
//!
//! A `Jet2` carries a value together with its first and second derivative
//! with respect to a single scalar variable. Arithmetic propagates both
//! derivatives through the product and chain rules truncated at order two,
//! which is exactly the order the geometry needs: the Gaussian curvature of a
//! warped metric is -m''/m.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet2 {
    pub const fn constant(v: f64) -> Self {
        Jet2 { v, d1: 0.0, d2: 0.0 }
    }

    /// The independent variable itself: value t, derivative 1.
    pub const fn variable(t: f64) -> Self {
        Jet2 { v: t, d1: 1.0, d2: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Compose an outer scalar function with this jet. `f0`, `f1`, `f2` are
    /// the outer function and its first two derivatives evaluated at `self.v`.
    #[inline]
    pub fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Jet2 {
            v: f0,
            d1: f1 * self.d1,
            d2: f2 * self.d1 * self.d1 + f1 * self.d2,
        }
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }

    pub fn tanh(self) -> Self {
        let th = self.v.tanh();
        let sech2 = 1.0 - th * th;
        self.chain(th, sech2, -2.0 * th * sech2)
    }

    /// Integer power, including zero and negative exponents.
    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Jet2::constant(1.0),
            1 => self,
            _ => {
                let x = self.v;
                let f0 = x.powi(n);
                let f1 = f64::from(n) * x.powi(n - 1);
                let f2 = f64::from(n) * f64::from(n - 1) * x.powi(n - 2);
                self.chain(f0, f1, f2)
            }
        }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 { v: -self.v, d1: -self.d1, d2: -self.d2 }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2 { v: self.v - o.v, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, k: f64) -> Jet2 {
        Jet2 { v: self.v * k, d1: self.d1 * k, d2: self.d2 * k }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn product_rule_on_polynomial() {
        // f(t) = t^2 * (t + 3) = t^3 + 3t^2
        let t = Jet2::variable(1.7);
        let f = t.powi(2) * (t + Jet2::constant(3.0));
        let x = 1.7f64;
        assert!(close(f.v, x.powi(3) + 3.0 * x * x, 1e-14));
        assert!(close(f.d1, 3.0 * x * x + 6.0 * x, 1e-14));
        assert!(close(f.d2, 6.0 * x + 6.0, 1e-14));
    }

    #[test]
    fn chain_rule_on_exp() {
        // exp(-t^2): value 1, d1 0, d2 -2 at t = 0
        let t = Jet2::variable(0.0);
        let f = (-t.powi(2)).exp();
        assert_eq!(f.v, 1.0);
        assert_eq!(f.d1, 0.0);
        assert_eq!(f.d2, -2.0);
    }

    #[test]
    fn quotient_matches_hand_derivatives() {
        // 1/(1+t^2): d1 = -2t/(1+t^2)^2, d2 = (6t^2-2)/(1+t^2)^3
        let x = 0.6;
        let t = Jet2::variable(x);
        let f = Jet2::constant(1.0) / (Jet2::constant(1.0) + t.powi(2));
        let den = 1.0 + x * x;
        assert!(close(f.v, 1.0 / den, 1e-14));
        assert!(close(f.d1, -2.0 * x / (den * den), 1e-14));
        assert!(close(f.d2, (6.0 * x * x - 2.0) / (den * den * den), 1e-14));
    }

    #[test]
    fn negative_power() {
        let x = 2.5;
        let f = Jet2::variable(x).powi(-2);
        assert!(close(f.v, x.powi(-2), 1e-14));
        assert!(close(f.d1, -2.0 * x.powi(-3), 1e-14));
        assert!(close(f.d2, 6.0 * x.powi(-4), 1e-14));
    }
}
