//! Truncated two-variable second-order Taylor arithmetic.
//!
//! A `Taylor2` carries a value together with its gradient and Hessian with
//! respect to two independent variables. Propagating all six components
//! through an expression gives first and second partials exact to rounding,
//! with no stepsize to tune. Finite differences stay around only as a test
//! oracle.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Taylor2 {
    pub v: f64,
    pub dx: f64,
    pub dy: f64,
    pub dxx: f64,
    pub dxy: f64,
    pub dyy: f64,
}

impl Taylor2 {
    pub fn constant(v: f64) -> Self {
        Taylor2 {
            v,
            dx: 0.0,
            dy: 0.0,
            dxx: 0.0,
            dxy: 0.0,
            dyy: 0.0,
        }
    }

    /// Seeds the first independent variable.
    pub fn var_x(v: f64) -> Self {
        Taylor2 {
            v,
            dx: 1.0,
            dy: 0.0,
            dxx: 0.0,
            dxy: 0.0,
            dyy: 0.0,
        }
    }

    /// Seeds the second independent variable.
    pub fn var_y(v: f64) -> Self {
        Taylor2 {
            v,
            dx: 0.0,
            dy: 1.0,
            dxx: 0.0,
            dxy: 0.0,
            dyy: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.dx.is_finite()
            && self.dy.is_finite()
            && self.dxx.is_finite()
            && self.dxy.is_finite()
            && self.dyy.is_finite()
    }

    /// Chain rule for a scalar function with value `f`, derivative `f1`,
    /// and second derivative `f2` at `self.v`.
    fn chain(self, f: f64, f1: f64, f2: f64) -> Self {
        Taylor2 {
            v: f,
            dx: f1 * self.dx,
            dy: f1 * self.dy,
            dxx: f2 * self.dx * self.dx + f1 * self.dxx,
            dxy: f2 * self.dx * self.dy + f1 * self.dxy,
            dyy: f2 * self.dy * self.dy + f1 * self.dyy,
        }
    }

    pub fn recip(self) -> Self {
        let u = self.v;
        self.chain(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))
    }

    pub fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.v))
    }

    pub fn ln(self) -> Self {
        let u = self.v;
        self.chain(u.ln(), 1.0 / u, -1.0 / (u * u))
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    /// Integer power, valid for any base (base != 0 when k < 0).
    pub fn powi(self, k: i32) -> Self {
        let u = self.v;
        let f = u.powi(k);
        let f1 = k as f64 * u.powi(k - 1);
        let f2 = (k as f64) * (k as f64 - 1.0) * u.powi(k - 2);
        self.chain(f, f1, f2)
    }

    /// Real power with a constant exponent; needs a positive base.
    pub fn powf(self, k: f64) -> Self {
        let u = self.v;
        let f = u.powf(k);
        self.chain(f, k * u.powf(k - 1.0), k * (k - 1.0) * u.powf(k - 2.0))
    }

    /// General power with a differentiated exponent, exp(e ln b).
    pub fn pow(self, exponent: Taylor2) -> Self {
        (exponent * self.ln()).exp()
    }
}

impl Add for Taylor2 {
    type Output = Taylor2;
    fn add(self, o: Taylor2) -> Taylor2 {
        Taylor2 {
            v: self.v + o.v,
            dx: self.dx + o.dx,
            dy: self.dy + o.dy,
            dxx: self.dxx + o.dxx,
            dxy: self.dxy + o.dxy,
            dyy: self.dyy + o.dyy,
        }
    }
}

impl Sub for Taylor2 {
    type Output = Taylor2;
    fn sub(self, o: Taylor2) -> Taylor2 {
        Taylor2 {
            v: self.v - o.v,
            dx: self.dx - o.dx,
            dy: self.dy - o.dy,
            dxx: self.dxx - o.dxx,
            dxy: self.dxy - o.dxy,
            dyy: self.dyy - o.dyy,
        }
    }
}

impl Neg for Taylor2 {
    type Output = Taylor2;
    fn neg(self) -> Taylor2 {
        Taylor2 {
            v: -self.v,
            dx: -self.dx,
            dy: -self.dy,
            dxx: -self.dxx,
            dxy: -self.dxy,
            dyy: -self.dyy,
        }
    }
}

impl Mul for Taylor2 {
    type Output = Taylor2;
    fn mul(self, o: Taylor2) -> Taylor2 {
        Taylor2 {
            v: self.v * o.v,
            dx: self.dx * o.v + self.v * o.dx,
            dy: self.dy * o.v + self.v * o.dy,
            dxx: self.dxx * o.v + 2.0 * self.dx * o.dx + self.v * o.dxx,
            dxy: self.dxy * o.v + self.dx * o.dy + self.dy * o.dx + self.v * o.dxy,
            dyy: self.dyy * o.v + 2.0 * self.dy * o.dy + self.v * o.dyy,
        }
    }
}

impl Div for Taylor2 {
    type Output = Taylor2;
    #[allow(clippy::suspicious_arithmetic_impl)] // a/b as a * (1/b) by chain rule
    fn div(self, o: Taylor2) -> Taylor2 {
        self * o.recip()
    }
}
