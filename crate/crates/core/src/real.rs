//! Scalar abstraction and forward-mode dual numbers in the two chart parameters.
//!
//! Every geometric routine in this crate is written once over `T: Real`.
//! Evaluating it with `f64` gives values; evaluating it with [`Dual<T>`]
//! additionally carries the exact partial derivatives with respect to the
//! chart parameters `(u, v)`. Nesting (`Dual<Dual<f64>>`, ...) yields
//! higher derivatives, so second and third order surface data are obtained
//! without finite differences.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real scalar usable by the generic geometry code.
pub trait Real:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(c: f64) -> Self;
    /// The plain value, with all derivative parts dropped.
    fn value(&self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powf(self, e: Self) -> Self {
        (self.ln() * e).exp()
    }
}

impl Real for f64 {
    #[inline]
    fn cst(c: f64) -> Self {
        c
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    #[inline]
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    #[inline]
    fn powf(self, e: Self) -> Self {
        f64::powf(self, e)
    }
}

/// First-order dual number carrying partials along the two chart directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub du: T,
    pub dv: T,
}

impl<T: Real> Dual<T> {
    pub fn new(re: T, du: T, dv: T) -> Self {
        Self { re, du, dv }
    }

    pub fn constant(re: T) -> Self {
        Self { re, du: T::zero(), dv: T::zero() }
    }

    /// Chain rule for a unary function with value `f` and derivative `df` at `re`.
    #[inline]
    fn chain(self, f: T, df: T) -> Self {
        Self { re: f, du: df * self.du, dv: df * self.dv }
    }
}

/// Seeds `(u, v)` as independent variables one differentiation level above `T`.
#[inline]
pub fn seed<T: Real>(u: T, v: T) -> (Dual<T>, Dual<T>) {
    (Dual::new(u, T::one(), T::zero()), Dual::new(v, T::zero(), T::one()))
}

/// Seeds `(u, v)` two levels deep, giving exact second partials.
#[inline]
pub fn seed2<T: Real>(u: T, v: T) -> (Dual<Dual<T>>, Dual<Dual<T>>) {
    let (u1, v1) = seed(u, v);
    seed(u1, v1)
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, du: self.du + o.du, dv: self.dv + o.dv }
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, du: self.du - o.du, dv: self.dv - o.dv }
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self {
            re: self.re * o.re,
            du: self.re * o.du + self.du * o.re,
            dv: self.re * o.dv + self.dv * o.re,
        }
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = o.re.recip();
        let q = self.re * inv;
        Self {
            re: q,
            du: (self.du - q * o.du) * inv,
            dv: (self.dv - q * o.dv) * inv,
        }
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { re: -self.re, du: -self.du, dv: -self.dv }
    }
}

impl<T: Real> Add<f64> for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, c: f64) -> Self {
        Self { re: self.re + c, ..self }
    }
}

impl<T: Real> Sub<f64> for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, c: f64) -> Self {
        Self { re: self.re - c, ..self }
    }
}

impl<T: Real> Mul<f64> for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, c: f64) -> Self {
        Self { re: self.re * c, du: self.du * c, dv: self.dv * c }
    }
}

impl<T: Real> Div<f64> for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, c: f64) -> Self {
        Self { re: self.re / c, du: self.du / c, dv: self.dv / c }
    }
}

impl<T: Real> Real for Dual<T> {
    fn cst(c: f64) -> Self {
        Self::constant(T::cst(c))
    }
    fn value(&self) -> f64 {
        self.re.value()
    }
    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    fn sinh(self) -> Self {
        self.chain(self.re.sinh(), self.re.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.re.cosh(), self.re.sinh())
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), self.re.recip())
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, (s * 2.0).recip())
    }
    fn atan2(self, x: Self) -> Self {
        // d atan2(y, x) = (x dy - y dx) / (x^2 + y^2)
        let r2 = self.re * self.re + x.re * x.re;
        Self {
            re: self.re.atan2(x.re),
            du: (x.re * self.du - self.re * x.du) / r2,
            dv: (x.re * self.dv - self.re * x.dv) / r2,
        }
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let d = self.re.powi(n - 1) * (n as f64);
        self.chain(self.re.powi(n), d)
    }
}

/// Partial derivatives of a once-lifted scalar.
#[inline]
pub fn partials<T: Real>(x: Dual<T>) -> (T, T) {
    (x.du, x.dv)
}
