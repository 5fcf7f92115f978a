//! Forward-mode dual numbers `a + b·ε` with `ε² = 0`.
//!
//! `Dual<T>` is itself [`Real`] whenever `T` is, so nesting
//! `Dual<Dual<f64>>` yields exact mixed second derivatives, and so on.

use crate::real::Real;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Real> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Self { re, eps }
    }

    pub fn constant(re: T) -> Self {
        Self { re, eps: T::zero() }
    }

    pub fn variable(re: T) -> Self {
        Self { re, eps: T::one() }
    }

    /// Chain rule with `f(re)` and `f'(re)` supplied by the caller.
    fn chain(self, f: T, df: T) -> Self {
        Self { re: f, eps: df * self.eps }
    }
}

/// Seeds the point `x + ε·v`.
pub fn lift<T: Real>(x: &[T], v: &[T]) -> Vec<Dual<T>> {
    x.iter().zip(v).map(|(&a, &b)| Dual::new(a, b)).collect()
}

/// Seeds the point `x + ε·e_k`.
pub fn lift_axis<T: Real>(x: &[T], k: usize) -> Vec<Dual<T>> {
    x.iter()
        .enumerate()
        .map(|(i, &a)| Dual::new(a, if i == k { T::one() } else { T::zero() }))
        .collect()
}

/// Embeds a point without a tangent direction.
pub fn lift_const<T: Real>(x: &[T]) -> Vec<Dual<T>> {
    x.iter().map(|&a| Dual::constant(a)).collect()
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.re.recip();
        let re = self.re * inv;
        Self::new(re, (self.eps - re * o.eps) * inv)
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<T: Real> AddAssign for Dual<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Dual<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> MulAssign for Dual<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Real> Add<f64> for Dual<T> {
    type Output = Self;
    fn add(self, o: f64) -> Self {
        Self::new(self.re + o, self.eps)
    }
}

impl<T: Real> Sub<f64> for Dual<T> {
    type Output = Self;
    fn sub(self, o: f64) -> Self {
        Self::new(self.re - o, self.eps)
    }
}

impl<T: Real> Mul<f64> for Dual<T> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        Self::new(self.re * o, self.eps * o)
    }
}

impl<T: Real> Div<f64> for Dual<T> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        Self::new(self.re / o, self.eps / o)
    }
}

impl<T: Real> Real for Dual<T> {
    fn cst(v: f64) -> Self {
        Self::constant(T::cst(v))
    }

    fn value(self) -> f64 {
        self.re.value()
    }

    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, (s * 2.0).recip())
    }

    fn ln(self) -> Self {
        self.chain(self.re.ln(), self.re.recip())
    }

    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }

    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }

    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type D2 = Dual<Dual<f64>>;

    #[test]
    fn first_derivative_of_polynomial() {
        let x = Dual::variable(3.0);
        let y = x * x * x - x * 2.0 + 1.0;
        assert_eq!(y.re, 22.0);
        assert_eq!(y.eps, 25.0);
    }

    #[test]
    fn nested_dual_gives_second_derivative() {
        // f = sin(x)·exp(x), f'' = 2 cos(x) exp(x)
        let x0 = 0.7_f64;
        let x = D2::new(Dual::variable(x0), Dual::new(1.0, 0.0));
        let y = x.sin() * x.exp();
        let expected = 2.0 * x0.cos() * x0.exp();
        assert!((y.eps.eps - expected).abs() < 1e-14);
    }

    #[test]
    fn quotient_and_transcendentals() {
        let x = Dual::variable(2.0_f64);
        let y = (x.ln() + x.sqrt()) / (x.cos() + 3.0);
        let f = |t: f64| (t.ln() + t.sqrt()) / (t.cos() + 3.0);
        let h = 1e-5;
        let fd = (f(2.0 + h) - f(2.0 - h)) / (2.0 * h);
        assert!((y.eps - fd).abs() < 1e-9);
    }
}
