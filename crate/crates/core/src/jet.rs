//! Second-order Taylor jets over the complex numbers.
//!
//! A [`Jet`] carries `(f, f', f'')` of an analytic function at one point and
//! propagates them exactly through arithmetic. Every analytic derivative in
//! the crate (eigenfunction residuals, superpotential derivatives, partner
//! potentials) goes through this type rather than through finite differences.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl Jet {
    pub const fn new(value: Complex64, d1: Complex64, d2: Complex64) -> Self {
        Self { value, d1, d2 }
    }

    pub fn constant(value: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::new(value, zero, zero)
    }

    pub fn real(value: f64) -> Self {
        Self::constant(Complex64::new(value, 0.0))
    }

    /// Jet of the identity function at `z`.
    pub fn variable(z: Complex64) -> Self {
        Self::new(z, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self::new(self.value * c, self.d1 * c, self.d2 * c)
    }

    pub fn add_constant(self, c: Complex64) -> Self {
        Self::new(self.value + c, self.d1, self.d2)
    }

    /// Re-expresses derivatives after the affine substitution `z = a·x + b`,
    /// so the result differentiates with respect to `x`.
    pub fn chain_affine(self, a: Complex64) -> Self {
        Self::new(self.value, self.d1 * a, self.d2 * a * a)
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn recip(self) -> Self {
        let inv = self.value.inv();
        let r1 = -self.d1 * inv * inv;
        let r2 = (self.d1 * self.d1 * 2.0 * inv - self.d2) * inv * inv;
        Self::new(inv, r1, r2)
    }

    /// `exp` composed with this jet.
    pub fn exp(self) -> Self {
        let e = self.value.exp();
        Self::new(e, e * self.d1, e * (self.d2 + self.d1 * self.d1))
    }

    /// `f'/f`, the logarithmic derivative.
    pub fn log_derivative(&self) -> Complex64 {
        self.d1 / self.value
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet::new(self.value + rhs.value, self.d1 + rhs.d1, self.d2 + rhs.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet::new(self.value - rhs.value, self.d1 - rhs.d1, self.d2 - rhs.d2)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.value, -self.d1, -self.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        Jet::new(
            self.value * rhs.value,
            self.d1 * rhs.value + self.value * rhs.d1,
            self.d2 * rhs.value + self.d1 * rhs.d1 * 2.0 + self.value * rhs.d2,
        )
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        Jet::new(self.value * rhs, self.d1 * rhs, self.d2 * rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.add_constant(Complex64::new(rhs, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12 * (1.0 + b.norm())
    }

    #[test]
    fn product_and_quotient_rules() {
        let z = Complex64::new(0.3, -0.7);
        let x = Jet::variable(z);
        // f = z^3 / (1 + z)
        let f = x * x * x / (x + 1.0);
        let one = Complex64::new(1.0, 0.0);
        let expected_d1 = (z * z * 3.0 * (one + z) - z * z * z) / ((one + z) * (one + z));
        // f'' = 2z(z^2 + 3z + 3) / (1+z)^3
        let expected_d2 = z * 2.0 * (z * z + z * 3.0 + 3.0) / ((one + z) * (one + z) * (one + z));
        assert!(close(f.value, z * z * z / (one + z)));
        assert!(close(f.d1, expected_d1));
        assert!(close(f.d2, expected_d2));
    }

    #[test]
    fn exp_and_affine_chain() {
        let z = Complex64::new(0.1, 0.2);
        let a = Complex64::new(0.0, 1.0);
        let f = (Jet::variable(z) * 2.0).exp().chain_affine(a);
        let e = (z * 2.0).exp();
        assert!(close(f.d1, e * 2.0 * a));
        assert!(close(f.d2, e * 4.0 * a * a));
    }
}
