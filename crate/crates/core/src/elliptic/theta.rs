use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Modulus, POLE_TOLERANCE};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// Relative size below which a q-series term is dropped.
const SERIES_CUTOFF: f64 = 1e-17;
const MAX_TERMS: usize = 400;

/// Jacobi eta `H`, theta `Θ` and zeta `Z` for a fixed modulus.
///
/// Series are in `v = πu/(2K)`:
///
/// ```text
/// H(u) = 2 Σ_{n≥0} (-1)^n q^{(n+1/2)²} sin((2n+1) v)
/// Θ(u) = 1 + 2 Σ_{n≥1} (-1)^n q^{n²} cos(2n v)
/// ```
///
/// Before summing, `Im u` is reduced into `[-K', K']` with
/// `f(u + 2iK') = -q⁻¹ e^{-iπu/K} f(u)` (shared by `H` and `Θ`), so every
/// retained term is bounded by `q^{n² - n}`.
#[derive(Debug, Clone, Copy)]
pub struct ThetaBundle {
    modulus: Modulus,
    truncation: usize,
}

impl ThetaBundle {
    pub fn new(modulus: Modulus) -> Self {
        let ln_q = modulus.nome().ln();
        let mut n = 1usize;
        while n < MAX_TERMS && ((n * n - n) as f64) * ln_q > SERIES_CUTOFF.ln() {
            n += 1;
        }
        Self {
            modulus,
            truncation: n + 1,
        }
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Upper bound on the number of series terms any evaluation uses.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    fn scale(&self) -> f64 {
        PI / (2.0 * self.modulus.k())
    }

    /// Splits `u = u0 + 2inK'` and returns `(u0, factor jet)` where the
    /// factor carries the quasi-periodicity multiplier as a function of `u`.
    fn reduce(&self, u: Complex64) -> (Complex64, Jet) {
        let kp = self.modulus.k_prime();
        let n = (u.im / (2.0 * kp)).round();
        if n == 0.0 {
            return (u, Jet::real(1.0));
        }
        let u0 = u - Complex64::new(0.0, 2.0 * n * kp);
        let v0 = u0 * self.scale();
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        let log_mag = -n * n * self.modulus.nome().ln();
        let factor = (Complex64::new(0.0, -2.0 * n) * v0).exp() * (sign * log_mag.exp());
        let c = Complex64::new(0.0, -n * PI / self.modulus.k());
        (u0, Jet::new(factor, factor * c, factor * c * c))
    }

    /// Jet of `H` in `u`.
    pub fn eta_jet(&self, u: Complex64) -> Jet {
        let (u0, factor) = self.reduce(u);
        factor * self.eta_series(u0)
    }

    /// Jet of `Θ` in `u`.
    pub fn theta_jet(&self, u: Complex64) -> Jet {
        let (u0, factor) = self.reduce(u);
        factor * self.theta_series(u0)
    }

    pub fn eta(&self, u: Complex64) -> Complex64 {
        self.eta_jet(u).value
    }

    pub fn theta(&self, u: Complex64) -> Complex64 {
        self.theta_jet(u).value
    }

    /// `Z(u) = Θ'(u)/Θ(u)` from the term-wise differentiated series.
    pub fn zeta(&self, u: Complex64) -> Result<Complex64> {
        let (zero, distance) = self.modulus.nearest_pole(u);
        if distance < POLE_TOLERANCE {
            return Err(Error::NearThetaZero { z: u, zero, distance });
        }
        Ok(self.theta_jet(u).log_derivative())
    }

    fn eta_series(&self, u: Complex64) -> Jet {
        let s = self.scale();
        let v = u * s;
        let ln_q = self.modulus.nome().ln();
        let mut sum = Jet::real(0.0);
        for n in 0..self.truncation {
            let odd = (2 * n + 1) as f64;
            let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
            let coef = sign * (ln_q * (n as f64 + 0.5).powi(2)).exp();
            let (sin, cos) = ((v * odd).sin(), (v * odd).cos());
            let term = Jet::new(sin * coef, cos * (coef * odd * s), -sin * (coef * odd * odd * s * s));
            sum = sum + term;
            if n >= 2 && term.value.norm() * odd * odd <= SERIES_CUTOFF * sum.value.norm().max(1e-300) {
                break;
            }
        }
        sum
    }

    fn theta_series(&self, u: Complex64) -> Jet {
        let s = self.scale();
        let v = u * s;
        let ln_q = self.modulus.nome().ln();
        let mut sum = Jet::real(1.0);
        for n in 1..self.truncation {
            let even = (2 * n) as f64;
            let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
            let coef = sign * (ln_q * (n * n) as f64).exp();
            let (sin, cos) = ((v * even).sin(), (v * even).cos());
            let term = Jet::new(cos * coef, -sin * (coef * even * s), -cos * (coef * even * even * s * s));
            sum = sum + term;
            if n >= 2 && term.value.norm() * even * even <= SERIES_CUTOFF * sum.value.norm() {
                break;
            }
        }
        sum
    }
}

/// `(H(u), Θ(u))`.
pub fn theta_functions(bundle: &ThetaBundle, u: Complex64) -> (Complex64, Complex64) {
    (bundle.eta(u), bundle.theta(u))
}

/// Jacobi zeta `Z(u)`.
pub fn zeta_z(bundle: &ThetaBundle, u: Complex64) -> Result<Complex64> {
    bundle.zeta(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Unreduced q-series summed to a fixed, generous number of terms.
    fn raw_eta(md: &Modulus, u: Complex64) -> Complex64 {
        let v = u * (PI / (2.0 * md.k()));
        let q = md.nome();
        (0..60)
            .map(|n| {
                let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
                (v * (2 * n + 1) as f64).sin() * (sign * q.powf((n as f64 + 0.5).powi(2)))
            })
            .sum()
    }

    fn raw_theta(md: &Modulus, u: Complex64) -> Complex64 {
        let v = u * (PI / (2.0 * md.k()));
        let q = md.nome();
        (1..60)
            .map(|n| {
                let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
                (v * (2 * n) as f64).cos() * (sign * q.powi(n * n))
            })
            .sum::<Complex64>()
            + 1.0
    }

    fn bundle(m: f64) -> ThetaBundle {
        ThetaBundle::new(Modulus::new(m).unwrap())
    }

    #[test]
    fn truncation_is_small() {
        let b = bundle(0.75);
        assert!(b.truncation() < 10);
        let q = b.modulus().nome();
        let last = b.truncation() - 1;
        assert!(q.powi((last * last - last) as i32) < 1e-16);
    }

    #[test]
    fn eta_is_odd_and_antiperiodic() {
        let b = bundle(0.5);
        assert_eq!(b.eta(Complex64::new(0.0, 0.0)).norm(), 0.0);
        let u = Complex64::new(0.3, 0.0);
        let k2 = 2.0 * b.modulus().k();
        assert!((b.eta(u + k2) + b.eta(u)).norm() < 1e-12);
        assert!((raw_eta(b.modulus(), u + k2) + raw_eta(b.modulus(), u)).norm() < 1e-12);
    }

    #[test]
    fn reduced_series_matches_raw_series() {
        let b = bundle(0.75);
        let md = *b.modulus();
        for &u in &[
            Complex64::new(0.5, 0.2),
            Complex64::new(0.5, 2.9),
            Complex64::new(-0.8, 4.4),
            Complex64::new(1.1, -3.0),
        ] {
            let (h, t) = theta_functions(&b, u);
            assert!((h - raw_eta(&md, u)).norm() < 1e-12 * (1.0 + h.norm()));
            assert!((t - raw_theta(&md, u)).norm() < 1e-12 * (1.0 + t.norm()));
        }
    }

    #[test]
    fn imaginary_quasi_periodicity() {
        // H(i[x + 2K'] + β) = -q⁻¹ exp(-iπ(ix + β)/K) H(ix + β)
        let b = bundle(0.75);
        let md = *b.modulus();
        for i in 0..20 {
            let x = -1.0 + 0.15 * i as f64;
            let u = Complex64::new(0.5, x);
            let shifted = u + Complex64::new(0.0, 2.0 * md.k_prime());
            let ratio = raw_eta(&md, shifted) / raw_eta(&md, u);
            let expected = -(Complex64::new(0.0, -PI / md.k()) * u).exp() / md.nome();
            assert!((ratio - expected).norm() < 1e-10 * expected.norm());
            // modulus of the multiplier is q⁻¹ e^{πx/K}, not q
            assert!((ratio.norm() - (PI * x / md.k()).exp() / md.nome()).abs() < 1e-9 * ratio.norm());
        }
    }

    #[test]
    fn zeta_values() {
        let b = bundle(0.5);
        let k = b.modulus().k();
        assert!(b.zeta(Complex64::new(0.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(b.zeta(Complex64::new(k, 0.0)).unwrap().norm() < 1e-11);
        let u = Complex64::new(0.4, 0.0);
        let z0 = b.zeta(u).unwrap();
        let z1 = b.zeta(u + 2.0 * k).unwrap();
        assert!((z0 - z1).norm() < 1e-11);
    }

    #[test]
    fn zeta_matches_log_derivative_of_raw_series() {
        let b = bundle(0.75);
        let md = *b.modulus();
        let h = 1e-5;
        for &u in &[Complex64::new(0.4, 0.3), Complex64::new(1.9, 2.2)] {
            let fd = (raw_theta(&md, u + h).ln() - raw_theta(&md, u - h).ln()) / (2.0 * h);
            assert!((b.zeta(u).unwrap() - fd).norm() < 1e-8);
        }
    }

    #[test]
    fn zeta_rejects_theta_zero() {
        let b = bundle(0.75);
        let zero = Complex64::new(0.0, b.modulus().k_prime());
        assert!(matches!(b.zeta(zero), Err(Error::NearThetaZero { .. })));
    }

    proptest! {
        #[test]
        fn ratio_reproduces_sn(re in -4.0f64..4.0, im in -2.5f64..2.5, m in 0.05f64..0.95) {
            // sn(u) = H(u) / (m^{1/4} Θ(u))
            let md = Modulus::new(m).unwrap();
            let u = Complex64::new(re, im);
            prop_assume!(md.nearest_pole(u).1 > 0.2);
            let b = ThetaBundle::new(md);
            let (h, t) = theta_functions(&b, u);
            let sn = md.jacobi(u).unwrap().sn;
            prop_assert!((h / (t * m.powf(0.25)) - sn).norm() < 1e-10 * (1.0 + sn.norm()));
        }
    }
}
