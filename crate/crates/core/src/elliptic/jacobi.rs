use num_complex::Complex64;

use super::Modulus;
use crate::error::{Error, Result};
use crate::jet::Jet;

/// Arguments closer than this to a pole of sn, cn, dn are rejected.
pub const POLE_TOLERANCE: f64 = 1e-6;

const LANDEN_DEPTH: usize = 24;

/// `(sn, cn, dn)` at a complex point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiValues {
    pub z: Complex64,
    pub sn: Complex64,
    pub cn: Complex64,
    pub dn: Complex64,
}

impl JacobiValues {
    /// `sn² + cn² - 1`.
    pub fn pythagorean_defect(&self) -> Complex64 {
        self.sn * self.sn + self.cn * self.cn - 1.0
    }

    /// `dn² + m sn² - 1`.
    pub fn modulus_defect(&self, m: f64) -> Complex64 {
        self.dn * self.dn + self.sn * self.sn * m - 1.0
    }
}

/// Jacobi functions of a real argument.
pub fn jacobi_real(u: f64, m: f64) -> Result<JacobiValues> {
    let md = Modulus::new(m)?;
    let (sn, cn, dn) = md.real_sn_cn_dn(u);
    Ok(JacobiValues {
        z: Complex64::new(u, 0.0),
        sn: Complex64::new(sn, 0.0),
        cn: Complex64::new(cn, 0.0),
        dn: Complex64::new(dn, 0.0),
    })
}

/// Jacobi functions of a complex argument, rejecting points within
/// [`POLE_TOLERANCE`] of the pole lattice `iK' + 2nK + 2ikK'`.
pub fn jacobi_complex(z: Complex64, m: f64) -> Result<JacobiValues> {
    Modulus::new(m)?.jacobi(z)
}

/// Descending-Landen evaluation for real `u`. The argument is first reduced
/// modulo the real period `4K`.
fn sn_cn_dn(u: f64, m: f64, quarter: f64) -> (f64, f64, f64) {
    let period = 4.0 * quarter;
    let u = u - period * (u / period).round();

    let mut a = [0.0_f64; LANDEN_DEPTH + 1];
    let mut c = [0.0_f64; LANDEN_DEPTH + 1];
    a[0] = 1.0;
    c[0] = m.sqrt();
    let mut b = (1.0 - m).sqrt();
    let mut n = 0;
    while n < LANDEN_DEPTH && c[n].abs() > f64::EPSILON * a[n] {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }

    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // dn² = cn² + (1 - m) sn² has no cancellation.
    let dn = (cn * cn + (1.0 - m) * sn * sn).sqrt();
    (sn, cn, dn)
}

impl Modulus {
    pub(crate) fn real_sn_cn_dn(&self, u: f64) -> (f64, f64, f64) {
        sn_cn_dn(u, self.m(), self.k())
    }

    /// Nearest point of the pole lattice `iK' + 2nK + 2ikK'` and its distance.
    pub fn nearest_pole(&self, z: Complex64) -> (Complex64, f64) {
        let (k, kp) = (self.k(), self.k_prime());
        let n = (z.re / (2.0 * k)).round();
        let j = ((z.im - kp) / (2.0 * kp)).round();
        let pole = Complex64::new(2.0 * k * n, kp + 2.0 * kp * j);
        (pole, (z - pole).norm())
    }

    /// Complex-argument Jacobi functions by the imaginary-argument addition
    /// formulas: real kernels at `Re z` (parameter m) and `Im z`
    /// (parameter 1 - m) combined algebraically.
    pub fn jacobi(&self, z: Complex64) -> Result<JacobiValues> {
        let (pole, distance) = self.nearest_pole(z);
        if distance < POLE_TOLERANCE {
            return Err(Error::NearPole { z, pole, distance });
        }
        let m = self.m();
        let (s, c, d) = sn_cn_dn(z.re, m, self.k());
        if z.im == 0.0 {
            return Ok(JacobiValues {
                z,
                sn: Complex64::new(s, 0.0),
                cn: Complex64::new(c, 0.0),
                dn: Complex64::new(d, 0.0),
            });
        }
        let (s1, c1, d1) = sn_cn_dn(z.im, 1.0 - m, self.k_prime());
        let den = c1 * c1 + m * s * s * s1 * s1;
        Ok(JacobiValues {
            z,
            sn: Complex64::new(s * d1, c * d * s1 * c1) / den,
            cn: Complex64::new(c * c1, -s * d * s1 * d1) / den,
            dn: Complex64::new(d * c1 * d1, -m * s * c * s1) / den,
        })
    }

    /// Second-order jets of `(sn, cn, dn)` at `z`, using
    /// `sn' = cn dn`, `cn' = -sn dn`, `dn' = -m sn cn`.
    pub fn jacobi_jets(&self, z: Complex64) -> Result<(Jet, Jet, Jet)> {
        let v = self.jacobi(z)?;
        let m = self.m();
        let (s, c, d) = (v.sn, v.cn, v.dn);
        let sn = Jet::new(s, c * d, -s * (d * d + c * c * m));
        let cn = Jet::new(c, -s * d, -c * (d * d - s * s * m));
        let dn = Jet::new(d, -s * c * m, -d * (c * c - s * s) * m);
        Ok((sn, cn, dn))
    }
}


#[cfg(test)]
mod tests {
    use super::oracle::jacobi_by_ode;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_values_at_zero() {
        let v = jacobi_real(0.0, 0.6).unwrap();
        assert_eq!(v.sn.re, 0.0);
        assert_eq!(v.cn.re, 1.0);
        assert_eq!(v.dn.re, 1.0);
    }

    #[test]
    fn quarter_period_values() {
        for &m in &[0.1, 0.5, 0.75, 0.9] {
            let md = Modulus::new(m).unwrap();
            let v = jacobi_real(md.k(), m).unwrap();
            assert!((v.sn.re - 1.0).abs() < 1e-12);
            assert!(v.cn.re.abs() < 1e-12);
            assert!((v.dn.re - (1.0 - m).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn real_argument_matches_ode_oracle() {
        let v = jacobi_real(0.7, 0.75).unwrap();
        let y = jacobi_by_ode(Complex64::new(0.7, 0.0), 0.75, 4000);
        assert!((v.sn - y[0]).norm() < 1e-12);
        assert!((v.cn - y[1]).norm() < 1e-12);
        assert!((v.dn - y[2]).norm() < 1e-12);
    }

    #[test]
    fn complex_argument_matches_ode_oracle() {
        let z = Complex64::new(0.3, 0.4);
        let v = jacobi_complex(z, 0.75).unwrap();
        let y = jacobi_by_ode(z, 0.75, 4000);
        assert!((v.sn - y[0]).norm() < 1e-10);
        assert!((v.cn - y[1]).norm() < 1e-10);
        assert!((v.dn - y[2]).norm() < 1e-10);
    }

    #[test]
    fn real_axis_consistency() {
        let a = jacobi_complex(Complex64::new(0.4, 0.0), 0.3).unwrap();
        let b = jacobi_real(0.4, 0.3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn imaginary_argument_transform_sign() {
        // √m sn(x, m) = -dn(ix + K'(m) + iK(m), 1 - m); the minus sign holds.
        let m = 0.5;
        let md = Modulus::new(m).unwrap();
        for i in 0..50 {
            let x = -2.0 + 4.0 * i as f64 / 49.0;
            let lhs = m.sqrt() * jacobi_real(x, m).unwrap().sn;
            let z = Complex64::new(md.k_prime(), x + md.k());
            let rhs = jacobi_complex(z, 1.0 - m).unwrap().dn;
            assert!((lhs + rhs).norm() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn double_periodicity() {
        let m = 0.6;
        let md = Modulus::new(m).unwrap();
        for &z in &[Complex64::new(0.3, 0.2), Complex64::new(-1.1, 0.7)] {
            let s = md.jacobi(z).unwrap().sn;
            let s4k = md.jacobi(z + 4.0 * md.k()).unwrap().sn;
            let s2ik = md.jacobi(z + Complex64::new(0.0, 2.0 * md.k_prime())).unwrap().sn;
            assert!((s - s4k).norm() < 1e-10);
            assert!((s - s2ik).norm() < 1e-10);
        }
    }

    #[test]
    fn pole_is_rejected() {
        let md = Modulus::new(0.75).unwrap();
        let near = Complex64::new(2.0 * md.k() + 1e-8, md.k_prime());
        match md.jacobi(near) {
            Err(Error::NearPole { pole, .. }) => {
                assert!((pole - Complex64::new(2.0 * md.k(), md.k_prime())).norm() < 1e-12)
            }
            other => panic!("expected pole error, got {other:?}"),
        }
    }

    #[test]
    fn derivative_consistency() {
        let md = Modulus::new(0.75).unwrap();
        let h = 1e-5;
        for &z in &[Complex64::new(0.2, 0.3), Complex64::new(1.3, -0.6)] {
            let fd = (md.jacobi(z + h).unwrap().sn - md.jacobi(z - h).unwrap().sn) / (2.0 * h);
            let v = md.jacobi(z).unwrap();
            assert!((fd - v.cn * v.dn).norm() < 1e-8);
            let (sn, _, _) = md.jacobi_jets(z).unwrap();
            let fd2 = (md.jacobi(z + h).unwrap().cn * md.jacobi(z + h).unwrap().dn
                - md.jacobi(z - h).unwrap().cn * md.jacobi(z - h).unwrap().dn)
                / (2.0 * h);
            assert!((fd2 - sn.d2).norm() < 1e-8);
        }
    }

    #[test]
    fn landen_identity() {
        let m = 0.6;
        let md = Modulus::new(m).unwrap();
        let (alpha, mt) = crate::elliptic::landen_descend(m).unwrap();
        let x = 0.37;
        let lhs = jacobi_real(x, m).unwrap().dn + jacobi_real(x + md.k(), m).unwrap().dn;
        let rhs = jacobi_real(x / alpha, mt).unwrap().dn / alpha;
        assert!((lhs - rhs).norm() < 1e-11);
    }

    proptest! {
        #[test]
        fn identities_hold_away_from_poles(
            re in -6.0f64..6.0,
            im in -3.0f64..3.0,
            mi in 0usize..5,
        ) {
            let m = [0.1, 0.25, 0.5, 0.75, 0.9][mi];
            let md = Modulus::new(m).unwrap();
            let z = Complex64::new(re, im);
            prop_assume!(md.nearest_pole(z).1 > 0.1);
            let v = md.jacobi(z).unwrap();
            prop_assert!(v.pythagorean_defect().norm() < 1e-11);
            prop_assert!(v.modulus_defect(m).norm() < 1e-11);
        }
    }
}
