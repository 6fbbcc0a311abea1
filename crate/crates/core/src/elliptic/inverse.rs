use num_complex::Complex64;

use super::Modulus;
use crate::error::{Error, Result};

pub const INVERSE_MAX_ITER: usize = 50;

/// Carlson's symmetric integral `R_F(x, y, z)` by the duplication theorem,
/// with principal square roots.
pub(crate) fn carlson_rf(mut x: Complex64, mut y: Complex64, mut z: Complex64) -> Complex64 {
    const ERRTOL: f64 = 0.0008;
    let mut ave = (x + y + z) / 3.0;
    for _ in 0..200 {
        ave = (x + y + z) / 3.0;
        let dev = [(ave - x) / ave, (ave - y) / ave, (ave - z) / ave];
        if dev.iter().all(|d| d.norm() < ERRTOL) {
            let e2 = dev[0] * dev[1] - dev[2] * dev[2];
            let e3 = dev[0] * dev[1] * dev[2];
            return (e2 * (e2 / 24.0 - 0.1 - e3 * (3.0 / 44.0)) + e3 / 14.0 + 1.0) / ave.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = (x + lambda) * 0.25;
        y = (y + lambda) * 0.25;
        z = (z + lambda) * 0.25;
    }
    ave.sqrt().inv()
}

/// Incomplete integral `F(asin w | m) = w R_F(1 - w², 1 - m w², 1)` for real
/// `w ∈ [-1, 1]`.
fn real_incomplete(w: f64, m: f64) -> f64 {
    let c = |v: f64| Complex64::new(v, 0.0);
    (carlson_rf(c(1.0 - w * w), c(1.0 - m * w * w), c(1.0)) * w).re
}

/// Solves `sn(α, m) = w`.
///
/// For `Im w ≥ 0` the returned `α` lies in the rectangle
/// `Re α ∈ [-K, K]`, `Im α ∈ [0, K']`, which sn maps onto the closed upper
/// half-plane. For `Im w < 0` the mirror image `conj(inverse_sn(conj w))`
/// is returned.
pub fn inverse_sn(w: Complex64, m: f64) -> Result<Complex64> {
    Modulus::new(m)?.inverse_sn(w)
}

impl Modulus {
    pub fn inverse_sn(&self, w: Complex64) -> Result<Complex64> {
        if w.im < 0.0 {
            return self.inverse_sn(w.conj()).map(|a| a.conj());
        }
        let seed = if w.im == 0.0 {
            self.real_line_seed(w.re)
        } else {
            w * carlson_rf(1.0 - w * w, 1.0 - w * w * self.m(), Complex64::new(1.0, 0.0))
        };

        let mut attempt = self.newton(seed, w);
        if attempt.is_err() {
            // Fallback: coarse grid of seeds over the target rectangle.
            let (k, kp) = (self.k(), self.k_prime());
            'grid: for i in 0..5 {
                for j in 0..5 {
                    let s = Complex64::new(-k + 2.0 * k * (i as f64 + 0.5) / 5.0, kp * (j as f64 + 0.5) / 5.0);
                    attempt = self.newton(s, w);
                    if attempt.is_ok() {
                        break 'grid;
                    }
                }
            }
        }
        let alpha = self.canonical_preimage(attempt?);
        let residual = (self.jacobi(alpha)?.sn - w).norm();
        if residual > 1e-10 * w.norm().max(1.0) {
            return Err(Error::NoConvergence { w, iterations: INVERSE_MAX_ITER });
        }
        Ok(alpha)
    }

    /// Exact preimages along the boundary of the rectangle, where sn is real.
    fn real_line_seed(&self, w: f64) -> Complex64 {
        let (m, k, kp) = (self.m(), self.k(), self.k_prime());
        let a = w.abs();
        let alpha = if a <= 1.0 {
            Complex64::new(real_incomplete(a, m), 0.0)
        } else if a * a * m <= 1.0 {
            // sn(K + it, m) = 1 / dn(t, 1 - m)
            let s = ((1.0 - 1.0 / (a * a)) / (1.0 - m)).sqrt().min(1.0);
            Complex64::new(k, real_incomplete(s, 1.0 - m))
        } else {
            // sn(s + iK', m) = 1 / (√m sn(s, m))
            Complex64::new(real_incomplete(1.0 / (m.sqrt() * a), m), kp)
        };
        if w < 0.0 {
            -alpha.conj()
        } else {
            alpha
        }
    }

    fn newton(&self, seed: Complex64, w: Complex64) -> Result<Complex64> {
        let mut alpha = seed;
        for _ in 0..INVERSE_MAX_ITER {
            let v = self.jacobi(alpha)?;
            let f = v.sn - w;
            if f.norm() <= 1e-15 * w.norm().max(1.0) {
                return Ok(alpha);
            }
            let df = v.cn * v.dn;
            if df.norm() < 1e-300 {
                return Ok(alpha);
            }
            let step = f / df;
            alpha -= step;
            if step.norm() <= 1e-15 * alpha.norm().max(1.0) {
                return Ok(alpha);
            }
        }
        let v = self.jacobi(alpha)?;
        if (v.sn - w).norm() <= 1e-12 * w.norm().max(1.0) {
            return Ok(alpha);
        }
        Err(Error::NoConvergence { w, iterations: INVERSE_MAX_ITER })
    }

    /// Among the preimages `α`, `2K - α` shifted by the period lattice
    /// `(4K, 2iK')`, picks the one inside `[-K, K] × [0, K']`.
    fn canonical_preimage(&self, alpha: Complex64) -> Complex64 {
        let (k, kp) = (self.k(), self.k_prime());
        let reduce = |a: Complex64| {
            let re = a.re - 4.0 * k * (a.re / (4.0 * k)).round();
            let im = a.im - 2.0 * kp * ((a.im - 0.5 * kp) / (2.0 * kp)).round();
            Complex64::new(re, im)
        };
        let outside = |a: Complex64| {
            let dx = (a.re.abs() - k).max(0.0);
            let dy = (-a.im).max(a.im - kp).max(0.0);
            dx + dy
        };
        let mut best = reduce(alpha);
        let mut best_out = outside(best);
        for base in [alpha, Complex64::new(2.0 * k, 0.0) - alpha] {
            let r = reduce(base);
            for p in -1..=1 {
                for q in -1..=1 {
                    let c = r + Complex64::new(4.0 * k * p as f64, 2.0 * kp * q as f64);
                    let o = outside(c);
                    if o < best_out {
                        best = c;
                        best_out = o;
                    }
                }
            }
        }
        // Snap roundoff excursions onto the rectangle boundary.
        Complex64::new(best.re.clamp(-k, k), best.im.clamp(0.0, kp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_values() {
        let md = Modulus::new(0.75).unwrap();
        assert!(inverse_sn(Complex64::new(0.0, 0.0), 0.75).unwrap().norm() < 1e-15);
        let a = inverse_sn(Complex64::new(1.0, 0.0), 0.75).unwrap();
        assert!((a - md.k()).norm() < 1e-10);
    }

    #[test]
    fn energy_round_trip() {
        let (m, e) = (0.75f64, 0.3);
        let alpha = inverse_sn(Complex64::new((e / m).sqrt(), 0.0), m).unwrap();
        let sn = Modulus::new(m).unwrap().jacobi(alpha).unwrap().sn;
        assert!((sn * sn * m - e).norm() < 1e-10);
    }

    #[test]
    fn boundary_segments() {
        let md = Modulus::new(0.6).unwrap();
        let (k, kp) = (md.k(), md.k_prime());
        // gap segment (1, 1/√m) lives on Re α = K
        let a = md.inverse_sn(Complex64::new(1.1, 0.0)).unwrap();
        assert!((a.re - k).abs() < 1e-12 && a.im > 0.0 && a.im < kp);
        // beyond 1/√m: Im α = K'
        let a = md.inverse_sn(Complex64::new(3.0, 0.0)).unwrap();
        assert!((a.im - kp).abs() < 1e-12 && a.re > 0.0 && a.re < k);
        // negative imaginary axis of energy: α purely imaginary
        let a = md.inverse_sn(Complex64::new(0.0, 0.8)).unwrap();
        assert!(a.re.abs() < 1e-12 && a.im > 0.0);
        let a = md.inverse_sn(Complex64::new(-3.0, 0.0)).unwrap();
        assert!((a.im - kp).abs() < 1e-12 && a.re < 0.0);
    }

    #[test]
    fn carlson_matches_quarter_period() {
        let md = Modulus::new(0.3).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let rf = carlson_rf(Complex64::new(0.0, 0.0), one - 0.3, one);
        assert!((rf.re - md.k()).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn round_trip_in_upper_half_plane(re in -3.0f64..3.0, im in 0.0f64..3.0, m in 0.05f64..0.95) {
            let md = Modulus::new(m).unwrap();
            let w = Complex64::new(re, im);
            let a = md.inverse_sn(w).unwrap();
            prop_assert!(a.re.abs() <= md.k() + 1e-12);
            prop_assert!(a.im >= 0.0 && a.im <= md.k_prime() + 1e-12);
            prop_assert!((md.jacobi(a).unwrap().sn - w).norm() < 1e-10 * w.norm().max(1.0));
        }

        #[test]
        fn lower_half_plane_is_mirrored(re in -3.0f64..3.0, im in 0.01f64..3.0) {
            let md = Modulus::new(0.4).unwrap();
            let w = Complex64::new(re, -im);
            let a = md.inverse_sn(w).unwrap();
            prop_assert!(a.im <= 0.0);
            prop_assert!((md.jacobi(a).unwrap().sn - w).norm() < 1e-10 * w.norm().max(1.0));
        }
    }
}
