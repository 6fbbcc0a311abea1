use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::elliptic::{Modulus, ThetaBundle, POLE_TOLERANCE};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// Tolerance on `|Im k|` for accepting a branch as an allowed-band momentum.
const BRANCH_TOL: f64 = 1e-6;

/// One of the four sign/representative combinations of the dispersion
/// relation. `sign` selects the Bloch solution `H(y + sign·α) e^{-sign·y Z(α)}/Θ(y)`
/// and `reflected` replaces `α` by the other preimage `2K - α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub sign: i8,
    pub reflected: bool,
}

const BRANCHES: [Branch; 4] = [
    Branch { sign: 1, reflected: false },
    Branch { sign: -1, reflected: false },
    Branch { sign: 1, reflected: true },
    Branch { sign: -1, reflected: true },
];

#[derive(Debug, Clone, Serialize)]
pub struct DispersionPoint {
    pub energy: f64,
    pub alpha: Complex64,
    /// Bloch wavenumber reduced to `(-π/L, π/L]`.
    pub k: Complex64,
    pub branch: Branch,
    /// Every combination tried, with its reduced wavenumber.
    pub candidates: Vec<(Branch, Complex64)>,
}

/// Bloch momentum `κ(α) = Z(α) + πα/(2KK')` of the solution with sign `+`,
/// up to orientation: that solution picks up `e^{-iκL}` over one period
/// `L = 2K'`.
fn kappa(bundle: &ThetaBundle, alpha: Complex64) -> Result<Complex64> {
    let md = bundle.modulus();
    Ok(bundle.zeta(alpha)? + alpha * (PI / (2.0 * md.k() * md.k_prime())))
}

fn reduce_to_zone(k: Complex64, period: f64) -> Complex64 {
    let g = 2.0 * PI / period;
    let mut re = k.re - g * (k.re / g).round();
    if re <= -PI / period + 1e-14 {
        re += g;
    }
    Complex64::new(re, k.im)
}

fn alpha_for_energy(md: &Modulus, energy: f64) -> Result<Complex64> {
    let w = Complex64::new(energy / md.m(), 0.0).sqrt();
    md.inverse_sn(w)
}

/// Analytic Bloch wavenumber of `-2m sn²(ix+β, m) + 1 + m` at energy `E`,
/// where `E = m sn²(α, m)`.
///
/// All four branches are evaluated; the first with `|Im k| < 1e-6` and
/// `Re k ≥ 0` is selected. The wavenumber does not depend on `β`, which is
/// accepted for symmetry with [`BlochSolution::new`].
pub fn dispersion_analytic(m: f64, _beta: f64, energy: f64) -> Result<DispersionPoint> {
    let md = Modulus::new(m)?;
    let bundle = ThetaBundle::new(md);
    let period = 2.0 * md.k_prime();
    let alpha = alpha_for_energy(&md, energy)?;

    let mut candidates = Vec::with_capacity(4);
    for br in BRANCHES {
        let rep = if br.reflected { Complex64::new(2.0 * md.k(), 0.0) - alpha } else { alpha };
        let k = -f64::from(br.sign) * kappa(&bundle, rep)?;
        candidates.push((br, reduce_to_zone(k, period)));
    }
    let chosen = candidates
        .iter()
        .find(|(_, k)| k.im.abs() < BRANCH_TOL && k.re >= -1e-12);
    match chosen {
        Some(&(branch, k)) => Ok(DispersionPoint {
            energy,
            alpha,
            k: Complex64::new(k.re.max(0.0), k.im),
            branch,
            candidates,
        }),
        None => Err(Error::BranchResolution {
            energy,
            min_imag: candidates.iter().map(|(_, k)| k.im.abs()).fold(f64::INFINITY, f64::min),
        }),
    }
}

/// `ψ_±(x) = H(y ± α) e^{∓y Z(α)} / Θ(y)` with `y = ix + β`.
#[derive(Debug, Clone)]
pub struct BlochSolution {
    bundle: ThetaBundle,
    beta: f64,
    alpha: Complex64,
    zeta: Complex64,
    sign: f64,
}

impl BlochSolution {
    pub fn new(m: f64, beta: f64, energy: f64, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidArgument(format!("sign must be ±1, got {sign}")));
        }
        let md = Modulus::new(m)?;
        let bundle = ThetaBundle::new(md);
        let alpha = alpha_for_energy(&md, energy)?;
        let zeta = bundle.zeta(alpha)?;
        Ok(Self {
            bundle,
            beta,
            alpha,
            zeta,
            sign: f64::from(sign),
        })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// `ψ(x + L)/ψ(x)` for `L = 2K'`.
    pub fn bloch_factor(&self) -> Complex64 {
        (Complex64::new(0.0, 2.0 * self.bundle.modulus().k_prime()) * self.momentum()).exp()
    }

    /// Unreduced wavenumber with `ψ(x + L) = e^{ikL} ψ(x)`.
    pub fn momentum(&self) -> Complex64 {
        let md = self.bundle.modulus();
        -(self.zeta + self.alpha * (PI / (2.0 * md.k() * md.k_prime()))) * self.sign
    }

    /// Second-order jet in `x`.
    pub fn jet(&self, x: f64) -> Result<Jet> {
        let i = Complex64::new(0.0, 1.0);
        let y = i * x + self.beta;
        let md = self.bundle.modulus();
        let (zero, distance) = md.nearest_pole(y);
        if distance < POLE_TOLERANCE {
            return Err(Error::NearThetaZero { z: y, zero, distance });
        }
        let h = self.bundle.eta_jet(y + self.alpha * self.sign);
        let t = self.bundle.theta_jet(y);
        let slope = -self.zeta * self.sign;
        let e = Jet::new(slope * y, slope, Complex64::new(0.0, 0.0)).exp();
        Ok((h * e / t).chain_affine(i))
    }

    pub fn value(&self, x: f64) -> Result<Complex64> {
        self.jet(x).map(|j| j.value)
    }
}

pub fn bloch_solution_eval(m: f64, beta: f64, energy: f64, sign: i8, x: f64) -> Result<Complex64> {
    BlochSolution::new(m, beta, energy, sign)?.value(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const M: f64 = 0.75;
    const BETA: f64 = 0.5;

    fn potential(x: f64) -> Complex64 {
        let md = Modulus::new(M).unwrap();
        let sn = md.jacobi(Complex64::new(BETA, x)).unwrap().sn;
        sn * sn * (-2.0 * M) + 1.0 + M
    }

    #[test]
    fn edges_sit_at_zone_centre_or_boundary() {
        let l = 2.0 * Modulus::new(M).unwrap().k_prime();
        for e in [0.0, M, 1.0] {
            let p = dispersion_analytic(M, BETA, e).unwrap();
            let kl = p.k.re * l;
            assert!(kl.abs() < 1e-7 || (kl - PI).abs() < 1e-7, "E={e}: kL={kl}");
            assert!(p.k.im.abs() < 1e-8);
        }
    }

    #[test]
    fn bloch_solution_satisfies_ode() {
        for e in [0.2, M / 2.0, 1.7] {
            for sign in [1, -1] {
                let b = BlochSolution::new(M, BETA, e, sign).unwrap();
                let mut scale = 0.0f64;
                let mut worst = 0.0f64;
                for j in 0..20 {
                    let x = -1.0 + 0.17 * j as f64;
                    let psi = b.jet(x).unwrap();
                    let v = potential(x);
                    scale = scale.max((v * psi.value).norm()).max((psi.value * e).norm());
                    worst = worst.max((-psi.d2 + v * psi.value - psi.value * e).norm());
                }
                assert!(worst < 1e-7 * scale, "E={e} sign={sign}: {worst:e}");
            }
        }
    }

    #[test]
    fn bloch_factor_matches_shift() {
        let l = 2.0 * Modulus::new(M).unwrap().k_prime();
        for sign in [1, -1] {
            let b = BlochSolution::new(M, BETA, M / 2.0, sign).unwrap();
            for j in 0..10 {
                let x = -1.2 + 0.3 * j as f64;
                let ratio = b.value(x + l).unwrap() / b.value(x).unwrap();
                assert!((ratio - b.bloch_factor()).norm() < 1e-7);
            }
        }
        let p = BlochSolution::new(M, BETA, M / 2.0, 1).unwrap().bloch_factor();
        let q = BlochSolution::new(M, BETA, M / 2.0, -1).unwrap().bloch_factor();
        assert!((p * q - 1.0).norm() < 1e-10);
        assert!((p.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gap_energy_has_no_real_branch() {
        assert!(matches!(dispersion_analytic(M, BETA, 0.9), Err(Error::BranchResolution { .. })));
    }
}
