use std::fmt;

use num_complex::Complex64;

use crate::elliptic::{Modulus, POLE_TOLERANCE};
use crate::error::{Error, Result};
use crate::spectra::{self, Eigenfunction};

/// Minimum distance between the real-x line and any singularity of a
/// PT-transformed potential.
pub const BETA_POLE_MARGIN: f64 = 1e-4;

/// Number of points used when a potential has to be validated by sampling.
const VALIDATION_SAMPLES: usize = 512;

/// How a potential is assembled.
#[derive(Debug, Clone)]
pub enum Kind {
    /// `a(a+1) m sn²(x, m)`
    Lame { a: u32, modulus: Modulus },
    /// `a(a+1) m sn²(x, m) + b(b+1) m cn²(x, m)/dn²(x, m)`, with `a ≥ b ≥ 1`
    AssociatedLame { a: u32, b: u32, modulus: Modulus },
    /// `-V(ix + β)`
    PtTransform { inner: Box<PotentialSpec>, beta: f64 },
    /// `V(x) - shift`
    Shifted { inner: Box<PotentialSpec>, shift: f64 },
    /// `W² + W'` with `W = -ψ_g'/ψ_g` built from the zero-energy ground
    /// state of the inner potential.
    SusyPartner { inner: Box<PotentialSpec>, ground: Eigenfunction },
    /// `V(x/α)/α²`
    Rescaled { inner: Box<PotentialSpec>, alpha: f64 },
}

/// A composable, immutable potential description, evaluable at real and
/// complex points.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    kind: Kind,
}

/// Singular points `offset + 2jK_re + i·2kK_im`-style lattice: every offset
/// is repeated with the real and imaginary periods.
#[derive(Debug, Clone)]
pub(crate) struct Singularities {
    offsets: Vec<Complex64>,
    real_period: f64,
    imag_period: f64,
}

impl Singularities {
    /// Distance between the real axis and the nearest singular point.
    fn distance_to_real_axis(&self) -> f64 {
        self.offsets
            .iter()
            .map(|o| {
                let p = self.imag_period;
                (o.im - p * (o.im / p).round()).abs()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

impl PotentialSpec {
    pub fn lame(a: u32, m: f64) -> Result<Self> {
        Ok(Self {
            kind: Kind::Lame {
                a,
                modulus: Modulus::new(m)?,
            },
        })
    }

    /// Associated Lamé potential. `b = 0` yields the plain Lamé potential.
    pub fn associated_lame(a: u32, b: u32, m: f64) -> Result<Self> {
        if b == 0 {
            return Self::lame(a, m);
        }
        if b > a {
            return Err(Error::InvalidPotential(format!("associated Lamé requires a ≥ b, got a = {a}, b = {b}")));
        }
        Ok(Self {
            kind: Kind::AssociatedLame {
                a,
                b,
                modulus: Modulus::new(m)?,
            },
        })
    }

    /// `-V(ix + β)`. `β` must lie in `(0, L)` with `L` the current real
    /// period and keep every singularity at least [`BETA_POLE_MARGIN`] away
    /// from the real line.
    pub fn pt_transform(&self, beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta == 0.0 {
            return Err(Error::InvalidPotential(format!("β must be a nonzero real number, got {beta}")));
        }
        let limit = self.period();
        if beta <= 0.0 || beta >= limit {
            return Err(Error::InvalidPotential(format!("β = {beta} must lie in (0, {limit:.6})")));
        }
        let out = Self {
            kind: Kind::PtTransform {
                inner: Box::new(self.clone()),
                beta,
            },
        };
        if let Some(s) = out.singularities() {
            let d = s.distance_to_real_axis();
            if d < BETA_POLE_MARGIN {
                return Err(Error::InvalidPotential(format!(
                    "β = {beta} places a singularity within {d:.2e} of the real line"
                )));
            }
        }
        out.validate_by_sampling()?;
        Ok(out)
    }

    pub fn shifted(&self, shift: f64) -> Self {
        Self {
            kind: Kind::Shifted {
                inner: Box::new(self.clone()),
                shift,
            },
        }
    }

    /// `V(x/α)/α²`, whose spectrum is that of `V` divided by `α²`.
    pub fn rescaled(&self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidPotential(format!("rescaling factor must be positive, got {alpha}")));
        }
        Ok(Self {
            kind: Kind::Rescaled {
                inner: Box::new(self.clone()),
                alpha,
            },
        })
    }

    /// The SUSY partner `W² + W'`. Requires a closed-form ground state at
    /// energy zero (see [`PotentialSpec::shift_to_zero`]).
    pub fn susy_partner(&self) -> Result<Self> {
        let ground = spectra::ground_state(self)?;
        if ground.energy.abs() > 1e-9 {
            return Err(Error::MissingGroundState(format!(
                "{self} (ground-state energy is {:.3e}, not zero)",
                ground.energy
            )));
        }
        let out = Self {
            kind: Kind::SusyPartner {
                inner: Box::new(self.clone()),
                ground: ground.eigenfunction.expect("ground_state guarantees an eigenfunction"),
            },
        };
        out.validate_by_sampling()?;
        Ok(out)
    }

    /// Shifts by the lowest closed-form band edge so that it sits at zero.
    pub fn shift_to_zero(&self) -> Result<Self> {
        let edges = spectra::closed_form_edges(self)?;
        Ok(self.shifted(edges[0].energy))
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// The elliptic modulus of the underlying Lamé-family building block.
    pub fn modulus(&self) -> Modulus {
        match &self.kind {
            Kind::Lame { modulus, .. } | Kind::AssociatedLame { modulus, .. } => *modulus,
            Kind::PtTransform { inner, .. }
            | Kind::Shifted { inner, .. }
            | Kind::SusyPartner { inner, .. }
            | Kind::Rescaled { inner, .. } => inner.modulus(),
        }
    }

    /// `(a, b)` of the underlying building block.
    pub fn indices(&self) -> (u32, u32) {
        match &self.kind {
            Kind::Lame { a, .. } => (*a, 0),
            Kind::AssociatedLame { a, b, .. } => (*a, *b),
            Kind::PtTransform { inner, .. }
            | Kind::Shifted { inner, .. }
            | Kind::SusyPartner { inner, .. }
            | Kind::Rescaled { inner, .. } => inner.indices(),
        }
    }

    /// Number of PT transforms applied.
    pub fn pt_depth(&self) -> usize {
        match &self.kind {
            Kind::Lame { .. } | Kind::AssociatedLame { .. } => 0,
            Kind::PtTransform { inner, .. } => inner.pt_depth() + 1,
            Kind::Shifted { inner, .. } | Kind::SusyPartner { inner, .. } | Kind::Rescaled { inner, .. } => inner.pt_depth(),
        }
    }

    /// Real period.
    pub fn period(&self) -> f64 {
        match &self.kind {
            Kind::Lame { modulus, .. } | Kind::AssociatedLame { modulus, .. } => 2.0 * modulus.k(),
            Kind::PtTransform { inner, .. } => inner.imag_period(),
            Kind::Shifted { inner, .. } | Kind::SusyPartner { inner, .. } => inner.period(),
            Kind::Rescaled { inner, alpha } => alpha * inner.period(),
        }
    }

    /// Period along the imaginary direction.
    pub fn imag_period(&self) -> f64 {
        match &self.kind {
            Kind::Lame { modulus, .. } | Kind::AssociatedLame { modulus, .. } => 2.0 * modulus.k_prime(),
            Kind::PtTransform { inner, .. } => inner.period(),
            Kind::Shifted { inner, .. } | Kind::SusyPartner { inner, .. } => inner.imag_period(),
            Kind::Rescaled { inner, alpha } => alpha * inner.imag_period(),
        }
    }

    pub(crate) fn singularities(&self) -> Option<Singularities> {
        let i = Complex64::new(0.0, 1.0);
        match &self.kind {
            Kind::Lame { a, modulus } => Some(Singularities {
                offsets: if *a == 0 { vec![] } else { vec![i * modulus.k_prime()] },
                real_period: 2.0 * modulus.k(),
                imag_period: 2.0 * modulus.k_prime(),
            }),
            Kind::AssociatedLame { modulus, .. } => Some(Singularities {
                offsets: vec![i * modulus.k_prime(), Complex64::new(modulus.k(), modulus.k_prime())],
                real_period: 2.0 * modulus.k(),
                imag_period: 2.0 * modulus.k_prime(),
            }),
            Kind::PtTransform { inner, beta } => inner.singularities().map(|s| Singularities {
                // i z + β = o  ⇔  z = -i (o - β)
                offsets: s.offsets.iter().map(|o| -i * (o - beta)).collect(),
                real_period: s.imag_period,
                imag_period: s.real_period,
            }),
            Kind::Shifted { inner, .. } => inner.singularities(),
            Kind::Rescaled { inner, alpha } => inner.singularities().map(|s| Singularities {
                offsets: s.offsets.iter().map(|o| o * alpha).collect(),
                real_period: s.real_period * alpha,
                imag_period: s.imag_period * alpha,
            }),
            Kind::SusyPartner { .. } => None,
        }
    }

    fn validate_by_sampling(&self) -> Result<()> {
        let period = self.period();
        for j in 0..VALIDATION_SAMPLES {
            let x = period * j as f64 / VALIDATION_SAMPLES as f64;
            let v = self.eval(x).map_err(|e| Error::InvalidPotential(format!("{self} is singular near x = {x:.6}: {e}")))?;
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::InvalidPotential(format!("{self} is not finite at x = {x:.6}")));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        self.eval_complex(Complex64::new(x, 0.0))
    }

    /// Analytic continuation of the potential to complex `z`.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        match &self.kind {
            Kind::Lame { a, modulus } => {
                if *a == 0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let sn = modulus.jacobi(z)?.sn;
                Ok(sn * sn * lame_coupling(*a, modulus.m()))
            }
            Kind::AssociatedLame { a, b, modulus } => {
                let v = modulus.jacobi(z)?;
                let shifted = z - modulus.k();
                let (pole, distance) = modulus.nearest_pole(shifted);
                if distance < POLE_TOLERANCE {
                    return Err(Error::NearPole {
                        z,
                        pole: pole + modulus.k(),
                        distance,
                    });
                }
                let ratio = v.cn / v.dn;
                Ok(v.sn * v.sn * lame_coupling(*a, modulus.m()) + ratio * ratio * lame_coupling(*b, modulus.m()))
            }
            Kind::PtTransform { inner, beta } => Ok(-inner.eval_complex(Complex64::new(0.0, 1.0) * z + beta)?),
            Kind::Shifted { inner, shift } => Ok(inner.eval_complex(z)? - shift),
            Kind::Rescaled { inner, alpha } => Ok(inner.eval_complex(z / alpha)? / (alpha * alpha)),
            Kind::SusyPartner { ground, .. } => {
                let (w, dw) = log_derivative_superpotential(ground, z)?;
                Ok(w * w + dw)
            }
        }
    }

    /// Samples `n` uniform points over `periods` periods starting at 0.
    pub fn sample(&self, n_per_period: usize, periods: usize) -> Result<Vec<(f64, Complex64)>> {
        let l = self.period();
        let total = n_per_period * periods;
        (0..total)
            .map(|j| {
                let x = l * j as f64 / n_per_period as f64;
                self.eval(x).map(|v| (x, v))
            })
            .collect()
    }
}

fn lame_coupling(a: u32, m: f64) -> f64 {
    let a = a as f64;
    a * (a + 1.0) * m
}

/// `(W, W')` with `W = -ψ'/ψ`, from the exact jet of `ψ`.
pub(crate) fn log_derivative_superpotential(ground: &Eigenfunction, z: Complex64) -> Result<(Complex64, Complex64)> {
    let g = ground.jet(z)?;
    if g.value.norm() < 1e-10 {
        return Err(Error::NearNode(z));
    }
    let l1 = g.d1 / g.value;
    Ok((-l1, l1 * l1 - g.d2 / g.value))
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Lame { a, modulus } => write!(f, "Lame(a={a}, m={})", modulus.m()),
            Kind::AssociatedLame { a, b, modulus } => write!(f, "AssociatedLame(a={a}, b={b}, m={})", modulus.m()),
            Kind::PtTransform { inner, beta } => write!(f, "PT[{inner}; beta={beta}]"),
            Kind::Shifted { inner, shift } if *shift < 0.0 => write!(f, "({inner} + {})", -shift),
            Kind::Shifted { inner, shift } => write!(f, "({inner} - {shift})"),
            Kind::SusyPartner { inner, .. } => write!(f, "Partner[{inner}]"),
            Kind::Rescaled { inner, alpha } => write!(f, "Rescaled[{inner}; alpha={alpha}]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(l: f64) -> impl Iterator<Item = f64> {
        (0..64).map(move |j| -l + 2.0 * l * j as f64 / 63.0)
    }

    #[test]
    fn lame_at_origin() {
        let v = PotentialSpec::lame(1, 0.75).unwrap();
        assert_eq!(v.eval(0.0).unwrap(), Complex64::new(0.0, 0.0));
        assert!(v.eval(0.9).unwrap().im.abs() < 1e-12);
    }

    #[test]
    fn pt_symmetry_and_period() {
        let v = PotentialSpec::lame(2, 0.5).unwrap().pt_transform(0.5).unwrap();
        let l = v.period();
        assert!((l - 2.0 * Modulus::new(0.5).unwrap().k_prime()).abs() < 1e-15);
        for x in grid(l) {
            let a = v.eval(x).unwrap();
            let b = v.eval(-x).unwrap();
            assert!((b.conj() - a).norm() < 1e-10);
            assert!((v.eval(x + l).unwrap() - a).norm() < 1e-10);
        }
    }

    #[test]
    fn period_swaps_under_pt() {
        let v = PotentialSpec::lame(1, 0.25).unwrap();
        assert!((v.period() - 2.0 * crate::elliptic::complete_k(0.25).unwrap()).abs() < 1e-15);
        let pt = v.pt_transform(0.5).unwrap();
        assert!((pt.period() - 2.0 * crate::elliptic::complete_k(0.75).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn figure_one_shift() {
        let v = PotentialSpec::lame(3, 0.75).unwrap().pt_transform(0.5).unwrap();
        let shifted = v.shift_to_zero().unwrap();
        match shifted.kind() {
            Kind::Shifted { shift, .. } => assert!((shift + 10.75).abs() < 1e-12),
            _ => unreachable!(),
        }
    }

    #[test]
    fn beta_validation() {
        let v = PotentialSpec::lame(3, 0.75).unwrap();
        assert!(v.pt_transform(0.0).is_err());
        assert!(v.pt_transform(-0.5).is_err());
        assert!(v.pt_transform(v.period()).is_err());
        let assoc = PotentialSpec::associated_lame(2, 1, 0.75).unwrap();
        let k = assoc.modulus().k();
        assert!(assoc.pt_transform(k).is_err());
        assert!(assoc.pt_transform(k + 2e-4).is_ok());
    }

    #[test]
    fn associated_with_b_zero_is_lame() {
        let a = PotentialSpec::associated_lame(3, 0, 0.4).unwrap();
        let l = PotentialSpec::lame(3, 0.4).unwrap();
        for x in grid(2.0) {
            assert_eq!(a.eval(x).unwrap(), l.eval(x).unwrap());
        }
        assert!(PotentialSpec::associated_lame(1, 2, 0.4).is_err());
    }

    #[test]
    fn rescaling() {
        let v = PotentialSpec::lame(1, 0.3).unwrap();
        let r = v.rescaled(0.5).unwrap();
        assert!((r.period() - 0.5 * v.period()).abs() < 1e-15);
        let x = 0.2;
        assert!((r.eval(x).unwrap() - v.eval(x / 0.5).unwrap() * 4.0).norm() < 1e-14);
    }
}
