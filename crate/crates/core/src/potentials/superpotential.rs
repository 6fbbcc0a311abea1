use num_complex::Complex64;

use super::spec::{log_derivative_superpotential, Kind, PotentialSpec};
use crate::elliptic::Modulus;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::spectra::{self, pt_ground_energy, Eigenfunction};

/// Which expression evaluates `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperpotentialForm {
    /// `-i cn dn / sn` at `ix + β`.
    PtLameA1,
    /// The a = 3 expression with the `2 + 2m - δ₃ - 5m sn²` denominator.
    PtLameA3,
    /// The (2,1) expression with the `3m sn² - 2 + √(4-3m)` denominator.
    PtAssociated21,
    /// `-ψ_g'/ψ_g` from the exact jet of the closed-form ground state.
    NumericLogDerivative,
}

/// `W(x)` for a potential whose ground state sits at zero energy.
#[derive(Debug, Clone)]
pub struct Superpotential {
    source: PotentialSpec,
    form: SuperpotentialForm,
    ground: Eigenfunction,
    modulus: Modulus,
    beta: f64,
}

impl Superpotential {
    /// Recognizes a shifted PT-transformed a = 1, a = 3 or (2,1) potential
    /// and uses the hand-derived expression for `W`.
    pub fn closed_form(source: &PotentialSpec) -> Result<Self> {
        let not_closed = || Error::InvalidPotential(format!("no closed-form superpotential for {source}"));
        let Kind::Shifted { inner, shift } = source.kind() else {
            return Err(not_closed());
        };
        let Kind::PtTransform { inner: base, beta } = inner.kind() else {
            return Err(not_closed());
        };
        let (form, modulus) = match base.kind() {
            Kind::Lame { a: 1, modulus } => (SuperpotentialForm::PtLameA1, *modulus),
            Kind::Lame { a: 3, modulus } => (SuperpotentialForm::PtLameA3, *modulus),
            Kind::AssociatedLame { a: 2, b: 1, modulus } => (SuperpotentialForm::PtAssociated21, *modulus),
            _ => return Err(not_closed()),
        };
        let (a, b) = base.indices();
        let eg = pt_ground_energy(a, b, modulus.m()).ok_or_else(not_closed)?;
        if (shift - eg).abs() > 1e-9 {
            return Err(Error::MissingGroundState(format!("{source} (shift {shift} differs from the ground energy {eg})")));
        }
        let ground = spectra::ground_state(source)?.eigenfunction.expect("ground state carries a function");
        Ok(Self {
            source: source.clone(),
            form,
            ground,
            modulus,
            beta: *beta,
        })
    }

    /// `W = -ψ_g'/ψ_g` for any potential with a closed-form zero-energy
    /// ground state.
    pub fn log_derivative(source: &PotentialSpec) -> Result<Self> {
        let g = spectra::ground_state(source)?;
        if g.energy.abs() > 1e-9 {
            return Err(Error::MissingGroundState(format!("{source} (ground energy {:.3e})", g.energy)));
        }
        Ok(Self {
            source: source.clone(),
            form: SuperpotentialForm::NumericLogDerivative,
            ground: g.eigenfunction.expect("ground state carries a function"),
            modulus: source.modulus(),
            beta: 0.0,
        })
    }

    pub fn form(&self) -> SuperpotentialForm {
        self.form
    }

    pub fn source(&self) -> &PotentialSpec {
        &self.source
    }

    pub fn ground(&self) -> &Eigenfunction {
        &self.ground
    }

    /// `(W, W')` at real `x`.
    pub fn eval_with_derivative(&self, x: f64) -> Result<(Complex64, Complex64)> {
        let x = Complex64::new(x, 0.0);
        if self.form == SuperpotentialForm::NumericLogDerivative {
            return log_derivative_superpotential(&self.ground, x);
        }
        let i = Complex64::new(0.0, 1.0);
        let y = i * x + self.beta;
        let g = self.ground.value(x)?;
        if g.norm() < 1e-10 {
            return Err(Error::NearNode(x));
        }
        let (s, c, d) = self.modulus.jacobi_jets(y)?;
        let m = self.modulus.m();
        let ij = |j: Jet| j.scale(i);
        let w = match self.form {
            SuperpotentialForm::PtLameA1 => -ij(c * d / s),
            SuperpotentialForm::PtLameA3 => {
                let d3 = spectra::EdgeConstants::new(m).delta3;
                let denom = s.square() * (-5.0 * m) + (2.0 + 2.0 * m - d3);
                -ij(c * d / s) + ij(s * c * d * (10.0 * m) / denom)
            }
            SuperpotentialForm::PtAssociated21 => {
                let r = (4.0 - 3.0 * m).sqrt();
                let denom = s.square() * (3.0 * m) + (r - 2.0);
                ij(s * d / c) - ij(s * c / d * m) - ij(s * c * d * (6.0 * m) / denom)
            }
            SuperpotentialForm::NumericLogDerivative => unreachable!(),
        };
        let w = w.chain_affine(i);
        Ok((w.value, w.d1))
    }
}

pub fn superpotential_eval(w: &Superpotential, x: f64) -> Result<Complex64> {
    w.eval_with_derivative(x).map(|(w, _)| w)
}

/// `W² + W'` for a SUSY-partner spec.
pub fn partner_eval(spec: &PotentialSpec, x: f64) -> Result<Complex64> {
    match spec.kind() {
        Kind::SusyPartner { ground, .. } => {
            let (w, dw) = log_derivative_superpotential(ground, Complex64::new(x, 0.0))?;
            Ok(w * w + dw)
        }
        _ => Err(Error::InvalidPotential(format!("{spec} is not a SUSY partner"))),
    }
}
