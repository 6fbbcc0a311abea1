use num_complex::Complex64;
use serde::Serialize;

use crate::elliptic::Modulus;
use crate::error::{Error, Result};
use crate::jet::Jet;

/// Elliptic prefactor of a band-edge eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Prefactor {
    One,
    Sn,
    Cn,
    Dn,
    SnCnDn,
    CnOverDn,
    SnOverDn,
    DnSquared,
}

/// `prefactor(z) · (c0 + c2 sn²(z))`, the shape shared by every closed-form
/// band edge of the Lamé and associated Lamé families handled here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeForm {
    pub prefactor: Prefactor,
    pub c0: f64,
    pub c2: f64,
}

impl EdgeForm {
    pub const fn new(prefactor: Prefactor, c0: f64, c2: f64) -> Self {
        Self { prefactor, c0, c2 }
    }

    pub const fn bare(prefactor: Prefactor) -> Self {
        Self::new(prefactor, 1.0, 0.0)
    }

    pub fn jet(&self, sn: Jet, cn: Jet, dn: Jet) -> Jet {
        let pre = match self.prefactor {
            Prefactor::One => Jet::real(1.0),
            Prefactor::Sn => sn,
            Prefactor::Cn => cn,
            Prefactor::Dn => dn,
            Prefactor::SnCnDn => sn * cn * dn,
            Prefactor::CnOverDn => cn / dn,
            Prefactor::SnOverDn => sn / dn,
            Prefactor::DnSquared => dn * dn,
        };
        if self.c2 == 0.0 {
            pre * self.c0
        } else {
            pre * (sn.square() * self.c2 + self.c0)
        }
    }

    pub fn describe(&self, arg: &str) -> String {
        let pre = match self.prefactor {
            Prefactor::One => String::new(),
            Prefactor::Sn => format!("sn({arg})"),
            Prefactor::Cn => format!("cn({arg})"),
            Prefactor::Dn => format!("dn({arg})"),
            Prefactor::SnCnDn => format!("sn({arg})cn({arg})dn({arg})"),
            Prefactor::CnOverDn => format!("cn({arg})/dn({arg})"),
            Prefactor::SnOverDn => format!("sn({arg})/dn({arg})"),
            Prefactor::DnSquared => format!("dn²({arg})"),
        };
        if self.c2 == 0.0 && self.c0 == 1.0 {
            pre
        } else if self.c2 == 0.0 {
            format!("{}·{pre}", self.c0)
        } else {
            format!("{pre}[{:.6} {:+.6} sn²({arg})]", self.c0, self.c2)
        }
    }
}

/// Affine substitution `z = scale·x + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgMap {
    pub scale: Complex64,
    pub offset: Complex64,
}

impl ArgMap {
    pub fn identity() -> Self {
        Self {
            scale: Complex64::new(1.0, 0.0),
            offset: Complex64::new(0.0, 0.0),
        }
    }

    /// `x ↦ ix + β`.
    pub fn pt(beta: f64) -> Self {
        Self {
            scale: Complex64::new(0.0, 1.0),
            offset: Complex64::new(beta, 0.0),
        }
    }

    pub fn apply(&self, x: Complex64) -> Complex64 {
        self.scale * x + self.offset
    }

    /// The map `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &ArgMap) -> ArgMap {
        ArgMap {
            scale: self.scale * inner.scale,
            offset: self.scale * inner.offset + self.offset,
        }
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Closed {
        form: EdgeForm,
        map: ArgMap,
        modulus: Modulus,
    },
    /// `1/ψ_g`, the zero-energy state of a SUSY partner.
    PartnerGround { ground: Box<Eigenfunction> },
    /// `ψ' + Wψ` with `W = -ψ_g'/ψ_g`.
    PartnerExcited {
        state: Box<Eigenfunction>,
        ground: Box<Eigenfunction>,
    },
    Substituted { inner: Box<Eigenfunction>, map: ArgMap },
}

/// A band-edge eigenfunction as an analytic function of the potential's
/// own variable. Evaluation accepts complex points so that the function can
/// be carried through further anti-isospectral substitutions.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    shape: Shape,
    scale: f64,
}

impl Eigenfunction {
    pub fn closed(form: EdgeForm, map: ArgMap, modulus: Modulus) -> Self {
        Self {
            shape: Shape::Closed { form, map, modulus },
            scale: 1.0,
        }
    }

    pub fn partner_ground(ground: Eigenfunction) -> Self {
        Self {
            shape: Shape::PartnerGround { ground: Box::new(ground) },
            scale: 1.0,
        }
    }

    pub fn partner_excited(state: Eigenfunction, ground: Eigenfunction) -> Self {
        Self {
            shape: Shape::PartnerExcited {
                state: Box::new(state),
                ground: Box::new(ground),
            },
            scale: 1.0,
        }
    }

    /// The function `x ↦ self(map(x))`.
    pub fn substitute(&self, map: ArgMap) -> Self {
        let shape = match &self.shape {
            Shape::Closed { form, map: inner, modulus } => Shape::Closed {
                form: *form,
                map: inner.compose(&map),
                modulus: *modulus,
            },
            Shape::Substituted { inner, map: inner_map } => Shape::Substituted {
                inner: inner.clone(),
                map: inner_map.compose(&map),
            },
            _ => Shape::Substituted {
                inner: Box::new(self.clone()),
                map,
            },
        };
        Self { shape, scale: self.scale }
    }

    /// Closed-form shape and substitution, when this is a closed form.
    pub fn closed_form(&self) -> Option<(EdgeForm, ArgMap, Modulus)> {
        match &self.shape {
            Shape::Closed { form, map, modulus } => Some((*form, *map, *modulus)),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.shape {
            Shape::Closed { form, map, .. } => {
                let arg = describe_map(map);
                form.describe(&arg)
            }
            Shape::PartnerGround { ground } => format!("1/[{}]", ground.describe()),
            Shape::PartnerExcited { state, .. } => format!("(d/dx + W)[{}]", state.describe()),
            Shape::Substituted { inner, map } => {
                format!("[{}] at {}", inner.describe(), describe_map(map))
            }
        }
    }

    /// Second-order jet with respect to the potential's variable. Only
    /// closed forms carry exact second derivatives.
    pub fn jet(&self, x: Complex64) -> Result<Jet> {
        match &self.shape {
            Shape::Closed { form, map, modulus } => {
                let (sn, cn, dn) = modulus.jacobi_jets(map.apply(x))?;
                Ok(form.jet(sn, cn, dn).chain_affine(map.scale) * (1.0 / self.scale))
            }
            _ => Err(Error::InvalidArgument(format!(
                "second derivative unavailable for {}",
                self.describe()
            ))),
        }
    }

    pub fn value(&self, x: Complex64) -> Result<Complex64> {
        let raw = match &self.shape {
            Shape::Closed { .. } => return Ok(self.jet(x)?.value),
            Shape::PartnerGround { ground } => ground.value(x)?.inv(),
            Shape::PartnerExcited { state, ground } => {
                let g = ground.jet(x)?;
                let s = state.jet(x)?;
                s.d1 - g.log_derivative() * s.value
            }
            Shape::Substituted { inner, map } => inner.value(map.apply(x))?,
        };
        Ok(raw / self.scale)
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        self.value(Complex64::new(x, 0.0))
    }

    /// Rescales so that the sampled maximum of `|ψ|` over `[0, period)` is 1.
    pub fn normalized(mut self, period: f64) -> Result<Self> {
        self.scale = 1.0;
        let samples = 256;
        let mut max = 0.0f64;
        for i in 0..samples {
            let x = period * i as f64 / samples as f64;
            max = max.max(self.eval(x)?.norm());
        }
        if !(max > 0.0 && max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize {}",
                self.describe()
            )));
        }
        self.scale = max;
        Ok(self)
    }

    /// `ψ(x + L)/ψ(x)`, evaluated where `|ψ|` is largest among a few probes.
    pub fn shift_ratio(&self, period: f64) -> Result<Complex64> {
        let mut best: Option<(f64, Complex64)> = None;
        for i in 0..7 {
            let x = period * (0.05 + 0.13 * i as f64);
            let v = self.eval(x)?;
            if best.map_or(true, |(n, _)| v.norm() > n) {
                best = Some((v.norm(), self.eval(x + period)? / v));
            }
        }
        Ok(best.map(|b| b.1).unwrap_or_default())
    }
}

fn describe_map(map: &ArgMap) -> String {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let head = if map.scale == one {
        "x".to_string()
    } else if map.scale == i {
        "ix".to_string()
    } else {
        format!("({})x", map.scale)
    };
    if map.offset == Complex64::new(0.0, 0.0) {
        head
    } else if map.offset.im == 0.0 {
        format!("{head}{:+}", map.offset.re)
    } else {
        format!("{head}+({})", map.offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_direct_evaluation() {
        let md = Modulus::new(0.75).unwrap();
        let form = EdgeForm::new(Prefactor::Sn, 2.5, -3.75);
        let ef = Eigenfunction::closed(form, ArgMap::pt(0.5), md);
        let x = 0.3;
        let z = Complex64::new(0.5, x);
        let v = md.jacobi(z).unwrap();
        let expected = v.sn * (v.sn * v.sn * -3.75 + 2.5);
        assert!((ef.eval(x).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn substitution_composes() {
        let md = Modulus::new(0.5).unwrap();
        let ef = Eigenfunction::closed(EdgeForm::bare(Prefactor::Dn), ArgMap::identity(), md);
        let pt = ef.substitute(ArgMap::pt(0.3)).substitute(ArgMap::pt(0.2));
        // x -> i(ix + 0.2) + 0.3 = -x + (0.3 + 0.2i)
        let (_, map, _) = pt.closed_form().unwrap();
        assert_eq!(map.scale, Complex64::new(-1.0, 0.0));
        assert!((map.offset - Complex64::new(0.3, 0.2)).norm() < 1e-15);
    }

    #[test]
    fn normalization_caps_magnitude() {
        let md = Modulus::new(0.75).unwrap();
        let ef = Eigenfunction::closed(EdgeForm::bare(Prefactor::Cn), ArgMap::pt(0.5), md)
            .normalized(2.0 * md.k_prime())
            .unwrap();
        let max = (0..256)
            .map(|i| ef.eval(2.0 * md.k_prime() * i as f64 / 256.0).unwrap().norm())
            .fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-12);
    }
}
