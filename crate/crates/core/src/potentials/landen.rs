use super::spec::{Kind, PotentialSpec};
use crate::elliptic::landen_descend;
use crate::error::{Error, Result};

/// Result of rewriting an `a = b` associated Lamé potential as a rescaled
/// Lamé potential at the descended modulus.
#[derive(Debug, Clone)]
pub struct LandenReduction {
    /// `V_lame(x/α, m̃)/α²`
    pub lame: PotentialSpec,
    /// `V_assoc(x) - V_reduced(x)`
    pub constant: f64,
    pub alpha: f64,
    pub m_tilde: f64,
    /// Largest deviation of `V_assoc - constant - V_reduced` from zero on the
    /// check grid.
    pub max_residual: f64,
}

pub const LANDEN_GRID: usize = 100;
pub const LANDEN_TOL: f64 = 1e-9;

/// Writes `a(a+1)m [sn²(x) + cn²(x)/dn²(x)]` as `a(a+1) m̃ sn²(x/α, m̃)/α² + c`.
///
/// The constant is fitted at one point and the reduction is accepted only if
/// the residual is constant to [`LANDEN_TOL`] over [`LANDEN_GRID`] points of
/// the period.
pub fn landen_reduce_equal_ab(spec: &PotentialSpec) -> Result<LandenReduction> {
    let (a, modulus) = match spec.kind() {
        Kind::AssociatedLame { a, b, modulus } if a == b => (*a, *modulus),
        _ => return Err(Error::InvalidPotential(format!("Landen reduction needs a = b ≥ 1, got {spec}"))),
    };
    let (alpha, m_tilde) = landen_descend(modulus.m())?;
    let lame = PotentialSpec::lame(a, m_tilde)?.rescaled(alpha)?;

    let diff = |x: f64| -> Result<f64> { Ok((spec.eval(x)? - lame.eval(x)?).re) };
    let constant = diff(0.37)?;
    let l = spec.period();
    let mut max_residual = 0.0f64;
    for j in 0..LANDEN_GRID {
        let x = l * j as f64 / LANDEN_GRID as f64;
        max_residual = max_residual.max((diff(x)? - constant).abs());
    }
    if max_residual > LANDEN_TOL {
        return Err(Error::LandenResidual(max_residual));
    }
    Ok(LandenReduction {
        lame,
        constant,
        alpha,
        m_tilde,
        max_residual,
    })
}
