use num_complex::Complex64;
use serde::Serialize;

use super::integrator::{integrate, IntegratorStats, State};
use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;

/// A complex potential with a real period.
pub trait PeriodicPotential: Sync {
    fn period(&self) -> f64;
    fn value(&self, x: f64) -> Result<Complex64>;
    fn describe(&self) -> String;
}

impl PeriodicPotential for PotentialSpec {
    fn period(&self) -> f64 {
        PotentialSpec::period(self)
    }

    fn value(&self, x: f64) -> Result<Complex64> {
        self.eval(x)
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

/// `V = 0` with an arbitrary nominal period.
#[derive(Debug, Clone, Copy)]
pub struct FreeParticle {
    pub period: f64,
}

impl PeriodicPotential for FreeParticle {
    fn period(&self) -> f64 {
        self.period
    }

    fn value(&self, _x: f64) -> Result<Complex64> {
        Ok(Complex64::new(0.0, 0.0))
    }

    fn describe(&self) -> String {
        format!("Free(L={})", self.period)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonodromyOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Start of the integration window `[x0, x0 + L]`.
    pub x0: f64,
    /// Allowed `|det M - 1|`, relative to `max(1, |M|²)`.
    pub det_tol: f64,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            x0: 0.0,
            det_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonodromyResult {
    pub energy: f64,
    /// `[[ψ₁(L), ψ₂(L)], [ψ₁'(L), ψ₂'(L)]]` for `ψ₁(0) = 1, ψ₁'(0) = 0` and
    /// `ψ₂(0) = 0, ψ₂'(0) = 1`.
    pub matrix: [[Complex64; 2]; 2],
    pub discriminant: Complex64,
    pub determinant: Complex64,
    pub stats: IntegratorStats,
}

impl MonodromyResult {
    /// Largest entry magnitude.
    pub fn size(&self) -> f64 {
        self.matrix.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn monodromy(pot: &dyn PeriodicPotential, energy: f64) -> Result<MonodromyResult> {
    monodromy_with(pot, energy, &MonodromyOptions::default())
}

/// Transfer matrix of `-ψ'' + Vψ = Eψ` over one period.
///
/// Fails with [`Error::WronskianDrift`] when `|det M - 1|` exceeds
/// `det_tol · max(1, |M|²)`.
pub fn monodromy_with(pot: &dyn PeriodicPotential, energy: f64, opts: &MonodromyOptions) -> Result<MonodromyResult> {
    if !energy.is_finite() {
        return Err(Error::InvalidArgument(format!("energy must be finite, got {energy}")));
    }
    let l = pot.period();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let rhs = |x: f64, y: &State| -> Result<State> {
        let q = pot.value(x)? - energy;
        Ok([y[1], q * y[0], y[3], q * y[2]])
    };
    let (y, stats) = integrate(rhs, opts.x0, opts.x0 + l, [one, zero, zero, one], opts.rtol, opts.atol)?;
    let matrix = [[y[0], y[2]], [y[1], y[3]]];
    let determinant = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
    let result = MonodromyResult {
        energy,
        matrix,
        discriminant: matrix[0][0] + matrix[1][1],
        determinant,
        stats,
    };
    let drift = (determinant - 1.0).norm();
    if drift > opts.det_tol * result.size().powi(2).max(1.0) {
        return Err(Error::WronskianDrift(drift));
    }
    Ok(result)
}
