use num_complex::Complex64;

/// Errors produced by the elliptic kernels, potential construction, and the
/// Floquet engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("elliptic parameter m = {0} is outside the open interval (0, 1)")]
    ParameterDomain(f64),

    #[error("argument {z} lies within {distance:.3e} of the pole at {pole}")]
    NearPole {
        z: Complex64,
        pole: Complex64,
        distance: f64,
    },

    #[error("argument {z} lies within {distance:.3e} of the theta zero at {zero}")]
    NearThetaZero {
        z: Complex64,
        zero: Complex64,
        distance: f64,
    },

    #[error("inverse sn did not converge for w = {w} after {iterations} iterations")]
    NoConvergence { w: Complex64, iterations: usize },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("no closed-form ground state is known for {0}")]
    MissingGroundState(String),

    #[error("no closed-form band edges are known for {0}")]
    NoClosedForm(String),

    #[error("ground-state wavefunction nearly vanishes at {0}")]
    NearNode(Complex64),

    #[error("integrator step size underflow at x = {x} (pole on the integration line?)")]
    StepUnderflow { x: f64 },

    #[error("monodromy determinant drifted: |det M - 1| = {0:.3e}")]
    WronskianDrift(f64),

    #[error("Landen reduction residual {0:.3e} is not constant across the period")]
    LandenResidual(f64),

    #[error("expected {expected} band edges, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("no branch of the dispersion relation is real at E = {energy} (min |Im k| = {min_imag:.3e})")]
    BranchResolution { energy: f64, min_imag: f64 },

    #[error("ambiguous periodicity: ||Δ| - 2| = {0:.3e}")]
    AmbiguousPeriodicity(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
