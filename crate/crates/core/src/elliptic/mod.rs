//! Elliptic integrals, Jacobi elliptic functions, and Jacobi theta functions.
//!
//! Everything here is a pure function of its inputs. Complex-argument Jacobi
//! functions are assembled from two real-argument kernels (one per axis) via
//! the addition formulas, and every evaluator refuses arguments near a pole
//! rather than returning huge values.

mod inverse;
mod jacobi;
mod modulus;
mod theta;

pub use inverse::{inverse_sn, INVERSE_MAX_ITER};
pub use jacobi::{jacobi_complex, jacobi_real, JacobiValues, POLE_TOLERANCE};
pub use modulus::{complete_k, landen_descend, Modulus};
pub use theta::{theta_functions, zeta_z, ThetaBundle};
