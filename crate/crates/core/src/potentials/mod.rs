//! Lamé-family potentials and the constructions built on them: the
//! anti-isospectral transform `V ↦ -V(ix + β)`, constant shifts, rescalings
//! and SUSY partners.

mod landen;
mod spec;
mod superpotential;

pub use landen::{landen_reduce_equal_ab, LandenReduction, LANDEN_GRID, LANDEN_TOL};
pub use spec::{Kind, PotentialSpec, BETA_POLE_MARGIN};
pub use superpotential::{partner_eval, superpotential_eval, Superpotential, SuperpotentialForm};
