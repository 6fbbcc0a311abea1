//! Closed-form band edges, the energy maps relating them, and the analytic
//! dispersion relation of the a = 1 PT-transformed Lamé potential.

mod dispersion;
mod duality;
mod eigen;
mod tables;

pub use dispersion::{bloch_solution_eval, dispersion_analytic, BlochSolution, Branch, DispersionPoint};
pub use duality::{
    lame_edges, modulus_duality_check, pt_duality_check, pt_energy_map, pt_lame_edges, sum_rule_check, DualityReport,
    EdgeSource,
};
pub use eigen::{ArgMap, EdgeForm, Eigenfunction, Prefactor};
pub use tables::{
    assoc_pt_edges_21, closed_form_edges, ground_state, lame_pt_edges_a1, lame_pt_edges_a3, pt_ground_energy,
    BandEdge, EdgeConstants, PeriodClass,
};
