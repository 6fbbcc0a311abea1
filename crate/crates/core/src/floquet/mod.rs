//! Numerical Floquet theory: monodromy matrices, discriminant scans, band
//! edges and Bloch wavenumbers, independent of any closed form.

mod integrator;
mod monodromy;
mod scan;
mod tableau;

pub use integrator::IntegratorStats;
pub use monodromy::{monodromy, monodromy_with, FreeParticle, MonodromyOptions, MonodromyResult, PeriodicPotential};
pub use scan::{
    classify_periodicity, default_energy_range, discriminant_scan, discriminant_scan_with, dispersion_numeric,
    expected_edge_count, find_band_edges, find_band_edges_with, wavenumber_from_discriminant, EdgeOptions, EdgeSearch,
    NumericEdge, ScanEdge, ScanResult, ScanSample, CLASSIFY_TOL, DEFAULT_SCAN_POINTS, EDGE_TOL, PT_BREAKING_TOL,
    TANGENT_TOL,
};
