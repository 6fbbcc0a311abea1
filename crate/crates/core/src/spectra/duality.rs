use serde::Serialize;

use super::tables::closed_form_edges;
use crate::error::{Error, Result};
use crate::floquet::{default_energy_range, find_band_edges_with, EdgeOptions};
use crate::potentials::PotentialSpec;

/// Where a list of edge energies comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdgeSource {
    ClosedForm,
    Floquet,
}

impl EdgeSource {
    pub fn tolerance(self) -> f64 {
        match self {
            EdgeSource::ClosedForm => 1e-8,
            EdgeSource::Floquet => 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub relation: String,
    pub a: u32,
    pub m: f64,
    pub source: EdgeSource,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl DualityReport {
    fn new(relation: String, a: u32, m: f64, source: EdgeSource, lhs: Vec<f64>, rhs: Vec<f64>) -> Self {
        let max_violation = lhs.iter().zip(&rhs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let tolerance = source.tolerance();
        Self {
            relation,
            a,
            m,
            source,
            lhs,
            rhs,
            max_violation,
            tolerance,
            passed: max_violation <= tolerance,
        }
    }
}

/// `E^PT_j = -E_{2a-j}`: negation and reversal of an ascending list.
pub fn pt_energy_map(lame_edges: &[f64], a: u32) -> Result<Vec<f64>> {
    let expected = 2 * a as usize + 1;
    if lame_edges.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: lame_edges.len(),
        });
    }
    Ok(lame_edges.iter().rev().map(|e| -e).collect())
}

fn edges_of(spec: &PotentialSpec, a: u32, source: EdgeSource) -> Result<Vec<f64>> {
    let expected = 2 * a as usize + 1;
    let energies: Vec<f64> = match source {
        EdgeSource::ClosedForm => closed_form_edges(spec)?.iter().map(|e| e.energy).collect(),
        EdgeSource::Floquet => {
            let (lo, hi) = default_energy_range(spec)?;
            let opts = EdgeOptions {
                expected: Some(expected),
                ..Default::default()
            };
            find_band_edges_with(spec, lo, hi, &opts)?.energies()
        }
    };
    if energies.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: energies.len(),
        });
    }
    Ok(energies)
}

/// Ascending edges of `a(a+1) m sn²(x, m)`.
pub fn lame_edges(a: u32, m: f64, source: EdgeSource) -> Result<Vec<f64>> {
    edges_of(&PotentialSpec::lame(a, m)?, a, source)
}

/// Ascending edges of `-a(a+1) m sn²(ix + β, m)` (not shifted).
pub fn pt_lame_edges(a: u32, m: f64, beta: f64, source: EdgeSource) -> Result<Vec<f64>> {
    edges_of(&PotentialSpec::lame(a, m)?.pt_transform(beta)?, a, source)
}

/// `E_j(m) = a(a+1) - E_{2a-j}(1-m)`.
pub fn modulus_duality_check(a: u32, m: f64, source: EdgeSource) -> Result<DualityReport> {
    let lhs = lame_edges(a, m, source)?;
    let c = (a * (a + 1)) as f64;
    let rhs = lame_edges(a, 1.0 - m, source)?.iter().rev().map(|e| c - e).collect();
    Ok(DualityReport::new("E_j(m) = a(a+1) - E_{2a-j}(1-m)".into(), a, m, source, lhs, rhs))
}

/// `E^PT_j(m) = E_j(1-m) - a(a+1)`.
pub fn pt_duality_check(a: u32, m: f64, beta: f64, source: EdgeSource) -> Result<DualityReport> {
    let lhs = pt_lame_edges(a, m, beta, source)?;
    let c = (a * (a + 1)) as f64;
    let rhs = lame_edges(a, 1.0 - m, source)?.iter().map(|e| e - c).collect();
    Ok(DualityReport::new("E^PT_j(m) = E_j(1-m) - a(a+1)".into(), a, m, source, lhs, rhs))
}

/// At `m = 1/2`: `E_j + E_{2a-j} = a(a+1)` for every `j`, which includes
/// `E_a = a(a+1)/2`.
pub fn sum_rule_check(a: u32, source: EdgeSource) -> Result<DualityReport> {
    let e = lame_edges(a, 0.5, source)?;
    let c = (a * (a + 1)) as f64;
    let lhs = e.iter().zip(e.iter().rev()).map(|(x, y)| x + y).collect();
    let rhs = vec![c; e.len()];
    Ok(DualityReport::new("E_j + E_{2a-j} = a(a+1) at m = 1/2".into(), a, 0.5, source, lhs, rhs))
}
