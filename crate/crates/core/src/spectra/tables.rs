use serde::Serialize;

use super::eigen::{ArgMap, EdgeForm, Eigenfunction, Prefactor};
use crate::elliptic::Modulus;
use crate::error::{Error, Result};
use crate::potentials::{Kind, PotentialSpec};

/// The constants appearing in the a = 3 and (2,1) band-edge formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeConstants {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta4: f64,
}

impl EdgeConstants {
    pub fn new(m: f64) -> Self {
        Self {
            delta1: (1.0 - m + 4.0 * m * m).sqrt(),
            delta2: (4.0 - m + m * m).sqrt(),
            delta3: (4.0 - 7.0 * m + 4.0 * m * m).sqrt(),
            delta4: (4.0 - 5.0 * m + m * m).sqrt(),
        }
    }
}

/// Whether a band-edge state repeats after one period (`P`) or changes sign
/// (`A`, so that its true period is twice the potential's).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PeriodClass {
    P,
    A,
}

impl PeriodClass {
    /// The value of the discriminant at an edge of this class.
    pub fn discriminant(self) -> f64 {
        match self {
            PeriodClass::P => 2.0,
            PeriodClass::A => -2.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PeriodClass::P => "P",
            PeriodClass::A => "A",
        }
    }

    /// Classifies `ψ(x + L)/ψ(x)`.
    pub fn from_ratio(ratio: num_complex::Complex64, tol: f64) -> Result<Self> {
        if (ratio - 1.0).norm() < tol {
            Ok(PeriodClass::P)
        } else if (ratio + 1.0).norm() < tol {
            Ok(PeriodClass::A)
        } else {
            Err(Error::AmbiguousPeriodicity((ratio - 1.0).norm().min((ratio + 1.0).norm())))
        }
    }
}

#[derive(Debug, Clone)]
pub struct BandEdge {
    pub index: usize,
    pub energy: f64,
    pub period_class: PeriodClass,
    pub eigenfunction: Option<Eigenfunction>,
    /// Set on both members of a pair of coinciding edges (a closed gap).
    pub degenerate: bool,
}

const DEGENERACY_TOL: f64 = 1e-12;

/// Sorts by energy, assigns indices and flags coinciding neighbours.
pub(crate) fn finalize(mut edges: Vec<BandEdge>) -> Vec<BandEdge> {
    edges.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let n = edges.len();
    for i in 0..n {
        edges[i].index = i;
        edges[i].degenerate = false;
    }
    for i in 1..n {
        let scale = edges[i].energy.abs().max(1.0);
        if (edges[i].energy - edges[i - 1].energy).abs() < DEGENERACY_TOL * scale {
            edges[i].degenerate = true;
            edges[i - 1].degenerate = true;
        }
    }
    edges
}

struct Row {
    energy: f64,
    form: EdgeForm,
    class: PeriodClass,
}

fn row(energy: f64, prefactor: Prefactor, c0: f64, c2: f64, class: PeriodClass) -> Row {
    Row {
        energy,
        form: EdgeForm::new(prefactor, c0, c2),
        class,
    }
}

/// Ground-state energy of the unshifted PT-transformed potential, together
/// with the rows of its edge table relative to that energy.
fn pt_rows(a: u32, b: u32, m: f64) -> Option<(f64, Vec<Row>)> {
    use PeriodClass::{A, P};
    use Prefactor::*;
    let d = EdgeConstants::new(m);
    match (a, b) {
        (1, 0) => Some((
            -1.0 - m,
            vec![
                row(0.0, Sn, 1.0, 0.0, P),
                row(m, Cn, 1.0, 0.0, A),
                row(1.0, Dn, 1.0, 0.0, A),
            ],
        )),
        (3, 0) => {
            let (d1, d2, d3) = (d.delta1, d.delta2, d.delta3);
            Some((
                -5.0 - 5.0 * m - 2.0 * d3,
                vec![
                    row(0.0, Sn, 2.0 + 2.0 * m - d3, -5.0 * m, P),
                    row(3.0 * m + 2.0 * d3 - 2.0 * d2, Cn, 2.0 + m - d2, -5.0 * m, A),
                    row(3.0 + 2.0 * d3 - 2.0 * d1, Dn, 1.0 + 2.0 * m - d1, -5.0 * m, A),
                    row(1.0 + m + 2.0 * d3, SnCnDn, 1.0, 0.0, P),
                    row(4.0 * d3, Sn, 2.0 + 2.0 * m + d3, -5.0 * m, P),
                    row(3.0 * m + 2.0 * d3 + 2.0 * d2, Cn, 2.0 + m + d2, -5.0 * m, A),
                    row(3.0 + 2.0 * d3 + 2.0 * d1, Dn, 1.0 + 2.0 * m + d1, -5.0 * m, A),
                ],
            ))
        }
        (2, 1) => {
            let r = (4.0 - 3.0 * m).sqrt();
            let d4 = d.delta4;
            Some((
                -5.0 - m - 2.0 * r,
                vec![
                    row(0.0, CnOverDn, -2.0 + r, 3.0 * m, P),
                    row(2.0 * r - m - 2.0 * d4, SnOverDn, -2.0 - m + d4, 3.0 * m, A),
                    row(2.0 * r - m + 2.0 * d4, SnOverDn, -2.0 - m - d4, 3.0 * m, A),
                    row(4.0 * r, CnOverDn, -2.0 - r, 3.0 * m, P),
                    row(5.0 - 3.0 * m + 2.0 * r, DnSquared, 1.0, 0.0, P),
                ],
            ))
        }
        _ => None,
    }
}

/// Ground-state energy `E_g` of the PT-transformed potential for the
/// tabulated families `(a, b) ∈ {(1,0), (3,0), (2,1)}`.
pub fn pt_ground_energy(a: u32, b: u32, m: f64) -> Option<f64> {
    pt_rows(a, b, m).map(|(eg, _)| eg)
}

fn pt_table(a: u32, b: u32, m: f64, beta: f64) -> Result<Vec<BandEdge>> {
    let modulus = Modulus::new(m)?;
    let (_, rows) = pt_rows(a, b, m).ok_or_else(|| Error::NoClosedForm(format!("PT (a={a}, b={b})")))?;
    let period = 2.0 * modulus.k_prime();
    let edges = rows
        .into_iter()
        .map(|r| {
            let ef = Eigenfunction::closed(r.form, ArgMap::pt(beta), modulus).normalized(period)?;
            Ok(BandEdge {
                index: 0,
                energy: r.energy,
                period_class: r.class,
                eigenfunction: Some(ef),
                degenerate: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finalize(edges))
}

/// Edges of `-2m sn²(ix+β, m) + 1 + m` (ground state at zero).
pub fn lame_pt_edges_a1(m: f64, beta: f64) -> Result<Vec<BandEdge>> {
    pt_table(1, 0, m, beta)
}

/// The seven edges of the PT-transformed a = 3 Lamé potential, shifted so the
/// ground state sits at zero.
pub fn lame_pt_edges_a3(m: f64, beta: f64) -> Result<Vec<BandEdge>> {
    pt_table(3, 0, m, beta)
}

/// The five edges of the PT-transformed (a, b) = (2, 1) associated Lamé
/// potential, shifted so the ground state sits at zero.
pub fn assoc_pt_edges_21(m: f64, beta: f64) -> Result<Vec<BandEdge>> {
    pt_table(2, 1, m, beta)
}

/// Edges of the untransformed potential, obtained by undoing the
/// anti-isospectral map on the PT table: `E_j = -E^PT_{2a-j}` with the same
/// eigenfunction evaluated at real argument.
fn real_table(a: u32, b: u32, modulus: Modulus) -> Result<Vec<BandEdge>> {
    let m = modulus.m();
    let (eg, rows) = pt_rows(a, b, m).ok_or_else(|| Error::NoClosedForm(format!("(a={a}, b={b})")))?;
    let period = 2.0 * modulus.k();
    let edges = rows
        .into_iter()
        .map(|r| {
            let ef = Eigenfunction::closed(r.form, ArgMap::identity(), modulus).normalized(period)?;
            let class = PeriodClass::from_ratio(ef.shift_ratio(period)?, 1e-8)?;
            Ok(BandEdge {
                index: 0,
                energy: -(r.energy + eg),
                period_class: class,
                eigenfunction: Some(ef),
                degenerate: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finalize(edges))
}

/// Band edges in closed form for any potential built from the tabulated
/// families by PT transforms, shifts, rescalings and SUSY partnering.
///
/// Period classes of derived edges are re-measured from the eigenfunctions
/// over the derived potential's period.
pub fn closed_form_edges(spec: &PotentialSpec) -> Result<Vec<BandEdge>> {
    match spec.kind() {
        Kind::Lame { a, modulus } => real_table(*a, 0, *modulus),
        Kind::AssociatedLame { a, b, modulus } => real_table(*a, *b, *modulus),
        Kind::PtTransform { inner, beta } => {
            let period = spec.period();
            let edges = closed_form_edges(inner)?
                .into_iter()
                .map(|e| remeasure(-e.energy, e.eigenfunction.map(|f| f.substitute(ArgMap::pt(*beta))), period, e.period_class))
                .collect::<Result<Vec<_>>>()?;
            Ok(finalize(edges))
        }
        Kind::Shifted { inner, shift } => Ok(closed_form_edges(inner)?
            .into_iter()
            .map(|e| BandEdge {
                energy: e.energy - shift,
                ..e
            })
            .collect()),
        Kind::Rescaled { inner, alpha } => {
            let period = spec.period();
            let map = ArgMap {
                scale: (1.0 / alpha).into(),
                offset: 0.0.into(),
            };
            let edges = closed_form_edges(inner)?
                .into_iter()
                .map(|e| remeasure(e.energy / (alpha * alpha), e.eigenfunction.map(|f| f.substitute(map)), period, e.period_class))
                .collect::<Result<Vec<_>>>()?;
            Ok(finalize(edges))
        }
        Kind::SusyPartner { inner, ground } => {
            let period = spec.period();
            let edges = closed_form_edges(inner)?
                .into_iter()
                .map(|e| {
                    let ef = if e.index == 0 {
                        Some(Eigenfunction::partner_ground(ground.clone()))
                    } else {
                        e.eigenfunction.map(|f| Eigenfunction::partner_excited(f, ground.clone()))
                    };
                    remeasure(e.energy, ef, period, e.period_class)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(finalize(edges))
        }
    }
}

fn remeasure(energy: f64, ef: Option<Eigenfunction>, period: f64, fallback: PeriodClass) -> Result<BandEdge> {
    let (ef, class) = match ef {
        Some(f) => {
            let f = f.normalized(period)?;
            let class = PeriodClass::from_ratio(f.shift_ratio(period)?, 1e-8)?;
            (Some(f), class)
        }
        None => (None, fallback),
    };
    Ok(BandEdge {
        index: 0,
        energy,
        period_class: class,
        eigenfunction: ef,
        degenerate: false,
    })
}

/// The lowest closed-form edge, which must carry an eigenfunction with exact
/// second derivatives.
pub fn ground_state(spec: &PotentialSpec) -> Result<BandEdge> {
    let edges = closed_form_edges(spec).map_err(|e| match e {
        Error::NoClosedForm(s) => Error::MissingGroundState(s),
        other => other,
    })?;
    let ground = edges
        .into_iter()
        .next()
        .ok_or_else(|| Error::MissingGroundState(spec.to_string()))?;
    match &ground.eigenfunction {
        Some(f) if f.jet(0.1.into()).is_ok() => Ok(ground),
        _ => Err(Error::MissingGroundState(spec.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_constants_at_three_quarters() {
        let d = EdgeConstants::new(0.75);
        assert!((d.delta3 - 1.0).abs() < 1e-15);
        assert!((d.delta1 - 2.5f64.sqrt()).abs() < 1e-15);
        assert!((d.delta2 - 3.8125f64.sqrt()).abs() < 1e-15);
        assert!((d.delta4 - 0.8125f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn a3_table_values() {
        let edges = lame_pt_edges_a3(0.75, 0.5).unwrap();
        let expected = [0.0, 0.3448, 1.8377, 3.75, 4.0, 8.1552, 8.1623];
        for (e, x) in edges.iter().zip(expected) {
            assert!((e.energy - x).abs() < 1e-4, "{} vs {}", e.energy, x);
        }
        let classes: Vec<_> = edges.iter().map(|e| e.period_class.label()).collect();
        assert_eq!(classes.join(""), "PAAPPAA");
    }

    #[test]
    fn a1_table_values() {
        let edges = lame_pt_edges_a1(0.75, 0.5).unwrap();
        let energies: Vec<_> = edges.iter().map(|e| e.energy).collect();
        assert_eq!(energies, vec![0.0, 0.75, 1.0]);
    }

    #[test]
    fn assoc_table_ascends() {
        let edges = assoc_pt_edges_21(0.75, 0.5).unwrap();
        assert_eq!(edges.len(), 5);
        assert!(edges.windows(2).all(|w| w[0].energy < w[1].energy));
        assert_eq!(edges[0].energy, 0.0);
        let top = 5.0 - 2.25 + 2.0 * 1.75f64.sqrt();
        assert!((edges[4].energy - top).abs() < 1e-14);
    }

    #[test]
    fn real_lame_a1_edges() {
        let spec = PotentialSpec::lame(1, 0.3).unwrap();
        let e: Vec<_> = closed_form_edges(&spec).unwrap().iter().map(|e| e.energy).collect();
        assert!((e[0] - 0.3).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14 && (e[2] - 1.3).abs() < 1e-14);
    }

    #[test]
    fn pt_of_real_table_reproduces_pt_table() {
        let m = 0.75;
        let spec = PotentialSpec::lame(3, m).unwrap().pt_transform(0.5).unwrap();
        let derived = closed_form_edges(&spec).unwrap();
        let table = lame_pt_edges_a3(m, 0.5).unwrap();
        let eg = pt_ground_energy(3, 0, m).unwrap();
        for (d, t) in derived.iter().zip(&table) {
            assert!((d.energy - (t.energy + eg)).abs() < 1e-12);
            assert_eq!(d.period_class, t.period_class);
        }
    }
}
