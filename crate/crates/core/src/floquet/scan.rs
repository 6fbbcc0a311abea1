use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::monodromy::{monodromy_with, MonodromyOptions, PeriodicPotential};
use crate::error::{Error, Result};
use crate::potentials::{Kind, PotentialSpec};
use crate::spectra::PeriodClass;

/// `|Im Δ|` above which a sample is flagged as PT-breaking.
pub const PT_BREAKING_TOL: f64 = 1e-6;
/// Width of the bisection bracket at which a root of `Δ ∓ 2` is accepted.
pub const EDGE_TOL: f64 = 1e-10;
/// `||Δ| - 2|` below which an extremum of `Δ` counts as a touching (closed) gap.
pub const TANGENT_TOL: f64 = 1e-7;
/// `||Δ| - 2|` allowed when classifying an edge.
pub const CLASSIFY_TOL: f64 = 1e-6;
/// Default number of coarse samples for edge bracketing.
pub const DEFAULT_SCAN_POINTS: usize = 400;

#[derive(Debug, Clone, Serialize)]
pub struct ScanSample {
    pub energy: f64,
    /// `NaN` when the integration failed.
    pub discriminant: Complex64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanEdge {
    pub energy: f64,
    pub kind: PeriodClass,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub samples: Vec<ScanSample>,
    /// Indices of samples with `|Im Δ| > 1e-6 max(1, |Δ|)`.
    pub pt_breaking: Vec<usize>,
    /// Level crossings of `Re Δ = ±2` between neighbouring samples, located
    /// to the midpoint of the sample interval.
    pub edges_found: Vec<ScanEdge>,
    /// Places where consecutive crossings do not alternate as in a
    /// band/gap/band pattern (typically a gap closed between samples).
    pub interleaving_violations: Vec<f64>,
}

impl ScanResult {
    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.energy).collect()
    }

    pub fn discriminants(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.discriminant).collect()
    }
}

/// Discriminant `Δ(E)` of `pot` on `n` uniform energies in `[e_min, e_max]`,
/// evaluated in parallel and assembled in grid order.
pub fn discriminant_scan(pot: &dyn PeriodicPotential, e_min: f64, e_max: f64, n: usize) -> Result<ScanResult> {
    discriminant_scan_with(pot, e_min, e_max, n, &MonodromyOptions::default())
}

pub fn discriminant_scan_with(
    pot: &dyn PeriodicPotential,
    e_min: f64,
    e_max: f64,
    n: usize,
    opts: &MonodromyOptions,
) -> Result<ScanResult> {
    let energies = uniform_grid(e_min, e_max, n)?;
    let samples: Vec<ScanSample> = energies
        .par_iter()
        .map(|&e| match monodromy_with(pot, e, opts) {
            Ok(r) => ScanSample {
                energy: e,
                discriminant: r.discriminant,
                failure: None,
            },
            Err(err) => ScanSample {
                energy: e,
                discriminant: Complex64::new(f64::NAN, f64::NAN),
                failure: Some(err.to_string()),
            },
        })
        .collect();

    let pt_breaking = samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.discriminant.im.abs() > PT_BREAKING_TOL * s.discriminant.norm().max(1.0))
        .map(|(i, _)| i)
        .collect();

    let mut edges_found = Vec::new();
    for w in samples.windows(2) {
        let (d0, d1) = (w[0].discriminant.re, w[1].discriminant.re);
        for class in [PeriodClass::P, PeriodClass::A] {
            let level = class.discriminant();
            if (d0 - level) * (d1 - level) < 0.0 {
                edges_found.push(ScanEdge {
                    energy: 0.5 * (w[0].energy + w[1].energy),
                    kind: class,
                    multiplicity: 1,
                });
            }
        }
    }
    let interleaving_violations = interleaving_violations(&edges_found);
    Ok(ScanResult {
        samples,
        pt_breaking,
        edges_found,
        interleaving_violations,
    })
}

/// Starting above the lowest edge, edges come in consecutive same-class
/// pairs (A A P P A A ...). A lone member of a pair marks a violation.
fn interleaving_violations(edges: &[ScanEdge]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 1;
    while i < edges.len() {
        if i + 1 < edges.len() && edges[i].kind == edges[i + 1].kind {
            i += 2;
        } else if i + 1 == edges.len() {
            break;
        } else {
            out.push(edges[i].energy);
            i += 1;
        }
    }
    out
}

fn uniform_grid(e_min: f64, e_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(e_min < e_max) || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "scan needs e_min < e_max and n ≥ 2, got [{e_min}, {e_max}] with n = {n}"
        )));
    }
    Ok((0..n).map(|i| e_min + (e_max - e_min) * i as f64 / (n - 1) as f64).collect())
}

/// A band edge located numerically.
#[derive(Debug, Clone, Serialize)]
pub struct NumericEdge {
    pub energy: f64,
    pub discriminant: Complex64,
    pub period_class: PeriodClass,
    /// 2 for a touching root (closed gap), reported once.
    pub multiplicity: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeSearch {
    /// Simple roots of `Δ ∓ 2`: the edges of open gaps, ascending.
    pub edges: Vec<NumericEdge>,
    /// Touching roots, each standing for a gap of zero width.
    pub closed_gaps: Vec<NumericEdge>,
    pub warnings: Vec<String>,
}

impl EdgeSearch {
    pub fn energies(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.energy).collect()
    }

    pub fn classes(&self) -> Vec<PeriodClass> {
        self.edges.iter().map(|e| e.period_class).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeOptions {
    pub samples: usize,
    pub monodromy: MonodromyOptions,
    /// Expected number of open-gap edges, if known.
    pub expected: Option<usize>,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SCAN_POINTS,
            monodromy: MonodromyOptions::default(),
            expected: None,
        }
    }
}

pub fn find_band_edges(pot: &dyn PeriodicPotential, e_min: f64, e_max: f64) -> Result<EdgeSearch> {
    find_band_edges_with(pot, e_min, e_max, &EdgeOptions::default())
}

/// Locates the roots of `Δ(E) ∓ 2` in `[e_min, e_max]`.
///
/// Sign changes on the coarse grid are bisected to [`EDGE_TOL`]. Extrema of
/// `Re Δ` that approach `±2` without crossing on the grid are refined; a
/// narrow gap hidden between samples is split into its two roots, and an
/// extremum within [`TANGENT_TOL`] of `±2` is reported as a closed gap.
pub fn find_band_edges_with(pot: &dyn PeriodicPotential, e_min: f64, e_max: f64, opts: &EdgeOptions) -> Result<EdgeSearch> {
    let scan = discriminant_scan_with(pot, e_min, e_max, opts.samples, &opts.monodromy)?;
    if let Some(bad) = scan.samples.iter().find(|s| s.failure.is_some()) {
        return Err(Error::InvalidArgument(format!(
            "integration failed at E = {}: {}",
            bad.energy,
            bad.failure.as_deref().unwrap_or_default()
        )));
    }
    let delta = |e: f64| -> Result<f64> { Ok(monodromy_with(pot, e, &opts.monodromy)?.discriminant.re) };
    let s = &scan.samples;
    let d: Vec<f64> = s.iter().map(|x| x.discriminant.re).collect();

    let mut edges: Vec<NumericEdge> = Vec::new();
    for i in 0..s.len() - 1 {
        for class in [PeriodClass::P, PeriodClass::A] {
            let level = class.discriminant();
            if (d[i] - level) * (d[i + 1] - level) < 0.0 {
                let e = bisect(&delta, level, s[i].energy, s[i + 1].energy, d[i])?;
                edges.push(finish_edge(pot, e, 1, opts)?);
            }
        }
    }

    for i in 1..s.len() - 1 {
        let is_max = d[i] >= d[i - 1] && d[i] >= d[i + 1];
        let is_min = d[i] <= d[i - 1] && d[i] <= d[i + 1];
        let class = if is_max && d[i] > 1.0 {
            PeriodClass::P
        } else if is_min && d[i] < -1.0 {
            PeriodClass::A
        } else {
            continue;
        };
        let level = class.discriminant();
        // every sample strictly inside the band side of the level
        let inside = |v: f64| (v - level) * level < 0.0;
        if !(inside(d[i - 1]) && inside(d[i]) && inside(d[i + 1])) {
            continue;
        }
        let sense = level.signum();
        let (e_star, d_star) = refine_extremum(&delta, sense, s[i - 1].energy, s[i + 1].energy)?;
        let excess = (d_star - level) * sense;
        if excess.abs() <= TANGENT_TOL {
            edges.push(finish_edge(pot, e_star, 2, opts)?);
        } else if excess > 0.0 {
            let lo = bisect(&delta, level, s[i - 1].energy, e_star, d[i - 1])?;
            let hi = bisect(&delta, level, e_star, s[i + 1].energy, d_star)?;
            edges.push(finish_edge(pot, lo, 1, opts)?);
            edges.push(finish_edge(pot, hi, 1, opts)?);
        }
    }
    edges.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    let (closed_gaps, edges): (Vec<_>, Vec<_>) = edges.into_iter().partition(|e| e.multiplicity == 2);

    let mut warnings = Vec::new();
    if !scan.pt_breaking.is_empty() {
        warnings.push(format!(
            "{} samples have |Im Δ| > {PT_BREAKING_TOL:e} max(1, |Δ|)",
            scan.pt_breaking.len()
        ));
    }
    if let Some(expected) = opts.expected {
        if edges.len() < expected {
            warnings.push(format!(
                "range [{e_min}, {e_max}] too small: found {} edges, expected {expected}",
                edges.len()
            ));
        }
    }
    Ok(EdgeSearch {
        edges,
        closed_gaps,
        warnings,
    })
}

fn finish_edge(pot: &dyn PeriodicPotential, energy: f64, multiplicity: u8, opts: &EdgeOptions) -> Result<NumericEdge> {
    let r = monodromy_with(pot, energy, &opts.monodromy)?;
    Ok(NumericEdge {
        energy,
        discriminant: r.discriminant,
        period_class: classify_periodicity(r.discriminant)?,
        multiplicity,
    })
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: &F, level: f64, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<f64> {
    let side_lo = (f_lo - level).signum();
    while hi - lo > EDGE_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid)? - level).signum() == side_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximizes `sense · f` on `[a, b]`: golden-section search followed by a
/// few Newton steps on the central-difference derivative.
fn refine_extremum<F: Fn(f64) -> Result<f64>>(f: &F, sense: f64, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = sense * f(c)?;
    let mut fd = sense * f(d)?;
    while b - a > 1e-6 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = sense * f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = sense * f(d)?;
        }
    }
    let mut x = 0.5 * (a + b);
    let h = 1e-4;
    for _ in 0..3 {
        let (fm, f0, fp) = (f(x - h)?, f(x)?, f(x + h)?);
        let curvature = (fp - 2.0 * f0 + fm) / (h * h);
        if curvature == 0.0 {
            break;
        }
        let step = ((fp - fm) / (2.0 * h)) / curvature;
        if step.abs() > 1e-3 {
            break;
        }
        x -= step;
    }
    Ok((x, f(x)?))
}

/// `Δ = +2 → P`, `Δ = -2 → A`.
pub fn classify_periodicity(discriminant: Complex64) -> Result<PeriodClass> {
    let dp = (discriminant - 2.0).norm();
    let dm = (discriminant + 2.0).norm();
    if dp <= CLASSIFY_TOL {
        Ok(PeriodClass::P)
    } else if dm <= CLASSIFY_TOL {
        Ok(PeriodClass::A)
    } else {
        Err(Error::AmbiguousPeriodicity(dp.min(dm)))
    }
}

/// Bloch wavenumber from `Δ = 2 cos(kL)`.
///
/// In a band `k = arccos(Re Δ / 2)/L ∈ [0, π/L]`. In a gap the real part is
/// pinned to `0` or `π/L` and `Im k = arccosh(|Re Δ|/2)/L > 0`.
pub fn dispersion_numeric(pot: &dyn PeriodicPotential, energy: f64) -> Result<Complex64> {
    let r = monodromy_with(pot, energy, &MonodromyOptions::default())?;
    Ok(wavenumber_from_discriminant(r.discriminant, pot.period()))
}

pub fn wavenumber_from_discriminant(discriminant: Complex64, period: f64) -> Complex64 {
    let half = discriminant.re / 2.0;
    if half.abs() <= 1.0 {
        Complex64::new(half.acos() / period, 0.0)
    } else {
        let re = if half > 0.0 { 0.0 } else { PI / period };
        Complex64::new(re, half.abs().acosh() / period)
    }
}

/// Total edge count for potentials built from a known family.
pub fn expected_edge_count(spec: &PotentialSpec) -> Option<usize> {
    match spec.kind() {
        Kind::Lame { a, .. } => Some(2 * *a as usize + 1),
        Kind::AssociatedLame { a: 2, b: 1, .. } => Some(5),
        Kind::AssociatedLame { .. } => None,
        Kind::PtTransform { inner, .. }
        | Kind::Shifted { inner, .. }
        | Kind::SusyPartner { inner, .. }
        | Kind::Rescaled { inner, .. } => expected_edge_count(inner),
    }
}

/// `[E_lo, max Re V + a(a+1)m + 5]`, where `E_lo` starts at
/// `min(-1, min Re V - 1)` and is lowered until `Δ(E_lo) > 2`.
pub fn default_energy_range(spec: &PotentialSpec) -> Result<(f64, f64)> {
    let samples = spec.sample(400, 1)?;
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, v)| (lo.min(v.re), hi.max(v.re)));
    let (a, _) = spec.indices();
    let m = spec.modulus().m();
    let e_max = hi + (a * (a + 1)) as f64 * m + 5.0;
    let mut e_min = (lo - 1.0).min(-1.0);
    for _ in 0..20 {
        let d = monodromy_with(spec, e_min, &MonodromyOptions::default())?.discriminant.re;
        if d > 2.0 {
            return Ok((e_min, e_max));
        }
        e_min -= 1.0 + e_min.abs();
    }
    Err(Error::InvalidArgument(format!("could not find an energy below the spectrum of {spec}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::FreeParticle;

    #[test]
    fn free_particle_scan_and_classes() {
        let free = FreeParticle { period: PI };
        let scan = discriminant_scan(&free, 0.05, 9.5, 200).unwrap();
        for s in &scan.samples {
            assert!((s.discriminant.re - 2.0 * (s.energy.sqrt() * PI).cos()).abs() < 1e-9);
        }
        let found = find_band_edges(&free, 0.5, 17.0).unwrap();
        // every gap is closed: touching roots at n² for n = 1..4, alternating A, P
        assert!(found.edges.is_empty());
        let classes: Vec<_> = found.closed_gaps.iter().map(|e| e.period_class).collect();
        assert_eq!(classes, vec![PeriodClass::A, PeriodClass::P, PeriodClass::A, PeriodClass::P]);
        for (n, e) in found.closed_gaps.iter().enumerate() {
            assert!((e.energy - ((n + 1) * (n + 1)) as f64).abs() < 1e-6, "{}", e.energy);
        }
    }

    #[test]
    fn a1_pt_edges() {
        let spec = PotentialSpec::lame(1, 0.75).unwrap().pt_transform(0.5).unwrap().shift_to_zero().unwrap();
        let found = find_band_edges(&spec, -1.0, 6.0).unwrap();
        let e = found.energies();
        assert_eq!(e.len(), 3);
        // the finite-gap potential has only closed gaps above the top edge
        assert!(!found.closed_gaps.is_empty());
        assert!(found.closed_gaps.iter().all(|g| g.energy > 1.0));
        for (x, y) in e.iter().zip([0.0, 0.75, 1.0]) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn wavenumber_conventions() {
        let l = 2.0;
        assert_eq!(wavenumber_from_discriminant(Complex64::new(2.0, 0.0), l), Complex64::new(0.0, 0.0));
        assert!((wavenumber_from_discriminant(Complex64::new(-2.0, 0.0), l).re - PI / l).abs() < 1e-15);
        let gap = wavenumber_from_discriminant(Complex64::new(-3.0, 0.0), l);
        assert!(gap.im > 0.0 && (gap.re - PI / l).abs() < 1e-15);
    }
}
