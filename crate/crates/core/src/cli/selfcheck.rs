use std::f64::consts::PI;

use num_complex::Complex64;

use super::{EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, EXIT_VERIFY};
use crate::elliptic::{jacobi_complex, jacobi_real, Modulus, ThetaBundle};
use crate::error::Result;
use crate::floquet::{default_energy_range, find_band_edges_with, monodromy, EdgeOptions};
use crate::potentials::PotentialSpec;
use crate::spectra::{
    closed_form_edges, modulus_duality_check, pt_duality_check, sum_rule_check, BandEdge, EdgeSource,
};

struct Check {
    name: String,
    value: f64,
    tolerance: f64,
}

/// A check whose tolerance encodes the precision of a printed constant is
/// not tightened by `--tol`.
struct Suite {
    checks: Vec<Check>,
    cap: Option<f64>,
}

impl Suite {
    fn add(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let tolerance = self.cap.map_or(tolerance, |c| tolerance.min(c));
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance,
        });
    }

    fn add_fixed(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            tolerance,
        });
    }
}

pub(super) fn run(m: f64, beta: f64, tol: Option<f64>) -> i32 {
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            eprintln!("configuration error: --tol must be positive, got {t}");
            return EXIT_CONFIG;
        }
    }
    let validated = PotentialSpec::lame(3, m)
        .and_then(|s| s.pt_transform(beta))
        .and_then(|_| PotentialSpec::associated_lame(2, 1, m)?.pt_transform(beta));
    if let Err(e) = validated {
        eprintln!("configuration error: {e}");
        return EXIT_CONFIG;
    }

    let mut suite = Suite { checks: Vec::new(), cap: tol };
    if let Err(e) = populate(&mut suite, m, beta) {
        eprintln!("error: {e}");
        return EXIT_FAILURE;
    }

    let width = suite.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut failures = 0;
    println!("# selfcheck m={m} beta={beta}");
    for c in &suite.checks {
        let ok = c.value <= c.tolerance;
        if !ok {
            failures += 1;
        }
        println!(
            "{}  {:<width$}  {:.3e}  (tol {:.1e})",
            if ok { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.tolerance
        );
    }
    println!("# {} checks, {} failed", suite.checks.len(), failures);
    if failures == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}

fn populate(suite: &mut Suite, m: f64, beta: f64) -> Result<()> {
    let md = Modulus::new(m)?;

    let mut worst = 0.0f64;
    for &mm in &[0.1, 0.3, 0.5, 0.75, 0.9] {
        let kk = Modulus::new(mm)?;
        for i in 0..50 {
            let z = Complex64::new(-2.0 * kk.k() + 4.0 * kk.k() * i as f64 / 49.0, 0.37 * kk.k_prime());
            let v = jacobi_complex(z, mm)?;
            worst = worst.max(v.pythagorean_defect().norm()).max(v.modulus_defect(mm).norm());
        }
    }
    suite.add("jacobi identities sn²+cn²=1, dn²+m sn²=1", worst, 1e-11);

    let kp = md.k_prime();
    suite.add("K'(m) = K(1-m)", (kp - Modulus::new(1.0 - m)?.k()).abs(), 1e-13);
    let three_quarters = 2.0 * Modulus::new(0.75)?.k_prime();
    suite.add_fixed("2K'(0.75) = 3.3715", (three_quarters - 3.3715).abs(), 5e-5);

    let mut worst = 0.0f64;
    for i in 0..40 {
        let x = -2.0 + 4.0 * i as f64 / 39.0;
        let lhs = m.sqrt() * jacobi_real(x, m)?.sn;
        let rhs = jacobi_complex(Complex64::new(kp, x + md.k()), 1.0 - m)?.dn;
        worst = worst.max((lhs + rhs).norm());
    }
    suite.add("sqrt(m) sn(x,m) = -dn(ix+K'+iK, 1-m)", worst, 1e-10);

    let bundle = ThetaBundle::new(md);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let u = Complex64::new(beta, -1.0 + 0.1 * i as f64);
        let h = bundle.eta(u);
        let shifted = bundle.eta(u + Complex64::new(0.0, 2.0 * kp));
        let multiplier = -(Complex64::new(0.0, -PI / md.k()) * u).exp() / md.nome();
        worst = worst.max((shifted - multiplier * h).norm() / shifted.norm());
    }
    suite.add("H(u + 2iK') = -q^-1 exp(-iπu/K) H(u)", worst, 1e-10);

    for (label, spec) in [
        ("a=1", PotentialSpec::lame(1, m)?.pt_transform(beta)?),
        ("a=3", PotentialSpec::lame(3, m)?.pt_transform(beta)?),
        ("(a,b)=(2,1)", PotentialSpec::associated_lame(2, 1, m)?.pt_transform(beta)?),
    ] {
        let edges = closed_form_edges(&spec)?;
        suite.add(format!("PT {label} eigenfunction ODE residual"), max_residual(&spec, &edges)?, 1e-8);
        let (lo, hi) = default_energy_range(&spec)?;
        let opts = EdgeOptions {
            expected: Some(edges.len()),
            ..EdgeOptions::default()
        };
        let found = find_band_edges_with(&spec, lo, hi, &opts)?;
        let diff = if found.edges.len() == edges.len() {
            edges
                .iter()
                .zip(&found.edges)
                .map(|(a, n)| {
                    if a.period_class == n.period_class {
                        (a.energy - n.energy).abs()
                    } else {
                        f64::INFINITY
                    }
                })
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        suite.add(format!("PT {label} closed-form edges vs Floquet"), diff, 1e-6);
    }

    for a in [1, 3] {
        let r = modulus_duality_check(a, m, EdgeSource::ClosedForm)?;
        suite.add(format!("a={a} E_j(m) = a(a+1) - E_(2a-j)(1-m)"), r.max_violation, r.tolerance);
        let r = pt_duality_check(a, m, beta, EdgeSource::ClosedForm)?;
        suite.add(format!("a={a} E^PT_j(m) = E_j(1-m) - a(a+1)"), r.max_violation, r.tolerance);
        let r = sum_rule_check(a, EdgeSource::ClosedForm)?;
        suite.add(format!("a={a} sum rule at m=1/2"), r.max_violation, r.tolerance);

        let pt = PotentialSpec::lame(a, m)?.pt_transform(beta)?;
        let dual = PotentialSpec::lame(a, 1.0 - m)?;
        let c = f64::from(a * (a + 1));
        let mut worst = 0.0f64;
        for i in 0..8 {
            let e = -c - 1.0 + (c + 6.0) * i as f64 / 7.0;
            let d1 = monodromy(&pt, e)?.discriminant;
            let d2 = monodromy(&dual, e + c)?.discriminant;
            worst = worst.max((d1 - d2).norm());
        }
        suite.add(format!("a={a} Δ^PT(E,m) = Δ(E+a(a+1),1-m)"), worst, 1e-6);
    }

    for (label, base) in [
        ("a=1", PotentialSpec::lame(1, m)?.pt_transform(beta)?),
        ("a=3", PotentialSpec::lame(3, m)?.pt_transform(beta)?),
        ("(a,b)=(2,1)", PotentialSpec::associated_lame(2, 1, m)?.pt_transform(beta)?),
    ] {
        let minus = base.shift_to_zero()?;
        let plus = minus.susy_partner()?;
        let e_minus = floquet_edges(&minus)?;
        let e_plus = floquet_edges(&plus)?;
        let diff = if e_minus.len() == e_plus.len() {
            e_minus.iter().zip(&e_plus).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        suite.add(format!("PT {label} SUSY partners isospectral (Floquet)"), diff, 1e-6);
    }
    Ok(())
}

fn floquet_edges(spec: &PotentialSpec) -> Result<Vec<f64>> {
    let (lo, hi) = default_energy_range(spec)?;
    let opts = EdgeOptions {
        expected: crate::floquet::expected_edge_count(spec),
        ..EdgeOptions::default()
    };
    Ok(find_band_edges_with(spec, lo, hi, &opts)?.energies())
}

/// Largest relative residual `|-ψ'' + Vψ - Eψ| / (|ψ''| + |Vψ| + |Eψ|)` on
/// 40 points of one period.
fn max_residual(spec: &PotentialSpec, edges: &[BandEdge]) -> Result<f64> {
    let l = spec.period();
    let mut worst = 0.0f64;
    for edge in edges {
        let Some(f) = &edge.eigenfunction else { continue };
        for i in 0..40 {
            let x = l * (i as f64 + 0.5) / 40.0;
            let j = f.jet(Complex64::new(x, 0.0))?;
            let v = spec.eval(x)?;
            let scale = j.d2.norm() + (v * j.value).norm() + (edge.energy * j.value).norm();
            let r = (-j.d2 + v * j.value - edge.energy * j.value).norm() / scale.max(f64::MIN_POSITIVE);
            worst = worst.max(r);
        }
    }
    Ok(worst)
}
