use num_complex::Complex64;
use serde::Serialize;

use super::tableau::{A, B, C, E3, E5, STAGES};
use crate::error::{Error, Result};

pub(crate) const DIM: usize = 4;
pub(crate) type State = [Complex64; DIM];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest normalized local error estimate among accepted steps.
    pub max_error: f64,
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` with the explicit DOP853
/// scheme and its combined 5th/3rd-order error estimate.
pub(crate) fn integrate<F>(mut f: F, x0: f64, x1: f64, y0: State, rtol: f64, atol: f64) -> Result<(State, IntegratorStats)>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    let mut stats = IntegratorStats::default();
    let span = x1 - x0;
    let mut x = x0;
    let mut y = y0;
    let mut h = 0.01 * span;
    let mut k = [[Complex64::new(0.0, 0.0); DIM]; STAGES + 1];
    k[0] = f(x, &y)?;
    stats.evaluations += 1;
    let mut last_rejected = false;

    while x < x1 {
        if h < 1e-14 * x.abs().max(1.0) {
            return Err(Error::StepUnderflow { x });
        }
        let h_step = h.min(x1 - x);
        for s in 1..STAGES {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for d in 0..DIM {
                        ys[d] += kj[d] * (a * h_step);
                    }
                }
            }
            k[s] = f(x + C[s] * h_step, &ys)?;
        }
        let mut y_new = y;
        for (s, ks) in k.iter().enumerate().take(STAGES) {
            if B[s] != 0.0 {
                for d in 0..DIM {
                    y_new[d] += ks[d] * (B[s] * h_step);
                }
            }
        }
        k[STAGES] = f(x + h_step, &y_new)?;
        stats.evaluations += STAGES;

        let err = error_norm(&k, &y, &y_new, h_step, rtol, atol);
        if !err.is_finite() {
            h = 0.5 * h_step;
            last_rejected = true;
            stats.rejected += 1;
            continue;
        }
        if err < 1.0 {
            let mut factor = if err == 0.0 { MAX_FACTOR } else { MAX_FACTOR.min(SAFETY * err.powf(ERROR_EXPONENT)) };
            if last_rejected {
                factor = factor.min(1.0);
            }
            x = if x1 - x <= h_step { x1 } else { x + h_step };
            y = y_new;
            k[0] = k[STAGES];
            h = h_step * factor;
            last_rejected = false;
            stats.accepted += 1;
            stats.max_error = stats.max_error.max(err);
        } else {
            h = h_step * MIN_FACTOR.max(SAFETY * err.powf(ERROR_EXPONENT));
            last_rejected = true;
            stats.rejected += 1;
        }
    }
    Ok((y, stats))
}

fn error_norm(k: &[State; STAGES + 1], y: &State, y_new: &State, h: f64, rtol: f64, atol: f64) -> f64 {
    let mut e5 = 0.0;
    let mut e3 = 0.0;
    for d in 0..DIM {
        let scale = atol + rtol * y[d].norm().max(y_new[d].norm());
        let mut s5 = Complex64::new(0.0, 0.0);
        let mut s3 = Complex64::new(0.0, 0.0);
        for (s, ks) in k.iter().enumerate() {
            s5 += ks[d] * E5[s];
            s3 += ks[d] * E3[s];
        }
        e5 += (s5 / scale).norm_sqr();
        e3 += (s3 / scale).norm_sqr();
    }
    if e5 == 0.0 && e3 == 0.0 {
        return 0.0;
    }
    h.abs() * e5 / ((e5 + 0.01 * e3) * DIM as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        // y'' = -y, solutions cos and sin, integrated over 10 units.
        let f = |_x: f64, y: &State| Ok([y[1], -y[0], y[3], -y[2]]);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let (y, stats) = integrate(f, 0.0, 10.0, [one, zero, zero, one], 1e-11, 1e-13).unwrap();
        assert!((y[0] - 10f64.cos()).norm() < 1e-9);
        assert!((y[2] - 10f64.sin()).norm() < 1e-9);
        assert!(stats.accepted > 5 && stats.accepted < 500);
    }

    #[test]
    fn exponential_growth_with_complex_rate() {
        let rate = Complex64::new(0.3, 1.7);
        let f = move |_x: f64, y: &State| Ok([y[0] * rate, y[1] * rate, y[2], y[3]]);
        let one = Complex64::new(1.0, 0.0);
        let (y, _) = integrate(f, 0.0, 2.0, [one; 4], 1e-12, 1e-14).unwrap();
        assert!((y[0] - (rate * 2.0).exp()).norm() < 1e-10 * (rate * 2.0).exp().norm());
    }

    #[test]
    fn finite_time_blowup_underflows() {
        // y' = y² with y(0) = 1 blows up at x = 1
        let f = |_x: f64, y: &State| Ok([y[0] * y[0], y[1], y[2], y[3]]);
        let one = Complex64::new(1.0, 0.0);
        let err = integrate(f, 0.0, 2.0, [one; 4], 1e-11, 1e-13).unwrap_err();
        match err {
            Error::StepUnderflow { x } => assert!((x - 1.0).abs() < 1e-3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
